# services/fields/profiles.py
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np

logger = logging.getLogger(__name__)


class ProfileKind(str, Enum):
    SKYRME_EXP = "skyrme-exp"
    SKYRME_ARCTAN = "skyrme-arctan"
    HIGGS_TANH = "higgs-tanh"
    GAUGE_BPS = "gauge-bps"
    CONSTANT = "constant"


@dataclass(frozen=True)
class RadialProfile:
    """Радиальная функция omega(r), F(r) или W(r) с известными пределами"""

    kind: ProfileKind
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", ProfileKind(self.kind))
        defaults = _DEFAULTS[self.kind]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValueError(f"Профиль {self.kind.value}: неизвестные параметры {sorted(unknown)}")
        merged = {**defaults, **{k: float(v) for k, v in self.params.items()}}
        if merged.get("a", 1.0) <= 0:
            raise ValueError(f"Масштаб профиля должен быть положительным: a={merged['a']}")
        if self.kind == ProfileKind.GAUGE_BPS and merged["g"] <= 0:
            raise ValueError(f"Константа связи должна быть положительной: g={merged['g']}")
        object.__setattr__(self, "params", merged)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def scale(self) -> float:
        return self.params.get("a", 1.0)

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        p = self.params
        a = p.get("a", 1.0)
        if self.kind == ProfileKind.SKYRME_EXP:
            return np.pi * np.exp(-r / a)
        if self.kind == ProfileKind.SKYRME_ARCTAN:
            with np.errstate(over="ignore"):
                return 4.0 * np.arctan(np.exp(-r / a))
        if self.kind == ProfileKind.HIGGS_TANH:
            return p["F"] * np.tanh(r / a)
        if self.kind == ProfileKind.GAUGE_BPS:
            return self._gauge_bps(r, a, p["g"])
        return np.full_like(r, p["value"])

    @staticmethod
    def _gauge_bps(r: np.ndarray, a: float, g: float) -> np.ndarray:
        # 1/r - 1/(a sinh(r/a)) = r/(6a^2) + O(r^3) у нуля
        x = r / a
        small = np.abs(x) < 1e-3
        safe = np.where(small, 1.0, x)
        with np.errstate(over="ignore"):
            regular = (1.0 / safe - 1.0 / np.sinh(safe)) / a
        series = (x / 6.0 - 7.0 * x ** 3 / 360.0) / a
        return np.where(small, series, regular) / g

    def at_origin(self) -> float:
        return float(self(0.0))

    def at_infinity(self) -> float:
        p = self.params
        if self.kind in (ProfileKind.SKYRME_EXP, ProfileKind.SKYRME_ARCTAN, ProfileKind.GAUGE_BPS):
            return 0.0
        if self.kind == ProfileKind.HIGGS_TANH:
            return p["F"]
        return p["value"]

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "params": dict(self.params)}


_DEFAULTS: Dict[ProfileKind, Dict[str, float]] = {
    ProfileKind.SKYRME_EXP: {"a": 1.0},
    ProfileKind.SKYRME_ARCTAN: {"a": 1.0},
    ProfileKind.HIGGS_TANH: {"a": 1.0, "F": 1.0},
    ProfileKind.GAUGE_BPS: {"a": 1.0, "g": 1.0},
    ProfileKind.CONSTANT: {"value": 0.0},
}


def profile_library(name: str, **params: float) -> RadialProfile:
    """Именованное семейство профилей

    Args:
        name: skyrme-exp, skyrme-arctan, higgs-tanh, gauge-bps или constant
        **params: параметры семейства (a, F, g, value)

    Returns:
        RadialProfile: профиль
    """
    try:
        kind = ProfileKind(name)
    except ValueError:
        known = ", ".join(k.value for k in ProfileKind)
        raise ValueError(f"Неизвестный профиль '{name}', доступны: {known}")
    return RadialProfile(kind, params)


def skyrme_tail_fraction(profile: RadialProfile, radius: float) -> float:
    """Доля барионного заряда ежа вне шара радиуса radius.

    Для профиля f(r) с f(0)=pi, f(inf)=0 заряд вне шара равен
    (f - sin(f)cos(f))/pi при f = f(radius).
    """
    f = float(profile(radius))
    return float((f - np.sin(f) * np.cos(f)) / np.pi)


def parse_profile(text: Optional[str], default: str) -> RadialProfile:
    """Разбор профиля из строки "name" или "name:a=2,F=1" """
    text = (text or default).strip()
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, _, value = item.partition("=")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ValueError(f"Некорректный параметр профиля '{item}'")
    return profile_library(name.strip(), **params)
