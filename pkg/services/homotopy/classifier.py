# services/homotopy/classifier.py
import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

logger = logging.getLogger(__name__)


class SpaceFamily(str, Enum):
    SPHERE = "S"
    PROJECTIVE = "RP"
    SO3 = "SO3"
    CP1 = "CP1"
    SU2_MOD_U1 = "SU2modU1"
    SU2_MOD_SO3 = "SU2modSO3"


class GroupLabel(str, Enum):
    Z = "Z"
    Z2 = "Z2"
    TRIVIAL = "trivial"
    UNKNOWN = "unknown"


_PATTERN = re.compile(r"^(S|RP)(\d+)$")


@dataclass(frozen=True)
class OrderSpace:
    """Пространство параметра порядка: S^k, RP^k или одно из фиксированных"""

    family: SpaceFamily
    k: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "family", SpaceFamily(self.family))
        parametric = self.family in (SpaceFamily.SPHERE, SpaceFamily.PROJECTIVE)
        if parametric and (self.k is None or self.k < 1):
            raise ValueError(f"Для {self.family.value}^k нужна размерность k >= 1, получено {self.k}")
        if not parametric and self.k is not None:
            raise ValueError(f"Пространство {self.family.value} не имеет параметра размерности")

    @classmethod
    def parse(cls, text: str) -> "OrderSpace":
        """Разбор имени вида S2, RP3, SO3, CP1, SU2modU1, SU2modSO3"""
        name = text.strip()
        match = _PATTERN.match(name)
        if match:
            return cls(SpaceFamily(match.group(1)), int(match.group(2)))
        try:
            return cls(SpaceFamily(name))
        except ValueError:
            known = "S<k>, RP<k>, " + ", ".join(f.value for f in list(SpaceFamily)[2:])
            raise ValueError(f"Неизвестное пространство параметра порядка '{text}', доступны: {known}")

    @property
    def name(self) -> str:
        return f"{self.family.value}{self.k}" if self.k is not None else self.family.value


@dataclass(frozen=True)
class Classification:
    space: OrderSpace
    n: int
    group: GroupLabel
    source_equation: str

    def to_dict(self) -> dict:
        return {
            "space": self.space.name,
            "n": self.n,
            "group": self.group.value,
            "source_equation": self.source_equation,
        }


def probe_dimension(m: int, d: int) -> int:
    """Размерность сферы, охватывающей дефект размерности d в среде размерности m: n = m - d - 1"""
    if m < 1:
        raise ValueError(f"Размерность среды должна быть положительной: m={m}")
    if not 0 <= d <= m - 1:
        raise ValueError(f"Размерность дефекта должна удовлетворять 0 <= d <= m-1: m={m}, d={d}")
    return m - d - 1


def _lookup(space: OrderSpace, n: int) -> Tuple[GroupLabel, str]:
    family, k = space.family, space.k
    if family == SpaceFamily.SPHERE:
        if n == k:
            return GroupLabel.Z, "pi_n(S^n) = Z"
        if n == 1 and k >= 2:
            return GroupLabel.TRIVIAL, "pi_1(S^n) = 0 for n >= 2"
    elif family == SpaceFamily.PROJECTIVE:
        if n == k and k >= 2:
            return GroupLabel.Z, "pi_n(RP^n) = pi_n(S^n) = Z for n >= 2"
        if n == 1 and k == 2:
            return GroupLabel.Z2, "pi_1(RP^2) = Z_2"
        if n == 1 and k == 3:
            return GroupLabel.Z2, "pi_1(RP^3) = pi_1(S^3/S^0) = Z_2"
    elif family == SpaceFamily.SO3:
        if n == 1:
            return GroupLabel.Z2, "pi_1(SO(3)) = Z_2"
        if n == 3:
            return GroupLabel.Z, "pi_3(SO(3)) = pi_3(RP^3) = Z"
    elif family == SpaceFamily.CP1:
        if n == 2:
            return GroupLabel.Z, "pi_2(CP^1) = pi_2(S^3/S^1) = pi_2(S^2) = Z"
    elif family == SpaceFamily.SU2_MOD_U1:
        if n == 2:
            return GroupLabel.Z, "pi_2(SU(2)/U(1)) = pi_1(U(1)) = Z"
    elif family == SpaceFamily.SU2_MOD_SO3:
        if n == 2:
            return GroupLabel.Z2, "pi_2(SU(2)/SO(3)) = pi_1(SO(3)) = Z_2"
    return GroupLabel.UNKNOWN, ""


def classify(space, n: int) -> Classification:
    """Группа pi_n(space) из таблицы известных значений; вне таблицы - unknown

    Args:
        space: OrderSpace или его имя
        n: порядок гомотопической группы

    Returns:
        Classification: группа и формула-источник
    """
    if not isinstance(space, OrderSpace):
        space = OrderSpace.parse(str(space))
    if n < 0:
        raise ValueError(f"Порядок гомотопической группы должен быть неотрицательным: {n}")
    group, source = _lookup(space, n)
    if group == GroupLabel.UNKNOWN:
        logger.info(f"pi_{n}({space.name}) отсутствует в таблице")
    return Classification(space, n, group, source)


def classify_defect(m: int, d: int, space) -> Classification:
    """Классификация дефекта размерности d в среде размерности m"""
    return classify(space, probe_dimension(m, d))
