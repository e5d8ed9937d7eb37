# services/charges/report.py
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

logger = logging.getLogger(__name__)


class ChargeMethod(str, Enum):
    CONTOUR = "contour"
    SURFACE_FLUX = "surface-flux"
    VOLUME_DENSITY = "volume-density"
    ASYMPTOTIC_PHASE = "asymptotic-phase"


def round_half_away(x: float) -> int:
    """Округление к ближайшему целому, половины - от нуля"""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


@dataclass(frozen=True)
class ChargeReport:
    """Результат вычисления топологического заряда.

    value измеряется в единицах unit (1 или 1/g): nearest_integer * unit -
    ближайшее квантованное значение.
    """

    quantity: str
    value: float
    nearest_integer: int
    method: ChargeMethod
    grid: Dict[str, object]
    error_estimate: float
    unit: float = 1.0
    details: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "method", ChargeMethod(self.method))
        if not math.isfinite(self.value):
            raise ValueError(f"Значение заряда {self.quantity} не конечно: {self.value}")
        if self.error_estimate < 0:
            raise ValueError(f"Оценка ошибки не может быть отрицательной: {self.error_estimate}")

    @classmethod
    def build(cls, quantity: str, value: float, method: ChargeMethod, grid: Optional[dict] = None,
              error_estimate: Optional[float] = None, unit: float = 1.0,
              details: Optional[dict] = None) -> "ChargeReport":
        """Отчёт с вычисленным ближайшим целым и оценкой ошибки по умолчанию"""
        value = float(value)
        nearest = round_half_away(value / unit)
        distance = abs(value - nearest * unit)
        error = distance if error_estimate is None else max(float(error_estimate), 0.0)
        report = cls(quantity, value, nearest, method, dict(grid or {}), error,
                     float(unit), dict(details or {}))
        if not report.quantized:
            logger.warning(f"{quantity}: значение {value:.6g} не квантовано (ошибка {error:.3e})")
        return report

    @property
    def distance(self) -> float:
        """Расстояние до ближайшего квантованного значения в единицах unit"""
        return abs(self.value / self.unit - self.nearest_integer)

    @property
    def quantized(self) -> bool:
        return self.distance < 0.5 and self.error_estimate / self.unit < 0.5

    def within(self, tolerance: float) -> bool:
        return self.distance * self.unit < tolerance

    def to_dict(self) -> dict:
        result = {
            "quantity": self.quantity,
            "value": self.value,
            "nearest_integer": self.nearest_integer,
            "method": self.method.value,
            "grid": self.grid,
            "error_estimate": self.error_estimate,
        }
        if self.unit != 1.0:
            result["unit"] = self.unit
        if self.details:
            result["details"] = self.details
        return result
