# services/monopole/gauge.py
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np


@dataclass(frozen=True)
class GaugeConfig:
    """Статическая конфигурация Хиггса и калибровочного поля (A^a_0 = 0).

    higgs: точки (..., 3) -> phi^a (..., 3)
    gauge: точки (..., 3) -> A^a_i (..., 3, 3), первый индекс - изоспин
    lam хранится только как метаданные.
    """

    higgs: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    gauge: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    g: float = 1.0
    vev: float = 1.0
    lam: float = 0.0
    winding: int = 0
    core_radius: float = 1.0
    params: Dict[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"Константа связи g должна быть положительной: {self.g}")
        if self.core_radius <= 0:
            raise ValueError(f"Радиус ядра должен быть положительным: {self.core_radius}")

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "vev": self.vev,
            "lambda": self.lam,
            "winding": self.winding,
            "core_radius": self.core_radius,
            "params": self.params,
        }
