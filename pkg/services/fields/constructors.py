# services/fields/constructors.py
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from services.fields.profiles import RadialProfile, profile_library
from services.grid.lattice import Grid, VectorField
from services.grid.operators import EPS3
from services.monopole.gauge import GaugeConfig
from utils.errors import SingularPointError, FieldError

logger = logging.getLogger(__name__)

# точки ближе этого расстояния к особой точке считаются особыми
SINGULAR_RADIUS = 1e-12
UNIT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AnalyticField:
    """Поле единичных векторов, заданное замыканием над координатами точки.

    func принимает точки формы (..., dim) и возвращает значения (..., components).
    """

    name: str
    dim: int
    components: int
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    winding: int = 0
    singular_points: Tuple[Tuple[float, ...], ...] = ()
    params: Dict[str, object] = field(default_factory=dict, compare=False)

    def singular_mask(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        mask = np.zeros(points.shape[:-1], dtype=bool)
        for sp in self.singular_points:
            mask |= np.linalg.norm(points - np.asarray(sp), axis=-1) < SINGULAR_RADIUS
        return mask

    def _check_points(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dim:
            raise FieldError(f"Поле {self.name} задано в {self.dim} измерениях, точки {points.shape}")
        return points

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Значения в точках; особая точка среди них - ошибка"""
        points = self._check_points(points)
        mask = self.singular_mask(points)
        if np.any(mask):
            bad = points[mask][0] if points.ndim > 1 else points
            raise SingularPointError(f"Поле {self.name} не определено в точке {bad}", point=bad)
        return self.func(points)

    __call__ = evaluate

    def evaluate_masked(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Значения и маска особых точек; в особых точках стоит единичный вектор-заглушка"""
        points = self._check_points(points)
        mask = self.singular_mask(points)
        with np.errstate(invalid="ignore", divide="ignore"):
            values = np.asarray(self.func(points), dtype=float)
        if np.any(mask):
            placeholder = np.zeros(self.components)
            placeholder[-1] = 1.0
            values = np.where(mask[..., None], placeholder, values)
        return values, mask

    def sample(self, grid: Grid) -> VectorField:
        if grid.dim != self.dim:
            raise FieldError(f"Поле {self.name} ({self.dim}D) нельзя разместить на решётке {grid.dim}D")
        values, mask = self.evaluate_masked(grid.mesh())
        norm_error = np.max(np.abs(np.sum(values ** 2, axis=-1) - 1.0))
        if norm_error > UNIT_TOLERANCE:
            logger.warning(f"Поле {self.name}: отклонение |n|^2 от 1 равно {norm_error:.3e}")
        logger.debug(f"Поле {self.name} размещено на решётке {grid.n}, особых узлов: {int(mask.sum())}")
        return VectorField(grid, values, mask if np.any(mask) else None)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "components": self.components,
            "winding": self.winding,
            "params": self.params,
        }


# Угловые функции для рекурсивной конструкции n_d

@dataclass(frozen=True)
class PolarAngle:
    """Гиперсферический полярный угол первых level координат относительно оси level"""

    level: int

    def __call__(self, points: np.ndarray) -> np.ndarray:
        head = points[..., : self.level]
        norm = np.linalg.norm(head, axis=-1)
        ratio = np.divide(head[..., -1], norm, out=np.ones_like(norm), where=norm > 0)
        return np.arccos(np.clip(ratio, -1.0, 1.0))

    def describe(self) -> str:
        return f"polar-{self.level}"


@dataclass(frozen=True)
class RadialAngle:
    """Угол omega(r), r - модуль всей точки"""

    profile: RadialProfile

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.profile(np.linalg.norm(points, axis=-1))

    def describe(self) -> str:
        return self.profile.name

    @property
    def at_origin(self) -> float:
        return self.profile.at_origin()


@dataclass(frozen=True)
class ConstantAngle:
    value: float

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.full(points.shape[:-1], float(self.value))

    def describe(self) -> str:
        return f"const-{self.value:g}"

    @property
    def at_origin(self) -> float:
        return float(self.value)


AngleFunction = Union[PolarAngle, RadialAngle, ConstantAngle, Callable[[np.ndarray], np.ndarray]]


def polar_angle(level: int = 3) -> PolarAngle:
    return PolarAngle(level)


def constant_angle(value: float) -> ConstantAngle:
    return ConstantAngle(value)


def azimuth(points: np.ndarray) -> np.ndarray:
    return np.arctan2(points[..., 1], points[..., 0])


def _origin(dim: int) -> Tuple[Tuple[float, ...], ...]:
    return (tuple(0.0 for _ in range(dim)),)


def vortex(N: int, phase: Optional[Callable[[np.ndarray], np.ndarray]] = None, dim: int = 2) -> AnalyticField:
    """Вихрь n_v = (cos N phi, sin N phi).

    Args:
        N: число намотки
        phase: phi(точка); по умолчанию atan2(y, x) в плоскости
        dim: размерность точек (для динамического случая точки (t, x))
    """
    N = int(N)
    static = phase is None
    phi = azimuth if static else phase

    def func(points: np.ndarray) -> np.ndarray:
        angle = N * phi(points)
        return np.stack([np.cos(angle), np.sin(angle)], axis=-1)

    singular = _origin(dim) if static and N != 0 else ()
    return AnalyticField("vortex", dim, 2, func, winding=N, singular_points=singular,
                         params={"N": N, "static": static})


def n3_components(N: int, theta, phi) -> np.ndarray:
    """(sin t cos N phi, sin t sin N phi, cos t) поэлементно"""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([
        np.sin(theta) * np.cos(N * phi),
        np.sin(theta) * np.sin(N * phi),
        np.cos(theta) * np.ones_like(phi),
    ], axis=-1)


def n3(N: int, theta: Optional[AngleFunction] = None,
       phi: Optional[Callable[[np.ndarray], np.ndarray]] = None, dim: int = 3) -> AnalyticField:
    """Анизотропное поле n_3 с намоткой N по азимуту"""
    N = int(N)
    theta = theta or PolarAngle(3)
    phi = phi or azimuth

    def func(points: np.ndarray) -> np.ndarray:
        return n3_components(N, theta(points), phi(points))

    pinned = isinstance(theta, (ConstantAngle, RadialAngle)) and abs(np.sin(theta.at_origin)) < UNIT_TOLERANCE
    regular = pinned or (N == 0 and isinstance(theta, ConstantAngle))
    return AnalyticField("n3", dim, 3, func, winding=N,
                         singular_points=() if regular else _origin(dim),
                         params={"N": N, "theta": getattr(theta, "describe", lambda: "custom")()})


def hedgehog(dim: int = 3) -> AnalyticField:
    """Ёж n_h = r/|r| в 3 или 4 измерениях"""
    if dim == 3:
        field_ = n3(1)
    elif dim == 4:
        field_ = nd(4, [PolarAngle(3), PolarAngle(4)], 1)
    else:
        raise ValueError(f"Ёж поддерживается в 3 и 4 измерениях, получено {dim}")
    return AnalyticField("hedgehog", field_.dim, field_.components, field_.func, winding=1,
                         singular_points=field_.singular_points, params={"dim": dim})


def nd(d: int, angles: Sequence[AngleFunction], N: int, point_dim: Optional[int] = None) -> AnalyticField:
    """Рекурсивная конфигурация n_d = (sin omega_d n_{d-1}, cos omega_d).

    Args:
        d: число компонент поля (3 или 4)
        angles: угловые функции уровней 3..d (по одной на уровень)
        N: намотка базового вихря n_2
        point_dim: размерность точек (по умолчанию d)

    Returns:
        AnalyticField: поле из d компонент
    """
    if d < 3:
        raise ValueError(f"Рекурсия начинается с d=3, получено d={d}")
    if d > 4:
        raise ValueError(f"Размерность d={d} не поддерживается (максимум 4)")
    angles = list(angles)
    if len(angles) != d - 2:
        raise ValueError(f"Для d={d} нужно {d - 2} угловых функций, передано {len(angles)}")
    N = int(N)
    point_dim = point_dim or d
    angles = [RadialAngle(a) if isinstance(a, RadialProfile) else a for a in angles]

    def func(points: np.ndarray) -> np.ndarray:
        phi = N * azimuth(points)
        current = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        for omega in angles:
            w = omega(points)
            current = np.concatenate([np.sin(w)[..., None] * current, np.cos(w)[..., None]], axis=-1)
        return current

    # в нуле поле регулярно, если внешний угол даёт полюс
    top = angles[-1]
    top_pinned = isinstance(top, (ConstantAngle, RadialAngle)) and abs(np.sin(top.at_origin)) < UNIT_TOLERANCE
    regular = top_pinned or (N == 0 and all(isinstance(a, ConstantAngle) for a in angles))
    return AnalyticField(f"n{d}", point_dim, d, func, winding=N,
                         singular_points=() if regular else _origin(point_dim),
                         params={"N": N, "angles": [getattr(a, "describe", lambda: "custom")() for a in angles]})


def skyrme_field(profile: RadialProfile, N: int = 1) -> AnalyticField:
    """Поле n_4 = (sin omega(r) n_3, cos omega(r)) над R^3, кватернион SU(2)"""
    base = nd(4, [PolarAngle(3), RadialAngle(profile)], N, point_dim=3)
    if not base.singular_points:
        logger.debug(f"Поле Скирма с профилем {profile.name} регулярно в нуле")
    return AnalyticField("skyrme", 3, 4, base.func, winding=N,
                         singular_points=base.singular_points,
                         params={"N": int(N), "profile": profile.to_dict()})


def vacuum(components: int, dim: int) -> AnalyticField:
    """Постоянное поле (0, ..., 0, 1)"""
    value = np.zeros(components)
    value[-1] = 1.0

    def func(points: np.ndarray) -> np.ndarray:
        return np.broadcast_to(value, points.shape[:-1] + (components,)).copy()

    return AnalyticField("vacuum", dim, components, func, winding=0)


def monopole_config(N: int, F_profile: Optional[RadialProfile] = None,
                    W_profile: Optional[RadialProfile] = None, g: Optional[float] = None,
                    lam: float = 0.0) -> GaugeConfig:
    """Конфигурация Хиггса и калибровочного поля монополя.

    phi^a = n_a F(r), A^a_i = eps_aij n_j W(r). При N=0 - вакуум phi = F (1,0,0), A = 0.

    Args:
        N: намотка поля n_3
        F_profile: профиль F(r) (по умолчанию higgs-tanh)
        W_profile: профиль W(r) (по умолчанию gauge-bps с той же g)
        g: константа связи (по умолчанию берётся из W_profile)
        lam: константа самодействия, хранится только в метаданных
    """
    N = int(N)
    F_profile = F_profile or profile_library("higgs-tanh")
    if g is None:
        g = W_profile.params.get("g", 1.0) if W_profile is not None else 1.0
    W_profile = W_profile or profile_library("gauge-bps", g=g)
    vev = F_profile.at_infinity()

    if N == 0:
        direction = np.array([1.0, 0.0, 0.0])

        def higgs(points: np.ndarray) -> np.ndarray:
            return np.broadcast_to(vev * direction, points.shape[:-1] + (3,)).copy()

        def gauge(points: np.ndarray) -> np.ndarray:
            return np.zeros(points.shape[:-1] + (3, 3))
    else:
        unit = n3(N)

        def _unit(points: np.ndarray) -> np.ndarray:
            values, _ = unit.evaluate_masked(points)
            return values

        def higgs(points: np.ndarray) -> np.ndarray:
            r = np.linalg.norm(points, axis=-1)
            return _unit(points) * F_profile(r)[..., None]

        def gauge(points: np.ndarray) -> np.ndarray:
            r = np.linalg.norm(points, axis=-1)
            return np.einsum("aij,...j->...ai", EPS3, _unit(points)) * W_profile(r)[..., None, None]

    return GaugeConfig(higgs=higgs, gauge=gauge, g=float(g), vev=vev, lam=float(lam), winding=N,
                       core_radius=F_profile.scale,
                       params={"F": F_profile.to_dict(), "W": W_profile.to_dict()})