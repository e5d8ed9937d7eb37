# services/solitons/sine_gordon.py
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Union

import numpy as np
from scipy.integrate import trapezoid

from config.settings import get_settings
from services.charges.report import ChargeMethod, ChargeReport
from services.grid.lattice import Grid
from utils.errors import StabilityError

logger = logging.getLogger(__name__)

# число Куранта, выше которого явная схема не запускается
CFL_LIMIT = 0.5
EXACT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DsgParams:
    """Параметры двойного уравнения синус-Гордона и кинка 4 arctan exp(s1 k (x - v t) + s2 delta)"""

    m: float
    b: float = 0.0
    v: float = 0.0
    k: Optional[float] = None
    delta: float = 0.0
    s1: int = 1
    s2: int = 1

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"Масса должна быть неотрицательной: m={self.m}")
        if not abs(self.v) < 1.0:
            raise ValueError(f"Скорость кинка должна быть по модулю меньше 1: v={self.v}")
        if self.k is None:
            # лоренцево k = m / sqrt(1 - v^2), в том числе для безмассовой волны m=0
            object.__setattr__(self, "k", self.m / math.sqrt(1.0 - self.v ** 2))
        if self.s1 not in (1, -1) or self.s2 not in (1, -1):
            raise ValueError(f"Знаки кинка должны быть +1 или -1: ({self.s1}, {self.s2})")
        if self.b == 0.0 and self.k != 0.0 and not self._lorentz_match():
            raise ValueError(
                f"При b=0 нужно k^2 = m^2/(1-v^2): k={self.k}, m={self.m}, v={self.v}"
            )

    def _lorentz_match(self) -> bool:
        expected = self.m ** 2 / (1.0 - self.v ** 2)
        return abs(self.k ** 2 - expected) <= EXACT_TOLERANCE * max(1.0, expected)

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.v ** 2)

    @property
    def is_exact(self) -> bool:
        """Кинк точно решает уравнение только при b=0 и лоренцевом k"""
        return self.b == 0.0 and self._lorentz_match()

    def to_dict(self) -> dict:
        return {"m": self.m, "b": self.b, "v": self.v, "k": self.k, "delta": self.delta,
                "signs": [self.s1, self.s2]}


def sine_gordon_params(m: float = 1.0, v: float = 0.0, delta: float = 0.0, signs=(1, 1),
                       b: float = 0.0, k: Optional[float] = None) -> DsgParams:
    """Параметры кинка с k = m / sqrt(1 - v^2), если k не задано явно"""
    if not abs(v) < 1.0:
        raise ValueError(f"Скорость кинка должна быть по модулю меньше 1: v={v}")
    return DsgParams(m=float(m), b=float(b), v=float(v), k=None if k is None else float(k), delta=float(delta),
                     s1=int(signs[0]), s2=int(signs[1]))


@dataclass(frozen=True)
class Kink:
    """Бегущий кинк с точными производными по x и t.

    center сдвигает кинк: u = s1 k (x - center - v t) + s2 delta.
    """

    params: DsgParams
    center: float = 0.0

    def argument(self, x, t=0.0) -> np.ndarray:
        p = self.params
        return p.s1 * p.k * (np.asarray(x, dtype=float) - self.center - p.v * t) + p.s2 * p.delta

    @staticmethod
    def _sech_tanh(u: np.ndarray):
        with np.errstate(over="ignore"):
            sech = 1.0 / np.cosh(u)
        return sech, np.tanh(u)

    def theta(self, x, t=0.0) -> np.ndarray:
        u = self.argument(x, t)
        tail = 4.0 * np.arctan(np.exp(-np.abs(u)))
        return np.where(u > 0, 2.0 * np.pi - tail, tail)

    __call__ = theta

    def theta_x(self, x, t=0.0) -> np.ndarray:
        sech, _ = self._sech_tanh(self.argument(x, t))
        return 2.0 * self.params.s1 * self.params.k * sech

    def theta_xx(self, x, t=0.0) -> np.ndarray:
        sech, tanh = self._sech_tanh(self.argument(x, t))
        return -2.0 * self.params.k ** 2 * sech * tanh

    def theta_t(self, x, t=0.0) -> np.ndarray:
        return -self.params.v * self.theta_x(x, t)

    def theta_tt(self, x, t=0.0) -> np.ndarray:
        return self.params.v ** 2 * self.theta_xx(x, t)

    @property
    def charge(self) -> int:
        return self.params.s1


@dataclass(frozen=True)
class KinkPair:
    """Сумма двух кинков минус 2 pi: оба края в вакууме Theta = 0"""

    first: Kink
    second: Kink
    offset: float = -2.0 * np.pi

    def theta(self, x, t=0.0) -> np.ndarray:
        return self.first.theta(x, t) + self.second.theta(x, t) + self.offset

    __call__ = theta

    def theta_x(self, x, t=0.0):
        return self.first.theta_x(x, t) + self.second.theta_x(x, t)

    def theta_xx(self, x, t=0.0):
        return self.first.theta_xx(x, t) + self.second.theta_xx(x, t)

    def theta_t(self, x, t=0.0):
        return self.first.theta_t(x, t) + self.second.theta_t(x, t)

    def theta_tt(self, x, t=0.0):
        return self.first.theta_tt(x, t) + self.second.theta_tt(x, t)

    @property
    def charge(self) -> int:
        return self.first.charge + self.second.charge


Profile = Union[Kink, KinkPair]


def kink(p: DsgParams, x, t=0.0) -> np.ndarray:
    """Theta(x, t) = 4 arctan exp(s1 k (x - v t) + s2 delta)"""
    return Kink(p).theta(x, t)


def kink_antikink(p: DsgParams, separation: float = 10.0) -> KinkPair:
    """Кинк в -separation/2 со скоростью v и антикинк в +separation/2 со скоростью -v"""
    first = Kink(p, center=-0.5 * separation)
    second = Kink(replace(p, s1=-p.s1, v=-p.v), center=0.5 * separation)
    return KinkPair(first, second)


def kink_width(p: DsgParams) -> float:
    """Ширина 1/k = sqrt(1 - v^2) / m для точного кинка"""
    if p.k == 0:
        raise ValueError("Ширина не определена при k=0")
    return 1.0 / abs(p.k)


def measured_kink_width(x: np.ndarray, theta: np.ndarray) -> float:
    """2 / max|Theta_x| по разностному профилю"""
    slope = np.max(np.abs(np.gradient(theta, x, edge_order=2)))
    if slope == 0:
        raise ValueError("Профиль постоянен, ширина не определена")
    return float(2.0 / slope)


def _potential_force(theta: np.ndarray, p: DsgParams) -> np.ndarray:
    return p.m ** 2 * np.sin(theta) + 0.5 * p.b * np.sin(2.0 * theta)


def dsg_residual(p: DsgParams, theta: Union[Profile, Callable], x, t: float = 0.0,
                 step: float = 1e-3) -> float:
    """max |Theta_tt - Theta_xx + m^2 sin Theta + (b/2) sin 2Theta| по точкам x.

    Args:
        p: параметры уравнения
        theta: кинк (точные производные) или функция theta(x, t)
        x: точки
        t: момент времени
        step: шаг центральных разностей для произвольной функции

    Returns:
        float: наибольший модуль левой части
    """
    x = np.asarray(x, dtype=float)
    if isinstance(theta, (Kink, KinkPair)):
        values = theta.theta(x, t)
        tt = theta.theta_tt(x, t)
        xx = theta.theta_xx(x, t)
    else:
        values = np.asarray(theta(x, t), dtype=float)
        xx = (theta(x + step, t) - 2.0 * values + theta(x - step, t)) / step ** 2
        tt = (theta(x, t + step) - 2.0 * values + theta(x, t - step)) / step ** 2
    residual = tt - xx + _potential_force(values, p)
    largest = float(np.max(np.abs(residual))) if residual.size else 0.0
    if not p.is_exact:
        logger.info(f"Остаток уравнения для b={p.b}: {largest:.3e} (диагностика)")
    return largest


@dataclass(frozen=True)
class WaveState:
    """Угол Theta и его скорость на одномерной решётке в момент t"""

    grid: Grid
    theta: np.ndarray = field(repr=False)
    theta_t: np.ndarray = field(repr=False)
    t: float = 0.0

    def __post_init__(self):
        if self.grid.dim != 1:
            raise ValueError(f"Состояние задаётся на одномерной решётке, dim={self.grid.dim}")
        for name in ("theta", "theta_t"):
            values = np.asarray(getattr(self, name), dtype=float)
            if values.shape != self.grid.n:
                raise ValueError(f"{name}: форма {values.shape} не совпадает с решёткой {self.grid.n}")
            if not np.all(np.isfinite(values)):
                raise StabilityError(f"Состояние при t={self.t} содержит нефинитные значения")
            object.__setattr__(self, name, values)

    @property
    def x(self) -> np.ndarray:
        return self.grid.axes()[0]

    @property
    def h(self) -> float:
        return self.grid.spacing[0]


def initial_state(grid: Grid, profile: Optional[Profile] = None, t0: float = 0.0) -> WaveState:
    """Начальные данные из аналитического профиля; без профиля - вакуум"""
    x = grid.axes()[0]
    if profile is None:
        return WaveState(grid, np.zeros_like(x), np.zeros_like(x), t0)
    return WaveState(grid, profile.theta(x, t0), profile.theta_t(x, t0), t0)


def _acceleration(theta: np.ndarray, h: float, p: DsgParams) -> np.ndarray:
    accel = np.zeros_like(theta)
    lap = (theta[2:] - 2.0 * theta[1:-1] + theta[:-2]) / h ** 2
    accel[1:-1] = lap - _potential_force(theta[1:-1], p)
    return accel


def evolve(state: WaveState, p: DsgParams, dt: float, steps: int) -> WaveState:
    """Явная схема второго порядка (leapfrog в форме kick-drift-kick).

    Края закреплены на своих начальных значениях, их скорость равна нулю.

    Args:
        state: начальное состояние
        p: параметры уравнения
        dt: шаг по времени, dt <= 0.5 h
        steps: число шагов

    Returns:
        WaveState: состояние через steps шагов
    """
    h = state.h
    if dt <= 0 or dt > CFL_LIMIT * h * (1.0 + 1e-12):
        raise StabilityError(f"Нарушено условие Куранта: dt={dt}, h={h}, нужно 0 < dt <= {CFL_LIMIT * h}")
    if steps < 0:
        raise ValueError(f"Число шагов должно быть неотрицательным: {steps}")

    theta = state.theta.copy()
    velocity = state.theta_t.copy()
    if velocity[0] != 0.0 or velocity[-1] != 0.0:
        logger.debug(f"Скорость на краях обнулена: {velocity[0]:.3e}, {velocity[-1]:.3e}")
        velocity[0] = velocity[-1] = 0.0

    accel = _acceleration(theta, h, p)
    for _ in range(steps):
        velocity += 0.5 * dt * accel
        theta += dt * velocity
        accel = _acceleration(theta, h, p)
        velocity += 0.5 * dt * accel
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(velocity))):
        raise StabilityError(f"Решение расходится после {steps} шагов с dt={dt}")

    t = state.t + steps * dt
    logger.debug(f"Эволюция до t={t:.6g}: {steps} шагов, dt={dt}")
    return WaveState(state.grid, theta, velocity, t)


def trajectory(state: WaveState, p: DsgParams, dt: float, steps: int, stride: int) -> List[WaveState]:
    """Снимки состояния каждые stride шагов, включая начальный и последний"""
    if stride <= 0:
        raise ValueError(f"Шаг снимков должен быть положительным: {stride}")
    snapshots = [state]
    done = 0
    while done < steps:
        chunk = min(stride, steps - done)
        state = evolve(state, p, dt, chunk)
        snapshots.append(state)
        done += chunk
    return snapshots


def energy(state: WaveState, p: DsgParams) -> float:
    """E = интеграл (Theta_t^2/2 + Theta_x^2/2 + m^2 (1 - cos Theta) + (b/4)(1 - cos 2Theta)) dx.

    Градиентная часть берётся по разностям вперёд, согласованно с лапласианом схемы.
    """
    x, theta, h = state.x, state.theta, state.h
    kinetic = trapezoid(0.5 * state.theta_t ** 2, x)
    gradient_part = 0.5 * np.sum(np.diff(theta) ** 2) / h
    potential = trapezoid(p.m ** 2 * (1.0 - np.cos(theta)) + 0.25 * p.b * (1.0 - np.cos(2.0 * theta)), x)
    return float(kinetic + gradient_part + potential)


def sector_charge(state: WaveState, settle_tolerance: Optional[float] = None) -> ChargeReport:
    """Q = (Theta(+край) - Theta(-край)) / 2 pi.

    Края считаются установившимися, если |Theta_x| там меньше settle_tolerance;
    иначе отчёт помечается settled=False.
    """
    tolerance = settle_tolerance or get_settings().SETTLE_TOLERANCE
    slope = np.gradient(state.theta, state.x, edge_order=2)
    edge_slope = float(max(abs(slope[0]), abs(slope[-1])))
    settled = edge_slope < tolerance
    if not settled:
        logger.warning(f"Края не установились при t={state.t:.6g}: |Theta_x| = {edge_slope:.3e}")
    value = (state.theta[-1] - state.theta[0]) / (2.0 * np.pi)
    return ChargeReport.build(
        "sector_charge", value, ChargeMethod.ASYMPTOTIC_PHASE,
        grid={**state.grid.to_dict(), "t": state.t},
        details={"settled": settled, "edge_slope": edge_slope,
                 "left": float(state.theta[0]), "right": float(state.theta[-1])},
    )


def snapshot_rows(state: WaveState) -> np.ndarray:
    """Строки (t, x, Theta) для CSV"""
    x = state.x
    return np.column_stack([np.full_like(x, state.t), x, state.theta])
