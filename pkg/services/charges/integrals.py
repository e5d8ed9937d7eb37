# services/charges/integrals.py
import logging
from typing import Callable, Optional, Sequence, Union

import numpy as np

from config.settings import get_settings
from services.charges.currents import current_general, topological_density_grid, current_density_grid
from services.charges.report import ChargeMethod, ChargeReport
from services.fields.constructors import AnalyticField
from services.grid.lattice import Grid, VectorField, ScalarField
from services.grid.quadrature import (
    circle_points, richardson, surface_integral, volume_integral, MIN_QUAD,
)
from utils.errors import MethodError, SingularPointError, QuadratureError

logger = logging.getLogger(__name__)

PhaseSource = Union[AnalyticField, Callable[[np.ndarray], np.ndarray]]

# шаг фазы между соседними узлами, при котором число узлов перестают удваивать
SAFE_INCREMENT = np.pi / 4
# порядок разностного шаблона для объёмной плотности заряда
VOLUME_STENCIL_ORDER = 4


def _check_contour(singular_points, center, radius: float):
    center = np.asarray(center, dtype=float)
    for sp in singular_points:
        distance = np.linalg.norm(np.asarray(sp)[: center.size] - center)
        if abs(distance - radius) < 1e-9 * max(1.0, radius):
            raise SingularPointError(f"Контур радиуса {radius} проходит через особую точку {sp}", point=sp)


def _phase_on_circle(source: PhaseSource, points: np.ndarray) -> np.ndarray:
    if isinstance(source, AnalyticField):
        if source.components != 2:
            raise MethodError(f"Число намотки считается для поля из 2 компонент, у {source.name} {source.components}")
        values = source.evaluate(points)
        return np.arctan2(values[..., 1], values[..., 0])
    return np.asarray(source(points), dtype=float)


def winding_number(source: PhaseSource, center: Sequence[float] = (0.0, 0.0), radius: float = 1.0,
                   n_quad: Optional[int] = None, max_refinements: Optional[int] = None) -> ChargeReport:
    """Число намотки N = (1/2pi) сумма приращений фазы вдоль окружности.

    Приращения приводятся в (-pi, pi]; число узлов удваивается, пока наибольшее
    приращение не станет меньше pi/4.

    Args:
        source: двухкомпонентное поле или функция фазы
        center: центр контура
        radius: радиус контура
        n_quad: начальное число узлов
        max_refinements: предел удвоений

    Returns:
        ChargeReport: метод contour
    """
    settings = get_settings()
    n_quad = n_quad or settings.N_QUAD
    max_refinements = settings.WINDING_MAX_REFINEMENTS if max_refinements is None else max_refinements
    if isinstance(source, AnalyticField):
        _check_contour(source.singular_points, center, radius)

    count = max(n_quad, MIN_QUAD)
    for attempt in range(max_refinements + 1):
        points = circle_points(center, radius, count)
        phase = _phase_on_circle(source, points)
        increments = np.angle(np.exp(1j * (np.roll(phase, -1) - phase)))
        largest = float(np.max(np.abs(increments)))
        if largest < SAFE_INCREMENT or attempt == max_refinements:
            break
        count *= 2
    reliable = largest < np.pi * (1.0 - 1e-12)
    if not reliable:
        logger.warning(f"Контур недоразрешён: максимальное приращение фазы {largest:.3f} при {count} узлах")

    value = float(np.sum(increments) / (2.0 * np.pi))
    logger.debug(f"Число намотки {value:.12g} по {count} узлам, max приращение {largest:.3e}")
    return ChargeReport.build(
        "winding_number", value, ChargeMethod.CONTOUR,
        grid={"n_quad": count, "radius": float(radius), "center": list(map(float, center))},
        details={"max_increment": largest, "reliable": reliable},
    )


def surface_flux_charge(field: AnalyticField, radius: float = 1.0, center: Optional[Sequence[float]] = None,
                        n_quad: Optional[int] = None, quantity: str = "topological_charge") -> ChargeReport:
    """Заряд как поток тока через сферу: Q = интеграл dS_i J^i"""
    d = field.components
    if field.dim != d:
        raise MethodError(f"Поверхностная форма недоступна: поле {field.name} из {d} компонент в {field.dim}D")
    n_quad = n_quad or get_settings().N_QUAD
    center = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    _check_contour(field.singular_points, center, radius)

    value = surface_integral(lambda p: current_general(field, d, p), center, radius, n_quad, dim=d)
    method = ChargeMethod.SURFACE_FLUX
    return ChargeReport.build(
        quantity, value, method,
        grid={"n_quad": n_quad, "radius": float(radius), "center": center.tolist(), "dim": d},
    )


def charge_2d(field: AnalyticField, center: Sequence[float] = (0.0, 0.0), radius: float = 1.0,
              n_quad: Optional[int] = None) -> ChargeReport:
    """N = интеграл d^2x d_i J^i в форме потока через окружность"""
    if field.components != 2 or field.dim != 2:
        raise MethodError("charge_2d определён для двухкомпонентного поля на плоскости")
    return surface_flux_charge(field, radius, center, n_quad, quantity="vortex_charge")


def exclusion_radius(grid: Grid) -> float:
    """Радиус шара вокруг особой точки: max(3h, EXCLUSION_RADIUS_MIN)"""
    return max(3.0 * max(grid.spacing), get_settings().EXCLUSION_RADIUS_MIN)


def volume_density_charge(field: AnalyticField, grid: Grid, exclusion: Optional[float] = None,
                          n_quad: Optional[int] = None, quantity: str = "topological_charge",
                          order: int = VOLUME_STENCIL_ORDER) -> ChargeReport:
    """Объёмный интеграл плотности заряда по решётке.

    Если у поля есть особые точки, вокруг каждой исключается шар радиуса eps,
    а его заряд добавляется потоком тока через границу шара. Гладкая плотность
    без особых точек дополнительно уточняется экстраполяцией Ричардсона по
    решёткам h и 2h, если число узлов по всем осям нечётно.
    """
    sampled = field.sample(grid)
    density = topological_density_grid(sampled, order)
    mesh = grid.mesh()
    mask = np.ones(grid.n, dtype=bool)
    ball_charge = 0.0
    eps = None

    if field.singular_points:
        if field.components != field.dim:
            raise MethodError(f"Особые точки поля {field.name} нельзя исключить без поверхностной формы")
        eps = exclusion_radius(grid) if exclusion is None else float(exclusion)
        for sp in field.singular_points:
            sp = np.asarray(sp)
            if np.any(sp - eps < np.asarray(grid.lo)) or np.any(sp + eps > np.asarray(grid.hi)):
                raise QuadratureError(f"Шар радиуса {eps} вокруг {sp.tolist()} не помещается в решётку")
            mask &= np.linalg.norm(mesh - sp, axis=-1) > eps
            flux = surface_flux_charge(field, eps, sp, n_quad)
            ball_charge += flux.value
        logger.debug(f"Исключены шары радиуса {eps}, их заряд {ball_charge:.12g}")

    outside = volume_integral(density, mask)
    details = {"outside_ball": outside, "ball": ball_charge, "stencil_order": order}
    coarse = sampled.coarsened() if eps is None else None
    if coarse is not None:
        coarse_value = volume_integral(topological_density_grid(coarse, order))
        details.update(raw=outside, coarse=coarse_value)
        outside = richardson(outside, coarse_value, order)
        logger.debug(f"Ричардсон: {details['raw']:.12g} (h), {coarse_value:.12g} (2h) -> {outside:.12g}")
    details["extrapolated"] = coarse is not None

    value = outside + ball_charge
    report_grid = grid.to_dict()
    if eps is not None:
        report_grid["exclusion_radius"] = eps
    return ChargeReport.build(quantity, value, ChargeMethod.VOLUME_DENSITY, grid=report_grid, details=details)


def charge(field: AnalyticField, d: Optional[int] = None, method: Optional[Union[str, ChargeMethod]] = None,
           grid: Optional[Grid] = None, radius: float = 1.0, n_quad: Optional[int] = None,
           exclusion: Optional[float] = None) -> ChargeReport:
    """Топологический заряд конфигурации выбранным методом

    Args:
        field: аналитическое поле
        d: размерность тока (по умолчанию число компонент поля)
        method: contour (d=2), surface-flux (d=3,4) или volume-density
        grid: решётка для volume-density
        radius: радиус контура/сферы
        n_quad: число узлов квадратуры
        exclusion: радиус исключаемого шара (volume-density)

    Returns:
        ChargeReport: отчёт о заряде
    """
    d = d or field.components
    if d != field.components:
        raise MethodError(f"Размерность d={d} не совпадает с числом компонент поля {field.components}")
    if method is None:
        if field.dim == d:
            method = ChargeMethod.CONTOUR if d == 2 else ChargeMethod.SURFACE_FLUX
        else:
            method = ChargeMethod.VOLUME_DENSITY
    method = ChargeMethod(method)
    logger.info(f"Заряд поля {field.name}: d={d}, метод {method.value}")

    if method == ChargeMethod.CONTOUR:
        if d != 2 or field.dim != 2:
            raise MethodError(f"Контурный метод применим только при d=2, получено d={d}")
        center = field.singular_points[0] if field.singular_points else (0.0, 0.0)
        return winding_number(field, center, radius, n_quad)
    if method == ChargeMethod.SURFACE_FLUX:
        return surface_flux_charge(field, radius, None, n_quad)
    if method == ChargeMethod.VOLUME_DENSITY:
        if grid is None:
            raise MethodError("Для объёмного метода нужна решётка")
        return volume_density_charge(field, grid, exclusion, n_quad)
    raise MethodError(f"Метод {method.value} не применим к статическому полю")


def time_slice_charge(field: VectorField, t_index: int) -> ChargeReport:
    """Q = интеграл J^0 dx на срезе t = const поля на решётке (t, x)"""
    grid = field.grid
    if grid.dim != 2 or field.components != 2:
        raise MethodError("Срез по времени определён для двухкомпонентного поля на решётке (t, x)")
    J = current_density_grid(field, 2)
    x_axis = grid.axes()[1]
    line = Grid((grid.lo[1],), (grid.hi[1],), (grid.n[1],))
    value = volume_integral(ScalarField(line, J[t_index, :, 0]))
    return ChargeReport.build(
        "time_slice_charge", value, ChargeMethod.VOLUME_DENSITY,
        grid={**grid.to_dict(), "t": float(grid.axes()[0][t_index])},
        details={"x_min": float(x_axis[0]), "x_max": float(x_axis[-1])},
    )
