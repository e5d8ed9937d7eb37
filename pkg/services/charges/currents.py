# services/charges/currents.py
import logging
from typing import Optional

import numpy as np

from config.settings import get_settings
from services.fields.constructors import AnalyticField
from services.grid.lattice import Grid, VectorField, ScalarField, gradient
from services.grid.operators import analytic_jacobian
from services.grid.quadrature import sphere_area
from utils.errors import FieldError, MethodError, SingularPointError

logger = logging.getLogger(__name__)


def field_jacobian(field: AnalyticField, points: np.ndarray, step: Optional[float] = None) -> np.ndarray:
    """Производные d_mu n_a в точках вне решётки, форма (..., k, dim)"""
    step = step or get_settings().FD_STEP
    points = np.asarray(points, dtype=float)
    if np.any(field.singular_mask(points)):
        raise SingularPointError(f"Ток поля {field.name} не определён в особой точке")
    # шаблон не должен задевать особую точку
    for sp in field.singular_points:
        if np.any(np.linalg.norm(points - np.asarray(sp), axis=-1) < 2.0 * step):
            raise SingularPointError(f"Точка слишком близко к особой точке {sp} поля {field.name}")
    return analytic_jacobian(field.evaluate, points, step)


def _spacetime_jacobian(jac: np.ndarray, d: int) -> np.ndarray:
    """Дополняет статическую матрицу производных нулевым столбцом d_0, если точек d-1"""
    columns = jac.shape[-1]
    if columns == d:
        return jac
    if columns == d - 1:
        zeros = np.zeros(jac.shape[:-1] + (1,))
        return np.concatenate([zeros, jac], axis=-1)
    raise MethodError(f"Производные по {columns} осям не подходят для тока в d={d}")


def current_from_jacobian(n: np.ndarray, jac: np.ndarray, d: int) -> np.ndarray:
    """Ток J^mu = 1/((d-1)! S_d) eps^{mu ...} eps^{a ...} n_a d n ... d n.

    Свёртка с двумя символами Леви-Чивиты сводится к определителям:
    J^mu = (-1)^mu det[n, d_nu n (nu != mu)] / S_d.
    """
    if d not in (2, 3, 4):
        raise MethodError(f"Ток определён для d=2,3,4, получено {d}")
    if n.shape[-1] != d:
        raise FieldError(f"Для тока в d={d} нужно поле из {d} компонент, получено {n.shape[-1]}")
    jac = _spacetime_jacobian(jac, d)
    area = sphere_area(d)
    components = []
    for mu in range(d):
        others = [nu for nu in range(d) if nu != mu]
        matrix = np.concatenate([n[..., :, None], jac[..., :, others]], axis=-1)
        components.append((-1) ** mu * np.linalg.det(matrix) / area)
    return np.stack(components, axis=-1)


def current_general(field: AnalyticField, d: int, points: np.ndarray,
                    step: Optional[float] = None) -> np.ndarray:
    """Сохраняющийся ток d-мерной конфигурации в точках (..., dim)"""
    points = np.asarray(points, dtype=float)
    n = field.evaluate(points)
    return current_from_jacobian(n, field_jacobian(field, points, step), d)


def current_1p1(field: AnalyticField, points: np.ndarray, step: Optional[float] = None) -> np.ndarray:
    """J^mu = 1/(2 pi) eps^{mu nu} eps^{ab} n_a d_nu n_b; координаты точки (t, x)"""
    if field.components != 2 or field.dim != 2:
        raise FieldError("Ток (1+1) определён для двухкомпонентного поля на плоскости (t, x)")
    points = np.asarray(points, dtype=float)
    n = field.evaluate(points)
    jac = field_jacobian(field, points, step)
    # eps^{ab} n_a d_nu n_b
    cross = n[..., 0, None] * jac[..., 1, :] - n[..., 1, None] * jac[..., 0, :]
    return np.stack([cross[..., 1], -cross[..., 0]], axis=-1) / (2.0 * np.pi)


def current_2d_static(field: AnalyticField, points: np.ndarray, step: Optional[float] = None) -> np.ndarray:
    """J^i = 1/(2 pi) eps^{ij} eps^{ab} n_a d_j n_b для статического поля на плоскости (x, y)"""
    points = np.asarray(points, dtype=float)
    if np.any(field.singular_mask(points)):
        raise SingularPointError("Ток вихря не определён в начале координат")
    return current_1p1(field, points, step)


def charge_density_3d(field: AnalyticField, points: np.ndarray, step: Optional[float] = None) -> np.ndarray:
    """j^0 = 1/(8 pi) eps^{ijk} eps^{abc} d_i n_a d_j n_b d_k n_c = 3/(4 pi) det(d n)"""
    if field.components != 3 or field.dim != 3:
        raise FieldError("Плотность j^0 определена для трёхкомпонентного поля в R^3")
    jac = field_jacobian(field, np.asarray(points, dtype=float), step)
    return 6.0 * np.linalg.det(jac) / (8.0 * np.pi)


# Версии на решётке

def jacobian_grid(field: VectorField, order: int = 2) -> np.ndarray:
    return gradient(field.samples, field.grid, order)


def current_density_grid(field: VectorField, d: Optional[int] = None) -> np.ndarray:
    """Ток J^mu во всех узлах решётки, форма (*n, d)"""
    d = d or field.components
    return current_from_jacobian(field.samples, jacobian_grid(field), d)


def divergence_grid(J: np.ndarray, grid: Grid) -> np.ndarray:
    """d_mu J^mu по осям решётки (J задан во всех узлах, последняя ось - компонента)"""
    if J.shape[-1] != grid.dim:
        raise MethodError(f"Дивергенция: {J.shape[-1]} компонент на решётке {grid.dim}D")
    dJ = gradient(J, grid)
    return np.trace(dJ, axis1=-2, axis2=-1)


def topological_density_grid(field: VectorField, order: int = 2) -> ScalarField:
    """Плотность заряда на решётке.

    При k = dim это d_i J^i = (d / S_d) det(d n): сосредоточена в особых точках.
    При k = dim + 1 это временная компонента J^0 (например, барионная плотность n_4 над R^3).
    """
    grid = field.grid
    k = field.components
    jac = jacobian_grid(field, order)
    if k == grid.dim:
        density = k * np.linalg.det(jac) / sphere_area(k)
    elif k == grid.dim + 1:
        density = current_from_jacobian(field.samples, jac, k)[..., 0]
    else:
        raise MethodError(f"Плотность не определена для поля из {k} компонент на решётке {grid.dim}D")
    return ScalarField(grid, density, field.singular)
