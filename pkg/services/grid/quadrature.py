# services/grid/quadrature.py
import logging
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import gamma

from services.grid.lattice import SampledField, ScalarField, interpolate
from utils.errors import QuadratureError, GridError

logger = logging.getLogger(__name__)

VectorSource = Union[Callable[[np.ndarray], np.ndarray], SampledField]

MIN_QUAD = 16


def sphere_area(d: int) -> float:
    """Площадь единичной сферы S^(d-1) в d измерениях: 2 pi^(d/2) / Gamma(d/2)"""
    if d not in (2, 3, 4):
        raise ValueError(f"Площадь сферы поддерживается для d=2,3,4, получено {d}")
    return float(2.0 * np.pi ** (d / 2.0) / gamma(d / 2.0))


def volume_integral(f: ScalarField, mask: Optional[np.ndarray] = None) -> float:
    """Произведение формул трапеций по всем осям решётки

    Args:
        f: скалярное поле
        mask: узлы, участвующие в интегрировании (остальные обнуляются)
    """
    values = f.samples
    if mask is not None:
        values = np.where(mask, values, 0.0)
    for axis_values in reversed(f.grid.axes()):
        values = trapezoid(values, x=axis_values, axis=-1)
    return float(values)


def richardson(fine: float, coarse: float, order: int) -> float:
    """Экстраполяция Ричардсона по значениям на шагах h и 2h при ошибке O(h^order)"""
    return fine + (fine - coarse) / (2.0 ** order - 1.0)


def sphere_nodes(dim: int, center: Sequence[float], radius: float, n_quad: int):
    """Узлы и веса квадратуры на сфере радиуса radius.

    Полярные углы берутся по Гауссу-Лежандру, азимут равномерно.

    Returns:
        (points, normals, weights): точки (..., dim), единичные нормали и веса с учётом dS
    """
    if n_quad < MIN_QUAD:
        raise QuadratureError(f"Нужно n_quad >= {MIN_QUAD}, получено {n_quad}")
    if radius <= 0:
        raise QuadratureError(f"Радиус сферы должен быть положительным: {radius}")
    center = np.asarray(center, dtype=float)
    if center.shape != (dim,):
        raise QuadratureError(f"Центр {center} не соответствует размерности {dim}")

    if dim == 2:
        phi = 2.0 * np.pi * np.arange(n_quad) / n_quad
        normals = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        weights = np.full(n_quad, 2.0 * np.pi / n_quad) * radius
    elif dim == 3:
        x, w = np.polynomial.legendre.leggauss(n_quad)
        phi = 2.0 * np.pi * np.arange(2 * n_quad) / (2 * n_quad)
        cos_t, ph = np.meshgrid(x, phi, indexing="ij")
        sin_t = np.sqrt(1.0 - cos_t ** 2)
        normals = np.stack([sin_t * np.cos(ph), sin_t * np.sin(ph), cos_t], axis=-1)
        weights = np.outer(w, np.full(2 * n_quad, np.pi / n_quad)) * radius ** 2
    elif dim == 4:
        x, w = np.polynomial.legendre.leggauss(n_quad)
        # chi на [0, pi] с весом sin^2 chi, theta через cos theta
        chi = 0.5 * np.pi * (x + 1.0)
        w_chi = 0.5 * np.pi * w * np.sin(chi) ** 2
        phi = 2.0 * np.pi * np.arange(2 * n_quad) / (2 * n_quad)
        ch, cos_t, ph = np.meshgrid(chi, x, phi, indexing="ij")
        sin_t = np.sqrt(1.0 - cos_t ** 2)
        normals = np.stack([
            np.sin(ch) * sin_t * np.cos(ph),
            np.sin(ch) * sin_t * np.sin(ph),
            np.sin(ch) * cos_t,
            np.cos(ch),
        ], axis=-1)
        weights = (w_chi[:, None, None] * w[None, :, None]
                   * np.full(2 * n_quad, np.pi / n_quad)[None, None, :]) * radius ** 3
    else:
        raise QuadratureError(f"Поверхностный интеграл поддерживается для dim=2,3,4, получено {dim}")

    points = center + radius * normals
    return points, normals, weights


def _evaluate(v: VectorSource, points: np.ndarray) -> np.ndarray:
    if isinstance(v, SampledField):
        try:
            return interpolate(v, points)
        except GridError as e:
            raise QuadratureError(f"Сфера выходит за пределы решётки: {e}")
    return np.asarray(v(points), dtype=float)


def surface_integral(v: VectorSource, center: Sequence[float], radius: float,
                     n_quad: int = 64, dim: int = 3) -> float:
    """Поток поля v через сферу: интеграл v . r_hat dS

    Аналитическое поле вычисляется прямо в узлах квадратуры, поле на решётке
    интерполируется.
    """
    points, normals, weights = sphere_nodes(dim, center, radius, n_quad)
    values = _evaluate(v, points)
    flux_density = np.sum(values * normals, axis=-1)
    return float(np.sum(flux_density * weights))


def circle_points(center: Sequence[float], radius: float, n_quad: int) -> np.ndarray:
    if n_quad < MIN_QUAD:
        raise QuadratureError(f"Нужно n_quad >= {MIN_QUAD}, получено {n_quad}")
    theta = 2.0 * np.pi * np.arange(n_quad) / n_quad
    center = np.asarray(center, dtype=float)
    return center + radius * np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def contour_integral(increment: Callable[[np.ndarray, np.ndarray], np.ndarray],
                     center: Sequence[float], radius: float, n_quad: int = 64) -> float:
    """Сумма приращений вдоль замкнутой окружности, обход против часовой стрелки

    Args:
        increment: функция (p0, p1) -> приращение подынтегральной формы на дуге
        center: центр окружности
        radius: радиус
        n_quad: число равномерных узлов по углу
    """
    points = circle_points(center, radius, n_quad)
    following = np.roll(points, -1, axis=0)
    return float(np.sum(increment(points, following)))


def wrapped_angle_increment(p0: np.ndarray, p1: np.ndarray) -> np.ndarray:
    """Приращение полярного угла точки между p0 и p1, приведённое в (-pi, pi]"""
    diff = np.arctan2(p1[..., 1], p1[..., 0]) - np.arctan2(p0[..., 1], p0[..., 0])
    return np.angle(np.exp(1j * diff))
