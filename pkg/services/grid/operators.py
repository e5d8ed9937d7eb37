# services/grid/operators.py
import itertools
import logging
from functools import lru_cache
from typing import Callable

import numpy as np

from services.grid.lattice import MatrixField, gradient
from utils.errors import GridError, FieldError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def levi_civita(d: int) -> np.ndarray:
    """Полностью антисимметричный символ ранга d"""
    eps = np.zeros((d,) * d)
    for perm in itertools.permutations(range(d)):
        # знак перестановки через число инверсий
        inversions = sum(1 for i in range(d) for j in range(i + 1, d) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    eps.setflags(write=False)
    return eps


EPS3 = levi_civita(3)


def _require_matrix_3d(M: MatrixField, need_grid_3d: bool = True):
    if M.value_shape != (3, 3):
        raise FieldError(f"Ожидалось поле матриц 3x3, получено {M.value_shape}")
    if need_grid_3d and M.grid.dim != 3:
        raise GridError(f"Curl определён только на трёхмерной решётке, dim={M.grid.dim}")


def curl_values(samples: np.ndarray, grid) -> np.ndarray:
    """(Curl M)_ij = eps_jmn d_m M_in для массива матриц на решётке"""
    dM = gradient(samples, grid)  # [..., i, n, m] = d_m M_in
    return np.einsum("jmn,...inm->...ij", EPS3, dM, optimize=True)


def cof_values(samples: np.ndarray) -> np.ndarray:
    """(Cof M)_ij = 1/2 eps_ims eps_jnt M_mn M_st поточечно"""
    return 0.5 * np.einsum("ims,jnt,...mn,...st->...ij", EPS3, EPS3, samples, samples, optimize=True)


def curl_matrix(M: MatrixField) -> MatrixField:
    _require_matrix_3d(M)
    return MatrixField(M.grid, curl_values(M.samples, M.grid), M.singular)


def cof_matrix(M: MatrixField) -> MatrixField:
    _require_matrix_3d(M, need_grid_3d=False)
    return MatrixField(M.grid, cof_values(M.samples), M.singular)


def analytic_jacobian(func: Callable[[np.ndarray], np.ndarray], points: np.ndarray,
                      step: float = 1e-5) -> np.ndarray:
    """Производные аналитического поля центральными разностями вне решётки.

    Args:
        func: отображение точек (..., d) в значения (..., *shape)
        points: точки вычисления
        step: шаг разности

    Returns:
        np.ndarray: массив (..., *shape, d), последний индекс - направление
    """
    points = np.asarray(points, dtype=float)
    d = points.shape[-1]
    columns = []
    for axis in range(d):
        offset = np.zeros(d)
        offset[axis] = step
        columns.append((func(points + offset) - func(points - offset)) / (2.0 * step))
    return np.stack(columns, axis=-1)
