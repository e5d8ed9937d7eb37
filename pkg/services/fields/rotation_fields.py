# services/fields/rotation_fields.py
import logging
from typing import Optional

import numpy as np
from scipy.spatial.transform import Rotation

from services.fields.constructors import AnalyticField
from services.grid.lattice import Grid, MatrixField, VectorField
from services.rotations.su2 import correspondence_matrices
from utils.errors import FieldError

logger = logging.getLogger(__name__)

ROTATION_KINDS = ("identity", "constant", "twist", "smooth", "skyrme", "random")


def _require_3d(grid: Grid):
    if grid.dim != 3:
        raise FieldError(f"Поле поворотов строится на трёхмерной решётке, dim={grid.dim}")


def from_rotvec(grid: Grid, rotvec: np.ndarray) -> MatrixField:
    """Поле поворотов из векторов поворота в узлах (scipy Rotation)"""
    flat = rotvec.reshape(-1, 3)
    matrices = Rotation.from_rotvec(flat).as_matrix()
    return MatrixField(grid, matrices.reshape(grid.n + (3, 3)))


def identity_field(grid: Grid) -> MatrixField:
    _require_3d(grid)
    return MatrixField(grid, np.broadcast_to(np.eye(3), grid.n + (3, 3)).copy())


def constant_field(grid: Grid, rotvec=(0.3, -0.5, 0.8)) -> MatrixField:
    """Один и тот же поворот Q во всех узлах"""
    _require_3d(grid)
    Q = Rotation.from_rotvec(np.asarray(rotvec, dtype=float)).as_matrix()
    return MatrixField(grid, np.broadcast_to(Q, grid.n + (3, 3)).copy())


def twist_field(grid: Grid, alpha: float = 1.0) -> MatrixField:
    """R(x) = поворот на угол alpha * x_3 вокруг оси z"""
    _require_3d(grid)
    z = grid.mesh()[..., 2]
    rotvec = np.zeros(grid.n + (3,))
    rotvec[..., 2] = alpha * z
    return from_rotvec(grid, rotvec)


def smooth_rotvec(points: np.ndarray, amplitude: float = 1.0) -> np.ndarray:
    x, y, z = points[..., 0], points[..., 1], points[..., 2]
    return amplitude * np.stack([
        0.8 * np.sin(y + 0.3),
        0.6 * np.cos(z),
        0.7 * np.sin(x) * np.cos(y),
    ], axis=-1)


def smooth_field(grid: Grid, amplitude: float = 1.0) -> MatrixField:
    """Гладкое неоднородное поле поворотов для проверки сходимости"""
    _require_3d(grid)
    return from_rotvec(grid, smooth_rotvec(grid.mesh(), amplitude))


def su2_field(field: AnalyticField, grid: Grid) -> VectorField:
    """Кватернионы (n1, n2, n3, n4) четырёхкомпонентного поля на решётке"""
    if field.components != 4:
        raise FieldError(f"Поле SU(2) должно иметь 4 компоненты, у {field.name} {field.components}")
    return field.sample(grid)


def rotation_from_su2(U: VectorField) -> MatrixField:
    """Поле поворотов R(U) по соответствию Скирма"""
    return MatrixField(U.grid, correspondence_matrices(U.samples), U.singular)


def random_matrix_field(grid: Grid, seed: Optional[int] = 0) -> MatrixField:
    """Гладкое, но несовместное поле матриц: сумма синусоид со случайными коэффициентами"""
    _require_3d(grid)
    rng = np.random.default_rng(seed)
    mesh = grid.mesh()
    amplitude = rng.uniform(0.5, 1.5, size=(3, 3))
    wave = rng.uniform(0.5, 2.0, size=(3, 3, 3))
    shift = rng.uniform(0.0, 2.0 * np.pi, size=(3, 3))
    phase = np.einsum("...k,ijk->...ij", mesh, wave) + shift
    return MatrixField(grid, amplitude * np.sin(phase))


def build_rotation_field(kind: str, grid: Grid, alpha: float = 1.0, seed: Optional[int] = 0,
                         skyrme: Optional[AnalyticField] = None) -> MatrixField:
    """Поле поворотов (или контрольное поле матриц) по имени

    Args:
        kind: identity, constant, twist, smooth, skyrme или random
        grid: трёхмерная решётка
        alpha: шаг закрутки для twist, амплитуда для smooth
        seed: зерно для random
        skyrme: поле Скирма для kind=skyrme
    """
    if kind == "identity":
        return identity_field(grid)
    if kind == "constant":
        return constant_field(grid)
    if kind == "twist":
        return twist_field(grid, alpha)
    if kind == "smooth":
        return smooth_field(grid, alpha)
    if kind == "skyrme":
        if skyrme is None:
            raise FieldError("Для kind=skyrme нужно поле Скирма")
        return rotation_from_su2(su2_field(skyrme, grid))
    if kind == "random":
        return random_matrix_field(grid, seed)
    raise FieldError(f"Неизвестный тип поля поворотов '{kind}', доступны: {', '.join(ROTATION_KINDS)}")
