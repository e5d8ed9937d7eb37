# services/rotations/su2.py
import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from services.grid.operators import EPS3
from utils.errors import FieldError

logger = logging.getLogger(__name__)

UNIT_TOLERANCE = 1e-12
ORTHO_TOLERANCE = 1e-10

# Матрицы Паули sigma_1, sigma_2, sigma_3
PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


def _unit_axis(axis) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if norm == 0:
        raise ValueError("Ось вращения не может быть нулевой")
    if abs(norm - 1.0) > UNIT_TOLERANCE:
        logger.debug(f"Ось вращения нормирована: |n| = {norm:.15g}")
        axis = axis / norm
    return axis


@dataclass(frozen=True)
class AxisAngle:
    """Вращение на угол angle вокруг единичной оси axis"""

    axis: np.ndarray
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "axis", _unit_axis(self.axis))
        object.__setattr__(self, "angle", float(self.angle))


class SU2Element:
    """Единичный кватернион (n1, n2, n3, n4) = матрица n4 I + i n.sigma"""

    __slots__ = ("q",)

    def __init__(self, q):
        q = np.asarray(q, dtype=float).reshape(4)
        if not np.all(np.isfinite(q)):
            raise FieldError(f"Кватернион содержит нефинитные значения: {q}")
        norm2 = float(q @ q)
        if norm2 == 0:
            raise FieldError("Нулевой кватернион не лежит в SU(2)")
        if abs(norm2 - 1.0) > UNIT_TOLERANCE:
            logger.debug(f"Перенормировка кватерниона: |q|^2 - 1 = {norm2 - 1.0:.3e}")
            q = q / np.sqrt(norm2)
        self.q = q

    @classmethod
    def identity(cls) -> "SU2Element":
        return cls([0.0, 0.0, 0.0, 1.0])

    @classmethod
    def from_matrix(cls, U: np.ndarray) -> "SU2Element":
        return cls(quaternion_from_matrix(U))

    @property
    def vector(self) -> np.ndarray:
        return self.q[:3]

    @property
    def scalar(self) -> float:
        return float(self.q[3])

    def matrix(self) -> np.ndarray:
        return quaternion_matrices(self.q)

    def __neg__(self) -> "SU2Element":
        return SU2Element(-self.q)

    def __mul__(self, other: "SU2Element") -> "SU2Element":
        return SU2Element.from_matrix(self.matrix() @ other.matrix())

    def allclose(self, other: "SU2Element", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.q, other.q, atol=atol, rtol=0.0))

    def __repr__(self) -> str:
        return f"SU2Element({self.q.tolist()})"


class Rotation3:
    """Матрица поворота 3x3"""

    __slots__ = ("matrix",)

    def __init__(self, matrix, check: bool = True):
        matrix = np.asarray(matrix, dtype=float).reshape(3, 3)
        if check:
            ortho = np.max(np.abs(matrix.T @ matrix - np.eye(3)))
            det = np.linalg.det(matrix)
            if ortho > ORTHO_TOLERANCE or abs(det - 1.0) > ORTHO_TOLERANCE:
                raise FieldError(f"Матрица не является поворотом: |R^T R - I| = {ortho:.3e}, det = {det:.12g}")
        self.matrix = matrix

    def allclose(self, other: Union["Rotation3", np.ndarray], atol: float = 1e-10) -> bool:
        other = other.matrix if isinstance(other, Rotation3) else np.asarray(other)
        return bool(np.allclose(self.matrix, other, atol=atol, rtol=0.0))

    def __repr__(self) -> str:
        return f"Rotation3({self.matrix.tolist()})"


def rodrigues(aa: AxisAngle) -> Rotation3:
    """R_ij = cos t delta_ij + (1 - cos t) n_i n_j - eps_ijk n_k sin t"""
    return Rotation3(rodrigues_matrices(aa.axis * aa.angle))


def rodrigues_matrices(rotvec: np.ndarray) -> np.ndarray:
    """Формула Родрига для массива векторов поворота (..., 3) -> (..., 3, 3)"""
    rotvec = np.asarray(rotvec, dtype=float)
    angle = np.linalg.norm(rotvec, axis=-1)
    axis = np.divide(rotvec, angle[..., None], out=np.zeros_like(rotvec), where=angle[..., None] > 0)
    c = np.cos(angle)[..., None, None]
    s = np.sin(angle)[..., None, None]
    outer = axis[..., :, None] * axis[..., None, :]
    cross = np.einsum("ijk,...k->...ij", EPS3, axis)
    return c * np.eye(3) + (1.0 - c) * outer - s * cross


def su2_from_axis(aa: AxisAngle) -> SU2Element:
    """U = exp(i omega n.sigma) при omega = aa.angle: кватернион (sin omega n, cos omega)"""
    omega = aa.angle
    return SU2Element(np.concatenate([np.sin(omega) * aa.axis, [np.cos(omega)]]))


def quaternion_matrices(q: np.ndarray) -> np.ndarray:
    """Комплексные матрицы [[n4 + i n3, i n1 + n2], [i n1 - n2, n4 - i n3]]"""
    q = np.asarray(q, dtype=float)
    n1, n2, n3, n4 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    U = np.empty(q.shape[:-1] + (2, 2), dtype=complex)
    U[..., 0, 0] = n4 + 1j * n3
    U[..., 0, 1] = n2 + 1j * n1
    U[..., 1, 0] = -n2 + 1j * n1
    U[..., 1, 1] = n4 - 1j * n3
    return U


def quaternion_from_matrix(U: np.ndarray) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    return np.stack([U[..., 1, 0].imag, -U[..., 1, 0].real, U[..., 0, 0].imag, U[..., 0, 0].real], axis=-1)


def correspondence_matrices(q: np.ndarray) -> np.ndarray:
    """R_ij = 2 n_i n_j - 2 eps_ijk n_k n4 + delta_ij (2 n4^2 - 1) для массива кватернионов"""
    q = np.asarray(q, dtype=float)
    v = q[..., :3]
    n4 = q[..., 3]
    outer = 2.0 * v[..., :, None] * v[..., None, :]
    cross = 2.0 * np.einsum("ijk,...k->...ij", EPS3, v) * n4[..., None, None]
    return outer - cross + (2.0 * n4 ** 2 - 1.0)[..., None, None] * np.eye(3)


def trace_correspondence(U: np.ndarray) -> np.ndarray:
    """R_ij = 1/2 tr(sigma_i U^+ sigma_j U) для матриц (..., 2, 2)"""
    U = np.asarray(U, dtype=complex)
    Ud = np.conj(np.swapaxes(U, -1, -2))
    R = 0.5 * np.einsum("iab,...bc,jcd,...da->...ij", PAULI, Ud, PAULI, U, optimize=True)
    return R.real


def skyrme_correspondence(U: SU2Element, use_trace: bool = False) -> Rotation3:
    """Двулистное накрытие SU(2) -> SO(3)

    Args:
        U: элемент SU(2)
        use_trace: вычислять через след, а не по замкнутой формуле
    """
    if use_trace:
        return Rotation3(trace_correspondence(U.matrix()))
    return Rotation3(correspondence_matrices(U.q))


def doublet(U: SU2Element) -> np.ndarray:
    """z = U (1, 0)^T, первый столбец матрицы"""
    return U.matrix()[:, 0].copy()


def hopf(z: np.ndarray) -> np.ndarray:
    """Отображение Хопфа z -> z^+ sigma z"""
    z = np.asarray(z, dtype=complex)
    norm_error = np.max(np.abs(np.sum(np.abs(z) ** 2, axis=-1) - 1.0))
    if norm_error > 1e-10:
        raise FieldError(f"Дублет не нормирован: |z^+ z - 1| = {norm_error:.3e}")
    z1, z2 = z[..., 0], z[..., 1]
    cross = np.conj(z1) * z2
    return np.stack([2.0 * cross.real, 2.0 * cross.imag, np.abs(z1) ** 2 - np.abs(z2) ** 2], axis=-1)


def point_to_su2(r) -> SU2Element:
    """U(r) = (sigma.r + iI)(sigma.r - iI)^(-1)"""
    r = np.asarray(r, dtype=float).reshape(3)
    if not np.all(np.isfinite(r)):
        raise FieldError(f"Точка содержит нефинитные координаты: {r}")
    sr = np.einsum("k,kab->ab", r, PAULI)
    A = sr + 1j * np.eye(2)
    B = sr - 1j * np.eye(2)
    # U = A B^-1  <=>  B^T U^T = A^T
    U = np.linalg.solve(B.T, A.T).T
    return SU2Element.from_matrix(U)


def order_parameter_q(aa: AxisAngle, theta: Optional[float] = None) -> np.ndarray:
    """Q_ab = (n_a n_b - delta_ab / 3) Theta

    Args:
        aa: ось n_3; угол берётся из aa.angle, если theta не задан
        theta: значение профиля Theta(r)
    """
    theta = aa.angle if theta is None else float(theta)
    return (np.outer(aa.axis, aa.axis) - np.eye(3) / 3.0) * theta


def random_su2(rng: np.random.Generator, size: int) -> np.ndarray:
    """Равномерно распределённые единичные кватернионы (size, 4)"""
    q = rng.normal(size=(size, 4))
    return q / np.linalg.norm(q, axis=-1, keepdims=True)
