# services/defects/micropolar.py
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from services.grid.lattice import Grid, MatrixField, ScalarField, gradient
from services.grid.operators import EPS3, curl_values, cof_values
from services.grid.quadrature import volume_integral
from utils.errors import FieldError, GridError

logger = logging.getLogger(__name__)

ORTHO_TOLERANCE = 1e-8
# остаток ниже этого порога считается нулевым при оценке порядка
ZERO_RESIDUAL = 1e-12


@dataclass(frozen=True)
class ContortionField:
    """Конторсия K_{b mu c} = R_{db} d_mu R_{dc}, антисимметричная по (b, c).

    values имеет форму (*n, 3, 3, 3) с индексами [b, mu, c].
    """

    grid: Grid
    values: np.ndarray = field(repr=False)
    asymmetry: float = 0.0

    def matrices(self) -> np.ndarray:
        """K_mu как матрицы: форма (*n, mu, b, c)"""
        return np.moveaxis(self.values, -2, -3)


@dataclass(frozen=True)
class ResidualReport:
    """Нормы Фробениуса остатка тождества в центральной части решётки"""

    name: str
    max_norm: float
    mean_norm: float
    h: float
    core_fraction: float
    points: int
    residual: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "h": self.h,
            "max_norm": self.max_norm,
            "mean_norm": self.mean_norm,
            "core_fraction": self.core_fraction,
            "points": self.points,
        }


def _require_rotations(R: MatrixField):
    if R.grid.dim != 3:
        raise GridError(f"Поле поворотов должно быть задано на 3D решётке, dim={R.grid.dim}")
    if R.value_shape != (3, 3):
        raise FieldError(f"Ожидалось поле матриц 3x3, получено {R.value_shape}")
    defect = np.max(np.abs(np.einsum("...ki,...kj->...ij", R.samples, R.samples) - np.eye(3)))
    if defect > ORTHO_TOLERANCE:
        raise FieldError(f"Поле не ортогонально: max |R^T R - I| = {defect:.3e}")


def dislocation_density(R: MatrixField) -> MatrixField:
    """K = R^T Curl R"""
    _require_rotations(R)
    curl = curl_values(R.samples, R.grid)
    return MatrixField(R.grid, np.einsum("...ki,...kj->...ij", R.samples, curl))


def contortion_from_rotation(R: MatrixField, order: int = 2) -> ContortionField:
    """K_{b mu c} = R_{db} d_mu R_{dc}; хранится антисимметричная по (b, c) часть"""
    _require_rotations(R)
    dR = gradient(R.samples, R.grid, order)  # [..., d, c, mu]
    raw = np.einsum("...db,...dcm->...bmc", R.samples, dR, optimize=True)
    sym = 0.5 * (raw + np.swapaxes(raw, -1, -3))
    interior = R.grid.interior_mask(1)
    asymmetry = float(np.max(np.abs(sym[interior]))) if np.any(interior) else 0.0
    logger.debug(f"Симметричная часть разностной конторсии до проекции: {asymmetry:.3e}")
    return ContortionField(R.grid, raw - sym, asymmetry)


def dislocation_from_contortion(K: ContortionField) -> MatrixField:
    """eps_jmn K_imn: та же плотность дислокаций, собранная из конторсии"""
    return MatrixField(K.grid, np.einsum("jmn,...imn->...ij", EPS3, K.values, optimize=True))


def nye_tensor(K: ContortionField) -> MatrixField:
    """Gamma_{a mu} = -1/2 eps_abc K_{b mu c}"""
    return MatrixField(K.grid, -0.5 * np.einsum("abc,...bmc->...am", EPS3, K.values, optimize=True))


def _core(grid: Grid, core_fraction: float) -> np.ndarray:
    mask = grid.core_mask(core_fraction) & grid.interior_mask(2)
    if not np.any(mask):
        raise GridError(f"Центральная часть решётки пуста при доле {core_fraction}")
    return mask


def _report(name: str, residual: np.ndarray, grid: Grid, core_fraction: float) -> ResidualReport:
    mask = _core(grid, core_fraction)
    axes = tuple(range(grid.dim, residual.ndim))
    norms = np.sqrt(np.sum(residual ** 2, axis=axes))[mask]
    report = ResidualReport(name, float(norms.max()), float(norms.mean()), float(max(grid.spacing)),
                            core_fraction, int(mask.sum()), residual)
    logger.info(f"{name}: h={report.h:.4g}, max={report.max_norm:.3e}, mean={report.mean_norm:.3e}")
    return report


def compat_residual(M: MatrixField, core_fraction: float = 0.6) -> ResidualReport:
    """Остаток Curl M + Cof M и его нормы"""
    if M.grid.dim != 3 or M.value_shape != (3, 3):
        raise FieldError("Условие совместности проверяется для поля матриц 3x3 в 3D")
    residual = curl_values(M.samples, M.grid) + cof_values(M.samples)
    return _report("compat", residual, M.grid, core_fraction)


def maurer_cartan_residual(K: ContortionField, core_fraction: float = 0.6) -> ResidualReport:
    """Остаток dK + K^K: d_nu K_rho - d_rho K_nu + [K_nu, K_rho] для nu < rho"""
    Kmu = K.matrices()
    dK = gradient(Kmu, K.grid)  # [..., rho, b, c, nu] = d_nu (K_rho)_bc
    pairs = []
    for nu in range(3):
        for rho in range(nu + 1, 3):
            curvature = dK[..., rho, :, :, nu] - dK[..., nu, :, :, rho]
            commutator = Kmu[..., nu, :, :] @ Kmu[..., rho, :, :] - Kmu[..., rho, :, :] @ Kmu[..., nu, :, :]
            pairs.append(curvature + commutator)
    return _report("maurer-cartan", np.stack(pairs, axis=-3), K.grid, core_fraction)


def refinement_orders(reports: Sequence[ResidualReport]) -> List[Optional[float]]:
    """Наблюдаемый порядок сходимости между соседними уровнями сетки"""
    orders: List[Optional[float]] = []
    for coarse, fine in zip(reports[:-1], reports[1:]):
        if coarse.max_norm < ZERO_RESIDUAL or fine.max_norm < ZERO_RESIDUAL:
            orders.append(None)
            continue
        orders.append(math.log(coarse.max_norm / fine.max_norm) / math.log(coarse.h / fine.h))
    return orders


def chern_simons_density(K: ContortionField, point: Optional[Sequence[int]] = None):
    """tr(K ^ dK + 2/3 K ^ K ^ K) как плотность по d^3x

    Args:
        K: поле конторсии
        point: мультииндекс узла; без него возвращается поле

    Returns:
        ScalarField или float
    """
    Kmu = K.matrices()
    dK = gradient(Kmu, K.grid)  # [..., rho, b, c, nu]
    kdk = np.einsum("mnr,...mbc,...rcbn->...", EPS3, Kmu, dK, optimize=True)
    kkk = np.einsum("mnr,...mab,...nbc,...rca->...", EPS3, Kmu, Kmu, Kmu, optimize=True)
    density = kdk + (2.0 / 3.0) * kkk
    if point is None:
        return ScalarField(K.grid, density)
    point = tuple(int(i) for i in point)
    if any(i <= 0 or i >= n - 1 for i, n in zip(point, K.grid.n)):
        raise GridError(f"Плотность Черна-Саймонса считается во внутренних узлах, получено {point}")
    return float(density[point])


def chern_simons_action(K: ContortionField) -> float:
    """(1/4pi) интеграл плотности; для полей Маурера-Картана равен -8 pi N"""
    return volume_integral(chern_simons_density(K)) / (4.0 * np.pi)
