# services/monopole/thooft.py
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config.settings import get_settings
from services.charges.currents import charge_density_3d
from services.charges.integrals import surface_flux_charge
from services.charges.report import ChargeReport
from services.fields.constructors import AnalyticField
from services.grid.operators import EPS3, analytic_jacobian
from services.grid.quadrature import surface_integral
from services.monopole.gauge import GaugeConfig
from utils.errors import SingularPointError

logger = logging.getLogger(__name__)

# |phi| ниже этого порога (в единицах vev) считается нулём Хиггса
HIGGS_ZERO = 1e-12
# шаг внешней разности для дивергенции магнитного поля
DIVERGENCE_STEP = 0.05


def _points(points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.shape[-1] != 3:
        raise ValueError(f"Точки монополя должны быть трёхмерными, получено {points.shape}")
    return points


def _step(step: Optional[float]) -> float:
    return step or get_settings().FD_STEP


def higgs_zeros(cfg: GaugeConfig, points) -> np.ndarray:
    """Маска точек, где |phi| обращается в ноль"""
    norm = np.linalg.norm(cfg.higgs(_points(points)), axis=-1)
    return norm < HIGGS_ZERO * max(1.0, abs(cfg.vev))


def _require_regular(cfg: GaugeConfig, points: np.ndarray):
    zeros = higgs_zeros(cfg, points)
    if np.any(zeros):
        bad = points[zeros][0] if points.ndim > 1 else points
        raise SingularPointError(f"Направление Хиггса не определено в нуле |phi| в точке {bad}", point=bad)


def higgs_direction(cfg: GaugeConfig) -> AnalyticField:
    """Единичное поле n_a = phi^a / |phi| как аналитическое поле над R^3"""

    def direction(points: np.ndarray) -> np.ndarray:
        phi = cfg.higgs(points)
        return phi / np.linalg.norm(phi, axis=-1, keepdims=True)

    singular = ((0.0, 0.0, 0.0),) if cfg.winding != 0 else ()
    return AnalyticField("higgs-direction", 3, 3, direction, cfg.winding, singular, {"g": cfg.g})


def covariant_derivative(cfg: GaugeConfig, points, step: Optional[float] = None) -> np.ndarray:
    """D_i phi^a = d_i phi^a + g eps_abc A^b_i phi^c, форма (..., a, i)"""
    points = _points(points)
    d_phi = analytic_jacobian(cfg.higgs, points, _step(step))
    phi = cfg.higgs(points)
    A = cfg.gauge(points)
    return d_phi + cfg.g * np.einsum("abc,...bi,...c->...ai", EPS3, A, phi, optimize=True)


def field_strength(cfg: GaugeConfig, points, step: Optional[float] = None) -> np.ndarray:
    """G^a_ij = d_i A^a_j - d_j A^a_i + g eps_abc A^b_i A^c_j, форма (..., a, i, j)"""
    points = _points(points)
    dA = analytic_jacobian(cfg.gauge, points, _step(step))  # [..., a, j, i] = d_i A^a_j
    A = cfg.gauge(points)
    curl = np.swapaxes(dA, -1, -2) - dA
    return curl + cfg.g * np.einsum("abc,...bi,...cj->...aij", EPS3, A, A, optimize=True)


def thooft_tensor(cfg: GaugeConfig, points, step: Optional[float] = None) -> np.ndarray:
    """Калибровочно-инвариантный тензор 't Hooft'а F_mu_nu, форма (..., 4, 4).

    F_ij = n_a G^a_ij - (1/g) eps_abc n_a D_i n_b D_j n_c; временные компоненты
    равны нулю (A^a_0 = 0, статика).

    Args:
        cfg: конфигурация Хиггса и калибровочного поля
        points: точки (..., 3) вне нулей Хиггса
        step: шаг центральных разностей

    Returns:
        np.ndarray: антисимметричный тензор
    """
    points = _points(points)
    _require_regular(cfg, points)
    step = _step(step)
    unit = higgs_direction(cfg).func

    n = unit(points)
    dn = analytic_jacobian(unit, points, step)
    A = cfg.gauge(points)
    Dn = dn + cfg.g * np.einsum("bde,...di,...e->...bi", EPS3, A, n, optimize=True)
    G = field_strength(cfg, points, step)

    spatial = np.einsum("...a,...aij->...ij", n, G)
    spatial -= np.einsum("abc,...a,...bi,...cj->...ij", EPS3, n, Dn, Dn, optimize=True) / cfg.g

    tensor = np.zeros(points.shape[:-1] + (4, 4))
    tensor[..., 1:, 1:] = spatial
    return tensor


def magnetic_field(cfg: GaugeConfig, points, step: Optional[float] = None) -> np.ndarray:
    """B^i = F~^{0i} = -1/2 eps_ijk F_jk"""
    spatial = thooft_tensor(cfg, points, step)[..., 1:, 1:]
    return -0.5 * np.einsum("ijk,...jk->...i", EPS3, spatial)


@dataclass(frozen=True)
class MagneticCurrent:
    """Две стороны равенства d_nu F~^{mu nu} = (4 pi / g) j^mu.

    divergence и current - 4-векторы (mu = 0..3); в статике пространственные
    компоненты обеих сторон равны нулю.
    """

    divergence: np.ndarray
    current: np.ndarray
    g: float
    scale: np.ndarray
    step: float

    @property
    def discrepancy(self) -> np.ndarray:
        return np.abs(self.divergence[..., 0] - 4.0 * np.pi / self.g * self.current[..., 0])

    @property
    def relative(self) -> np.ndarray:
        """Расхождение в единицах |B|/r - характерной величины производных B"""
        return self.discrepancy / self.scale

    def to_dict(self) -> dict:
        return {
            "divergence": np.asarray(self.divergence).tolist(),
            "current": np.asarray(self.current).tolist(),
            "g": self.g,
            "discrepancy": np.asarray(self.discrepancy).tolist(),
            "scale": np.asarray(self.scale).tolist(),
            "step": self.step,
        }


def magnetic_current(cfg: GaugeConfig, points, h: float = DIVERGENCE_STEP,
                     step: Optional[float] = None) -> MagneticCurrent:
    """Магнитный ток двумя путями: разностная дивергенция B и плотность j^0 поля n

    Args:
        cfg: статическая конфигурация
        points: точки (..., 3) вдали от нулей Хиггса
        h: шаг внешней разности для d_i B^i
        step: шаг производных внутри тензора

    Returns:
        MagneticCurrent: обе стороны и их расхождение
    """
    points = _points(points)
    _require_regular(cfg, points)
    for offset in (h * np.eye(3), -h * np.eye(3)):
        _require_regular(cfg, points[..., None, :] + offset)

    dB = analytic_jacobian(lambda p: magnetic_field(cfg, p, step), points, h)
    div = np.trace(dB, axis1=-2, axis2=-1)
    j0 = charge_density_3d(higgs_direction(cfg), points, step) if cfg.winding != 0 else np.zeros(div.shape)

    zeros = np.zeros(div.shape + (3,))
    divergence = np.concatenate([div[..., None], zeros], axis=-1)
    current = np.concatenate([np.asarray(j0)[..., None], zeros], axis=-1)

    B = magnetic_field(cfg, points, step)
    r = np.linalg.norm(points, axis=-1)
    scale = np.linalg.norm(B, axis=-1) / np.where(r > 0, r, 1.0)
    # у вакуума B = 0, масштаб берём единичным, чтобы отношение оставалось конечным
    scale = np.where(scale > 0, scale, 1.0)
    result = MagneticCurrent(divergence, current, cfg.g, scale, h)
    logger.debug(f"Магнитный ток: max расхождение {float(np.max(result.discrepancy)):.3e} при h={h}")
    return result


def magnetic_flux(cfg: GaugeConfig, radius: float, n_quad: Optional[int] = None,
                  step: Optional[float] = None) -> float:
    """Поток B через сферу радиуса radius с центром в начале координат"""
    n_quad = n_quad or get_settings().N_QUAD
    return surface_integral(lambda p: magnetic_field(cfg, p, step), np.zeros(3), radius, n_quad, dim=3)


def monopole_charge(cfg: GaugeConfig, radius: Optional[float] = None,
                    n_quad: Optional[int] = None) -> ChargeReport:
    """Магнитный заряд m = N / g по потоку тока поля n через сферу.

    По умолчанию сфера берётся радиусом 4 ядра, в асимптотической области.
    В details - поток B и его отношение к потоку тока (должно равняться 4 pi / g).
    """
    radius = float(radius or 4.0 * cfg.core_radius)
    n_quad = n_quad or get_settings().N_QUAD
    topological = surface_flux_charge(higgs_direction(cfg), radius, np.zeros(3), n_quad)
    flux = magnetic_flux(cfg, radius, n_quad)
    details = {"topological_charge": topological.value, "magnetic_flux": flux}
    if abs(topological.value) > 1e-12:
        details["flux_ratio"] = flux / topological.value
        details["expected_ratio"] = 4.0 * np.pi / cfg.g
    logger.info(f"Заряд монополя: N={topological.value:.6g}, g={cfg.g}, R={radius}")
    return ChargeReport.build(
        "monopole_charge", topological.value / cfg.g, topological.method,
        grid={**topological.grid, "g": cfg.g}, unit=1.0 / cfg.g, details=details,
    )


def thooft_magnitudes(cfg: GaugeConfig, points, step: Optional[float] = None) -> np.ndarray:
    """Столбцы F_12, F_13, F_23, |B| для CSV; в нулях Хиггса стоит NaN"""
    points = _points(points)
    zeros = higgs_zeros(cfg, points)
    result = np.full(points.shape[:-1] + (4,), np.nan)
    regular = ~zeros
    if np.any(regular):
        spatial = thooft_tensor(cfg, points[regular], step)[..., 1:, 1:]
        B = -0.5 * np.einsum("ijk,...jk->...i", EPS3, spatial)
        result[regular] = np.stack([
            spatial[..., 0, 1], spatial[..., 0, 2], spatial[..., 1, 2], np.linalg.norm(B, axis=-1),
        ], axis=-1)
    return result
