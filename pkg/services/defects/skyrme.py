# services/defects/skyrme.py
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np

from services.charges.report import ChargeMethod, ChargeReport
from services.defects.micropolar import ContortionField, contortion_from_rotation, nye_tensor
from services.grid.lattice import MatrixField, ScalarField, VectorField, gradient
from services.grid.operators import EPS3
from services.grid.quadrature import richardson, volume_integral
from services.rotations.su2 import PAULI, correspondence_matrices, quaternion_matrices
from utils.errors import FieldError, GridError

logger = logging.getLogger(__name__)

UNIT_TOLERANCE = 1e-10
# отклонение от целого, при котором предупреждаем об обрезании области
TRUNCATION_WARNING = 0.1
# порядок шаблона для интегралов барионного числа
BARYON_STENCIL_ORDER = 4


class BaryonFormula(str, Enum):
    DET_B = "det-B"
    DET_GAMMA = "det-Gamma"
    KKK = "KKK"


@dataclass(frozen=True)
class BFieldPair:
    """B-поле Скирма в двух формах и конторсия, из которой построена вторая"""

    trace: MatrixField
    rotation: MatrixField
    contortion: ContortionField

    def max_deviation(self, mask: Optional[np.ndarray] = None) -> float:
        diff = np.abs(self.trace.samples - self.rotation.samples).max(axis=(-2, -1))
        if mask is not None:
            diff = diff[mask]
        return float(diff.max())

    def gamma_deviation(self, mask: Optional[np.ndarray] = None) -> float:
        """max |2B - Gamma| для B в форме следа"""
        gamma = nye_tensor(self.contortion).samples
        diff = np.abs(2.0 * self.trace.samples - gamma).max(axis=(-2, -1))
        if mask is not None:
            diff = diff[mask]
        return float(diff.max())


def _require_su2(U: VectorField):
    if U.grid.dim != 3:
        raise GridError(f"Поле SU(2) должно быть задано на 3D решётке, dim={U.grid.dim}")
    if U.components != 4:
        raise FieldError(f"Ожидались кватернионы из 4 компонент, получено {U.components}")
    defect = np.max(np.abs(np.sum(U.samples ** 2, axis=-1) - 1.0))
    if defect > UNIT_TOLERANCE:
        raise FieldError(f"Кватернионы не единичны: max ||q|^2 - 1| = {defect:.3e}")


def b_trace_form(U: VectorField, order: int = 2) -> MatrixField:
    """B^a_mu = 1/(2i) tr(U^+ sigma^a d_mu U)"""
    _require_su2(U)
    matrices = quaternion_matrices(U.samples)
    adjoint = np.conj(np.swapaxes(matrices, -1, -2))
    dq = np.moveaxis(gradient(U.samples, U.grid, order), -1, -2)  # [..., mu, 4]
    dU = quaternion_matrices(dq)  # матрица линейна по кватерниону
    B = np.einsum("...ij,ajk,...mki->...am", adjoint, PAULI, dU, optimize=True) / 2j
    imaginary = float(np.max(np.abs(B.imag)))
    if imaginary > 1e-8:
        logger.warning(f"Мнимая часть B в форме следа: {imaginary:.3e}")
    return MatrixField(U.grid, B.real)


def b_rotation_form(K: ContortionField) -> MatrixField:
    """B^a_mu = -1/4 eps_abc K_{b mu c}"""
    return MatrixField(K.grid, -0.25 * np.einsum("abc,...bmc->...am", EPS3, K.values, optimize=True))


def skyrme_b(U: VectorField, order: int = 2) -> BFieldPair:
    """B-поле в форме следа и через поворот R(U) по соответствию Скирма"""
    _require_su2(U)
    R = MatrixField(U.grid, correspondence_matrices(U.samples))
    K = contortion_from_rotation(R, order)
    pair = BFieldPair(b_trace_form(U, order), b_rotation_form(K), K)
    logger.debug(f"B-поле: расхождение форм {pair.max_deviation(U.grid.interior_mask(1)):.3e}")
    return pair


def kkk_density(K: ContortionField) -> np.ndarray:
    """eps^{mu nu rho} tr(K_mu K_nu K_rho)"""
    Kmu = K.matrices()
    return np.einsum("mnr,...mab,...nbc,...rca->...", EPS3, Kmu, Kmu, Kmu, optimize=True)


def baryon_density(pair: BFieldPair, formula: BaryonFormula, b_form: str = "rotation") -> np.ndarray:
    """Подынтегральное выражение барионного числа во всех узлах"""
    formula = BaryonFormula(formula)
    if formula == BaryonFormula.DET_B:
        B = pair.rotation if b_form == "rotation" else pair.trace
        return -np.linalg.det(B.samples) / (2.0 * np.pi ** 2)
    if formula == BaryonFormula.DET_GAMMA:
        gamma = nye_tensor(pair.contortion)
        return -np.linalg.det(gamma.samples) / (16.0 * np.pi ** 2)
    return kkk_density(pair.contortion) / (96.0 * np.pi ** 2)


def baryon_levels(U: VectorField, order: int = BARYON_STENCIL_ORDER, extrapolate: bool = True) -> List[BFieldPair]:
    """B-поле на решётке h и, если её можно проредить, на решётке 2h"""
    levels = [skyrme_b(U, order)]
    coarse = U.coarsened() if extrapolate else None
    if coarse is not None:
        levels.append(skyrme_b(coarse, order))
    elif extrapolate:
        logger.debug(f"Решётку {U.grid.n} нельзя проредить вдвое, экстраполяция пропущена")
    return levels


def baryon_number(U: VectorField, formula="det-B", b_form: str = "rotation",
                  levels: Optional[Sequence[BFieldPair]] = None, details: Optional[Dict] = None,
                  order: int = BARYON_STENCIL_ORDER, extrapolate: bool = True) -> ChargeReport:
    """Барионное число поля SU(2) одним из трёх эквивалентных интегралов

    Производные берутся шаблоном порядка order; при extrapolate=True интеграл
    на решётке h уточняется по решётке 2h (экстраполяция Ричардсона).

    Args:
        U: единичные кватернионы на 3D решётке
        formula: det-B, det-Gamma или KKK
        b_form: rotation (общий с Gamma и K шаблон) или trace (форма следа)
        levels: уже вычисленные B-поля (h и, возможно, 2h) из baryon_levels
        details: дополнительные сведения для отчёта
        order: порядок разностного шаблона (2 или 4)
        extrapolate: уточнять по решётке 2h

    Returns:
        ChargeReport: метод volume-density
    """
    formula = BaryonFormula(formula)
    if b_form not in ("rotation", "trace"):
        raise ValueError(f"Форма B должна быть rotation или trace, получено '{b_form}'")
    levels = levels or baryon_levels(U, order, extrapolate)
    values = [volume_integral(ScalarField(pair.trace.grid, baryon_density(pair, formula, b_form)))
              for pair in levels]
    value = values[0]
    info = {"formula": formula.value, "b_form": b_form, "stencil_order": order,
            "extrapolated": len(values) > 1, "raw": values[0]}
    if len(values) > 1:
        info["coarse"] = values[1]
        value = richardson(values[0], values[1], order)
    report = ChargeReport.build(
        "baryon_number", value, ChargeMethod.VOLUME_DENSITY, grid=U.grid.to_dict(),
        details={**info, **(details or {})},
    )
    if report.distance > TRUNCATION_WARNING:
        logger.warning(
            f"Барионное число {value:.6f} далеко от целого: вероятно, область слишком мала"
        )
    return report


def baryon_triality(U: VectorField, b_form: str = "rotation", order: int = BARYON_STENCIL_ORDER,
                    extrapolate: bool = True) -> Dict[str, ChargeReport]:
    """Все три формулы на одном и том же разностном шаблоне"""
    levels = baryon_levels(U, order, extrapolate)
    return {f.value: baryon_number(U, f, b_form, levels, order=order) for f in BaryonFormula}
