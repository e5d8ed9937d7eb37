# tests/test_defects.py
import numpy as np
import pytest

from services.defects.micropolar import (
    ResidualReport, chern_simons_action, chern_simons_density, compat_residual, contortion_from_rotation,
    dislocation_density, dislocation_from_contortion, maurer_cartan_residual, nye_tensor, refinement_orders,
)
from services.defects.skyrme import BaryonFormula, baryon_number, baryon_triality, skyrme_b
from services.fields.constructors import skyrme_field
from services.fields.profiles import profile_library
from services.fields.rotation_fields import build_rotation_field, random_matrix_field, smooth_field, twist_field
from services.grid.lattice import Grid, VectorField
from utils.errors import FieldError, GridError


def _nye(grid, kind="smooth"):
    return nye_tensor(contortion_from_rotation(build_rotation_field(kind, grid)))


def test_twist_satisfies_compatibility_exactly():
    grid = Grid.from_spacing(-1.0, 1.0, 0.1, 3)
    K = contortion_from_rotation(twist_field(grid, alpha=1.3))
    assert compat_residual(nye_tensor(K)).max_norm < 1e-9
    assert maurer_cartan_residual(K).max_norm < 1e-9
    assert K.asymmetry < 1e-12


def test_smooth_field_residual_converges_at_second_order():
    reports = [compat_residual(_nye(Grid.from_spacing(-1.0, 1.0, h, 3))) for h in (0.1, 0.05, 0.025)]
    assert reports[0].max_norm > reports[1].max_norm > reports[2].max_norm
    # каждое измельчение вдвое уменьшает остаток примерно в 4 раза
    for coarse, fine in zip(reports[:-1], reports[1:]):
        assert 3.2 <= coarse.max_norm / fine.max_norm <= 4.8
    orders = refinement_orders(reports)
    assert len(orders) == 2
    assert min(orders) >= 1.7


def test_maurer_cartan_residual_converges():
    reports = [maurer_cartan_residual(contortion_from_rotation(smooth_field(Grid.from_spacing(-1.0, 1.0, h, 3))))
               for h in (0.1, 0.05)]
    assert refinement_orders(reports)[0] >= 1.7


def test_random_matrix_field_is_incompatible():
    grid = Grid.from_spacing(-1.0, 1.0, 0.1, 3)
    M = random_matrix_field(grid, seed=3)
    assert compat_residual(M).max_norm > 0.1
    with pytest.raises(FieldError):
        contortion_from_rotation(M)


def test_dislocation_density_two_ways():
    grid = Grid.from_spacing(-1.0, 1.0, 0.1, 3)
    R = twist_field(grid, alpha=0.8)
    inner = grid.interior_mask(1)
    direct = dislocation_density(R).samples[inner]
    via_contortion = dislocation_from_contortion(contortion_from_rotation(R)).samples[inner]
    assert np.max(np.abs(direct - via_contortion)) < 1e-12
    # закрутка вокруг z даёт винтовую дислокацию: Gamma_33 = alpha
    gamma = nye_tensor(contortion_from_rotation(R)).samples[10, 10, 10]
    assert np.trace(gamma) == pytest.approx(0.8, rel=1e-2)
    assert gamma[2, 2] == pytest.approx(0.8, rel=1e-2)


def test_chern_simons_of_twist_vanishes():
    grid = Grid.from_spacing(-1.0, 1.0, 0.2, 3)
    K = contortion_from_rotation(twist_field(grid))
    assert chern_simons_density(K, (5, 5, 5)) == pytest.approx(0.0, abs=1e-12)
    assert chern_simons_action(K) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(GridError):
        chern_simons_density(K, (0, 5, 5))


def test_refinement_orders():
    reports = [ResidualReport("compat", norm, 0.0, h, 0.6, 1) for norm, h in ((0.04, 0.2), (0.01, 0.1), (0.0, 0.05))]
    orders = refinement_orders(reports)
    assert orders[0] == pytest.approx(2.0)
    assert orders[1] is None


def test_core_must_not_be_empty():
    with pytest.raises(GridError):
        compat_residual(_nye(Grid.cube(-1.0, 1.0, 8, 3)), core_fraction=0.1)


@pytest.fixture(scope="module")
def skyrmion():
    grid = Grid.from_spacing(-4.0, 4.0, 0.125, 3)
    return skyrme_field(profile_library("skyrme-arctan")).sample(grid)


def test_baryon_triality(skyrmion):
    reports = baryon_triality(skyrmion)
    assert set(reports) == {f.value for f in BaryonFormula}
    values = [r.value for r in reports.values()]
    for report in reports.values():
        assert report.nearest_integer == 1
        assert report.value == pytest.approx(1.0, abs=0.05)
        assert report.details["formula"] in reports
    # все три формулы считаются на одном шаблоне и совпадают алгебраически
    assert max(values) - min(values) < 1e-8


def test_baryon_number_with_trace_form(skyrmion):
    report = baryon_number(skyrmion, "det-B", b_form="trace")
    assert report.details["b_form"] == "trace"
    assert report.value == pytest.approx(1.0, abs=0.05)
    with pytest.raises(ValueError):
        baryon_number(skyrmion, "det-B", b_form="matrix")
    with pytest.raises(ValueError):
        baryon_number(skyrmion, "det-R")


@pytest.fixture(scope="module")
def wide_skyrmions():
    grid = Grid.from_spacing(-4.5, 4.5, 0.1, 3)
    return {name: skyrme_field(profile_library(name)).sample(grid) for name in ("skyrme-arctan", "skyrme-exp")}


def test_baryon_formulas_reach_unit_charge(wide_skyrmions):
    reports = baryon_triality(wide_skyrmions["skyrme-arctan"])
    values = [r.value for r in reports.values()]
    for report in reports.values():
        assert report.value == pytest.approx(1.0, abs=1e-3)
        assert report.details["stencil_order"] == 4
        assert report.details["extrapolated"] is True
        assert report.details["coarse"] != report.details["raw"]
    assert max(values) - min(values) < 1e-6 * abs(np.mean(values))


def test_baryon_number_does_not_depend_on_profile(wide_skyrmions):
    arctan = baryon_number(wide_skyrmions["skyrme-arctan"]).value
    exp = baryon_number(wide_skyrmions["skyrme-exp"]).value
    assert exp == pytest.approx(1.0, abs=3e-3)
    assert abs(exp - arctan) < 3e-3


def test_second_order_stencil_without_extrapolation_is_coarser(skyrmion):
    plain = baryon_number(skyrmion, order=2, extrapolate=False)
    assert plain.details["extrapolated"] is False and "coarse" not in plain.details
    refined = baryon_number(skyrmion)
    assert abs(refined.value - 1.0) < abs(plain.value - 1.0)


@pytest.mark.slow
def test_baryon_number_on_fine_grid():
    grid = Grid.from_spacing(-4.0, 4.0, 0.05, 3)
    values = {}
    for name in ("skyrme-arctan", "skyrme-exp"):
        reports = baryon_triality(skyrme_field(profile_library(name)).sample(grid))
        triple = [r.value for r in reports.values()]
        for value in triple:
            assert value == pytest.approx(1.0, abs=1e-3)
        assert max(triple) - min(triple) < 1e-6 * abs(np.mean(triple))
        values[name] = triple[0]
    assert abs(values["skyrme-exp"] - values["skyrme-arctan"]) < 1e-3


def _b_levels(steps, lo=-0.8, hi=0.8):
    pairs = []
    for h in steps:
        grid = Grid.from_spacing(lo, hi, h, 3)
        pairs.append((grid, skyrme_b(skyrme_field(profile_library("skyrme-arctan")).sample(grid), order=2)))
    return pairs


def test_b_and_nye_tensor_agree_at_second_order():
    reports_gamma, reports_forms = [], []
    for grid, pair in _b_levels((0.1, 0.05, 0.025)):
        mask = grid.core_mask(0.6) & grid.interior_mask(1)
        h = grid.spacing[0]
        reports_gamma.append(ResidualReport("2B-Gamma", pair.gamma_deviation(mask), 0.0, h, 0.6, int(mask.sum())))
        reports_forms.append(ResidualReport("B-forms", pair.max_deviation(mask), 0.0, h, 0.6, int(mask.sum())))
    for reports in (reports_gamma, reports_forms):
        orders = refinement_orders(reports)
        assert all(order is not None and order >= 1.7 for order in orders)
    # форма через поворот совпадает с Gamma/2 тождественно
    grid, pair = _b_levels((0.2,))[0]
    gamma = nye_tensor(pair.contortion).samples
    assert np.max(np.abs(2.0 * pair.rotation.samples - gamma)) < 1e-12
    assert reports_forms[-1].max_norm < 2.5e-3


def test_skyrme_b_requires_unit_quaternions():
    grid = Grid.cube(-1.0, 1.0, 5, 3)
    with pytest.raises(FieldError):
        skyrme_b(VectorField(grid, np.full(grid.n + (4,), 0.9)))
    with pytest.raises(FieldError):
        skyrme_b(VectorField(grid, np.ones(grid.n + (3,))))
