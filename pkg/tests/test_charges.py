# tests/test_charges.py
import numpy as np
import pytest

from config.settings import reset_settings
from services.charges.currents import current_1p1, current_2d_static, divergence_grid, current_density_grid
from services.charges.integrals import (
    charge, charge_2d, exclusion_radius, surface_flux_charge, time_slice_charge, volume_density_charge,
    winding_number,
)
from services.charges.report import ChargeMethod, ChargeReport, round_half_away
from services.fields.constructors import hedgehog, n3, skyrme_field, vortex
from services.fields.profiles import profile_library
from services.grid.lattice import Grid, VectorField
from utils.errors import MethodError, QuadratureError, SingularPointError


@pytest.mark.parametrize("N", [-3, -2, -1, 0, 1, 2, 3])
def test_winding_number_of_vortex(N):
    report = winding_number(vortex(N))
    assert report.method == ChargeMethod.CONTOUR
    assert report.nearest_integer == N
    assert report.value == pytest.approx(N, abs=1e-9)
    assert report.details["reliable"]


def test_winding_number_off_center_is_zero():
    report = winding_number(vortex(2), center=(3.0, 0.0), radius=1.0)
    assert report.value == pytest.approx(0.0, abs=1e-9)


def test_contour_through_singular_point():
    with pytest.raises(SingularPointError):
        winding_number(vortex(1), center=(1.0, 0.0), radius=1.0)


def test_winding_number_refines_fast_phase():
    report = winding_number(lambda p: 20 * np.arctan2(p[..., 1], p[..., 0]), n_quad=16)
    assert report.nearest_integer == 20
    assert report.grid["n_quad"] > 16


@pytest.mark.parametrize("N", [-2, -1, 0, 1, 2, 3])
def test_surface_flux_of_n3(N):
    report = charge(n3(N))
    assert report.method == ChargeMethod.SURFACE_FLUX
    assert report.value == pytest.approx(N, abs=1e-6)


@pytest.mark.parametrize("N", [-2, 1, 3])
def test_vortex_charge_as_flux(N):
    report = charge_2d(vortex(N), radius=0.7)
    assert report.quantity == "vortex_charge"
    assert report.value == pytest.approx(N, abs=1e-6)


def test_hedgehog_4d_flux():
    report = charge(hedgehog(4), n_quad=24)
    assert report.grid["dim"] == 4
    assert report.value == pytest.approx(1.0, abs=1e-6)


def test_flux_is_radius_independent():
    values = [surface_flux_charge(hedgehog(3), radius=r).value for r in (0.3, 1.0, 4.0)]
    assert values == pytest.approx([1.0, 1.0, 1.0], abs=1e-6)


def test_volume_density_with_excluded_ball():
    grid = Grid.from_spacing(-3.0, 3.0, 0.1, 3)
    report = charge(hedgehog(3), method="volume-density", grid=grid)
    assert report.nearest_integer == 1
    assert report.value == pytest.approx(1.0, abs=0.05)
    assert report.grid["exclusion_radius"] == pytest.approx(1.5)
    assert report.details["ball"] == pytest.approx(1.0, abs=1e-6)


def test_volume_density_of_planar_vortex():
    grid = Grid.from_spacing(-3.0, 3.0, 0.1, 2)
    report = volume_density_charge(vortex(2), grid)
    assert report.nearest_integer == 2
    assert report.value == pytest.approx(2.0, abs=0.05)


def test_volume_density_of_skyrmion():
    grid = Grid.from_spacing(-5.0, 5.0, 0.2, 3)
    report = charge(skyrme_field(profile_library("skyrme-arctan")), grid=grid)
    assert report.method == ChargeMethod.VOLUME_DENSITY
    assert report.nearest_integer == 1
    assert report.value == pytest.approx(1.0, abs=0.05)


def test_volume_density_of_skyrmion_is_extrapolated():
    grid = Grid.from_spacing(-4.5, 4.5, 0.1, 3)
    report = charge(skyrme_field(profile_library("skyrme-arctan")), grid=grid)
    assert report.value == pytest.approx(1.0, abs=1e-3)
    assert report.details["stencil_order"] == 4
    assert report.details["extrapolated"] is True
    assert report.details["coarse"] != report.details["raw"]


def test_volume_density_with_singular_point_is_not_extrapolated():
    report = volume_density_charge(hedgehog(3), Grid.from_spacing(-3.0, 3.0, 0.1, 3))
    assert report.details["extrapolated"] is False
    assert "coarse" not in report.details
    # за пределами шара плотность det(dn) почти равна нулю
    assert abs(report.details["outside_ball"]) < 0.05


def test_excluded_ball_must_fit():
    with pytest.raises(QuadratureError):
        volume_density_charge(hedgehog(3), Grid.cube(-1.0, 1.0, 21, 3))


def test_exclusion_radius(monkeypatch):
    assert exclusion_radius(Grid.from_spacing(-3.0, 3.0, 0.1, 3)) == pytest.approx(1.5)
    assert exclusion_radius(Grid.from_spacing(-3.0, 3.0, 0.6, 3)) == pytest.approx(1.8)
    monkeypatch.setenv("TOPO_EXCLUSION_RADIUS_MIN", "1.0")
    reset_settings()
    assert exclusion_radius(Grid.from_spacing(-3.0, 3.0, 0.1, 3)) == pytest.approx(1.0)


def test_method_dimension_checks():
    with pytest.raises(MethodError):
        charge(n3(1), method="contour")
    with pytest.raises(MethodError):
        charge(skyrme_field(profile_library("skyrme-exp")), method="volume-density")
    with pytest.raises(MethodError):
        charge(vortex(1), d=3)
    with pytest.raises(MethodError):
        charge(vortex(1), method="asymptotic-phase")
    with pytest.raises(ValueError):
        charge(vortex(1), method="monte-carlo")


def _kink_phase(v):
    gamma = 1.0 / np.sqrt(1.0 - v ** 2)
    return lambda p: 4.0 * np.arctan(np.exp(gamma * (p[..., 1] - v * p[..., 0])))


def test_current_1p1_is_transported_by_moving_kink():
    v = 0.4
    field = vortex(1, phase=_kink_phase(v))
    points = np.stack([np.full(9, 0.3), np.linspace(-2.0, 2.0, 9)], axis=-1)
    J = current_1p1(field, points)
    assert J[..., 1] == pytest.approx(v * J[..., 0], abs=1e-8)
    assert np.all(J[..., 0] > 0)


def test_static_current_is_divergence_free_off_core():
    grid = Grid.from_spacing(-2.0, 2.0, 0.05, 2)
    J = current_density_grid(vortex(1).sample(grid), 2)
    div = divergence_grid(J, grid)
    far = (grid.radius() > 1.0) & grid.interior_mask(2)
    assert np.max(np.abs(div[far])) < 1e-2
    with pytest.raises(SingularPointError):
        current_2d_static(vortex(1), np.zeros((1, 2)))
    with pytest.raises(MethodError):
        divergence_grid(np.zeros(grid.n + (3,)), grid)


def test_time_slice_charge_of_kink():
    v = 0.5
    grid = Grid((0.0, -15.0), (1.0, 15.0), (5, 601))
    theta = _kink_phase(v)(grid.mesh())
    field = VectorField(grid, np.stack([np.cos(theta), np.sin(theta)], axis=-1))
    report = time_slice_charge(field, 2)
    assert report.grid["t"] == pytest.approx(0.5)
    assert report.value == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(MethodError):
        time_slice_charge(VectorField(Grid.cube(0.0, 1.0, 5, 3), np.zeros((5, 5, 5, 2))), 0)


@pytest.mark.parametrize("x,expected", [(2.5, 3), (-2.5, -3), (0.49, 0), (-0.51, -1), (1.0, 1)])
def test_round_half_away(x, expected):
    assert round_half_away(x) == expected


def test_report_quantization_with_unit():
    report = ChargeReport.build("monopole_charge", 1.0, ChargeMethod.SURFACE_FLUX, unit=0.5)
    assert report.nearest_integer == 2 and report.distance == 0.0
    assert report.to_dict()["unit"] == 0.5
    off = ChargeReport.build("q", 1.3, "contour")
    assert off.nearest_integer == 1
    assert off.error_estimate == pytest.approx(0.3)
    assert not off.within(1e-3) and off.within(0.5)
    assert "unit" not in off.to_dict() and "details" not in off.to_dict()
    with pytest.raises(ValueError):
        ChargeReport.build("q", float("nan"), "contour")
