# tests/test_fields.py
import numpy as np
import pytest

from services.fields.constructors import (
    constant_angle, hedgehog, monopole_config, n3, nd, polar_angle, skyrme_field, vacuum, vortex,
)
from services.fields.profiles import ProfileKind, parse_profile, profile_library, skyrme_tail_fraction
from services.fields.rotation_fields import build_rotation_field, rotation_from_su2, su2_field
from services.grid.lattice import Grid
from utils.errors import FieldError, SingularPointError


def test_vortex_values_and_singularity():
    field = vortex(2)
    assert field.winding == 2 and field.singular_points == ((0.0, 0.0),)
    value = field(np.array([[0.0, 1.0]]))
    assert value[0] == pytest.approx([np.cos(np.pi), np.sin(np.pi)], abs=1e-12)
    with pytest.raises(SingularPointError) as info:
        field(np.array([[0.0, 0.0]]))
    assert info.value.point == pytest.approx([0.0, 0.0])


def test_sampling_marks_singular_nodes():
    sampled = vortex(1).sample(Grid.cube(-1.0, 1.0, 5, 2))
    assert sampled.singular is not None
    assert sampled.singular.sum() == 1 and sampled.singular[2, 2]
    assert sampled.samples[2, 2] == pytest.approx([0.0, 1.0])
    assert np.allclose(np.sum(sampled.samples ** 2, axis=-1), 1.0)


def test_vortex_with_custom_phase_is_regular():
    field = vortex(1, phase=lambda p: p[..., 0] - p[..., 1])
    assert field.singular_points == ()
    assert field(np.array([[0.0, 0.0]]))[0] == pytest.approx([1.0, 0.0])


def test_hedgehog_points_outward():
    points = np.array([[1.0, 2.0, -2.0], [0.0, 0.0, 3.0]])
    assert hedgehog(3)(points) == pytest.approx(points / np.linalg.norm(points, axis=-1, keepdims=True))
    p4 = np.array([[1.0, 2.0, 3.0, 4.0], [-1.0, 0.5, -2.0, -0.3]])
    assert hedgehog(4)(p4) == pytest.approx(p4 / np.linalg.norm(p4, axis=-1, keepdims=True))
    with pytest.raises(ValueError):
        hedgehog(2)


def test_nd_validates_arguments():
    with pytest.raises(ValueError):
        nd(2, [], 1)
    with pytest.raises(ValueError):
        nd(5, [polar_angle(3)] * 3, 1)
    with pytest.raises(ValueError):
        nd(4, [polar_angle(3)], 1)


def test_pinned_angle_removes_singularity():
    assert n3(2, theta=constant_angle(0.0)).singular_points == ()
    assert n3(2, theta=constant_angle(1.0)).singular_points == ((0.0, 0.0, 0.0),)
    assert n3(0, theta=constant_angle(1.0)).singular_points == ()


def test_skyrme_field_is_unit_and_minus_identity_at_origin():
    field = skyrme_field(profile_library("skyrme-arctan"))
    assert field.singular_points == ()
    assert field(np.zeros((1, 3)))[0] == pytest.approx([0.0, 0.0, 0.0, -1.0], abs=1e-12)
    points = np.random.default_rng(5).normal(size=(100, 3)) * 3
    assert np.allclose(np.sum(field(points) ** 2, axis=-1), 1.0)
    # на бесконечности U -> I
    assert field(np.array([[40.0, 0.0, 0.0]]))[0, 3] == pytest.approx(1.0)


def test_vacuum_and_dimension_mismatch():
    field = vacuum(3, 2)
    assert field.sample(Grid.cube(0.0, 1.0, 4, 2)).samples[1, 2] == pytest.approx([0.0, 0.0, 1.0])
    with pytest.raises(FieldError):
        field.sample(Grid.cube(0.0, 1.0, 4, 3))
    with pytest.raises(FieldError):
        field(np.zeros((2, 3)))


def test_profiles_limits():
    exp = profile_library("skyrme-exp", a=2.0)
    assert exp.at_origin() == pytest.approx(np.pi)
    assert exp.at_infinity() == 0.0
    assert exp(2.0) == pytest.approx(np.pi * np.exp(-1.0))
    assert profile_library("skyrme-arctan").at_origin() == pytest.approx(np.pi)
    higgs = profile_library("higgs-tanh", F=3.0)
    assert higgs.at_infinity() == 3.0 and higgs(50.0) == pytest.approx(3.0)
    assert profile_library("constant", value=0.5)(np.array([1.0, 2.0])) == pytest.approx([0.5, 0.5])


def test_gauge_profile_is_continuous_at_series_switch():
    bps = profile_library("gauge-bps", g=2.0)
    assert bps(0.0) == 0.0
    below, above = bps(np.array([0.999e-3, 1.001e-3]))
    assert below == pytest.approx(above, rel=1e-2)
    # на больших r W -> 1/(g r)
    assert bps(30.0) == pytest.approx(1.0 / 60.0, rel=1e-6)


def test_profile_parsing_and_errors():
    profile = parse_profile("skyrme-exp:a=2", "skyrme-arctan")
    assert profile.kind == ProfileKind.SKYRME_EXP and profile.scale == 2.0
    assert parse_profile(None, "higgs-tanh").kind == ProfileKind.HIGGS_TANH
    with pytest.raises(ValueError):
        parse_profile("skyrme-exp:b=1", "skyrme-exp")
    with pytest.raises(ValueError):
        parse_profile("skyrme-exp:a=x", "skyrme-exp")
    with pytest.raises(ValueError):
        profile_library("no-such-profile")
    with pytest.raises(ValueError):
        profile_library("skyrme-exp", a=-1.0)


def test_skyrme_tail_fraction():
    profile = profile_library("skyrme-arctan")
    assert skyrme_tail_fraction(profile, 0.0) == pytest.approx(1.0)
    assert skyrme_tail_fraction(profile, 20.0) < 1e-20


def test_monopole_config_shapes():
    cfg = monopole_config(1, g=2.0)
    points = np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
    phi = cfg.higgs(points)
    A = cfg.gauge(points)
    assert phi.shape == (2, 3) and A.shape == (2, 3, 3)
    assert phi[0] == pytest.approx([np.tanh(1.0), 0.0, 0.0])
    # A^a_i = eps_aij n_j W: при n = e_x ненулевые A^2_3 и A^3_2
    assert A[0, 1, 2] == pytest.approx(-A[0, 2, 1])
    assert A[0, 0] == pytest.approx(np.zeros(3), abs=1e-12)
    vacuum_cfg = monopole_config(0)
    assert np.allclose(vacuum_cfg.gauge(points), 0.0)
    assert vacuum_cfg.higgs(points)[1] == pytest.approx([1.0, 0.0, 0.0])


def test_rotation_fields():
    grid = Grid.cube(-1.0, 1.0, 5, 3)
    twist = build_rotation_field("twist", grid, alpha=0.5)
    angle = 0.5 * grid.mesh()[0, 0, 4, 2]
    assert twist.samples[0, 0, 4, 0, 0] == pytest.approx(np.cos(angle))
    assert twist.samples[0, 0, 4, 1, 0] == pytest.approx(np.sin(angle))
    assert build_rotation_field("identity", grid).samples[1, 2, 3] == pytest.approx(np.eye(3))
    first = build_rotation_field("random", grid, seed=7).samples
    assert np.array_equal(first, build_rotation_field("random", grid, seed=7).samples)
    with pytest.raises(FieldError):
        build_rotation_field("skyrme", grid)
    with pytest.raises(FieldError):
        build_rotation_field("spiral", grid)
    with pytest.raises(FieldError):
        build_rotation_field("identity", Grid.cube(-1.0, 1.0, 5, 2))


def test_rotations_from_skyrme_field_are_orthogonal():
    grid = Grid.cube(-2.0, 2.0, 7, 3)
    R = rotation_from_su2(su2_field(skyrme_field(profile_library("skyrme-exp")), grid)).samples
    assert np.allclose(np.einsum("...ki,...kj->...ij", R, R), np.eye(3), atol=1e-12)
    with pytest.raises(FieldError):
        su2_field(hedgehog(3), grid)
