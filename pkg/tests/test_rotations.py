# tests/test_rotations.py
import numpy as np
import pytest

from services.rotations.su2 import (
    AxisAngle, Rotation3, SU2Element, correspondence_matrices, doublet, hopf, order_parameter_q,
    point_to_su2, quaternion_matrices, random_su2, rodrigues, skyrme_correspondence, su2_from_axis,
    trace_correspondence,
)
from utils.errors import FieldError


@pytest.fixture
def quaternions():
    return random_su2(np.random.default_rng(2024), 1000)


def test_double_cover_on_random_elements(quaternions):
    R_plus = correspondence_matrices(quaternions)
    R_minus = correspondence_matrices(-quaternions)
    assert np.max(np.abs(R_plus - R_minus)) < 1e-10
    ortho = np.einsum("nki,nkj->nij", R_plus, R_plus) - np.eye(3)
    assert np.max(np.abs(ortho)) < 1e-10
    assert np.allclose(np.linalg.det(R_plus), 1.0, atol=1e-10)


def test_trace_and_closed_form_agree(quaternions):
    closed = correspondence_matrices(quaternions)
    traced = trace_correspondence(quaternion_matrices(quaternions))
    assert np.max(np.abs(closed - traced)) < 1e-12


def test_correspondence_reverses_products(quaternions):
    U1 = quaternion_matrices(quaternions[:10])
    U2 = quaternion_matrices(quaternions[10:20])
    product = trace_correspondence(U1 @ U2)
    assert np.allclose(product, trace_correspondence(U2) @ trace_correspondence(U1), atol=1e-12)


@pytest.mark.parametrize("omega", [0.0, 0.4, 1.3, 2.9])
def test_half_angle(omega):
    aa = AxisAngle(np.array([1.0, 2.0, -0.5]), omega)
    U = su2_from_axis(aa)
    expected = rodrigues(AxisAngle(aa.axis, 2.0 * omega))
    assert skyrme_correspondence(U).allclose(expected)
    assert skyrme_correspondence(U, use_trace=True).allclose(expected)


def test_full_turn_in_su2_is_minus_identity():
    U = su2_from_axis(AxisAngle([0.0, 0.0, 1.0], np.pi))
    assert U.allclose(-SU2Element.identity())
    assert rodrigues(AxisAngle([0.0, 1.0, 0.0], 2 * np.pi)).allclose(np.eye(3))


def test_elements_are_normalized():
    U = SU2Element([0.0, 0.0, 0.0, 2.0])
    assert U.allclose(SU2Element.identity())
    with pytest.raises(FieldError):
        SU2Element([0.0, 0.0, 0.0, 0.0])
    with pytest.raises(FieldError):
        Rotation3(2.0 * np.eye(3))
    with pytest.raises(ValueError):
        AxisAngle([0.0, 0.0, 0.0], 1.0)


def test_matrix_round_trip_is_unitary():
    U = SU2Element([0.1, -0.7, 0.3, 0.5])
    M = U.matrix()
    assert np.allclose(M.conj().T @ M, np.eye(2), atol=1e-12)
    assert np.linalg.det(M) == pytest.approx(1.0)
    assert SU2Element.from_matrix(M).allclose(U)


def test_point_map_compactifies_space():
    assert point_to_su2([0.0, 0.0, 0.0]).allclose(-SU2Element.identity())
    far = point_to_su2([1e6, 0.0, 0.0]).matrix()
    assert np.max(np.abs(far - np.eye(2))) < 1e-5
    with pytest.raises(FieldError):
        point_to_su2([np.inf, 0.0, 0.0])


def test_hopf_map_gives_third_row(quaternions):
    for q in quaternions[:50]:
        U = SU2Element(q)
        n = hopf(doublet(U))
        assert np.linalg.norm(n) == pytest.approx(1.0)
        assert n == pytest.approx(skyrme_correspondence(U).matrix[2, :], abs=1e-12)


def test_hopf_rejects_unnormalized_doublet():
    with pytest.raises(FieldError):
        hopf(np.array([1.0, 1.0], dtype=complex))


def test_order_parameter_is_traceless():
    aa = AxisAngle([0.0, 0.0, 1.0], 0.7)
    Q = order_parameter_q(aa)
    assert np.trace(Q) == pytest.approx(0.0, abs=1e-14)
    assert Q[2, 2] == pytest.approx(2.0 / 3.0 * 0.7)
    assert order_parameter_q(aa, theta=0.0) == pytest.approx(np.zeros((3, 3)))
