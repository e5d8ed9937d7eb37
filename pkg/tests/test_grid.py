# tests/test_grid.py
import numpy as np
import pytest

from services.grid.lattice import (
    Grid, MatrixField, ScalarField, VectorField, gradient, interpolate, parse_grid, partial,
)
from services.grid.operators import (
    analytic_jacobian, cof_matrix, cof_values, curl_matrix, levi_civita,
)
from services.grid.quadrature import (
    contour_integral, richardson, sphere_area, surface_integral, volume_integral, wrapped_angle_increment,
)
from utils.errors import FieldError, GridError, QuadratureError


def test_grid_geometry():
    grid = Grid.from_spacing(-1.0, 1.0, 0.5, 2)
    assert grid.n == (5, 5)
    assert grid.spacing == pytest.approx((0.5, 0.5))
    assert grid.mesh().shape == (5, 5, 2)
    assert grid.size == 25
    assert grid.interior_mask(1).sum() == 9
    assert grid.core_mask(0.5).sum() == 9


@pytest.mark.parametrize("lo,hi,n", [
    ((0.0,), (1.0,), (3,)),
    ((1.0,), (0.0,), (5,)),
    ((0.0,) * 5, (1.0,) * 5, (4,) * 5),
])
def test_grid_rejects_bad_axes(lo, hi, n):
    with pytest.raises(GridError):
        Grid(lo, hi, n)


def test_parse_grid():
    grid = parse_grid("-1,1,5", 3)
    assert grid.dim == 3 and grid.n == (5, 5, 5)
    grid = parse_grid("0,1,5;0,2,9", 2)
    assert grid.spacing == pytest.approx((0.25, 0.25))
    with pytest.raises(GridError):
        parse_grid("1,2", 1)
    with pytest.raises(GridError):
        parse_grid("0,1,5;0,1,5", 3)


def test_fields_validate_shape_and_values():
    grid = Grid.cube(0.0, 1.0, 5, 2)
    with pytest.raises(FieldError):
        ScalarField(grid, np.zeros((5, 4)))
    with pytest.raises(FieldError):
        VectorField(grid, np.zeros((5, 5)))
    values = np.zeros((5, 5))
    values[2, 2] = np.nan
    with pytest.raises(FieldError):
        ScalarField(grid, values)


def test_gradient_exact_for_quadratics():
    grid = Grid.cube(-1.0, 1.0, 9, 2)
    mesh = grid.mesh()
    f = mesh[..., 0] ** 2 + 3.0 * mesh[..., 1]
    d = gradient(f, grid)
    assert d.shape == (9, 9, 2)
    assert np.allclose(d[..., 0], 2.0 * mesh[..., 0], atol=1e-12)
    assert np.allclose(d[..., 1], 3.0, atol=1e-12)


def test_fourth_order_gradient_exact_for_quartics():
    grid = Grid.cube(-1.0, 1.0, 11, 2)
    mesh = grid.mesh()
    x, y = mesh[..., 0], mesh[..., 1]
    d = gradient(x ** 4 + y ** 3, grid, order=4)
    inner = (slice(2, -2), slice(2, -2))
    assert np.allclose(d[..., 0][inner], 4.0 * x[inner] ** 3, atol=1e-12)
    assert np.allclose(d[..., 1][inner], 3.0 * y[inner] ** 2, atol=1e-12)
    # у границы остаётся шаблон второго порядка: квадратичные поля дифференцируются точно везде
    d = gradient(x ** 2 - 2.0 * y, grid, order=4)
    assert np.allclose(d[..., 0], 2.0 * x, atol=1e-12)
    assert np.allclose(d[..., 1], -2.0, atol=1e-12)


def test_fourth_order_gradient_converges():
    errors = []
    for n in (17, 33):
        grid = Grid.cube(-1.0, 1.0, n, 1)
        x = grid.axes()[0]
        d = gradient(np.sin(2.0 * x), grid, order=4)[..., 0]
        errors.append(np.max(np.abs(d - 2.0 * np.cos(2.0 * x))[2:-2]))
    assert errors[0] / errors[1] > 12.0


def test_gradient_order_checks():
    grid = Grid.cube(0.0, 1.0, 4, 2)
    with pytest.raises(GridError):
        gradient(np.zeros(grid.n), grid, order=3)
    with pytest.raises(GridError):
        gradient(np.zeros(grid.n), grid, order=4)


def test_coarsened_grid_and_field():
    grid = Grid.cube(-1.0, 1.0, 9, 2)
    coarse = grid.coarsened()
    assert coarse.n == (5, 5)
    assert coarse.spacing == pytest.approx((0.5, 0.5))
    assert Grid.cube(-1.0, 1.0, 8, 2).coarsened() is None
    assert Grid.cube(-1.0, 1.0, 7, 2).coarsened() is None

    singular = np.zeros(grid.n, dtype=bool)
    singular[4, 4] = True
    field = VectorField(grid, grid.mesh(), singular)
    thinned = field.coarsened()
    assert isinstance(thinned, VectorField)
    assert np.allclose(thinned.samples, coarse.mesh())
    assert thinned.singular[2, 2] and thinned.singular.sum() == 1


def test_richardson_removes_leading_error():
    # I + C h^4 на шагах h и 2h
    assert richardson(1.0 + 1e-3, 1.0 + 16e-3, 4) == pytest.approx(1.0, abs=1e-14)
    assert richardson(2.0 + 0.01, 2.0 + 0.04, 2) == pytest.approx(2.0, abs=1e-14)


def test_partial_boundary_policy():
    grid = Grid.cube(0.0, 1.0, 11, 1)
    field = ScalarField(grid, grid.axes()[0] ** 2)
    assert partial(field, 0, (5,)) == pytest.approx(1.0)
    with pytest.raises(GridError):
        partial(field, 0, (0,))
    assert partial(field, 0, (0,), one_sided=True) == pytest.approx(0.0, abs=1e-12)
    assert partial(field, 0, (10,), one_sided=True) == pytest.approx(2.0)


def test_levi_civita():
    eps = levi_civita(3)
    assert eps[0, 1, 2] == 1.0 and eps[1, 0, 2] == -1.0 and eps[0, 0, 1] == 0.0
    eps4 = levi_civita(4)
    assert eps4[0, 1, 2, 3] == 1.0 and eps4[1, 0, 2, 3] == -1.0
    assert np.abs(eps4).sum() == 24


def test_curl_of_gradient_field_vanishes():
    grid = Grid.cube(-1.0, 1.0, 9, 3)
    mesh = grid.mesh()
    # каждая строка - градиент квадратичной функции, производные точны
    rows = [np.stack([2 * mesh[..., 0], mesh[..., 2], mesh[..., 1]], axis=-1),
            np.stack([mesh[..., 1], mesh[..., 0], np.ones(grid.n)], axis=-1),
            np.stack([np.zeros(grid.n), 2 * mesh[..., 1], 2 * mesh[..., 2]], axis=-1)]
    M = MatrixField(grid, np.stack(rows, axis=-2))
    assert np.max(np.abs(curl_matrix(M).samples)) < 1e-12


def test_cofactor_matches_adjugate():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(5, 3, 3))
    cof = cof_values(A)
    expected = np.linalg.det(A)[:, None, None] * np.linalg.inv(A).transpose(0, 2, 1)
    assert np.allclose(cof, expected, atol=1e-10)
    grid = Grid.cube(0.0, 1.0, 4, 1)
    assert cof_matrix(MatrixField(grid, np.broadcast_to(2.0 * np.eye(3), (4, 3, 3)))).samples[0] == \
        pytest.approx(4.0 * np.eye(3))


def test_analytic_jacobian():
    points = np.array([[0.3, -0.2], [1.0, 2.0]])
    jac = analytic_jacobian(lambda p: np.stack([p[..., 0] * p[..., 1], np.sin(p[..., 0])], axis=-1), points)
    assert jac.shape == (2, 2, 2)
    assert jac[1, 0] == pytest.approx([2.0, 1.0], abs=1e-8)
    assert jac[0, 1] == pytest.approx([np.cos(0.3), 0.0], abs=1e-8)


@pytest.mark.parametrize("d,area", [(2, 2 * np.pi), (3, 4 * np.pi), (4, 2 * np.pi ** 2)])
def test_sphere_area(d, area):
    assert sphere_area(d) == pytest.approx(area, rel=1e-14)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_surface_integral_of_radial_field(dim):
    center = np.full(dim, 0.25)

    def radial(points):
        return points - center

    # поток r_hat * R через сферу радиуса R равен R * |S| R^(dim-1)
    radius = 1.5
    expected = sphere_area(dim) * radius ** dim
    assert surface_integral(radial, center, radius, n_quad=24, dim=dim) == pytest.approx(expected, rel=1e-12)


def test_surface_integral_checks():
    with pytest.raises(QuadratureError):
        surface_integral(lambda p: p, np.zeros(3), 1.0, n_quad=4)
    with pytest.raises(QuadratureError):
        surface_integral(lambda p: p, np.zeros(3), -1.0)
    grid = Grid.cube(-1.0, 1.0, 11, 3)
    sampled = VectorField(grid, grid.mesh())
    with pytest.raises(QuadratureError):
        surface_integral(sampled, np.zeros(3), 2.0, n_quad=16)
    # интерполяция линейного поля точна
    assert surface_integral(sampled, np.zeros(3), 0.5, n_quad=16) == pytest.approx(4 * np.pi * 0.5 ** 3, rel=1e-10)


def test_volume_integral_with_mask():
    grid = Grid.cube(0.0, 1.0, 11, 2)
    ones = ScalarField(grid, np.ones(grid.n))
    assert volume_integral(ones) == pytest.approx(1.0)
    mask = grid.mesh()[..., 0] <= 0.5 + 1e-12
    assert volume_integral(ones, mask) == pytest.approx(0.55)


def test_contour_integral_of_polar_angle():
    total = contour_integral(wrapped_angle_increment, (0.0, 0.0), 1.0, n_quad=32)
    assert total == pytest.approx(2 * np.pi, abs=1e-12)
    assert contour_integral(wrapped_angle_increment, (3.0, 0.0), 1.0, n_quad=32) == pytest.approx(0.0, abs=1e-12)


def test_interpolate_bilinear():
    grid = Grid.cube(0.0, 1.0, 5, 2)
    field = ScalarField(grid, grid.mesh()[..., 0] + 2.0 * grid.mesh()[..., 1])
    assert interpolate(field, np.array([0.3, 0.7])) == pytest.approx(1.7)
