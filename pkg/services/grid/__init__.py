from services.grid.lattice import (
    Grid, ScalarField, VectorField, MatrixField, gradient, partial, parse_grid, interpolate,
)
from services.grid.operators import levi_civita, curl_matrix, cof_matrix, analytic_jacobian
from services.grid.quadrature import (
    sphere_area, volume_integral, richardson, surface_integral, contour_integral, wrapped_angle_increment,
)
