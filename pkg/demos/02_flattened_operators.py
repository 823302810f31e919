"""Boundary flattening: the curved wall becomes a grid plane.

The change of variables y1 = x1 - M(x') maps the perturbed half-space onto a
strip.  Cartesian derivatives pick up slope terms of M; this script shows the
transformed operators converging at second order and the exact cancellation
that removes second normal velocity derivatives from the combined
mass/momentum expression at the wall.
"""

import numpy as np

from halfspace_ns import (PhysicalParams, cancellation_coeffs,
                          gaussian_bump_shape, hat_gradient, make_grid,
                          map_forward, map_inverse,
                          normal_second_derivative_cancellation, normal_vector)
from halfspace_ns.verification import operator_order_study

shape = gaussian_bump_shape(dim=2, amplitude=0.3, width=1.0, extent=(8.0,))
params = PhysicalParams()

# the map and its inverse are exact
y = np.array([[0.7], [2.0]])
x = map_forward(shape, y)
print(f"y = {y.ravel()} maps to x = {x.ravel()}; round trip error "
      f"{np.max(np.abs(map_inverse(shape, x) - y)):.1e}")

n = normal_vector(shape, 4.0)
print(f"outer normal at the bump crest: {n.ravel()}")

# grid convergence of the transformed gradient on a pulled-back field
print("\npull-back gradient of x1^2, max error under refinement:")
for nn in (32, 64, 128):
    grid = make_grid(shape, (nn, nn), 8.0)
    g = hat_gradient(grid.x1**2, grid)
    err = max(np.max(np.abs(g[0] - 2 * grid.x1)), np.max(np.abs(g[1])))
    print(f"  n = {nn:4d}   error = {err:.3e}")

study = operator_order_study()
print("\nmeasured orders across three refinements:")
for name, orders in study.orders.items():
    print(f"  {name:12s} {[round(float(o), 3) for o in orders]}")

# slope-weighted combination killing second normal derivatives
print("\ncancellation weights and the residual coefficient matrix:")
coeffs = cancellation_coeffs(params, shape, 4.5)
print(f"  weights at s = 4.5: {[round(float(c), 6) for c in coeffs]}")
mat = normal_second_derivative_cancellation(params, shape, 4.5)
print(f"  max |coefficient| = {np.max(np.abs(mat)):.2e} (identically zero)")
