"""Stencil operators against exact fields and an independent sympy oracle."""

import numpy as np
import pytest
import sympy as sp

from halfspace_ns import (gaussian_bump_shape, hat_divergence, hat_gradient,
                          hat_grad_div, hat_laplacian, make_grid)
from halfspace_ns.operators import advect_scalar, diff1_bounded, upwind1_bounded
from halfspace_ns.verification import (evolution_order_study,
                                       operator_order_study)

from conftest import measured_order


def test_hat_gradient_exact_on_linears(grid_bump):
    y1 = grid_bump.y1[:, None] * np.ones((1, grid_bump.field_shape[1]))
    g = hat_gradient(y1, grid_bump)
    # grad of y1 pulled back is (1, -M')
    np.testing.assert_allclose(g[0], 1.0, atol=1e-12)
    np.testing.assert_allclose(g[1], -grid_bump.dM_b[0] * np.ones_like(y1),
                               atol=1e-12)
    s = np.ones((grid_bump.field_shape[0], 1)) * grid_bump.tangential[0][None, :]
    gs = hat_gradient(s, grid_bump)
    np.testing.assert_allclose(gs[0], 0.0, atol=1e-12)
    # tangential coordinate is periodic-discontinuous at the cell seam; check
    # away from the wrap rows
    np.testing.assert_allclose(gs[1][:, 2:-2], 1.0, atol=1e-12)


def test_pullback_gradient_converges(bump2d):
    errs = []
    for n in (32, 64, 128):
        grid = make_grid(bump2d, (n, n), 8.0)
        f = grid.x1**2
        g = hat_gradient(f, grid)
        err = max(np.max(np.abs(g[0] - 2 * grid.x1)), np.max(np.abs(g[1])))
        errs.append(err)
    orders = measured_order(errs)
    assert np.all(orders >= 1.9)


def _sympy_oracle(grid, images=1):
    """Exact transformed operators computed symbolically on the same fields."""
    y, s = sp.symbols("y s", real=True)
    L2 = grid.shape.tangential_extent[0]
    a, w, c = 0.35, 1.2, L2 / 2
    M = a * sum(sp.exp(-(((s - c - k * L2) / w) ** 2))
                for k in range(-images, images + 1))
    f = 0.12 * y**2 * sp.exp(-y / 2) * sp.sin(2 * sp.pi * s / L2 + sp.Rational(7, 10))
    Ms = sp.diff(M, s)
    d1, dk = sp.diff(f, y), sp.diff(f, s)
    grad1 = d1
    grad2 = dk - Ms * d1
    lap = sp.diff(grad1, y) + sp.diff(grad2, s) - Ms * sp.diff(grad2, y)
    fn = {
        "f": sp.lambdify((y, s), f, "numpy"),
        "g1": sp.lambdify((y, s), grad1, "numpy"),
        "g2": sp.lambdify((y, s), grad2, "numpy"),
        "lap": sp.lambdify((y, s), lap, "numpy"),
    }
    return fn


@pytest.mark.parametrize("n", [96])
def test_hat_operators_against_sympy(n):
    shape = gaussian_bump_shape(dim=2, amplitude=0.35, width=1.2, extent=(8.0,),
                                images=1)
    grid = make_grid(shape, (n, n), 8.0)
    oracle = _sympy_oracle(grid)
    Y = grid.y1[:, None]
    S = grid.tangential[0][None, :]
    f = oracle["f"](Y, S)

    g = hat_gradient(f, grid)
    h1 = grid.h[0]
    assert np.max(np.abs(g[0] - oracle["g1"](Y, S))) < 5 * h1**2
    assert np.max(np.abs(g[1] - oracle["g2"](Y, S))) < 5 * h1**2

    lap = hat_laplacian(f[None], grid)[0]
    assert np.max(np.abs(lap - oracle["lap"](Y, S))) < 60 * h1**2


def test_operator_orders_meet_target():
    study = operator_order_study()
    for name, orders in study.orders.items():
        assert min(orders) >= 1.9, (name, orders)


def test_evolution_operator_orders_meet_target(params):
    study = evolution_order_study(params)
    for name, orders in study.orders.items():
        assert min(orders) >= 1.9, (name, orders)


def test_divergence_of_gradient_matches_laplacian_interior(grid_bump):
    rng = np.random.default_rng(2)
    # smooth random band-limited field
    n1, n2 = grid_bump.field_shape
    s = grid_bump.tangential[0]
    y = grid_bump.y1
    f = (np.sin(2 * np.pi * s / 8.0)[None, :]
         * (y**2 * np.exp(-0.4 * y))[:, None])
    lap_direct = hat_laplacian(f[None], grid_bump)[0]
    lap_composed = hat_divergence(hat_gradient(f, grid_bump), grid_bump)
    # agreement away from the normal faces where composition loses accuracy
    inner = slice(3, -3)
    h2 = grid_bump.h[0] ** 2
    assert np.max(np.abs((lap_direct - lap_composed)[inner])) < 50 * h2


def test_upwind_biased_derivative_exact_on_linear():
    y = np.linspace(0, 1, 21)
    f = 3.0 * y + 1.0
    for a_sign in (1.0, -1.0):
        a = np.full_like(f, a_sign)
        d = upwind1_bounded(f, a, y[1] - y[0], 0, order=2)
        np.testing.assert_allclose(d, 3.0, atol=1e-12)
        d1 = upwind1_bounded(f, a, y[1] - y[0], 0, order=1)
        np.testing.assert_allclose(d1, 3.0, atol=1e-12)


def test_advect_scalar_constant_field_zero(grid_bump):
    f = np.ones(grid_bump.field_shape)
    u = np.ones((2,) + grid_bump.field_shape)
    np.testing.assert_allclose(advect_scalar(f, u, grid_bump), 0.0, atol=1e-13)


def test_hat_gradient_3d_smoke(params):
    shape = gaussian_bump_shape(dim=3, amplitude=0.2, width=1.0, extent=(6.0, 6.0))
    grid = make_grid(shape, (16, 12, 12), 8.0)
    y1 = grid.y1[:, None, None] * np.ones((1,) + grid.field_shape[1:])
    g = hat_gradient(y1, grid)
    np.testing.assert_allclose(g[0], 1.0, atol=1e-12)
    np.testing.assert_allclose(g[1], -grid.dM_b[0] * np.ones_like(y1), atol=1e-11)
    np.testing.assert_allclose(g[2], -grid.dM_b[1] * np.ones_like(y1), atol=1e-11)
