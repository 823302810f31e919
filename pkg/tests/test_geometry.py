import numpy as np
import pytest

from halfspace_ns import (BoundaryShape, PhysicalParams, cancellation_coeffs,
                          check_shape_consistency, flat_shape,
                          gaussian_bump_shape, make_grid, map_forward,
                          map_inverse, normal_second_derivative_cancellation,
                          normal_vector, tabulated_shape)
from halfspace_ns.errors import (OutsideDomain, ResolutionTooCoarse,
                                 ValidationError)


def _linear_shape(slope2=1.0, slope3=0.0):
    def M(a, b):
        return slope2 * np.asarray(a) + slope3 * np.asarray(b)

    def grad_M(a, b):
        z = np.zeros(np.broadcast(a, b).shape)
        return [z + slope2, z + slope3]

    def hess_M(a, b):
        z = np.zeros(np.broadcast(a, b).shape)
        return [[z, z], [z, z]]

    return BoundaryShape(dim=3, M=M, grad_M=grad_M, hess_M=hess_M,
                         tangential_extent=(8.0, 8.0))


def test_normal_vector_examples():
    flat = flat_shape(dim=3, extent=(8.0, 8.0))
    np.testing.assert_allclose(normal_vector(flat, 0.3, 0.4), [-1, 0, 0], atol=1e-15)

    lin = _linear_shape(1.0, 0.0)
    np.testing.assert_allclose(normal_vector(lin, 0.0, 0.0),
                               np.array([-1, 1, 0]) / np.sqrt(2), atol=1e-15)

    bump = gaussian_bump_shape(dim=3, amplitude=0.5, width=1.0,
                               extent=(20.0, 20.0), images=0)
    # center of the cell: gradient vanishes
    np.testing.assert_allclose(normal_vector(bump, 10.0, 10.0), [-1, 0, 0],
                               atol=1e-12)


def test_normal_vector_unit_norm_random():
    bump = gaussian_bump_shape(dim=2, amplitude=0.7, width=0.8, extent=(8.0,))
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 8, size=200)
    n = normal_vector(bump, pts)
    np.testing.assert_allclose(np.sum(n**2, axis=0), 1.0, atol=1e-14)


def test_map_roundtrip(bump2d):
    rng = np.random.default_rng(5)
    y = np.stack([rng.uniform(0, 10, 1000), rng.uniform(0, 8, 1000)])
    x = map_forward(bump2d, y)
    back = map_inverse(bump2d, x)
    np.testing.assert_allclose(back, y, atol=1e-13)
    # y1 = 0 maps onto the boundary graph
    y0 = np.stack([np.zeros(50), np.linspace(0, 8, 50)])
    x0 = map_forward(bump2d, y0)
    np.testing.assert_allclose(x0[0], bump2d.M(y0[1]), atol=1e-15)


def test_map_flat_identity(flat2d):
    y = np.stack([np.linspace(0, 5, 20), np.linspace(0, 7, 20)])
    np.testing.assert_array_equal(map_forward(flat2d, y), y)


def test_map_outside_domain(bump2d):
    with pytest.raises(OutsideDomain):
        map_forward(bump2d, np.array([[-0.5], [1.0]]))
    with pytest.raises(OutsideDomain):
        map_inverse(bump2d, np.array([[-5.0], [4.0]]))


def test_shape_consistency_checks(bump2d):
    assert check_shape_consistency(bump2d)
    bad = BoundaryShape(dim=2, M=lambda s: 0.1 * np.asarray(s)**2,
                        grad_M=lambda s: [0.3 * np.asarray(s)],
                        hess_M=lambda s: [[0.2 * np.ones_like(np.asarray(s))]],
                        tangential_extent=(8.0,))
    with pytest.raises(ValidationError):
        check_shape_consistency(bad)


def test_tabulated_shape_matches_samples():
    L = 8.0
    n = 64
    s = np.arange(n) * (L / n)
    vals = 0.3 * np.exp(np.cos(2 * np.pi * s / L))
    shape = tabulated_shape(vals, extent=(L,))
    np.testing.assert_allclose(shape.M(s), vals, atol=1e-10)
    check_shape_consistency(shape, periodic_tol=1e-10)


def test_cancellation_coeff_examples(params):
    flat = flat_shape(dim=3, extent=(8.0, 8.0))
    a1, a2, a3, at1 = cancellation_coeffs(params, flat, 0.1, 0.2)
    assert (a1, a2, a3, at1) == pytest.approx((1.0, 0.0, 0.0, 1.0))

    lin = _linear_shape(1.0, 0.0)
    a1, a2, a3, at1 = cancellation_coeffs(params, lin, 0.0, 0.0)
    assert a1 == pytest.approx(2.0 / 3.0, rel=1e-14)
    assert a2 == pytest.approx(-2.0 / 3.0, rel=1e-14)
    assert a3 == pytest.approx(0.0, abs=1e-15)
    assert at1 == pytest.approx(4.0 / 3.0, rel=1e-14)


def test_cancellation_positive_weight_random(params):
    rng = np.random.default_rng(9)
    for _ in range(1000):
        g2, g3 = rng.uniform(-10, 10, size=2)
        lin = _linear_shape(g2, g3)
        *_, at1 = cancellation_coeffs(params, lin, 0.0, 0.0)
        assert at1 > 0


def test_cancellation_matrix_zero_random_viscosities():
    rng = np.random.default_rng(17)
    for _ in range(100):
        mu1 = rng.uniform(0.05, 5.0)
        mu2 = rng.uniform(-2.0 * mu1 / 3.0, 4.0)
        g2, g3 = rng.uniform(-5, 5, size=2)
        p = PhysicalParams(mu1=mu1, mu2=mu2)
        lin = _linear_shape(g2, g3)
        mat = normal_second_derivative_cancellation(p, lin, 0.0, 0.0)
        assert mat.shape == (3, 3)
        assert np.max(np.abs(mat)) <= 1e-12


def test_cancellation_matrix_zero_flat(params):
    flat = flat_shape(dim=3, extent=(8.0, 8.0))
    mat = normal_second_derivative_cancellation(params, flat, 0.0, 0.0)
    np.testing.assert_allclose(mat, 0.0, atol=1e-15)


def test_grid_construction(bump2d):
    grid = make_grid(bump2d, (32, 16), 10.0)
    assert grid.y1[0] == 0.0
    assert np.all(np.diff(grid.y1) > 0)
    assert grid.field_shape == (32, 16)
    # cached slope entries agree with the analytic derivative at the nodes
    np.testing.assert_allclose(grid.dM_t[0], bump2d.grad_M(grid.tangential[0])[0],
                               atol=1e-15)
    # x1 reconstruction
    np.testing.assert_allclose(grid.x1[0], bump2d.M(grid.tangential[0]), atol=1e-15)
    with pytest.raises(ResolutionTooCoarse):
        make_grid(bump2d, (3, 16), 10.0)
    with pytest.raises(ResolutionTooCoarse):
        make_grid(bump2d, (32, 3), 10.0)


def test_grid_3d_construction(params):
    shape = gaussian_bump_shape(dim=3, amplitude=0.2, width=1.0, extent=(6.0, 6.0))
    grid = make_grid(shape, (12, 8, 8), 8.0)
    assert grid.field_shape == (12, 8, 8)
    assert len(grid.h) == 3
    mesh = grid.tangential_mesh()
    np.testing.assert_allclose(grid.M_t, shape.M(*mesh), atol=1e-15)
