import numpy as np
import pytest

from halfspace_ns import (PhysicalParams, boundary_velocity, build_system,
                          discrete_sobolev, energy_form, flat_shape,
                          hardy_check, l2_norm, make_grid, make_state,
                          mach_field, omega, profile_on_grid,
                          state_weighted_l2, weighted_l2, zero_state)
from halfspace_ns.boundary import zero_extension
from halfspace_ns.diagnostics import boundary_trace_norm, energy_norm
from halfspace_ns.errors import DomainError

from conftest import measured_order


def test_weighted_l2_basics(grid_flat):
    zero = np.zeros(grid_flat.field_shape)
    assert weighted_l2(zero, 1.0, grid_flat) == 0.0
    f = np.ones(grid_flat.field_shape)
    plain = l2_norm(f, grid_flat)
    area = 8.0 * 23.0
    assert plain == pytest.approx(np.sqrt(area), rel=1e-12)


def test_weighted_l2_exponential_closed_form(flat2d):
    errs = []
    for n in (64, 128, 256):
        grid = make_grid(flat2d, (n, 16), 23.0)
        f = np.exp(-grid.x1)
        val = weighted_l2(f, 1.0, grid) ** 2
        exact = 8.0 * (1.0 - np.exp(-23.0))  # integral of e^{-x} over the box
        errs.append(abs(val - exact))
    assert np.all(measured_order(errs) >= 1.9), errs


def test_weighted_l2_monotone_in_beta(grid_bump):
    rng = np.random.default_rng(0)
    f = rng.normal(size=grid_bump.field_shape)
    vals = [weighted_l2(f, b, grid_bump) for b in (0.0, 0.1, 0.2, 0.4)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_omega_values():
    assert omega(1.0, 1.0) == 0.0
    assert omega(1.0, 1.4) == 0.0
    assert omega(2.0, 1.0) == pytest.approx(1.0 - np.log(2.0), rel=1e-14)
    with pytest.raises(DomainError):
        omega(-0.5, 1.4)
    # quadratic expansion near 1 with curvature gamma
    for gamma in (1.0, 1.4, 2.0):
        eps = 1e-4
        assert omega(1 + eps, gamma) == pytest.approx(gamma * eps**2 / 2, rel=1e-2)


def test_energy_equivalence_small_amplitude(params, grid_flat):
    """Pointwise energy is squeezed between multiples of the squared fields."""
    prof = profile_on_grid(params, grid_flat)
    rng = np.random.default_rng(14)
    phi = rng.uniform(-0.05, 0.05, grid_flat.field_shape)
    psi = rng.uniform(-0.05, 0.05, (2,) + grid_flat.field_shape)
    rho = prof.rho + phi
    point = (params.K * prof.rho ** (params.gamma - 1.0)
             * omega(prof.rho / rho, params.gamma)
             + 0.5 * np.sum(psi**2, axis=0)) * rho
    quad = phi**2 + np.sum(psi**2, axis=0)
    ratio = point / quad
    # quadratic-theory envelope: rho*p'(rho)/(2 rho^2) for phi, rho/2 for psi,
    # widened for the cubic remainder at amplitude 0.05
    dp = params.dpressure(prof.rho)
    c_lo = 0.8 * min(float(np.min(dp / (2 * prof.rho))), float(np.min(prof.rho / 2)))
    c_hi = 1.2 * max(float(np.max(dp / (2 * prof.rho))), float(np.max(prof.rho / 2)))
    assert np.all(ratio >= c_lo)
    assert np.all(ratio <= c_hi)


def test_energy_form_zero_at_zero_state(params, grid_flat):
    prof = profile_on_grid(params, grid_flat)
    assert energy_form(zero_state(grid_flat), prof, params, grid_flat) == 0.0


def test_hardy_zero_field(grid_flat):
    rep = hardy_check(np.zeros(grid_flat.field_shape), grid_flat.shape, 0.75,
                      grid_flat)
    assert rep.ratio == 0.0


def test_hardy_constant_field_closed_form(flat2d):
    alpha = 0.75
    errs = []
    for n in (64, 128, 256):
        grid = make_grid(flat2d, (n, 16), 23.0)
        rep = hardy_check(np.ones(grid.field_shape), flat2d, alpha, grid)
        errs.append(abs(rep.ratio - 1.0 / alpha))
    # lhs -> area/alpha, rhs = boundary area: ratio -> 1/alpha at order 2
    assert errs[-1] == pytest.approx(0.0, abs=1e-3)
    assert np.all(measured_order(errs) >= 1.8), errs


def test_hardy_ratio_bounded_over_corpus(grid_bump):
    rng = np.random.default_rng(23)
    y = grid_bump.y1[:, None]
    s = grid_bump.tangential[0][None, :]
    ratios = []
    for _ in range(50):
        a, b, c = rng.uniform(0.3, 2.0, 3)
        f = (np.sin(a * s) + b * np.cos(s)) * np.exp(-c * y) + rng.normal() * 0.1
        ratios.append(hardy_check(f, grid_bump.shape, 0.75, grid_bump).ratio)
    assert np.max(ratios) < 10.0


def test_sobolev_constant_field(grid_flat):
    f = np.full(grid_flat.field_shape, 2.5)
    for m in (1, 2, 3):
        assert discrete_sobolev(f, m, grid_flat) == pytest.approx(
            l2_norm(f, grid_flat), rel=1e-13)


def test_sobolev_monotone_in_m(grid_bump):
    rng = np.random.default_rng(31)
    y = grid_bump.y1[:, None]
    s = grid_bump.tangential[0][None, :]
    f = np.sin(2 * np.pi * s / 8.0) * y * np.exp(-y)
    vals = [discrete_sobolev(f, m, grid_bump) for m in (0, 1, 2, 3)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_sobolev_h1_closed_form(flat2d):
    k = 2.0
    errs = []
    for n in (128, 256, 512):
        grid = make_grid(flat2d, (n, 16), 23.0)
        f = np.sin(k * grid.x1)
        h1 = discrete_sobolev(f, 1, grid)
        # integral of sin^2 + k^2 cos^2 over the box
        L, W = 23.0, 8.0
        i_sin = L / 2 - np.sin(2 * k * L) / (4 * k)
        i_cos = L / 2 + np.sin(2 * k * L) / (4 * k)
        exact = np.sqrt(W * (i_sin + k**2 * i_cos))
        errs.append(abs(h1 - exact))
    assert np.all(measured_order(errs) >= 1.9), errs


def test_mach_field_far_field(params, grid_flat):
    prof = profile_on_grid(params, grid_flat)
    ext = zero_extension(grid_flat, params)
    m = mach_field(zero_state(grid_flat), prof, ext, params)
    assert m[-1, 0] == pytest.approx(params.mach, rel=1e-6)
    assert np.all(m >= 1.0)  # supersonic profile everywhere for these params


def test_energy_norm_ordering(params, grid_bump):
    from halfspace_ns import wall_clean_perturbation
    state = wall_clean_perturbation(grid_bump, amplitude=1e-2, seed=2)
    e0 = energy_norm(state, 0, 0.1875)
    e3 = energy_norm(state, 3, 0.1875)
    assert 0 < e0 <= e3


def test_boundary_trace_norm(grid_flat):
    f = np.zeros(grid_flat.field_shape)
    f[0] = 2.0
    expected = 2.0 * np.sqrt(8.0)
    assert boundary_trace_norm(f, grid_flat) == pytest.approx(expected, rel=1e-12)


def test_diagnostics_pure(grid_bump):
    rng = np.random.default_rng(7)
    f = rng.normal(size=grid_bump.field_shape)
    a = weighted_l2(f, 0.3, grid_bump)
    b = weighted_l2(f, 0.3, grid_bump)
    assert a == b
