import numpy as np
import pytest

from halfspace_ns import (PhysicalParams, SolverConfig, boundary_velocity,
                          build_system, cfl_limit, flat_shape,
                          gaussian_bump_shape, make_grid, make_state, rhs, run,
                          homogeneous_sources, stationary_residual, step,
                          wall_clean_perturbation, zero_state)
from halfspace_ns.errors import CflViolation, PositivityLost, ValidationError

from conftest import measured_order
from oracle1d import PlanarOracle


@pytest.fixture(scope="module")
def flat_system(params, flat2d):
    grid = make_grid(flat2d, (48, 12), 23.0)
    return build_system(params, flat2d, grid)


def test_zero_is_exact_fixed_point(params, flat_system):
    state = zero_state(flat_system.grid)
    dt = 0.5 * cfl_limit(state, flat_system)
    for _ in range(50):
        state = step(state, flat_system, dt)
    assert state.max_abs() == 0.0


def test_constant_profile_constant_phi_sources_vanish(params, flat2d):
    p = PhysicalParams(u_tilde_b=params.u_plus)
    grid = make_grid(flat2d, (32, 8), 12.0)
    system = build_system(p, flat2d, grid)
    phi = np.full(grid.field_shape, 0.05)
    state = make_state(grid, phi, np.zeros((2,) + grid.field_shape),
                       enforce_bc=False)
    f, g = homogeneous_sources(state, system)
    assert np.max(np.abs(f)) == 0.0
    assert np.max(np.abs(g)) == 0.0


def test_sources_vanish_at_zero_state(flat_system):
    f, g = homogeneous_sources(zero_state(flat_system.grid), flat_system)
    assert np.all(f == 0.0) and np.all(g == 0.0)


def test_source_linearity_richardson(params, bump2d):
    grid = make_grid(bump2d, (48, 24), 23.0)
    wall = boundary_velocity(grid, params, mode="normal")
    system = build_system(params, bump2d, grid, wall)
    base = wall_clean_perturbation(grid, amplitude=1.0, seed=5)

    def sources_at(eps):
        st = make_state(grid, eps * base.phi, eps * base.psi)
        f, g = homogeneous_sources(st, system)
        return f, g

    # S(eps) - 2 S(eps/2) isolates the quadratic part, which scales by 4
    resid = []
    for eps in (1e-2, 5e-3):
        f1, g1 = sources_at(eps)
        f2, g2 = sources_at(eps / 2)
        resid.append(max(np.max(np.abs(f1 - 2 * f2)), np.max(np.abs(g1 - 2 * g2))))
    assert resid[0] / resid[1] == pytest.approx(4.0, rel=0.05)


def test_positivity_guard(params, flat_system):
    grid = flat_system.grid
    phi = np.full(grid.field_shape, -5.0)
    state = make_state(grid, phi, np.zeros((2,) + grid.field_shape))
    with pytest.raises(PositivityLost):
        homogeneous_sources(state, flat_system)


def test_boundary_rows_exact_after_steps(params, bump2d):
    grid = make_grid(bump2d, (32, 16), 23.0)
    wall = boundary_velocity(grid, params, mode="normal")
    system = build_system(params, bump2d, grid, wall)
    state = wall_clean_perturbation(grid, amplitude=1e-3, seed=1)
    dt = 0.4 * cfl_limit(state, system)
    for _ in range(20):
        state = step(state, system, dt)
    assert np.all(state.psi[:, 0] == 0.0)
    assert np.all(state.psi[:, -1] == 0.0)
    assert np.all(state.phi[-1] == 0.0)


def test_planar_mode_matches_1d_oracle(params, flat2d):
    """Tangentially constant data in the 2-D solver reproduces the dedicated
    1-D reference integration of the same semi-discretization."""
    n1, n2 = 64, 8
    L = 23.0
    grid = make_grid(flat2d, (n1, n2), L)
    system = build_system(params, flat2d, grid)
    oracle = PlanarOracle(params, n1, L)

    y = grid.y1
    prof1d = 1e-3 * (y**4 * np.exp(-y) / np.max(y**4 * np.exp(-y)))
    phi0_1d = prof1d.copy()
    psi0_1d = np.stack([0.5 * prof1d, -0.3 * prof1d])

    phi2 = np.repeat(phi0_1d[:, None], n2, axis=1)
    psi2 = np.repeat(psi0_1d[:, :, None], n2, axis=2)
    state = make_state(grid, phi2, psi2)
    phi1, psi1 = phi0_1d.copy(), psi0_1d.copy()
    phi1[-1] = 0.0
    psi1[:, 0] = 0.0
    psi1[:, -1] = 0.0

    dt = 0.4 * cfl_limit(state, system)
    for _ in range(400):
        state = step(state, system, dt)
        phi1, psi1 = oracle.step(phi1, psi1, dt)

    gap = max(np.max(np.abs(state.phi - phi1[:, None])),
              np.max(np.abs(state.psi - psi1[:, :, None])))
    assert gap < 1e-10


def test_stationary_residual_examples(params, flat2d, bump2d):
    # constant state on flat boundary: residuals at round-off
    p = PhysicalParams(u_tilde_b=params.u_plus)
    grid = make_grid(flat2d, (32, 8), 12.0)
    system = build_system(p, flat2d, grid)
    res = stationary_residual(zero_state(grid), system)
    assert res.mass_max < 1e-12 and res.momentum_max < 1e-12

    # exact planar profile: pure discretization error, second order
    errs = []
    for n in (128, 256, 512):
        grid = make_grid(flat2d, (n, 8), 23.0)
        system = build_system(params, flat2d, grid)
        res = stationary_residual(zero_state(grid), system)
        errs.append(res.momentum_l2)
    assert np.all(measured_order(errs) >= 1.9), errs


def test_run_t_end_zero_returns_initial(flat_system):
    state = zero_state(flat_system.grid)
    out = run(flat_system, state, SolverConfig(t_end=0.0))
    assert out.final is not state  # fresh snapshot with boundary enforcement
    assert out.final.t == 0.0
    assert out.n_steps == 0


def test_run_reports_and_determinism(params, bump2d):
    grid = make_grid(bump2d, (32, 16), 23.0)
    wall = boundary_velocity(grid, params, mode="normal")
    system = build_system(params, bump2d, grid, wall)
    init = wall_clean_perturbation(grid, amplitude=1e-3, seed=3)
    cfg = SolverConfig(t_end=0.5, report_interval=0.25)
    out1 = run(system, init, cfg)
    out2 = run(system, init, cfg)
    assert np.array_equal(out1.final.phi, out2.final.phi)
    assert np.array_equal(out1.final.psi, out2.final.psi)
    assert len(out1.reports) >= 3
    assert all(np.isfinite(r.E3_beta) for r in out1.reports)
    for r1, r2 in zip(out1.reports, out2.reports):
        assert r1.E0_beta == r2.E0_beta


def test_run_callback_stops(flat_system):
    init = wall_clean_perturbation(flat_system.grid, amplitude=1e-3, seed=9)
    calls = []

    def stopper(state, report):
        calls.append(state.t)
        return len(calls) >= 2

    cfg = SolverConfig(t_end=5.0, report_interval=0.1)
    out = run(flat_system, init, cfg, callbacks=[stopper])
    assert out.stop_reason == "callback"
    assert len(calls) == 2


def test_cfl_violation_raises(flat_system):
    init = zero_state(flat_system.grid)
    limit = cfl_limit(init, flat_system)
    with pytest.raises(CflViolation):
        run(flat_system, init, SolverConfig(dt=10 * limit, t_end=1.0))


def test_solver_config_validation():
    with pytest.raises(ValidationError):
        SolverConfig(cfl_safety=1.5)
    with pytest.raises(ValidationError):
        SolverConfig(upwind_order=3)
    with pytest.raises(ValidationError):
        SolverConfig(t_end=-1.0)


def test_first_order_upwind_mode_runs(params, bump2d):
    grid = make_grid(bump2d, (24, 12), 23.0)
    wall = boundary_velocity(grid, params, mode="normal")
    system = build_system(params, bump2d, grid, wall)
    init = wall_clean_perturbation(grid, amplitude=1e-3, seed=2)
    out = run(system, init, SolverConfig(t_end=0.2, upwind_order=1))
    assert np.all(np.isfinite(out.final.phi))


def test_fixed_point_3d(params):
    shape = gaussian_bump_shape(dim=3, amplitude=0.0, width=1.0,
                                extent=(6.0, 6.0))
    grid = make_grid(shape, (16, 6, 6), 23.0)
    system = build_system(params, shape, grid)
    state = zero_state(grid)
    dt = 0.4 * cfl_limit(state, system)
    for _ in range(20):
        state = step(state, system, dt)
    assert state.max_abs() == 0.0


def test_bump_3d_short_run(params):
    shape = gaussian_bump_shape(dim=3, amplitude=0.2, width=1.0,
                                extent=(6.0, 6.0))
    grid = make_grid(shape, (24, 8, 8), 23.0)
    wall = boundary_velocity(grid, params, mode="normal")
    system = build_system(params, shape, grid, wall)
    init = wall_clean_perturbation(grid, amplitude=1e-3, seed=4)
    out = run(system, init, SolverConfig(t_end=0.1, report_interval=0.05))
    assert np.all(np.isfinite(out.final.phi))
    assert np.all(out.final.psi[:, 0] == 0.0)
