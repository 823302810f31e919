"""Explicit time-marching of the perturbation system on the flattened grid.

The state evolves density and velocity deviations from the bent background
profile plus the boundary extension.  Because the background enters only
through analytically evaluated coefficients, the zero perturbation is an
exact fixed point of the discrete dynamics whenever the wall is flat and the
wall data planar.

Boundary handling: the wall rows carry psi = 0 (no-slip against the wall
data), the density row at the wall evolves freely through one-sided stencils
(outflow admits no density condition), and both fields vanish at the
truncated far field.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .boundary import (BoundaryVelocity, ExtensionField, GridProfile,
                       boundary_velocity, build_extension, profile_on_grid,
                       stationary_sources)
from .diagnostics import (NormReport, boundary_trace_norm, dissipation_summands,
                          energy_form, energy_norm, l2_norm, state_weighted_l2,
                          weighted_l2)
from .errors import (CflViolation, NonFinite, PositivityLost, ValidationError)
from .geometry import BoundaryShape, MappedGrid
from .operators import (advect_scalar, advect_vector, hat_divergence,
                        hat_gradient, viscous_operator)
from .params import PhysicalParams
from .state import PerturbationState, make_state, zero_state


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping controls; dt is derived from the CFL bound when absent."""

    dt: float | None = None
    t_end: float = 10.0
    cfl_safety: float = 0.4
    upwind_order: int = 2
    report_interval: float = 0.5
    beta: float = 0.0
    cfl_recheck_every: int = 25

    def __post_init__(self):
        if not (0.0 < self.cfl_safety < 1.0):
            raise ValidationError(f"cfl_safety must lie in (0,1), got {self.cfl_safety}")
        if self.upwind_order not in (1, 2):
            raise ValidationError(f"upwind order must be 1 or 2, got {self.upwind_order}")
        if self.t_end < 0:
            raise ValidationError(f"t_end must be non-negative, got {self.t_end}")


@dataclass(frozen=True)
class FlowSystem:
    """Assembled stationary data of one flow problem on one grid."""

    params: PhysicalParams
    grid: MappedGrid
    prof: GridProfile
    ext: ExtensionField
    wall: BoundaryVelocity
    F: np.ndarray
    G: np.ndarray
    w_bg: np.ndarray = field(repr=False, default=None)        # utilde + U
    grad_bg: np.ndarray = field(repr=False, default=None)     # Cartesian jacobian of w_bg
    adv_bg: np.ndarray = field(repr=False, default=None)      # (w_bg . grad) w_bg
    grad_rho_bg: np.ndarray = field(repr=False, default=None)  # Cartesian grad of rhot

    def __post_init__(self):
        for arr in (self.F, self.G, self.w_bg, self.grad_bg, self.adv_bg,
                    self.grad_rho_bg):
            if arr is not None:
                arr.setflags(write=False)


def build_system(params: PhysicalParams, shape: BoundaryShape, grid: MappedGrid,
                 wall: BoundaryVelocity | None = None) -> FlowSystem:
    """Assemble profile, extension, stationary sources, and cached coefficients."""
    if wall is None:
        wall = boundary_velocity(grid, params, mode="planar")
    prof = profile_on_grid(params, grid)
    ext = build_extension(shape, wall, params, grid)
    F, G = stationary_sources(prof, ext, shape, params)

    d = grid.dim
    w_bg = ext.U.copy()
    w_bg[0] = w_bg[0] + prof.u1

    # Cartesian jacobian of the background velocity: profile part + extension part
    grad_bg = ext.jac.copy()
    grad_bg[0, 0] += prof.du1
    for k in range(d - 1):
        grad_bg[0, k + 1] += -grid.dM_b[k] * prof.du1

    adv_bg = np.einsum("k...,ck...->c...", w_bg, grad_bg)

    grad_rho_bg = np.empty((d,) + grid.field_shape)
    grad_rho_bg[0] = np.broadcast_to(prof.drho, grid.field_shape)
    for k in range(d - 1):
        grad_rho_bg[k + 1] = -grid.dM_b[k] * prof.drho

    return FlowSystem(params=params, grid=grid, prof=prof, ext=ext, wall=wall,
                      F=F, G=G, w_bg=w_bg, grad_bg=grad_bg, adv_bg=adv_bg,
                      grad_rho_bg=grad_rho_bg)


def homogeneous_sources(state: PerturbationState, system: FlowSystem):
    """State-dependent source fields (f, g); both vanish with the perturbation."""
    prof, params = system.prof, system.params
    phi, psi = state.phi, state.psi
    rho = prof.rho + phi
    if np.any(rho <= 0):
        raise PositivityLost(
            f"density reached {float(np.min(rho)):.6g} at t={state.t:.6g}"
        )
    b_dot_psi = psi[0].copy()
    for k in range(system.grid.dim - 1):
        b_dot_psi -= system.grid.dM_b[k] * psi[k + 1]

    f = -prof.drho * b_dot_psi - prof.du1 * phi - phi * system.ext.div_U

    adv_by_psi = np.einsum("k...,ck...->c...", psi, system.grad_bg)
    dp_gap = params.dpressure(rho) - params.dpressure(prof.rho)
    g = -rho * adv_by_psi - phi * system.adv_bg - dp_gap * system.grad_rho_bg
    return f, g


def rhs(state: PerturbationState, system: FlowSystem, order: int = 2):
    """Semi-discrete time derivatives (dphi, dpsi) of the perturbation."""
    grid, params, prof = system.grid, system.params, system.prof
    phi, psi = state.phi, state.psi
    rho = prof.rho + phi
    f, g = homogeneous_sources(state, system)

    u_full = system.w_bg + psi
    dphi = -advect_scalar(phi, u_full, grid, order)
    dphi -= rho * hat_divergence(psi, grid)
    dphi += f + system.F

    dpsi = -rho * advect_vector(psi, u_full, grid, order)
    dpsi += viscous_operator(psi, grid, params.mu1, params.mu2)
    dpsi -= params.dpressure(rho) * hat_gradient(phi, grid)
    dpsi += g + system.G
    dpsi /= rho
    return dphi, dpsi


def material_density_rate(state: PerturbationState, system: FlowSystem):
    """d phi / dt along particle paths, read off the continuity equation."""
    prof = system.prof
    rho = prof.rho + state.phi
    f, _ = homogeneous_sources(state, system)
    return -rho * hat_divergence(state.psi, system.grid) + f + system.F


def cfl_limit(state: PerturbationState, system: FlowSystem) -> float:
    """Largest stable time step: advective-acoustic and diffusive bounds."""
    grid, params = system.grid, system.params
    rho = system.prof.rho + state.phi
    c_max = float(np.max(params.sound_speed(rho)))
    u_full = system.w_bg + state.psi
    a1 = u_full[0].copy()
    for k in range(grid.dim - 1):
        a1 -= grid.dM_b[k] * u_full[k + 1]
    adv = grid.h[0] / (float(np.max(np.abs(a1))) + c_max + 1e-300)
    for k in range(grid.dim - 1):
        sp = float(np.max(np.abs(u_full[k + 1]))) + c_max
        adv = min(adv, grid.h[k + 1] / (sp + 1e-300))
    rho_min = float(np.min(rho))
    h_min = min(grid.h)
    diff = h_min**2 * rho_min / (2.0 * grid.dim * params.mu)
    return min(adv, diff)


def _apply_bc(phi, psi):
    psi[:, 0] = 0.0
    psi[:, -1] = 0.0
    phi[-1] = 0.0


def step(state: PerturbationState, system: FlowSystem, dt: float,
         order: int = 2) -> PerturbationState:
    """One Heun (explicit RK2) step with boundary re-imposition per stage."""
    k1_phi, k1_psi = rhs(state, system, order)
    phi_star = state.phi + dt * k1_phi
    psi_star = state.psi + dt * k1_psi
    _apply_bc(phi_star, psi_star)
    mid = PerturbationState(phi=phi_star, psi=psi_star, t=state.t + dt,
                            grid=state.grid)
    k2_phi, k2_psi = rhs(mid, system, order)
    phi_new = state.phi + 0.5 * dt * (k1_phi + k2_phi)
    psi_new = state.psi + 0.5 * dt * (k1_psi + k2_psi)
    _apply_bc(phi_new, psi_new)
    new = PerturbationState(phi=phi_new, psi=psi_new, t=state.t + dt,
                            grid=state.grid)
    probe = float(np.sum(phi_new)) + float(np.sum(psi_new))
    if not np.isfinite(probe):
        raise NonFinite(f"state lost finiteness at t={new.t:.6g}")
    return new


@dataclass(frozen=True)
class ResidualReport:
    mass_l2: float
    mass_max: float
    momentum_l2: float
    momentum_max: float


def stationary_residual(state: PerturbationState, system: FlowSystem) -> ResidualReport:
    """Residual of the steady equations for the reconstructed full state.

    Every coefficient, including the background, is differentiated by the
    grid stencils here, so the result is an independent cross-check of the
    evolution path (which uses exact background derivatives).  Evaluated on
    interior normal rows.
    """
    grid, params, prof = system.grid, system.params, system.prof
    rho = prof.rho + state.phi
    u = system.w_bg + state.psi

    mass = hat_divergence(rho * u, grid)
    conv = np.stack([
        np.einsum("k...,k...->...", u, hat_gradient(u[c], grid))
        for c in range(grid.dim)
    ])
    visc = viscous_operator(u, grid, params.mu1, params.mu2)
    grad_p = hat_gradient(params.pressure(rho), grid)
    mom = rho * conv - visc + grad_p

    inner = (slice(1, -1),)
    w = grid.volume_weights[inner]
    mass_i = mass[inner]
    mom_i = mom[(slice(None),) + inner]
    mass_l2 = float(np.sqrt(np.sum(w * mass_i**2)))
    mom_l2 = float(np.sqrt(np.sum(w * np.sum(mom_i**2, axis=0))))
    return ResidualReport(
        mass_l2=mass_l2,
        mass_max=float(np.max(np.abs(mass_i))),
        momentum_l2=mom_l2,
        momentum_max=float(np.max(np.abs(mom_i))),
    )


def make_report(state: PerturbationState, system: FlowSystem, beta: float,
                include_residual: bool = True) -> NormReport:
    dphi_dt = material_density_rate(state, system)
    diss = dissipation_summands(state, dphi_dt, beta)
    if include_residual:
        res = stationary_residual(state, system)
        res_mass, res_mom = res.mass_l2, res.momentum_l2
    else:
        res_mass = res_mom = float("nan")
    return NormReport(
        t=state.t,
        E0_beta=energy_norm(state, 0, beta),
        E3_beta=energy_norm(state, 3, beta),
        weighted_L2=state_weighted_l2(state, beta),
        h_norms=tuple(
            float(np.sqrt(energy_norm(state, m, 0.0))) for m in range(4)
        ),
        diss_grad_psi=diss[0],
        diss_dphi_dt=diss[1],
        diss_wall_trace=diss[2],
        residual_mass=res_mass,
        residual_momentum=res_mom,
        dphi_dt_norm=l2_norm(dphi_dt, system.grid),
        energy_form_integral=energy_form(state, system.prof, system.params,
                                         system.grid),
    )


def scheme_residual_norm(state: PerturbationState, system: FlowSystem,
                         order: int = 2) -> float:
    """L2 norm of the semi-discrete time derivative; the march's stationarity measure."""
    dphi, dpsi = rhs(state, system, order)
    dpsi = dpsi.copy()
    dpsi[:, 0] = 0.0
    dpsi[:, -1] = 0.0
    dphi = dphi.copy()
    dphi[-1] = 0.0
    return float(np.sqrt(l2_norm(dphi, system.grid) ** 2 +
                         l2_norm(dpsi, system.grid) ** 2))


@dataclass
class RunResult:
    final: PerturbationState
    reports: list
    n_steps: int
    dt: float
    stop_reason: str


def run(system: FlowSystem, initial: PerturbationState, config: SolverConfig,
        callbacks=None) -> RunResult:
    """March to t_end, reporting at the configured cadence.

    Callbacks receive (state, report) at every report and may return True to
    stop early.  Execution is deterministic for a given configuration.
    """
    callbacks = list(callbacks or [])
    state = make_state(system.grid, initial.phi, initial.psi, initial.t)
    reports = []

    if config.t_end <= state.t:
        return RunResult(final=state, reports=reports, n_steps=0, dt=0.0,
                         stop_reason="t_end")

    dt = config.dt if config.dt is not None else config.cfl_safety * cfl_limit(
        state, system)
    if dt <= 0:
        raise ValidationError(f"time step must be positive, got {dt}")
    if dt > cfl_limit(state, system):
        raise CflViolation(
            f"dt={dt:.6g} exceeds the stability limit {cfl_limit(state, system):.6g}"
        )

    next_report = state.t
    n_steps = 0
    stop_reason = "t_end"
    while state.t < config.t_end - 1e-12:
        if state.t >= next_report - 1e-12:
            rep = make_report(state, system, config.beta)
            reports.append(rep)
            next_report += config.report_interval
            if any(cb(state, rep) for cb in callbacks):
                stop_reason = "callback"
                break
        dt_step = min(dt, config.t_end - state.t)
        state = step(state, system, dt_step, config.upwind_order)
        n_steps += 1
        if config.cfl_recheck_every and n_steps % config.cfl_recheck_every == 0:
            if dt > 1.05 * cfl_limit(state, system):
                raise CflViolation(
                    f"dt={dt:.6g} exceeds the stability limit after {n_steps} steps"
                )
    else:
        rep = make_report(state, system, config.beta)
        reports.append(rep)

    return RunResult(final=state, reports=reports, n_steps=n_steps, dt=dt,
                     stop_reason=stop_reason)
