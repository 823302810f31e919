"""Norms, energy functionals, and pointwise diagnostic fields.

Volume integrals use trapezoidal weights in the normal direction and uniform
weights tangentially (periodic).  The exponential weight acts on the physical
normal coordinate x1 = y1 + M(y'), reconstructed through the flattening map.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResolutionTooCoarse
from .geometry import MappedGrid
from .operators import hat_gradient
from .params import PhysicalParams


def weighted_l2(field, beta: float, grid: MappedGrid) -> float:
    """sqrt( integral e^{beta x1} |field|^2 ); leading axes are summed as components."""
    field = np.asarray(field)
    sq = field**2
    while sq.ndim > grid.dim:
        sq = sq.sum(axis=0)
    w = grid.volume_weights
    if beta != 0.0:
        w = w * np.exp(beta * grid.x1)
    return float(np.sqrt(np.sum(w * sq)))


def l2_norm(field, grid: MappedGrid) -> float:
    return weighted_l2(field, 0.0, grid)


def state_weighted_l2(state, beta: float) -> float:
    """Weighted norm of the combined (phi, psi) perturbation."""
    g = state.grid
    return float(np.sqrt(
        weighted_l2(state.phi, beta, g) ** 2 + weighted_l2(state.psi, beta, g) ** 2
    ))


def boundary_trace_norm(field, grid: MappedGrid) -> float:
    """L2 norm of the wall trace over the tangential cell."""
    f = np.asarray(field)
    if f.ndim > grid.dim:
        f = np.sqrt(np.sum(f**2, axis=0))
    trace = f[0]
    area = float(np.prod(grid.h[1:]))
    return float(np.sqrt(np.sum(trace**2) * area))


def discrete_sobolev(field, m: int, grid: MappedGrid) -> float:
    """H^m norm via repeated application of the flattened-frame gradient."""
    if m > 3:
        raise DomainError(f"discrete Sobolev depth is limited to m <= 3, got {m}")
    if any(n < 4 for n in grid.field_shape):
        raise ResolutionTooCoarse("need at least 4 nodes per axis for H^m")
    field = np.asarray(field, dtype=float)
    comps = field.reshape((-1,) + grid.field_shape)
    total = sum(l2_norm(c, grid) ** 2 for c in comps)
    for _ in range(m):
        nxt = []
        for c in comps:
            g = hat_gradient(c, grid)
            nxt.extend(g[k] for k in range(grid.dim))
        comps = np.array(nxt)
        total += sum(l2_norm(c, grid) ** 2 for c in comps)
    return float(np.sqrt(total))


def energy_norm(state, m: int, beta: float) -> float:
    """Squared combined norm: weighted L2 squared plus H^m squared."""
    g = state.grid
    w2 = state_weighted_l2(state, beta) ** 2
    h2 = discrete_sobolev(state.phi, m, g) ** 2 + discrete_sobolev(state.psi, m, g) ** 2
    return float(w2 + h2)


def omega(r, gamma: float):
    """Convex entropy-like weight: omega(1) = 0, omega''(1) = gamma."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("omega is defined for positive ratios only")
    if gamma == 1.0:
        return r - 1.0 - np.log(r)
    return r - 1.0 - (r ** (1.0 - gamma) - 1.0) / (1.0 - gamma)


def energy_form(state, prof, params: PhysicalParams, grid: MappedGrid) -> float:
    """Integral of rho * (K rhot^{gamma-1} omega(rhot/rho) + |psi|^2 / 2)."""
    rho = prof.rho + state.phi
    if np.any(rho <= 0):
        raise DomainError("reconstructed density must be positive")
    point = params.K * prof.rho ** (params.gamma - 1.0) * omega(prof.rho / rho, params.gamma)
    point = point + 0.5 * np.sum(state.psi**2, axis=0)
    return float(np.sum(grid.volume_weights * rho * point))


@dataclass(frozen=True)
class HardyReport:
    lhs: float
    rhs: float
    ratio: float


def hardy_check(field, shape, alpha: float, grid: MappedGrid) -> HardyReport:
    """Ratio of the weighted mass to gradient plus wall-trace energy.

    lhs = integral e^{-alpha x1} |f|^2, rhs = |grad f|_{L2}^2 + |f(wall)|^2.
    A 0/0 situation reports ratio 0.
    """
    field = np.asarray(field, dtype=float)
    lhs = weighted_l2(field, -alpha, grid) ** 2
    grad = hat_gradient(field, grid)
    rhs = l2_norm(grad, grid) ** 2 + boundary_trace_norm(field, grid) ** 2
    ratio = 0.0 if rhs == 0.0 else lhs / rhs
    return HardyReport(lhs=lhs, rhs=rhs, ratio=ratio)


def mach_field(state, prof, ext, params: PhysicalParams):
    """Pointwise Mach number of the reconstructed full state."""
    rho = prof.rho + state.phi
    if np.any(rho <= 0):
        raise DomainError("reconstructed density must be positive")
    u = state.psi + ext.U
    u0 = u[0] + prof.u1
    speed_sq = u0**2 + np.sum(u[1:] ** 2, axis=0)
    return np.sqrt(speed_sq) / params.sound_speed(rho)


@dataclass(frozen=True)
class NormReport:
    """One monitoring row of a run; the CSV schema is a fixed subset of fields."""

    t: float
    E0_beta: float
    E3_beta: float
    weighted_L2: float
    h_norms: tuple
    diss_grad_psi: float
    diss_dphi_dt: float
    diss_wall_trace: float
    residual_mass: float
    residual_momentum: float
    dphi_dt_norm: float
    energy_form_integral: float

    CSV_COLUMNS = ("t", "E0", "E3", "weighted_L2", "residual_mass",
                   "residual_momentum", "dphi_dt_norm")

    def csv_row(self):
        vals = (self.t, self.E0_beta, self.E3_beta, self.weighted_L2,
                self.residual_mass, self.residual_momentum, self.dphi_dt_norm)
        return [f"{v:.17g}" for v in vals]


def dissipation_summands(state, dphi_dt, beta: float):
    """The three monitored dissipation pieces (each squared norm).

    Gradient of psi in the weighted space, material density rate, and the
    wall trace of phi.
    """
    g = state.grid
    grad_psi = np.stack([hat_gradient(state.psi[c], g) for c in range(g.dim)])
    return (
        weighted_l2(grad_psi, beta, g) ** 2,
        l2_norm(dphi_dt, g) ** 2,
        boundary_trace_norm(state.phi, g) ** 2,
    )
