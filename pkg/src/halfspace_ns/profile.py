"""One-dimensional background profile connecting the boundary state to the far field.

The stationary continuity and momentum equations integrate exactly to a scalar
autonomous ODE

    mu * u'(x1) = F(u),   u(0) = u_tilde_b,   u -> u_plus,

where F is the once-integrated momentum flux.  Density follows from the mass
flux, rho = m / u.  Derivatives of the profile are evaluated through F rather
than by differencing, so the two conservation identities hold to solver
tolerance on every sample.
"""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import Diverged, DomainError, NoStationaryProfile, NotSupersonic
from .params import PhysicalParams, compute_wc, is_admissible

# Relative accuracy of the adaptive integration; well below every invariant
# tolerance used downstream.
_ODE_RTOL = 1e-12
_ODE_ATOL = 1e-13


@dataclass(frozen=True)
class PlanarProfile:
    """Sampled background profile on a monotone grid of normal coordinates."""

    x1_grid: np.ndarray
    rho_tilde: np.ndarray
    u1_tilde: np.ndarray
    m: float
    alpha: float
    delta_tilde: float

    def __post_init__(self):
        for arr in (self.x1_grid, self.rho_tilde, self.u1_tilde):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.x1_grid.size


def flux_function(params: PhysicalParams, u):
    """Once-integrated momentum flux F(u) = m*u + p(m/u) - (m*u_plus + p(rho_plus)).

    The profile ODE reads mu * u' = F(u).  F vanishes at u_plus by construction.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u >= 0):
        raise DomainError("flux function is defined for negative velocities only")
    m = params.mass_flux
    far = m * params.u_plus + params.pressure(params.rho_plus)
    return m * u + params.pressure(m / u) - far


def flux_derivative(params: PhysicalParams, u):
    """F'(u) = m * (1 - p'(m/u) / u**2); vanishes exactly at the sonic point."""
    u = np.asarray(u, dtype=float)
    if np.any(u >= 0):
        raise DomainError("flux derivative is defined for negative velocities only")
    m = params.mass_flux
    return m * (1.0 - params.dpressure(m / u) / u**2)


def decay_rate(params: PhysicalParams) -> float:
    """Exponential rate alpha = -F'(u_plus) / mu of the far-field approach."""
    slope = float(flux_derivative(params, params.u_plus))
    alpha = -slope / params.mu
    if alpha <= 0:
        raise NotSupersonic(
            f"far-field state is not strictly supersonic (alpha = {alpha:.6g})"
        )
    return alpha


def default_length(params: PhysicalParams) -> float:
    """Domain length making the far-field truncation error at most ~1e-6."""
    return float(np.ceil(16.0 / decay_rate(params)))


def _check_admissible(params: PhysicalParams):
    if params.u_plus >= 0:
        raise NoStationaryProfile(
            f"far-field velocity must be negative, got {params.u_plus}"
        )
    threshold = compute_wc(params) * params.u_plus
    if params.u_tilde_b >= threshold:
        raise NoStationaryProfile(
            f"boundary velocity {params.u_tilde_b} is not below the admissibility "
            f"threshold {threshold:.12g}; the boundary state is not supersonic"
        )


def sample_profile(params: PhysicalParams, x1):
    """Velocity and density of the profile at arbitrary points x1 >= 0."""
    x1 = np.asarray(x1, dtype=float)
    if np.any(x1 < 0):
        raise DomainError("profile is defined for x1 >= 0")
    if params.u_tilde_b == params.u_plus:
        u = np.full(x1.shape, params.u_plus)
        return u, params.mass_flux / u
    _check_admissible(params)

    u_b, u_p = params.u_tilde_b, params.u_plus
    lo = min(u_b, u_p) - 0.5 * abs(u_b - u_p) - 1e-9
    hi = max(u_b, u_p) + 0.5 * abs(u_b - u_p)
    hi = min(hi, -1e-12)

    def rhs(_, u):
        return flux_function(params, u) / params.mu

    x_end = float(np.max(x1)) if x1.size else 0.0
    sol = solve_ivp(
        rhs,
        (0.0, max(x_end, 1e-12)),
        [u_b],
        method="RK45",
        dense_output=True,
        rtol=_ODE_RTOL,
        atol=_ODE_ATOL,
    )
    if not sol.success:
        raise Diverged(f"profile integration failed: {sol.message}")
    u = sol.sol(np.clip(x1, 0.0, x_end))[0]
    if np.any(u < lo) or np.any(u > hi):
        raise Diverged("profile left the admissible velocity interval")
    return u, params.mass_flux / u


def profile_derivatives(params: PhysicalParams, u1):
    """(u1', u1'', rho, rho') evaluated through the ODE structure.

    Using mu*u' = F(u) and rho*u = m keeps the conservation identities exact:
    u'' = F'(u) u' / mu and rho' = -rho u' / u.
    """
    u1 = np.asarray(u1, dtype=float)
    du1 = flux_function(params, u1) / params.mu
    d2u1 = flux_derivative(params, u1) * du1 / params.mu
    rho = params.mass_flux / u1
    drho = -rho * du1 / u1
    return du1, d2u1, rho, drho


def solve_profile(params: PhysicalParams, length: float | None = None,
                  resolution: int = 512) -> PlanarProfile:
    """Integrate the profile ODE on [0, length] and return uniform samples.

    Raises NoStationaryProfile when the boundary velocity sits above the
    admissibility threshold, Diverged if the integrator escapes the
    connecting interval.
    """
    if resolution < 2:
        raise DomainError(f"resolution must be at least 2, got {resolution}")
    if length is None:
        length = default_length(params)
    if length <= 0:
        raise DomainError(f"length must be positive, got {length}")
    x1 = np.linspace(0.0, float(length), int(resolution))
    u1, rho = sample_profile(params, x1)
    return PlanarProfile(
        x1_grid=x1,
        rho_tilde=np.asarray(rho),
        u1_tilde=np.asarray(u1),
        m=params.mass_flux,
        alpha=decay_rate(params),
        delta_tilde=params.delta_tilde,
    )


def profile_residual(profile: PlanarProfile, params: PhysicalParams):
    """Max-norm residuals of the two stationary conservation laws.

    Both derivatives are centered differences on the stored samples, so this
    check is independent of the flux-based construction path.
    """
    x, rho, u = profile.x1_grid, profile.rho_tilde, profile.u1_tilde
    h = x[1] - x[0]
    mass = rho * u
    momentum = rho * u**2 + params.pressure(rho)
    d_mass = (mass[2:] - mass[:-2]) / (2 * h)
    d_mom = (momentum[2:] - momentum[:-2]) / (2 * h)
    d2_u = (u[2:] - 2 * u[1:-1] + u[:-2]) / h**2
    r1 = float(np.max(np.abs(d_mass))) if d_mass.size else 0.0
    r2 = float(np.max(np.abs(d_mom - params.mu * d2_u))) if d_mom.size else 0.0
    return r1, r2


def fit_tail_rate(profile: PlanarProfile, params: PhysicalParams,
                  tail_fraction: float = 0.25) -> float:
    """Least-squares exponential rate of |u1 - u_plus| over the domain tail."""
    x, u = profile.x1_grid, profile.u1_tilde
    gap = np.abs(u - params.u_plus)
    n0 = int(np.floor((1.0 - tail_fraction) * x.size))
    x_t, g_t = x[n0:], gap[n0:]
    mask = g_t > 1e3 * np.finfo(float).eps * abs(params.u_plus)
    if np.count_nonzero(mask) < 3:
        raise DomainError("profile tail is below the noise floor; cannot fit a rate")
    slope = np.polyfit(x_t[mask], np.log(g_t[mask]), 1)[0]
    return float(-slope)


def write_profile_csv(profile: PlanarProfile, path):
    """Column layout: x1, rho, u1 with a header row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "rho", "u1"])
        for xi, ri, ui in zip(profile.x1_grid, profile.rho_tilde, profile.u1_tilde):
            writer.writerow([f"{xi:.17g}", f"{ri:.17g}", f"{ui:.17g}"])


def read_profile_csv(path, params: PhysicalParams) -> PlanarProfile:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return PlanarProfile(
        x1_grid=data[:, 0],
        rho_tilde=data[:, 1],
        u1_tilde=data[:, 2],
        m=params.mass_flux,
        alpha=decay_rate(params),
        delta_tilde=params.delta_tilde,
    )
