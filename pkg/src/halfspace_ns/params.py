"""Physical constants of the flow and the structural admissibility conditions.

The fluid is an isentropic ideal gas with pressure p(rho) = K*rho**gamma and
viscosities mu1, mu2.  The far field carries density rho_plus and normal
velocity u_plus < 0 (outflow); the planar boundary speed u_tilde_b selects the
one-dimensional background profile.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotSupersonic, ValidationError, WrongSign


@dataclass(frozen=True)
class PhysicalParams:
    """Immutable fluid constants plus far-field / boundary states."""

    K: float = 1.0
    gamma: float = 1.0
    mu1: float = 1.0
    mu2: float = 0.0
    rho_plus: float = 1.0
    u_plus: float = -2.0
    u_tilde_b: float = -3.0

    def __post_init__(self):
        if self.K <= 0:
            raise ValidationError(f"pressure coefficient K must be positive, got {self.K}")
        if self.gamma < 1:
            raise ValidationError(f"adiabatic exponent gamma must be >= 1, got {self.gamma}")
        if self.mu1 <= 0:
            raise ValidationError(f"shear viscosity mu1 must be positive, got {self.mu1}")
        if 2 * self.mu1 + 3 * self.mu2 < 0:
            raise ValidationError(
                f"viscosities must satisfy 2*mu1 + 3*mu2 >= 0, got {2 * self.mu1 + 3 * self.mu2}"
            )
        if self.rho_plus <= 0:
            raise ValidationError(f"far-field density must be positive, got {self.rho_plus}")
        if self.mu <= 0:
            raise ValidationError(f"combined viscosity 2*mu1 + mu2 must be positive, got {self.mu}")

    @property
    def mu(self) -> float:
        """Combined viscosity acting on the one-dimensional profile."""
        return 2.0 * self.mu1 + self.mu2

    @property
    def c_plus(self) -> float:
        """Far-field sound speed sqrt(p'(rho_plus))."""
        return float(np.sqrt(self.K * self.gamma * self.rho_plus ** (self.gamma - 1.0)))

    @property
    def mach(self) -> float:
        """Far-field Mach number |u_plus| / c_plus."""
        return abs(self.u_plus) / self.c_plus

    @property
    def delta_tilde(self) -> float:
        """Planar boundary strength |u_tilde_b - u_plus|."""
        return abs(self.u_tilde_b - self.u_plus)

    @property
    def mass_flux(self) -> float:
        """Constant mass flux rho_plus * u_plus of the background profile."""
        return self.rho_plus * self.u_plus

    def pressure(self, rho):
        """p(rho) = K * rho**gamma."""
        return self.K * rho ** self.gamma

    def dpressure(self, rho):
        """p'(rho) = K * gamma * rho**(gamma - 1)."""
        return self.K * self.gamma * rho ** (self.gamma - 1.0)

    def sound_speed(self, rho):
        return np.sqrt(self.dpressure(rho))


def check_supersonic(params: PhysicalParams) -> bool:
    """True iff the far-field state is supersonic, |u_plus| / sqrt(p'(rho_plus)) > 1."""
    return params.mach > 1.0


def compute_wc(params: PhysicalParams) -> float:
    """Critical velocity ratio in (0, 1) of the profile admissibility threshold.

    The threshold velocity is the sonic root u_s of the momentum-flux
    derivative, |u_s|**(gamma+1) = K*gamma*|rho_plus*u_plus|**(gamma-1);
    a planar profile is admissible when u_tilde_b < w_c * u_plus with
    w_c = |u_s| / |u_plus|.  Closed form: w_c = mach**(-2/(gamma+1)).
    """
    if params.u_plus >= 0:
        raise WrongSign(f"far-field velocity must be negative, got {params.u_plus}")
    if not check_supersonic(params):
        raise NotSupersonic(
            f"far-field Mach number {params.mach:.6g} does not exceed 1"
        )
    u_s = (params.K * params.gamma * abs(params.mass_flux) ** (params.gamma - 1.0)) ** (
        1.0 / (params.gamma + 1.0)
    )
    return u_s / abs(params.u_plus)


def is_admissible(params: PhysicalParams) -> bool:
    """True iff a planar stationary profile connecting u_tilde_b to u_plus exists."""
    return params.u_plus < 0 and params.u_tilde_b < compute_wc(params) * params.u_plus
