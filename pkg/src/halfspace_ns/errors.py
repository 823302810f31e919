"""Exception types shared across the package."""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SimulationError):
    """A configuration or parameter value violates its contract."""


class NotSupersonic(ValidationError):
    """Far-field Mach number does not exceed one."""


class WrongSign(ValidationError):
    """A quantity has the wrong sign (e.g. far-field velocity not negative)."""


class DomainError(SimulationError):
    """Function evaluated outside its mathematical domain."""


class NoStationaryProfile(SimulationError):
    """Boundary velocity violates the admissibility threshold; no connecting profile."""


class Diverged(SimulationError):
    """Integrator left the admissible region."""


class OutsideDomain(SimulationError):
    """Point lies outside the (mapped) flow domain."""


class ResolutionTooCoarse(SimulationError):
    """Grid has too few nodes for the requested stencil."""


class GridMismatch(SimulationError):
    """Fields defined on incompatible grids."""


class OutflowViolated(SimulationError):
    """Boundary velocity does not point out of the domain everywhere."""


class SingularA(SimulationError):
    """Boundary viscous coefficient matrix is singular (cannot occur for mu1 > 0)."""


class PositivityLost(SimulationError):
    """Reconstructed density is non-positive somewhere."""


class CflViolation(SimulationError):
    """Time step exceeds the stability limit."""


class NonFinite(SimulationError):
    """A field contains NaN or Inf."""


class NotConverging(SimulationError):
    """Steady-state march stagnated above tolerance."""


class InsufficientData(SimulationError):
    """Not enough samples for a fit."""


class AtFixedPoint(SimulationError):
    """Trajectory is already at the fixed point; no decay rate to fit."""
