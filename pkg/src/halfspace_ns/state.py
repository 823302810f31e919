"""Perturbation state container shared by the solver and data constructors."""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, PositivityLost, ValidationError
from .geometry import MappedGrid


@dataclass(frozen=True)
class PerturbationState:
    """Density and velocity perturbation fields on a mapped grid at one instant.

    Arrays are frozen on construction; the solver produces new snapshots
    rather than mutating, so states can be shared freely.
    """

    phi: np.ndarray
    psi: np.ndarray
    t: float
    grid: MappedGrid

    def __post_init__(self):
        if self.phi.shape != self.grid.field_shape:
            raise GridMismatch(
                f"phi has shape {self.phi.shape}, grid expects {self.grid.field_shape}"
            )
        if self.psi.shape != (self.grid.dim,) + self.grid.field_shape:
            raise GridMismatch(
                f"psi has shape {self.psi.shape}, grid expects "
                f"{(self.grid.dim,) + self.grid.field_shape}"
            )
        self.phi.setflags(write=False)
        self.psi.setflags(write=False)

    def max_abs(self) -> float:
        m = float(np.max(np.abs(self.phi))) if self.phi.size else 0.0
        return max(m, float(np.max(np.abs(self.psi))))


def zero_state(grid: MappedGrid, t: float = 0.0) -> PerturbationState:
    return PerturbationState(
        phi=np.zeros(grid.field_shape),
        psi=np.zeros((grid.dim,) + grid.field_shape),
        t=t,
        grid=grid,
    )


def make_state(grid: MappedGrid, phi, psi, t: float = 0.0,
               enforce_bc: bool = True) -> PerturbationState:
    """Wrap raw arrays, optionally imposing the wall and far-field conditions."""
    phi = np.array(phi, dtype=float)
    psi = np.array(psi, dtype=float)
    if enforce_bc:
        psi[:, 0] = 0.0
        psi[:, -1] = 0.0
        phi[-1] = 0.0
    return PerturbationState(phi=phi, psi=psi, t=float(t), grid=grid)


def check_positivity(state: PerturbationState, rho_background) -> None:
    rho = rho_background + state.phi
    if np.any(rho <= 0):
        raise PositivityLost(
            f"reconstructed density reached {float(np.min(rho)):.6g} at t={state.t:.6g}"
        )
