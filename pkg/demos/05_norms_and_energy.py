"""The measurement side: weighted norms, the energy form, and a Hardy ratio.

These are the quantities the solver reports while marching: exponentially
weighted L2 norms (the frame in which contraction is clean), discrete Sobolev
norms, a convex energy density equivalent to the squared perturbation at
small amplitude, and the boundary-controlled Hardy ratio.
"""

import numpy as np

from halfspace_ns import (PhysicalParams, decay_rate, energy_form,
                          discrete_sobolev, gaussian_bump_shape, hardy_check,
                          make_grid, mach_field, omega, profile_on_grid,
                          state_weighted_l2, wall_clean_perturbation,
                          weighted_l2, zero_state)
from halfspace_ns.boundary import zero_extension

params = PhysicalParams()
alpha = decay_rate(params)

shape = gaussian_bump_shape(dim=2, amplitude=0.3, width=1.0, extent=(8.0,))
grid = make_grid(shape, (64, 32), 23.0)
prof = profile_on_grid(params, grid)

state = wall_clean_perturbation(grid, amplitude=0.02, seed=3)

print("weighted L2 norms of one perturbation, growing with the weight:")
for beta in (0.0, alpha / 4, alpha / 2):
    print(f"  beta = {beta:.4f}   |Phi| = {state_weighted_l2(state, beta):.5e}")

print("\ndiscrete Sobolev ladder:")
for m in range(4):
    val = np.sqrt(discrete_sobolev(state.phi, m, grid) ** 2
                  + discrete_sobolev(state.psi, m, grid) ** 2)
    print(f"  H^{m} = {val:.5e}")

print(f"\nenergy form integral : {energy_form(state, prof, params, grid):.5e}")
print(f"omega(2) at gamma=1  : {omega(2.0, 1.0):.5f} (= 1 - ln 2)")

rep = hardy_check(state.phi, shape, alpha, grid)
print(f"hardy ratio          : {rep.ratio:.4f} "
      f"(weighted mass {rep.lhs:.3e} / gradient+trace {rep.rhs:.3e})")

mach = mach_field(zero_state(grid), prof, zero_extension(grid, params), params)
print(f"\nMach number of the background: wall {mach[0, 0]:.3f} "
      f"-> far field {mach[-1, 0]:.3f} (supersonic throughout)")
