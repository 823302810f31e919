"""Steady flow past a bumped wall: the velocity picks up tangential structure.

Time-marching the perturbation system from compatible initial data converges
to a stationary state.  Over a flat wall with planar data that state is the
background profile itself; over a bump with outflow along the local normal it
acquires a genuinely multidirectional velocity field.

Takes a couple of minutes at the default resolution.
"""

import numpy as np

from halfspace_ns import (PhysicalParams, SolverConfig, boundary_velocity,
                          build_system, compatible_initial_data, decay_rate,
                          gaussian_bump_shape, make_grid, march_to_steady)
from halfspace_ns.io import write_slice_csv, write_state_dump

params = PhysicalParams()
beta = decay_rate(params) / 4.0

shape = gaussian_bump_shape(dim=2, amplitude=0.3, width=1.0, extent=(8.0,))
grid = make_grid(shape, (64, 32), 23.0)
wall = boundary_velocity(grid, params, mode="normal")
print(f"outflow margin along the wall: {wall.outflow_margin:.3f}")

system = build_system(params, shape, grid, wall)
init = compatible_initial_data(system.prof, shape, params, system.G[:, 0], grid)

result = march_to_steady(system, init, SolverConfig(beta=beta), T_star=2.0,
                         tol=1e-6, max_time=300.0)
print(f"\nconverged at t = {result.t_final:.1f} after {result.iterations} steps")
print(f"stationarity residual    : {result.scheme_residual:.2e}")
print(f"cross-check residual     : mass {result.cartesian_residual[0]:.2e}, "
      f"momentum {result.cartesian_residual[1]:.2e} (grid truncation scale)")
print(f"fitted approach rate     : {result.fitted_zeta:.3f}")

psi = result.phi_s.psi
print(f"\nmax |normal velocity perturbation|     : {np.max(np.abs(psi[0])):.4f}")
print(f"max |tangential velocity perturbation| : {np.max(np.abs(psi[1])):.4f}")
print("the tangential component is the multidirectional signature")

print("\ntranslation gap history (every T* = 2):")
for t, gap, resid in result.translation_gap[:6]:
    print(f"  t = {t:5.1f}   gap = {gap:.3e}   residual = {resid:.3e}")
print("  ...")

write_state_dump("steady_state.bin", result.phi_s)
write_slice_csv("steady_slice.csv", result.phi_s)
print("\nwrote steady_state.bin and steady_slice.csv")
