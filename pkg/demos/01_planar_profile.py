"""Background profile for supersonic outflow through a flat wall.

The stationary equations integrate to a scalar ODE for the normal velocity;
density follows from the constant mass flux.  This script builds the profile
for the canonical parameter set, checks its invariants, and shows how the
admissibility threshold separates boundary speeds with and without a
connecting profile.
"""

import numpy as np

from halfspace_ns import (PhysicalParams, check_supersonic, compute_wc,
                          decay_rate, fit_tail_rate, profile_residual,
                          solve_profile, write_profile_csv)
from halfspace_ns.errors import NoStationaryProfile

params = PhysicalParams(K=1.0, gamma=1.0, mu1=1.0, mu2=0.0,
                        rho_plus=1.0, u_plus=-2.0, u_tilde_b=-3.0)

print(f"far-field Mach number : {params.mach:.3f} "
      f"(supersonic: {check_supersonic(params)})")
w_c = compute_wc(params)
print(f"critical ratio w_c    : {w_c:.6f}; admissible iff "
      f"u_b < {w_c * params.u_plus:.3f}")
print(f"decay rate alpha      : {decay_rate(params):.4f}")

profile = solve_profile(params, resolution=800)
r1, r2 = profile_residual(profile, params)
print(f"\nprofile on [0, {profile.x1_grid[-1]:.0f}] with {profile.n} samples")
print(f"velocity runs {profile.u1_tilde[0]:.3f} -> {profile.u1_tilde[-1]:.5f}")
print(f"density  runs {profile.rho_tilde[0]:.4f} -> {profile.rho_tilde[-1]:.5f}")
print(f"conservation residuals: mass {r1:.2e}, momentum {r2:.2e}")
print(f"fitted tail decay rate: {fit_tail_rate(profile, params):.5f}")

write_profile_csv(profile, "profile.csv")
print("\nwrote profile.csv (columns x1, rho, u1)")

# a wall speed above the threshold admits no connecting profile
try:
    solve_profile(PhysicalParams(u_tilde_b=-0.95), resolution=64)
except NoStationaryProfile as exc:
    print(f"\nu_b = -0.95 is rejected as expected:\n  {exc}")
