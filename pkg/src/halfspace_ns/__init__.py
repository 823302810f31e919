"""Stationary compressible viscous flow in a perturbed half-space.

A numpy/scipy toolkit around a supersonic outflow boundary: the
one-dimensional background profile, a flattened-coordinate finite-difference
solver for density/velocity perturbations, steady states by long-time
marching, and the weighted norms used to measure contraction and decay.
"""

from .params import PhysicalParams, check_supersonic, compute_wc, is_admissible
from .profile import (PlanarProfile, decay_rate, fit_tail_rate, flux_function,
                      flux_derivative, profile_residual, sample_profile,
                      solve_profile, write_profile_csv, read_profile_csv)
from .geometry import (BoundaryShape, MappedGrid, cancellation_coeffs,
                       check_shape_consistency, flat_shape,
                       gaussian_bump_shape, make_grid, map_forward,
                       map_inverse, normal_second_derivative_cancellation,
                       normal_vector, tabulated_shape)
from .operators import (hat_divergence, hat_gradient, hat_grad_div,
                        hat_laplacian)
from .boundary import (BoundaryVelocity, ExtensionField, boundary_velocity,
                       build_extension, compatible_initial_data, cutoff,
                       profile_on_grid, stationary_sources,
                       wall_clean_perturbation, zero_extension)
from .state import PerturbationState, make_state, zero_state
from .solver import (FlowSystem, SolverConfig, build_system, cfl_limit,
                     homogeneous_sources, make_report, rhs, run,
                     scheme_residual_norm, stationary_residual, step)
from .steady import (ContractionReport, DecayFit, SteadyResult,
                     contraction_check, estimate_decay_rate,
                     fit_exponential_decay, march_to_steady, weighted_distance)
from .diagnostics import (NormReport, discrete_sobolev, energy_form,
                          energy_norm, hardy_check, l2_norm, mach_field, omega,
                          state_weighted_l2, weighted_l2)
from .config import RunConfig
from .scenarios import run_scenario
from . import errors

__version__ = "0.1.0"
