"""Batch scenarios: end-to-end runs mapped to exit codes and artifacts."""

import os

import numpy as np

from . import io as hsio
from .boundary import (boundary_velocity, compatible_initial_data,
                       profile_on_grid, wall_clean_perturbation)
from .config import RunConfig
from .diagnostics import state_weighted_l2
from .errors import (CflViolation, NoStationaryProfile, NotConverging,
                     SimulationError, ValidationError)
from .params import check_supersonic, compute_wc
from .profile import (decay_rate, fit_tail_rate, profile_residual,
                      solve_profile, write_profile_csv)
from .solver import build_system, make_state, run
from .state import zero_state
from .steady import (contraction_check, fit_exponential_decay, march_to_steady,
                     weighted_distance)
from .verification import evolution_order_study, operator_order_study

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NO_PROFILE = 2
EXIT_NOT_CONVERGING = 3
EXIT_CFL = 4
EXIT_VALIDATION = 5

_EXIT_BY_ERROR = (
    (NoStationaryProfile, EXIT_NO_PROFILE),
    (NotConverging, EXIT_NOT_CONVERGING),
    (CflViolation, EXIT_CFL),
    (ValidationError, EXIT_VALIDATION),
)


def run_scenario(cfg: RunConfig, echo=print) -> int:
    """Dispatch one scenario; artifacts land in the configured output directory."""
    try:
        outdir = cfg.raw["output_dir"]
        os.makedirs(outdir, exist_ok=True)
        hsio.write_summary_json(os.path.join(outdir, "resolved_config.json"),
                                cfg.resolved())
        handler = {
            "profile": _scenario_profile,
            "steady": _scenario_steady,
            "stability": _scenario_stability,
            "contraction": _scenario_contraction,
            "verify": _scenario_verify,
        }[cfg.raw["scenario"]]
        handler(cfg, outdir, echo)
        return EXIT_OK
    except SimulationError as exc:
        for err_type, code in _EXIT_BY_ERROR:
            if isinstance(exc, err_type):
                echo(f"error: {exc}")
                return code
        echo(f"error: {exc}")
        return EXIT_FAILURE


def _scenario_profile(cfg: RunConfig, outdir, echo):
    params = cfg.params()
    res = int(cfg.raw["tolerances"]["profile_resolution"])
    length = cfg.raw["grid"]["length"]
    prof = solve_profile(params, length=length, resolution=res)
    write_profile_csv(prof, os.path.join(outdir, "profile.csv"))
    r1, r2 = profile_residual(prof, params)
    summary = {
        "supersonic": bool(check_supersonic(params)),
        "w_c": compute_wc(params),
        "alpha": prof.alpha,
        "fitted_tail_rate": fit_tail_rate(prof, params),
        "delta_tilde": prof.delta_tilde,
        "mass_flux": prof.m,
        "residual_mass": r1,
        "residual_momentum": r2,
        "length": float(prof.x1_grid[-1]),
        "resolution": res,
    }
    hsio.write_summary_json(os.path.join(outdir, "summary.json"), summary)
    echo(f"profile: alpha={prof.alpha:.6g} w_c={summary['w_c']:.6g} "
         f"tail={summary['fitted_tail_rate']:.6g}")


def _build(cfg: RunConfig):
    params = cfg.params()
    shape = cfg.shape()
    grid = cfg.grid()
    bc = cfg.raw["boundary"]
    samples = None if bc["samples"] is None else np.asarray(bc["samples"], float)
    wall = boundary_velocity(grid, params, mode=bc["mode"], samples=samples,
                             scale=bc["scale"])
    system = build_system(params, shape, grid, wall)
    return params, shape, grid, system


def _shape_pointwise_bounds(grid):
    g = grid
    return {
        "max_abs_M": float(np.max(np.abs(g.M_t))),
        "max_abs_grad_M": float(max(np.max(np.abs(d)) for d in g.dM_t)),
        "max_abs_hess_M": float(max(np.max(np.abs(g.d2M_t[i][j]))
                                    for i in range(g.dim - 1)
                                    for j in range(g.dim - 1))),
    }


def _scenario_steady(cfg: RunConfig, outdir, echo):
    params, shape, grid, system = _build(cfg)
    beta = decay_rate(params) / 4.0
    tol = float(cfg.raw["tolerances"]["steady_tol"])
    t_star = float(cfg.raw["tolerances"]["T_star"])
    sol_cfg = cfg.solver_config(beta=beta)
    initial = compatible_initial_data(system.prof, shape, params,
                                      system.G[:, 0], grid)
    result = march_to_steady(system, initial, sol_cfg, T_star=t_star, tol=tol,
                             max_time=float(cfg.raw["tolerances"]["max_time"]))
    hsio.write_state_dump(os.path.join(outdir, "steady_state.bin"), result.phi_s)
    hsio.write_slice_csv(os.path.join(outdir, "steady_slice.csv"), result.phi_s)
    with open(os.path.join(outdir, "translation_gap.csv"), "w") as fh:
        fh.write("t,gap,scheme_residual\n")
        for t, gap, resid in result.translation_gap:
            fh.write(f"{t:.17g},{gap:.17g},{resid:.17g}\n")
    psi_tang_max = float(np.max(np.abs(result.phi_s.psi[1:]))) if grid.dim > 1 else 0.0
    summary = {
        "converged": result.converged,
        "t_final": result.t_final,
        "iterations": result.iterations,
        "scheme_residual": result.scheme_residual,
        "cartesian_residual_mass": result.cartesian_residual[0],
        "cartesian_residual_momentum": result.cartesian_residual[1],
        "fitted_zeta": result.fitted_zeta,
        "beta": result.beta,
        "steady_norm_weighted": state_weighted_l2(result.phi_s, beta),
        "max_tangential_velocity": psi_tang_max,
        "delta": system.ext.delta,
        "shape_bounds": _shape_pointwise_bounds(grid),
    }
    hsio.write_summary_json(os.path.join(outdir, "summary.json"), summary)
    echo(f"steady: residual={result.scheme_residual:.3g} "
         f"max|psi_tangential|={psi_tang_max:.3g} t={result.t_final:.4g}")


def _scenario_stability(cfg: RunConfig, outdir, echo):
    params, shape, grid, system = _build(cfg)
    beta = decay_rate(params) / 4.0
    tol = float(cfg.raw["tolerances"]["steady_tol"])
    t_star = float(cfg.raw["tolerances"]["T_star"])
    sol_cfg = cfg.solver_config(beta=beta)
    initial = compatible_initial_data(system.prof, shape, params,
                                      system.G[:, 0], grid)
    steady = march_to_steady(system, initial, sol_cfg, T_star=t_star, tol=tol,
                             max_time=float(cfg.raw["tolerances"]["max_time"]))
    phi_s = steady.phi_s

    amp = float(cfg.raw["tolerances"]["perturbation_amplitude"])
    bump = wall_clean_perturbation(grid, amplitude=amp, seed=cfg.raw["seed"])
    start = make_state(grid, phi_s.phi + bump.phi, phi_s.psi + bump.psi, 0.0)

    samples = []

    def record(state, report):
        samples.append((state.t,
                        weighted_distance(state, phi_s, beta),
                        weighted_distance(state, phi_s, 0.0)))
        return False

    result = run(system, start, sol_cfg, callbacks=[record])
    hsio.write_timeseries_csv(os.path.join(outdir, "timeseries.csv"),
                              result.reports)
    with open(os.path.join(outdir, "distance_to_steady.csv"), "w") as fh:
        fh.write("t,weighted,plain\n")
        for t, dw, dp in samples:
            fh.write(f"{t:.17g},{dw:.17g},{dp:.17g}\n")
    t_arr = [s[0] for s in samples]
    fit = fit_exponential_decay(t_arr, [s[1] for s in samples])
    summary = {
        "zeta_weighted": fit.zeta,
        "correlation": fit.correlation,
        "low_confidence": fit.low_confidence,
        "final_weighted_distance": samples[-1][1],
        "final_plain_distance": samples[-1][2],
        "beta": beta,
        "steady_scheme_residual": steady.scheme_residual,
    }
    hsio.write_summary_json(os.path.join(outdir, "summary.json"), summary)
    echo(f"stability: zeta={fit.zeta:.4g} (|r|={abs(fit.correlation):.4f}) "
         f"final plain distance={samples[-1][2]:.3g}")


def _scenario_contraction(cfg: RunConfig, outdir, echo):
    params, shape, grid, system = _build(cfg)
    beta = decay_rate(params) / 4.0
    sol_cfg = cfg.solver_config(beta=beta)
    amp = float(cfg.raw["tolerances"]["perturbation_amplitude"])
    base = compatible_initial_data(system.prof, shape, params,
                                   system.G[:, 0], grid)
    bump = wall_clean_perturbation(grid, amplitude=amp, seed=cfg.raw["seed"])
    other = make_state(grid, base.phi + bump.phi, base.psi + bump.psi, 0.0)
    report = contraction_check(
        system, base, other, beta, sol_cfg,
        slack_per_unit_time=float(cfg.raw["tolerances"]["slack_per_unit_time"]))
    with open(os.path.join(outdir, "contraction.csv"), "w") as fh:
        fh.write("t,distance\n")
        for t, dist in zip(report.times, report.distances):
            fh.write(f"{t:.17g},{dist:.17g}\n")
    summary = {
        "initial_distance": report.initial_distance,
        "monotone_within_slack": report.monotone_within_slack,
        "max_growth_rate": report.max_growth_rate,
        "slack_rate": report.slack_rate,
        "gamma0": report.fit.zeta,
        "correlation": report.fit.correlation,
        "low_confidence": report.fit.low_confidence,
        "beta": beta,
    }
    hsio.write_summary_json(os.path.join(outdir, "summary.json"), summary)
    echo(f"contraction: gamma0={report.fit.zeta:.4g} monotone="
         f"{report.monotone_within_slack}")


def _scenario_verify(cfg: RunConfig, outdir, echo):
    ops = operator_order_study()
    evo = evolution_order_study(cfg.params())
    summary = {
        "operator_errors": ops.errors, "operator_orders": ops.orders,
        "evolution_errors": evo.errors, "evolution_orders": evo.orders,
    }
    hsio.write_summary_json(os.path.join(outdir, "summary.json"), summary)
    worst = min(min(v) for v in list(ops.orders.values()) + list(evo.orders.values()))
    echo(f"verify: minimum measured order {worst:.3f}")
