"""Steady states by long-time marching, trajectory contraction, and decay fits.

The steady flow is obtained as the long-time limit of the evolution; the
march monitors the translation gap |state(t+T*) - state(t)| in the weighted
norm together with the semi-discrete stationarity residual, and stops when
both fall below tolerance.  Doubling T* must leave the result unchanged
within a small multiple of the tolerance, which the tests assert.
"""

from dataclasses import dataclass

import numpy as np

from .diagnostics import state_weighted_l2, weighted_l2
from .errors import (AtFixedPoint, InsufficientData, NotConverging,
                     ValidationError)
from .solver import (FlowSystem, SolverConfig, cfl_limit, make_state,
                     scheme_residual_norm, stationary_residual, step)
from .state import PerturbationState


def weighted_distance(a: PerturbationState, b: PerturbationState, beta: float) -> float:
    g = a.grid
    return float(np.sqrt(
        weighted_l2(a.phi - b.phi, beta, g) ** 2
        + weighted_l2(a.psi - b.psi, beta, g) ** 2
    ))


@dataclass(frozen=True)
class DecayFit:
    zeta: float
    correlation: float
    low_confidence: bool
    n_points: int
    window: tuple


def fit_exponential_decay(times, values, transient_fraction: float = 0.2,
                          min_correlation: float = 0.98,
                          noise_floor: float | None = None) -> DecayFit:
    """Least-squares exponential rate of a decaying positive series.

    The leading transient is excluded; samples at or below the noise floor are
    dropped.  Raises InsufficientData for fewer than 10 usable samples and
    AtFixedPoint when the whole window sits at the floor.
    """
    t = np.asarray(times, dtype=float)
    d = np.asarray(values, dtype=float)
    if t.size != d.size:
        raise ValidationError("times and values must have equal length")
    if noise_floor is None:
        scale = float(np.max(d)) if d.size else 0.0
        noise_floor = 1e3 * np.finfo(float).eps * max(1.0, scale)
    n0 = int(np.floor(transient_fraction * t.size))
    t_w, d_w = t[n0:], d[n0:]
    if d_w.size and np.all(d_w <= noise_floor):
        raise AtFixedPoint("series sits at the noise floor over the whole window")
    mask = d_w > noise_floor
    t_w, d_w = t_w[mask], d_w[mask]
    if t_w.size < 10:
        raise InsufficientData(
            f"need at least 10 usable samples after the transient, got {t_w.size}"
        )
    logd = np.log(d_w)
    slope, _ = np.polyfit(t_w, logd, 1)
    corr = float(np.corrcoef(t_w, logd)[0, 1])
    return DecayFit(
        zeta=float(-slope),
        correlation=corr,
        low_confidence=abs(corr) < min_correlation,
        n_points=int(t_w.size),
        window=(float(t_w[0]), float(t_w[-1])),
    )


def estimate_decay_rate(snapshots, phi_s: PerturbationState, beta: float,
                        transient_fraction: float = 0.2) -> DecayFit:
    """Decay rate of the weighted distance from stored (t, state) samples to phi_s."""
    times = [t for t, _ in snapshots]
    dists = [weighted_distance(s, phi_s, beta) for _, s in snapshots]
    return fit_exponential_decay(times, dists, transient_fraction)


@dataclass
class SteadyResult:
    phi_s: PerturbationState
    iterations: int
    scheme_residual: float
    cartesian_residual: tuple
    translation_gap: list          # (t, gap, scheme residual) per mark
    fitted_zeta: float
    beta: float
    converged: bool
    t_final: float


def march_to_steady(system: FlowSystem, initial: PerturbationState,
                    config: SolverConfig, T_star: float = 2.0,
                    tol: float = 1e-8, max_time: float | None = None) -> SteadyResult:
    """March until the translation gap and the stationarity residual drop below tol.

    max_time (default config.t_end) is the patience horizon; running past it
    without meeting both criteria raises NotConverging.
    """
    if T_star <= 0:
        raise ValidationError(f"translation period must be positive, got {T_star}")
    if max_time is None:
        max_time = config.t_end
    state = make_state(system.grid, initial.phi, initial.psi, initial.t)
    dt = config.dt if config.dt is not None else config.cfl_safety * cfl_limit(
        state, system)

    snaps = [(state.t, state)]
    history = []
    next_mark = state.t + T_star
    n_steps = 0
    converged = False
    while state.t < max_time - 1e-12:
        dt_step = min(dt, next_mark - state.t)
        state = step(state, system, dt_step, config.upwind_order)
        n_steps += 1
        if abs(state.t - next_mark) < 1e-9:
            gap = weighted_distance(state, snaps[-1][1], config.beta)
            resid = scheme_residual_norm(state, system, config.upwind_order)
            snaps.append((state.t, state))
            history.append((state.t, gap, resid))
            next_mark += T_star
            if gap < tol and resid < tol:
                converged = True
                break
    if not converged:
        raise NotConverging(
            f"march reached t={state.t:.6g} with gap/residual above {tol:.3g}"
        )

    try:
        fit = estimate_decay_rate(snaps[:-1], state, config.beta)
        zeta = fit.zeta
    except (AtFixedPoint, InsufficientData):
        zeta = float("nan")

    cart = stationary_residual(state, system)
    return SteadyResult(
        phi_s=state,
        iterations=n_steps,
        scheme_residual=scheme_residual_norm(state, system, config.upwind_order),
        cartesian_residual=(cart.mass_l2, cart.momentum_l2),
        translation_gap=history,
        fitted_zeta=zeta,
        beta=config.beta,
        converged=converged,
        t_final=state.t,
    )


@dataclass
class ContractionReport:
    times: np.ndarray
    distances: np.ndarray
    initial_distance: float
    max_growth_rate: float
    slack_rate: float
    monotone_within_slack: bool
    fit: DecayFit


def contraction_check(system: FlowSystem, initial_a: PerturbationState,
                      initial_b: PerturbationState, beta: float,
                      config: SolverConfig, slack_per_unit_time: float = 1e-3,
                      sample_interval: float | None = None) -> ContractionReport:
    """Evolve two trajectories with shared stepping; track their weighted distance.

    The distance must be non-increasing up to a slack of
    slack_per_unit_time * d(0) per unit time, and fit a positive exponential
    rate.
    """
    a = make_state(system.grid, initial_a.phi, initial_a.psi, initial_a.t)
    b = make_state(system.grid, initial_b.phi, initial_b.psi, initial_b.t)
    if sample_interval is None:
        sample_interval = config.report_interval
    dt = config.dt if config.dt is not None else config.cfl_safety * min(
        cfl_limit(a, system), cfl_limit(b, system))

    times = [a.t]
    dists = [weighted_distance(a, b, beta)]
    next_mark = a.t + sample_interval
    while a.t < config.t_end - 1e-12:
        dt_step = min(dt, next_mark - a.t, config.t_end - a.t)
        a = step(a, system, dt_step, config.upwind_order)
        b = step(b, system, dt_step, config.upwind_order)
        if abs(a.t - next_mark) < 1e-9 or a.t >= config.t_end - 1e-12:
            times.append(a.t)
            dists.append(weighted_distance(a, b, beta))
            next_mark += sample_interval

    times = np.asarray(times)
    dists = np.asarray(dists)
    d0 = float(dists[0])
    rates = np.diff(dists) / np.diff(times)
    max_growth = float(np.max(rates)) if rates.size else 0.0
    slack = slack_per_unit_time * d0
    try:
        fit = fit_exponential_decay(times, dists)
    except AtFixedPoint:
        # identical trajectories: distance sits at the floor, nothing to fit
        fit = DecayFit(zeta=float("nan"), correlation=float("nan"),
                       low_confidence=True, n_points=0,
                       window=(float(times[0]), float(times[-1])))
    return ContractionReport(
        times=times,
        distances=dists,
        initial_distance=d0,
        max_growth_rate=max_growth,
        slack_rate=slack,
        monotone_within_slack=bool(max_growth <= slack),
        fit=fit,
    )
