"""Boundary velocity data, its interior extension, and compatible initial data.

The boundary condition prescribes the full velocity on the wall.  Its
deviation from the planar value is carried into the domain by a cutoff
extension U supported within unit depth of the boundary.  The extension is
analytic in the normal coordinate (closed-form cutoff) and spectral in the
tangential ones, so the stationary source fields built from it carry no
stencil truncation error of their own.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (GridMismatch, OutflowViolated, SingularA,
                     ValidationError)
from .geometry import BoundaryShape, MappedGrid, normal_vector
from .params import PhysicalParams
from .profile import profile_derivatives, sample_profile
from .state import PerturbationState


# ---------------------------------------------------------------------------
# Cutoff
# ---------------------------------------------------------------------------

def cutoff(s):
    """Monotone C^2 quintic step: 1 for s <= 0, 0 for s >= 1."""
    s = np.asarray(s, dtype=float)
    t = np.clip(s, 0.0, 1.0)
    inner = 1.0 - t**3 * (10.0 - 15.0 * t + 6.0 * t**2)
    return np.where(s <= 0.0, 1.0, np.where(s >= 1.0, 0.0, inner))


def cutoff_d1(s):
    s = np.asarray(s, dtype=float)
    t = np.clip(s, 0.0, 1.0)
    inner = -30.0 * t**2 * (1.0 - t) ** 2
    return np.where((s <= 0.0) | (s >= 1.0), 0.0, inner)


def cutoff_d2(s):
    s = np.asarray(s, dtype=float)
    t = np.clip(s, 0.0, 1.0)
    inner = -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    return np.where((s <= 0.0) | (s >= 1.0), 0.0, inner)


# ---------------------------------------------------------------------------
# Boundary velocity
# ---------------------------------------------------------------------------

def _spectral_d1(a, L, axis):
    n = a.shape[axis]
    ik = 2j * np.pi * np.fft.fftfreq(n, d=1.0 / n) / L
    shape = [1] * a.ndim
    shape[axis] = n
    return np.real(np.fft.ifft(np.fft.fft(a, axis=axis) * ik.reshape(shape), axis=axis))


@dataclass(frozen=True)
class BoundaryVelocity:
    """Wall velocity sampled on the tangential grid, plus the outflow margin."""

    mode: str
    values: np.ndarray          # (dim, *nt) full wall velocity
    deviation: np.ndarray       # (dim, *nt) values minus the planar state
    outflow_margin: float

    def __post_init__(self):
        self.values.setflags(write=False)
        self.deviation.setflags(write=False)


def boundary_velocity(grid: MappedGrid, params: PhysicalParams, mode: str = "planar",
                      samples=None, scale: float = 1.0) -> BoundaryVelocity:
    """Construct wall data in one of three modes.

    planar: the one-dimensional value (u_tilde_b, 0, ...).
    normal: outflow of speed |u_tilde_b| along the outward normal, which
        reduces to the planar value on a flat wall.
    custom: tabulated deviation samples (dim, *nt_samples) on a uniform
        periodic tangential grid, linearly interpolated onto the grid nodes
        and scaled by `scale`.
    """
    d = grid.dim
    nt = grid.field_shape[1:]
    planar = np.zeros((d,) + nt)
    planar[0] = params.u_tilde_b
    mesh = grid.tangential_mesh()

    if mode == "planar":
        values = planar.copy()
    elif mode == "normal":
        n_vec = normal_vector(grid.shape, *mesh)
        values = -params.u_tilde_b * n_vec
    elif mode == "custom":
        if samples is None:
            raise ValidationError("custom boundary data requires deviation samples")
        dev = _interp_tangential(np.asarray(samples, dtype=float), grid) * scale
        values = planar + dev
    else:
        raise ValidationError(f"unknown boundary data mode {mode!r}")

    n_vec = normal_vector(grid.shape, *mesh)
    margin = float(np.min(np.sum(values * n_vec, axis=0)))
    return BoundaryVelocity(
        mode=mode, values=values, deviation=values - planar, outflow_margin=margin
    )


def _interp_tangential(samples, grid: MappedGrid):
    """Periodic linear interpolation of (dim, *nt_s) samples onto grid nodes."""
    d = grid.dim
    if samples.shape[0] != d:
        raise ValidationError(
            f"custom samples need {d} velocity components, got {samples.shape[0]}"
        )
    if d == 2:
        ns = samples.shape[1]
        L = grid.shape.tangential_extent[0]
        s_nodes = np.arange(ns + 1) * (L / ns)
        target = grid.tangential[0]
        out = np.empty((d, target.size))
        for c in range(d):
            wrapped = np.append(samples[c], samples[c][0])
            out[c] = np.interp(target, s_nodes, wrapped)
        return out
    from scipy.interpolate import RegularGridInterpolator

    ns2, ns3 = samples.shape[1:]
    L2, L3 = grid.shape.tangential_extent
    s2 = np.arange(ns2 + 1) * (L2 / ns2)
    s3 = np.arange(ns3 + 1) * (L3 / ns3)
    mesh = np.meshgrid(*grid.tangential, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    out = np.empty((d,) + grid.field_shape[1:])
    for c in range(d):
        wrapped = np.pad(samples[c], ((0, 1), (0, 1)), mode="wrap")
        itp = RegularGridInterpolator((s2, s3), wrapped, method="linear")
        out[c] = itp(pts).reshape(grid.field_shape[1:])
    return out


# ---------------------------------------------------------------------------
# Extension field
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionField:
    """Interior extension of the wall deviation with precomputed derivatives.

    jac[c, k] holds the k-th Cartesian derivative of component c; div_U and
    L_U are the divergence and the momentum diffusion operator applied to U.
    All derivative fields are assembled from the closed-form normal profile
    and spectral tangential differentiation.
    """

    grid: MappedGrid
    U: np.ndarray                      # (d, n1, *nt)
    jac: np.ndarray                    # (d, d, n1, *nt)
    div_U: np.ndarray                  # (n1, *nt)
    L_U: np.ndarray                    # (d, n1, *nt)
    deviation: np.ndarray              # (d, *nt) boundary values
    delta: float
    support_depth: float = 1.0

    def __post_init__(self):
        for arr in (self.U, self.jac, self.div_U, self.L_U):
            arr.setflags(write=False)


def build_extension(shape: BoundaryShape, u_b: BoundaryVelocity,
                    params: PhysicalParams, grid: MappedGrid) -> ExtensionField:
    """Cutoff extension U(y) = deviation(y') * cutoff(y1) with derivative fields."""
    if u_b.outflow_margin <= 0:
        raise OutflowViolated(
            f"wall velocity must point out of the domain; margin {u_b.outflow_margin:.6g}"
        )
    d = grid.dim
    n1 = grid.y1.size
    nt = grid.field_shape[1:]
    exp_t = (np.newaxis,) + (slice(None),) * (d - 1)

    chi = cutoff(grid.y1).reshape((-1,) + (1,) * (d - 1))
    chi1 = cutoff_d1(grid.y1).reshape(chi.shape)
    chi2 = cutoff_d2(grid.y1).reshape(chi.shape)

    dev = u_b.deviation                       # (d, *nt)
    exts = grid.shape.tangential_extent
    ddev = [[_spectral_d1(dev[c], exts[k], axis=k) for k in range(d - 1)]
            for c in range(d)]
    d2dev = [[[_spectral_d1(ddev[c][k], exts[l], axis=l) for l in range(d - 1)]
              for k in range(d - 1)] for c in range(d)]

    gM = grid.dM_t                            # list of (nt) arrays
    hess = grid.d2M_t
    lapM = sum(hess[i][i] for i in range(d - 1))
    gM2 = sum(g**2 for g in gM)

    U = np.empty((d, n1) + nt)
    jac = np.empty((d, d, n1) + nt)
    for c in range(d):
        dev_c = dev[c][exp_t]
        U[c] = dev_c * chi
        jac[c, 0] = dev_c * chi1
        for k in range(d - 1):
            jac[c, k + 1] = ddev[c][k][exp_t] * chi - gM[k][exp_t] * dev_c * chi1

    div_U = jac[0, 0].copy()
    for k in range(d - 1):
        div_U += jac[k + 1, k + 1]

    # Laplacian of each component
    lap = np.empty_like(U)
    for c in range(d):
        dev_c = dev[c][exp_t]
        acc = (1.0 + gM2)[exp_t] * dev_c * chi2 - lapM[exp_t] * dev_c * chi1
        for k in range(d - 1):
            acc += d2dev[c][k][k][exp_t] * chi
            acc -= 2.0 * gM[k][exp_t] * ddev[c][k][exp_t] * chi1
        lap[c] = acc

    # gradient of the divergence
    # div U = dev0 * chi1_part + tangential part; expand normal and tangential
    # derivatives analytically
    dS1 = dev[0][exp_t] * chi2
    for k in range(d - 1):
        dS1 += ddev[k + 1][k][exp_t] * chi1 - gM[k][exp_t] * dev[k + 1][exp_t] * chi2
    grad_div = np.empty_like(U)
    grad_div[0] = dS1
    for k in range(d - 1):
        dkS = ddev[0][k][exp_t] * chi1
        for l in range(d - 1):
            dkS += d2dev[l + 1][l][k][exp_t] * chi
            dkS -= hess[l][k][exp_t] * dev[l + 1][exp_t] * chi1
            dkS -= gM[l][exp_t] * ddev[l + 1][k][exp_t] * chi1
        grad_div[k + 1] = dkS - gM[k][exp_t] * dS1

    L_U = params.mu1 * lap + (params.mu1 + params.mu2) * grad_div

    w = grid.volume_weights
    h_sq = float(np.sum(w * np.sum(U**2, axis=0)))
    h_sq += float(np.sum(w * np.sum(jac**2, axis=(0, 1))))
    delta = float(np.sqrt(h_sq)) + params.delta_tilde

    return ExtensionField(
        grid=grid, U=U, jac=jac, div_U=div_U, L_U=L_U,
        deviation=dev.copy(), delta=delta,
    )


def zero_extension(grid: MappedGrid, params: PhysicalParams) -> ExtensionField:
    """Extension of planar data: identically zero fields."""
    d = grid.dim
    nt = grid.field_shape[1:]
    n1 = grid.y1.size
    return ExtensionField(
        grid=grid,
        U=np.zeros((d, n1) + nt),
        jac=np.zeros((d, d, n1) + nt),
        div_U=np.zeros((n1,) + nt),
        L_U=np.zeros((d, n1) + nt),
        deviation=np.zeros((d,) + nt),
        delta=params.delta_tilde,
    )


# ---------------------------------------------------------------------------
# Background profile on the grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridProfile:
    """Background profile and its exact derivatives broadcast over the grid."""

    rho: np.ndarray
    drho: np.ndarray
    u1: np.ndarray
    du1: np.ndarray
    d2u1: np.ndarray

    def __post_init__(self):
        for arr in (self.rho, self.drho, self.u1, self.du1, self.d2u1):
            arr.setflags(write=False)


def profile_on_grid(params: PhysicalParams, grid: MappedGrid) -> GridProfile:
    u1, _ = sample_profile(params, grid.y1)
    du1, d2u1, rho, drho = profile_derivatives(params, u1)
    shape = (-1,) + (1,) * (grid.dim - 1)
    return GridProfile(
        rho=rho.reshape(shape), drho=drho.reshape(shape),
        u1=u1.reshape(shape), du1=du1.reshape(shape), d2u1=d2u1.reshape(shape),
    )


# ---------------------------------------------------------------------------
# Stationary sources
# ---------------------------------------------------------------------------

def stationary_sources(prof: GridProfile, ext: ExtensionField,
                       shape: BoundaryShape, params: PhysicalParams):
    """Time-independent source fields (F, G) of the perturbation system.

    F collects the continuity mismatch of the extension; G collects the
    momentum mismatch of both the extension and the profile bent along the
    boundary graph.  Every derivative entering here is analytic or spectral,
    see ExtensionField.
    """
    grid = ext.grid
    d = grid.dim
    exp_t = (np.newaxis,) + (slice(None),) * (d - 1)
    gM = [g[exp_t] for g in grid.dM_t]
    lapM = grid.lap_M_b
    gM2 = grid.one_plus_gM2_b - 1.0

    U = ext.U
    # b . U with b = (1, -grad M)
    b_dot_U = U[0].copy()
    for k in range(d - 1):
        b_dot_U -= gM[k] * U[k + 1]

    F = -prof.drho * b_dot_U - prof.rho * ext.div_U

    # advection of U by (utilde + U) and of utilde by U
    w = U.copy()
    w[0] = w[0] + prof.u1
    G = np.empty_like(U)
    for c in range(d):
        adv_U = np.zeros_like(U[0])
        for k in range(d):
            adv_U += w[k] * ext.jac[c, k]
        G[c] = -prof.rho * adv_U
    G[0] -= prof.rho * prof.du1 * b_dot_U
    G += ext.L_U

    dp = params.dpressure(prof.rho)
    bracket0 = params.mu1 * (prof.d2u1 * gM2 - prof.du1 * lapM)
    G[0] += bracket0
    for k in range(d - 1):
        G[k + 1] += dp * prof.drho * gM[k]
        G[k + 1] -= (params.mu1 + params.mu2) * prof.d2u1 * gM[k]
    return F, G


def wall_clean_perturbation(grid: MappedGrid, amplitude: float = 1e-3,
                            seed: int = 0, n_modes: int = 3,
                            include_phi: bool = True) -> PerturbationState:
    """Smooth random perturbation with vanishing wall jets up to third order.

    The normal envelope y1^4 exp(-y1) keeps the value and first three normal
    derivatives zero at the wall, so adding this field to order-1 compatible
    data preserves compatibility; a cutoff fades it out before the far field.
    """
    rng = np.random.default_rng(seed)
    d = grid.dim
    y = grid.y1
    env = y**4 * np.exp(-y)
    peak = float(np.max(env))
    fade = max(grid.L / 4.0, 2.0)
    env = (env / peak) * cutoff((y - (grid.L - 2.0 * fade)) / fade)
    env = env.reshape((-1,) + (1,) * (d - 1))

    def pattern():
        out = np.zeros(grid.field_shape[1:])
        for ax in range(d - 1):
            L = grid.shape.tangential_extent[ax]
            s = grid.tangential[ax]
            shape_ax = [1] * (d - 1)
            shape_ax[ax] = -1
            for m in range(1, n_modes + 1):
                a_c, a_s = rng.normal(size=2)
                wave = a_c * np.cos(2 * np.pi * m * s / L) + a_s * np.sin(
                    2 * np.pi * m * s / L)
                out = out + wave.reshape(shape_ax)
        scale = float(np.max(np.abs(out)))
        return out / (scale if scale > 0 else 1.0)

    phi = amplitude * env * pattern()
    psi = np.stack([amplitude * env * pattern() for _ in range(d)])
    if not include_phi:
        phi = np.zeros(grid.field_shape)
    return PerturbationState(phi=np.asarray(phi), psi=psi, t=0.0, grid=grid)


# ---------------------------------------------------------------------------
# Compatible initial data
# ---------------------------------------------------------------------------

def boundary_visc_matrix(params: PhysicalParams, grid: MappedGrid):
    """Wall matrix mu1(1+|gM|^2) I + (mu1+mu2) b b^T acting on normal jets.

    Positive definite for mu1 > 0, with eigenvalues mu1|b|^2 and mu|b|^2.
    Shape (*nt, d, d).
    """
    d = grid.dim
    nt = grid.field_shape[1:]
    b = np.empty(nt + (d,))
    b[..., 0] = 1.0
    for k in range(d - 1):
        b[..., k + 1] = -grid.dM_t[k]
    b2 = np.sum(b**2, axis=-1)
    eye = np.eye(d).reshape((1,) * (d - 1) + (d, d))
    A = params.mu1 * b2[..., None, None] * eye
    A += (params.mu1 + params.mu2) * b[..., :, None] * b[..., None, :]
    if np.any(np.abs(np.linalg.det(A)) < 1e-300):
        raise SingularA("wall viscous matrix is singular")
    return A


def _tangential_grad_of(v, grid):
    """Spectral tangential derivatives of a (d, *nt) wall field; list over axes."""
    exts = grid.shape.tangential_extent
    return [np.stack([_spectral_d1(v[c], exts[k], axis=k) for c in range(v.shape[0])])
            for k in range(grid.dim - 1)]


def compatible_initial_data(prof: GridProfile, shape: BoundaryShape,
                            params: PhysicalParams, G_boundary, grid: MappedGrid,
                            order: int = 1, u_b: BoundaryVelocity = None,
                            ext: ExtensionField = None,
                            support: float = 4.0) -> PerturbationState:
    """Initial perturbation (0, psi0) matching the wall compatibility jets.

    The normal jet of psi0 at the wall is fixed so the momentum residual
    vanishes there: value and first derivative zero, second derivative
    -A^{-1} G where A is the wall viscous matrix; the third derivative is
    zero.  With order=2 the fourth derivative is assembled from the
    time-differentiated residual as well (requires u_b and ext).  The jets
    extend into the domain as the minimal polynomial under a cutoff spread
    over `support` length units (a wide cutoff keeps its own curvature from
    dominating wall stencils at coarse resolution).
    """
    d = grid.dim
    if order not in (1, 2):
        raise ValidationError(f"compatibility order must be 1 or 2, got {order}")
    if order == 2:
        if isinstance(G_boundary, np.ndarray):
            raise ValidationError("order 2 needs (G0, dG0, d2G0) wall derivatives")
        G0, dG0, d2G0 = [np.asarray(a, dtype=float) for a in G_boundary]
        if u_b is None or ext is None:
            raise ValidationError("order 2 needs the wall velocity and extension")
    else:
        G0 = np.asarray(G_boundary, dtype=float)

    nt = grid.field_shape[1:]
    if G0.shape != (d,) + nt:
        raise GridMismatch(f"wall source has shape {G0.shape}, expected {(d,) + nt}")
    if support <= 0:
        raise ValidationError(f"support must be positive, got {support}")

    A = boundary_visc_matrix(params, grid)
    # move component axis last for batched solves
    G0_last = np.moveaxis(G0, 0, -1)
    c2 = -np.moveaxis(np.linalg.solve(A, G0_last[..., None])[..., 0], -1, 0)

    y1 = grid.y1.reshape((-1,) + (1,) * (d - 1))
    chi = cutoff(grid.y1 / support).reshape(y1.shape)
    psi0 = c2[:, np.newaxis] * (y1**2 / 2.0) * chi

    if order == 2:
        c4 = _fourth_jet(prof, params, grid, c2, G0, dG0, d2G0, u_b, ext)
        psi0 = psi0 + c4[:, np.newaxis] * (y1**4 / 24.0) * chi

    phi0 = np.zeros(grid.field_shape)
    return PerturbationState(phi=phi0, psi=psi0, t=0.0, grid=grid)


def _wall_K(params, grid, v):
    """First-order wall remainder of the viscous operator on a wall-vanishing field.

    v is the normal-derivative trace (d, *nt); returns K(v) with the same shape.
    """
    d = grid.dim
    gM = grid.dM_t
    lapM = sum(grid.d2M_t[i][i] for i in range(d - 1))
    dv = _tangential_grad_of(v, grid)
    out = params.mu1 * (-lapM[np.newaxis] * v)
    for k in range(d - 1):
        out -= params.mu1 * 2.0 * gM[k][np.newaxis] * dv[k]
    b_dot_v = v[0].copy()
    tang_div = np.zeros_like(v[0])
    for k in range(d - 1):
        b_dot_v -= gM[k] * v[k + 1]
        tang_div += dv[k][k + 1]
    bvec = np.empty_like(v)
    bvec[0] = 1.0
    for k in range(d - 1):
        bvec[k + 1] = -gM[k]
    grad_bv = _tangential_grad_of(b_dot_v[np.newaxis], grid)
    extra = np.zeros_like(v)
    extra += tang_div[np.newaxis] * bvec
    for k in range(d - 1):
        extra[k + 1] += grad_bv[k][0]
    return out + (params.mu1 + params.mu2) * extra


def _wall_T(params, grid, w):
    """Pure tangential second-order wall part of the viscous operator on trace w."""
    d = grid.dim
    exts = grid.shape.tangential_extent
    out = np.zeros_like(w)
    for k in range(d - 1):
        out += params.mu1 * np.stack(
            [_spectral_d1(_spectral_d1(w[c], exts[k], k), exts[k], k)
             for c in range(d)]
        )
    tang_div = np.zeros_like(w[0])
    dw = _tangential_grad_of(w, grid)
    for k in range(d - 1):
        tang_div += dw[k][k + 1]
    grad_td = [_spectral_d1(tang_div, exts[k], k) for k in range(d - 1)]
    for k in range(d - 1):
        out[k + 1] += (params.mu1 + params.mu2) * grad_td[k]
    return out


def _fourth_jet(prof, params, grid, c2, G0, dG0, d2G0, u_b, ext):
    """Fourth normal derivative of psi0 at the wall (order-2 compatibility)."""
    d = grid.dim
    gM = grid.dM_t
    rho_b = float(prof.rho.ravel()[0])
    drho_b = float(prof.drho.ravel()[0])
    du1_b = float(prof.du1.ravel()[0])

    ub_dot_b = u_b.values[0].copy()
    for k in range(d - 1):
        ub_dot_b -= gM[k] * u_b.values[k + 1]

    v = -ub_dot_b[np.newaxis] * c2 + (_wall_K(params, grid, c2) + dG0) / rho_b

    # advection of the wall jet and of the background by the jet
    dc2 = _tangential_grad_of(c2, grid)
    W = np.zeros_like(c2)
    for k in range(d - 1):
        W -= u_b.values[k + 1][np.newaxis] * dc2[k]
    dev = ext.deviation
    b_dot_dev = dev[0].copy()
    for k in range(d - 1):
        b_dot_dev -= gM[k] * dev[k + 1]
    W -= (2.0 * drho_b / rho_b) * b_dot_dev[np.newaxis] * c2
    W -= (2.0 * drho_b / rho_b) * v
    W += _wall_T(params, grid, c2) / rho_b
    # (c2 . grad)(utilde + U) at the wall
    adv = np.zeros_like(c2)
    b_dot_c2 = c2[0].copy()
    for k in range(d - 1):
        b_dot_c2 -= gM[k] * c2[k + 1]
    adv[0] += du1_b * b_dot_c2
    for c in range(d):
        for k in range(d):
            adv[c] += c2[k] * ext.jac[c, k][0]
    W += -adv + d2G0 / rho_b

    A = boundary_visc_matrix(params, grid)
    bb = np.empty(grid.field_shape[1:] + (d,))
    bb[..., 0] = 1.0
    for k in range(d - 1):
        bb[..., k + 1] = -gM[k]
    Bmat = bb[..., :, None] * bb[..., None, :]

    dp_b = params.dpressure(rho_b)
    rhs = rho_b * ub_dot_b[np.newaxis] * v
    rhs -= _wall_K(params, grid, v)
    c2_last = np.moveaxis(c2, 0, -1)
    rhs -= dp_b * rho_b * np.moveaxis((Bmat @ c2_last[..., None])[..., 0], -1, 0)
    W_last = np.moveaxis(W, 0, -1)
    rhs -= np.moveaxis((A @ W_last[..., None])[..., 0], -1, 0)

    rhs_last = np.moveaxis(rhs, 0, -1)
    c4 = rho_b * np.linalg.solve(A, rhs_last[..., None])[..., 0]
    return np.moveaxis(c4, -1, 0)
