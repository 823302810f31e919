"""Second-order finite-difference stencils on the flattened grid.

The flattening map x1 = y1 + M(y') turns Cartesian derivatives into
combinations of grid derivatives weighted by the tangential slopes of M:

    (grad f)_1 = d1 f,   (grad f)_k = dk f - Mk * d1 f   (k tangential).

All public operators are second-order accurate pointwise at every node,
including the two normal faces.  Second normal derivatives are discretized
directly (never as a composition of first-derivative stencils, which would
drop to first order in the face layers); mixed derivatives compose a
tangential stencil with a normal one, which is safe because the tangential
direction is periodic.

Scalar fields have shape (n1, *nt); vector fields carry a leading component
axis of length d = grid.dim.
"""

import numpy as np

from .errors import ResolutionTooCoarse


def _sl(ndim, axis, s):
    idx = [slice(None)] * ndim
    idx[axis] = s
    return tuple(idx)


def diff1_bounded(f, h, axis=0):
    """First derivative, centered inside, 3-point one-sided at the faces."""
    n = f.shape[axis]
    if n < 3:
        raise ResolutionTooCoarse(f"need at least 3 nodes along axis {axis}, got {n}")
    nd = f.ndim
    out = np.empty_like(f)
    out[_sl(nd, axis, slice(1, -1))] = (
        f[_sl(nd, axis, slice(2, None))] - f[_sl(nd, axis, slice(0, -2))]
    ) / (2 * h)
    out[_sl(nd, axis, 0)] = (
        -3 * f[_sl(nd, axis, 0)] + 4 * f[_sl(nd, axis, 1)] - f[_sl(nd, axis, 2)]
    ) / (2 * h)
    out[_sl(nd, axis, -1)] = (
        3 * f[_sl(nd, axis, -1)] - 4 * f[_sl(nd, axis, -2)] + f[_sl(nd, axis, -3)]
    ) / (2 * h)
    return out


def diff2_bounded(f, h, axis=0):
    """Second derivative, centered inside, 4-point one-sided at the faces."""
    n = f.shape[axis]
    if n < 4:
        raise ResolutionTooCoarse(f"need at least 4 nodes along axis {axis}, got {n}")
    nd = f.ndim
    out = np.empty_like(f)
    out[_sl(nd, axis, slice(1, -1))] = (
        f[_sl(nd, axis, slice(2, None))]
        - 2 * f[_sl(nd, axis, slice(1, -1))]
        + f[_sl(nd, axis, slice(0, -2))]
    ) / h**2
    out[_sl(nd, axis, 0)] = (
        2 * f[_sl(nd, axis, 0)]
        - 5 * f[_sl(nd, axis, 1)]
        + 4 * f[_sl(nd, axis, 2)]
        - f[_sl(nd, axis, 3)]
    ) / h**2
    out[_sl(nd, axis, -1)] = (
        2 * f[_sl(nd, axis, -1)]
        - 5 * f[_sl(nd, axis, -2)]
        + 4 * f[_sl(nd, axis, -3)]
        - f[_sl(nd, axis, -4)]
    ) / h**2
    return out


def diff1_periodic(f, h, axis):
    return (np.roll(f, -1, axis) - np.roll(f, 1, axis)) / (2 * h)


def diff2_periodic(f, h, axis):
    return (np.roll(f, -1, axis) - 2 * f + np.roll(f, 1, axis)) / h**2


def upwind1_bounded(f, a, h, axis=0, order=2):
    """Upwind-biased first derivative along a bounded axis.

    `a` is the local advection coefficient; the stencil leans upstream.  Where
    a biased stencil would leave the grid, the centered/one-sided fallback of
    diff1_bounded is used, which keeps every node second-order (the order-1
    variant uses plain two-point upwinding instead).
    """
    nd = f.ndim
    n = f.shape[axis]
    dc = diff1_bounded(f, h, axis)
    if order == 1:
        dm = dc.copy()
        dm[_sl(nd, axis, slice(1, None))] = (
            f[_sl(nd, axis, slice(1, None))] - f[_sl(nd, axis, slice(0, -1))]
        ) / h
        dp = dc.copy()
        dp[_sl(nd, axis, slice(0, -1))] = (
            f[_sl(nd, axis, slice(1, None))] - f[_sl(nd, axis, slice(0, -1))]
        ) / h
    else:
        dm = dc.copy()
        if n >= 3:
            dm[_sl(nd, axis, slice(2, None))] = (
                3 * f[_sl(nd, axis, slice(2, None))]
                - 4 * f[_sl(nd, axis, slice(1, -1))]
                + f[_sl(nd, axis, slice(0, -2))]
            ) / (2 * h)
        dp = dc.copy()
        if n >= 3:
            dp[_sl(nd, axis, slice(0, -2))] = (
                -3 * f[_sl(nd, axis, slice(0, -2))]
                + 4 * f[_sl(nd, axis, slice(1, -1))]
                - f[_sl(nd, axis, slice(2, None))]
            ) / (2 * h)
    return np.where(a > 0, dm, dp)


def upwind1_periodic(f, a, h, axis, order=2):
    if order == 1:
        dm = (f - np.roll(f, 1, axis)) / h
        dp = (np.roll(f, -1, axis) - f) / h
    else:
        dm = (3 * f - 4 * np.roll(f, 1, axis) + np.roll(f, 2, axis)) / (2 * h)
        dp = (-3 * f + 4 * np.roll(f, -1, axis) - np.roll(f, -2, axis)) / (2 * h)
    return np.where(a > 0, dm, dp)


# ---------------------------------------------------------------------------
# Flattened-frame (hat) operators over a MappedGrid
# ---------------------------------------------------------------------------

def hat_gradient(f, grid):
    """Cartesian gradient of a scalar composed with the flattening map."""
    d1 = diff1_bounded(f, grid.h[0], 0)
    out = np.empty((grid.dim,) + f.shape, dtype=f.dtype)
    out[0] = d1
    for k in range(1, grid.dim):
        out[k] = diff1_periodic(f, grid.h[k], k) - grid.dM_b[k - 1] * d1
    return out


def hat_divergence(v, grid):
    """Cartesian divergence of a vector field on the flattened grid."""
    out = diff1_bounded(v[0], grid.h[0], 0)
    for k in range(1, grid.dim):
        out = out + diff1_periodic(v[k], grid.h[k], k) - grid.dM_b[k - 1] * diff1_bounded(
            v[k], grid.h[0], 0
        )
    return out


def _hat_laplacian_scalar(f, grid):
    # sum_k Dk Dk f expanded: (1+|gM|^2) d11 + sum dkk - 2 sum Mk d1k - (sum Mkk) d1
    out = grid.one_plus_gM2_b * diff2_bounded(f, grid.h[0], 0)
    d1 = diff1_bounded(f, grid.h[0], 0)
    out = out - grid.lap_M_b * d1
    for k in range(1, grid.dim):
        out = out + diff2_periodic(f, grid.h[k], k)
        out = out - 2.0 * grid.dM_b[k - 1] * diff1_periodic(d1, grid.h[k], k)
    return out


def hat_laplacian(v, grid):
    """Componentwise Cartesian Laplacian of a vector field."""
    out = np.empty_like(v)
    for c in range(v.shape[0]):
        out[c] = _hat_laplacian_scalar(v[c], grid)
    return out


def hat_grad_div(v, grid):
    """Cartesian grad(div v) on the flattened grid.

    The normal derivative of the divergence is expanded term by term so no
    normal stencil is applied twice.
    """
    h1 = grid.h[0]
    # d/dy1 of (div v), expanded
    s1 = diff2_bounded(v[0], h1, 0)
    for k in range(1, grid.dim):
        s1 = s1 + diff1_bounded(diff1_periodic(v[k], grid.h[k], k), h1, 0)
        s1 = s1 - grid.dM_b[k - 1] * diff2_bounded(v[k], h1, 0)
    s = hat_divergence(v, grid)
    out = np.empty_like(v)
    out[0] = s1
    for k in range(1, grid.dim):
        out[k] = diff1_periodic(s, grid.h[k], k) - grid.dM_b[k - 1] * s1
    return out


def viscous_operator(v, grid, mu1, mu2):
    """mu1 * laplacian + (mu1 + mu2) * grad(div), the momentum diffusion."""
    return mu1 * hat_laplacian(v, grid) + (mu1 + mu2) * hat_grad_div(v, grid)


def advective_coefficients(u, grid):
    """Per-axis advection speeds of u . grad in grid coordinates.

    Collecting the flattening terms, u . grad f = a1 * d1 f + sum ak * dk f
    with a1 = u1 - sum Mk uk and ak = uk.
    """
    a1 = u[0].copy()
    for k in range(1, grid.dim):
        a1 -= grid.dM_b[k - 1] * u[k]
    return a1


def advect_scalar(f, u, grid, order=2):
    """Upwind-biased discretization of u . grad f."""
    a1 = advective_coefficients(u, grid)
    out = a1 * upwind1_bounded(f, a1, grid.h[0], 0, order)
    for k in range(1, grid.dim):
        out = out + u[k] * upwind1_periodic(f, u[k], grid.h[k], k, order)
    return out


def advect_vector(v, u, grid, order=2):
    a1 = advective_coefficients(u, grid)
    out = np.empty_like(v)
    for c in range(v.shape[0]):
        acc = a1 * upwind1_bounded(v[c], a1, grid.h[0], 0, order)
        for k in range(1, grid.dim):
            acc = acc + u[k] * upwind1_periodic(v[c], u[k], grid.h[k], k, order)
        out[c] = acc
    return out
