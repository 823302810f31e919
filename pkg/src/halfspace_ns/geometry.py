"""Boundary graph, flattening map, and the induced grid.

The flow domain is { x1 > M(x') } with M given over a periodic tangential
cell.  The change of variables y1 = x1 - M(x') sends it to the half-space
y1 > 0, where the boundary is the grid plane y1 = 0.  The Jacobian of the map
is unit-determinant, so cell volumes agree in both frames.
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import OutsideDomain, ResolutionTooCoarse, ValidationError
from .params import PhysicalParams


@dataclass(frozen=True)
class BoundaryShape:
    """Boundary graph M over the tangential cell, with analytic derivatives.

    Callables accept dim-1 coordinate arrays and broadcast.  grad_M returns a
    list of first derivatives, hess_M a nested list of second derivatives.
    """

    dim: int
    M: Callable
    grad_M: Callable
    hess_M: Callable
    tangential_extent: tuple

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValidationError(f"dimension must be 2 or 3, got {self.dim}")
        if len(self.tangential_extent) != self.dim - 1:
            raise ValidationError(
                f"extent needs {self.dim - 1} cell lengths, got {len(self.tangential_extent)}"
            )


def _periodized_bump(amplitude, width, cell, images=3):
    """1-D periodized Gaussian bump centered in the cell; returns (f, f', f'')."""
    centers = [cell / 2 + k * cell for k in range(-images, images + 1)]

    def value(s):
        s = np.asarray(s, dtype=float)
        return amplitude * sum(np.exp(-(((s - c) / width) ** 2)) for c in centers)

    def d1(s):
        s = np.asarray(s, dtype=float)
        return amplitude * sum(
            np.exp(-(((s - c) / width) ** 2)) * (-2 * (s - c) / width**2) for c in centers
        )

    def d2(s):
        s = np.asarray(s, dtype=float)
        return amplitude * sum(
            np.exp(-(((s - c) / width) ** 2))
            * (4 * (s - c) ** 2 / width**4 - 2 / width**2)
            for c in centers
        )

    return value, d1, d2


def flat_shape(dim=2, extent=(8.0,) * 2):
    """Unperturbed half-space, M identically zero."""
    extent = tuple(extent[: dim - 1])

    def M(*xp):
        return np.zeros(np.broadcast(*xp).shape)

    def grad_M(*xp):
        return [np.zeros(np.broadcast(*xp).shape) for _ in range(dim - 1)]

    def hess_M(*xp):
        z = np.zeros(np.broadcast(*xp).shape)
        return [[z.copy() for _ in range(dim - 1)] for _ in range(dim - 1)]

    return BoundaryShape(dim=dim, M=M, grad_M=grad_M, hess_M=hess_M,
                         tangential_extent=extent)


def gaussian_bump_shape(dim=2, amplitude=0.3, width=1.0, extent=(8.0,) * 2,
                        images=3):
    """Localized bump, periodized by image sums so cell faces match exactly.

    In 3-D the bump is the product of two periodized 1-D bumps (the amplitude
    applies once).
    """
    extent = tuple(extent[: dim - 1])
    if dim == 2:
        f, f1, f2 = _periodized_bump(amplitude, width, extent[0], images)

        def M(s):
            return f(s)

        def grad_M(s):
            return [f1(s)]

        def hess_M(s):
            return [[f2(s)]]
    else:
        g, g1, g2 = _periodized_bump(1.0, width, extent[0], images)
        p, p1, p2 = _periodized_bump(1.0, width, extent[1], images)

        def M(s2, s3):
            return amplitude * g(s2) * p(s3)

        def grad_M(s2, s3):
            return [amplitude * g1(s2) * p(s3), amplitude * g(s2) * p1(s3)]

        def hess_M(s2, s3):
            return [
                [amplitude * g2(s2) * p(s3), amplitude * g1(s2) * p1(s3)],
                [amplitude * g1(s2) * p1(s3), amplitude * g(s2) * p2(s3)],
            ]

    return BoundaryShape(dim=dim, M=M, grad_M=grad_M, hess_M=hess_M,
                         tangential_extent=extent)


def tabulated_shape(samples, extent):
    """Boundary graph from uniform periodic samples, differentiated spectrally.

    2-D: samples is a 1-D array over the cell [0, extent[0]).  3-D: a 2-D
    array.  Values and derivatives at arbitrary points come from the trig
    interpolant, so the derivative consistency check holds to round-off.
    """
    samples = np.asarray(samples, dtype=float)
    dim = samples.ndim + 1
    extent = tuple(extent[: dim - 1])

    if dim == 2:
        n = samples.size
        L = extent[0]
        coef = np.fft.rfft(samples) / n
        freqs = 2j * np.pi * np.arange(coef.size) / L

        # rfft convention: double every bin except DC (and Nyquist for even n)
        scale = np.full(coef.size, 2.0)
        scale[0] = 1.0
        if n % 2 == 0:
            scale[-1] = 1.0

        def _eval(s, order):
            s = np.asarray(s, dtype=float)
            phase = np.exp(np.multiply.outer(s, freqs))
            return np.real(phase @ (coef * freqs**order * scale))

        def M(s):
            return _eval(s, 0)

        def grad_M(s):
            return [_eval(s, 1)]

        def hess_M(s):
            return [[_eval(s, 2)]]
    else:
        n2, n3 = samples.shape
        L2, L3 = extent
        coef = np.fft.fft2(samples) / (n2 * n3)
        k2 = 2j * np.pi * np.fft.fftfreq(n2, d=1.0 / n2) / L2
        k3 = 2j * np.pi * np.fft.fftfreq(n3, d=1.0 / n3) / L3

        def _eval(s2, s3, o2, o3):
            s2 = np.asarray(s2, dtype=float)
            s3 = np.asarray(s3, dtype=float)
            e2 = np.exp(np.multiply.outer(s2, k2))
            e3 = np.exp(np.multiply.outer(s3, k3))
            w = coef * (k2[:, None] ** o2) * (k3[None, :] ** o3)
            return np.real(np.einsum("...i,ij,...j->...", e2, w, e3))

        def M(s2, s3):
            return _eval(s2, s3, 0, 0)

        def grad_M(s2, s3):
            return [_eval(s2, s3, 1, 0), _eval(s2, s3, 0, 1)]

        def hess_M(s2, s3):
            return [
                [_eval(s2, s3, 2, 0), _eval(s2, s3, 1, 1)],
                [_eval(s2, s3, 1, 1), _eval(s2, s3, 0, 2)],
            ]

    return BoundaryShape(dim=dim, M=M, grad_M=grad_M, hess_M=hess_M,
                         tangential_extent=extent)


def check_shape_consistency(shape: BoundaryShape, n_probe=64, fd_tol=1e-6,
                            periodic_tol=1e-12):
    """Verify grad_M against finite differences and periodicity at cell faces."""
    axes = [np.linspace(0.0, ext, n_probe, endpoint=False)
            for ext in shape.tangential_extent]
    grids = np.meshgrid(*axes, indexing="ij") if len(axes) > 1 else [axes[0]]
    eps = 1e-6
    g = shape.grad_M(*grids)
    for k in range(shape.dim - 1):
        shifted_p = [gr + (eps if j == k else 0.0) for j, gr in enumerate(grids)]
        shifted_m = [gr - (eps if j == k else 0.0) for j, gr in enumerate(grids)]
        fd = (shape.M(*shifted_p) - shape.M(*shifted_m)) / (2 * eps)
        err = np.max(np.abs(fd - g[k]))
        if err > fd_tol:
            raise ValidationError(
                f"grad_M inconsistent with finite differences along axis {k}: {err:.3e}"
            )
    # periodicity across identified faces
    for k, ext in enumerate(shape.tangential_extent):
        probe = [np.linspace(0.0, e, 17) for e in shape.tangential_extent]
        lo = list(probe)
        hi = list(probe)
        lo[k] = np.zeros(17)
        hi[k] = np.full(17, ext)
        vals = [shape.M, lambda *a: shape.grad_M(*a)[k]]
        for fn in vals:
            gap = np.max(np.abs(np.asarray(fn(*lo)) - np.asarray(fn(*hi))))
            if gap > periodic_tol:
                raise ValidationError(
                    f"shape not periodic across face {k}: mismatch {gap:.3e}"
                )
    return True


def normal_vector(shape: BoundaryShape, *xp):
    """Unit outer normal (-1, grad M) / sqrt(1 + |grad M|^2) at tangential points."""
    g = shape.grad_M(*xp)
    norm = np.sqrt(1.0 + sum(np.asarray(gk) ** 2 for gk in g))
    out = np.empty((shape.dim,) + np.asarray(norm).shape)
    out[0] = -1.0 / norm
    for k, gk in enumerate(g):
        out[k + 1] = np.asarray(gk) / norm
    return out


def map_forward(shape: BoundaryShape, y):
    """Flattened coordinates to Cartesian: x1 = y1 + M(y'), x' = y'."""
    y = np.asarray(y, dtype=float)
    if np.any(y[0] < -1e-12):
        raise OutsideDomain("map_forward requires y1 >= 0")
    x = y.copy()
    x[0] = y[0] + shape.M(*[y[k] for k in range(1, shape.dim)])
    return x


def map_inverse(shape: BoundaryShape, x):
    """Cartesian to flattened coordinates: y1 = x1 - M(x')."""
    x = np.asarray(x, dtype=float)
    y = x.copy()
    y[0] = x[0] - shape.M(*[x[k] for k in range(1, shape.dim)])
    if np.any(y[0] < -1e-12):
        raise OutsideDomain("point lies below the boundary graph")
    return y


def cancellation_coeffs(params: PhysicalParams, shape: BoundaryShape, *xp):
    """Viscosity/slope weights removing second normal derivatives.

    Returns (A1, A2[, A3], At1).  At1 = A1 - sum_j Aj * Mj is positive for all
    admissible viscosities and slopes.
    """
    g = [np.asarray(gk, dtype=float) for gk in shape.grad_M(*xp)]
    mu1, mu2, mu = params.mu1, params.mu2, params.mu
    gm2 = sum(gk**2 for gk in g)
    a1 = mu / (mu1 * (1.0 + gm2) + mu1 + mu2)
    ajs = [-gk * (mu - (mu1 + mu2) * a1) / (mu1 * (1.0 + gm2)) for gk in g]
    at1 = a1 - sum(aj * gk for aj, gk in zip(ajs, g))
    return (a1, *ajs, at1)


def normal_second_derivative_cancellation(params: PhysicalParams,
                                          shape: BoundaryShape, *xp):
    """Net coefficients of the second normal velocity derivatives.

    Assembles, per velocity component, the contribution of the scaled mass
    equation plus the slope-weighted momentum equations; the combined row is
    placed in the first row of a dim x dim matrix (rows for the remaining
    derivative pairings carry no contribution).  The whole matrix must vanish.
    """
    g = [np.asarray(gk, dtype=float) for gk in shape.grad_M(*xp)]
    coeffs = cancellation_coeffs(params, shape, *xp)
    a = np.array(coeffs[:-1], dtype=float)
    b = np.array([1.0, *(-gk for gk in g)], dtype=float)
    b2 = float(b @ b)
    mu1, mu2, mu = params.mu1, params.mu2, params.mu
    row = mu * b - mu1 * b2 * a - (mu1 + mu2) * a[0] * b
    out = np.zeros((shape.dim, shape.dim))
    out[0] = row
    return out


@dataclass(frozen=True)
class MappedGrid:
    """Uniform tensor grid on the flattened half-space strip [0, L] x cell.

    Normal nodes include both faces; tangential nodes exclude the periodic
    endpoint.  Tangential slope and curvature arrays are cached both in
    tangential shape (suffix _t) and broadcast against full fields (suffix _b).
    """

    dim: int
    shape: BoundaryShape
    y1: np.ndarray
    tangential: tuple
    h: tuple
    L: float
    M_t: np.ndarray = field(repr=False, default=None)
    dM_t: list = field(repr=False, default=None)
    d2M_t: list = field(repr=False, default=None)
    dM_b: list = field(repr=False, default=None)
    lap_M_b: np.ndarray = field(repr=False, default=None)
    one_plus_gM2_b: np.ndarray = field(repr=False, default=None)
    x1: np.ndarray = field(repr=False, default=None)
    volume_weights: np.ndarray = field(repr=False, default=None)

    @property
    def n(self):
        return (self.y1.size,) + tuple(t.size for t in self.tangential)

    @property
    def field_shape(self):
        return self.n

    def tangential_mesh(self):
        if self.dim == 2:
            return [self.tangential[0]]
        return list(np.meshgrid(*self.tangential, indexing="ij"))

    def cell_volume(self):
        return float(np.prod([hk for hk in self.h]))


def make_grid(shape: BoundaryShape, n: Sequence[int], L: float) -> MappedGrid:
    """Build the flattened grid with cached slope fields and quadrature weights."""
    n = tuple(int(v) for v in n)
    if len(n) != shape.dim:
        raise ValidationError(f"need {shape.dim} node counts, got {len(n)}")
    if any(v < 4 for v in n):
        raise ResolutionTooCoarse(f"every axis needs at least 4 nodes, got {n}")
    if L <= 0:
        raise ValidationError(f"domain length must be positive, got {L}")

    y1 = np.linspace(0.0, float(L), n[0])
    tang = tuple(
        np.arange(n[k + 1]) * (shape.tangential_extent[k] / n[k + 1])
        for k in range(shape.dim - 1)
    )
    h = (y1[1] - y1[0],) + tuple(
        shape.tangential_extent[k] / n[k + 1] for k in range(shape.dim - 1)
    )

    mesh = np.meshgrid(*tang, indexing="ij") if shape.dim == 3 else [tang[0]]
    M_t = np.asarray(shape.M(*mesh), dtype=float)
    dM_t = [np.asarray(gk, dtype=float) for gk in shape.grad_M(*mesh)]
    hess = shape.hess_M(*mesh)
    d2M_t = [[np.asarray(hess[i][j], dtype=float) for j in range(shape.dim - 1)]
             for i in range(shape.dim - 1)]

    expand = (np.newaxis,) + (slice(None),) * (shape.dim - 1)
    dM_b = [gk[expand] for gk in dM_t]
    lap_M_b = sum(d2M_t[i][i] for i in range(shape.dim - 1))[expand]
    one_plus_gM2_b = (1.0 + sum(gk**2 for gk in dM_t))[expand]
    x1 = y1.reshape((-1,) + (1,) * (shape.dim - 1)) + M_t[np.newaxis]

    w1 = np.full(n[0], h[0])
    w1[0] *= 0.5
    w1[-1] *= 0.5
    vol = w1.reshape((-1,) + (1,) * (shape.dim - 1)) * np.prod(h[1:])

    grid = MappedGrid(
        dim=shape.dim, shape=shape, y1=y1, tangential=tang, h=h, L=float(L),
        M_t=M_t, dM_t=dM_t, d2M_t=d2M_t, dM_b=dM_b, lap_M_b=lap_M_b,
        one_plus_gM2_b=one_plus_gM2_b, x1=x1, volume_weights=vol,
    )
    for arr in (grid.y1, grid.M_t, grid.x1, grid.volume_weights):
        arr.setflags(write=False)
    return grid
