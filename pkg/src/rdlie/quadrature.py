"""Deterministic quadrature rules.

Probability grids realize the normalized Haar measure dk on K = SO(2),
SO(3) and the K-invariant probability measure on the boundary RP^1.
``graded_periodic_grid`` and ``graded_side`` build composite Gauss-Legendre
rules whose panels shrink geometrically toward given points; they integrate
functions with sharp peaks of any width above ``min_width`` and are used
wherever a cocycle concentrates (large |H|).  ``chamber_grid`` integrates
Lebesgue measure over the positive chamber truncated to a norm ball.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lie_structure import RootDatum, fundamental_coweights, killing_norm, norm_factor


@dataclass(frozen=True)
class QuadratureGrid:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str = "generic"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0):
            raise ValueError("quadrature weights must be positive")
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size

    def integrate(self, values) -> float:
        """Weighted sum in ascending node order (fixed order, bit-reproducible)."""
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def gauss_interval(points: int, a: float, b: float) -> QuadratureGrid:
    """Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2*points - 1."""
    if points < 1:
        raise ValueError("points must be >= 1")
    if not a < b:
        raise ValueError(f"invalid interval [{a}, {b}]")
    x, w = np.polynomial.legendre.leggauss(points)
    half = 0.5 * (b - a)
    return QuadratureGrid(0.5 * (a + b) + half * x, half * w, "interval")


def circle_probability_grid(N: int) -> QuadratureGrid:
    """Midpoint rule phi_j = 2 pi (j + 1/2) / N on SO(2), weights 1/N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    phi = 2 * np.pi * (np.arange(N) + 0.5) / N
    return QuadratureGrid(phi, np.full(N, 1.0 / N), "so2")


def boundary_probability_grid(N: int) -> QuadratureGrid:
    """Midpoint rule theta_j = pi (j + 1/2) / N on RP^1 = [0, pi), weights 1/N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    theta = np.pi * (np.arange(N) + 0.5) / N
    return QuadratureGrid(theta, np.full(N, 1.0 / N), "boundary")


def euler_zyz(alpha, beta, gamma) -> np.ndarray:
    """Rotation Rz(alpha) Ry(beta) Rz(gamma); broadcasts over the angles."""
    alpha, beta, gamma = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (alpha, beta, gamma)))
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    out = np.empty(alpha.shape + (3, 3))
    out[..., 0, 0] = ca * cb * cg - sa * sg
    out[..., 0, 1] = -ca * cb * sg - sa * cg
    out[..., 0, 2] = ca * sb
    out[..., 1, 0] = sa * cb * cg + ca * sg
    out[..., 1, 1] = -sa * cb * sg + ca * cg
    out[..., 1, 2] = sa * sb
    out[..., 2, 0] = -sb * cg
    out[..., 2, 1] = sb * sg
    out[..., 2, 2] = cb
    return out


def so3_probability_grid(N: int) -> QuadratureGrid:
    """Haar probability grid on SO(3) in ZYZ Euler angles.

    Midpoint rules with N points in alpha and gamma, an N-point Gauss rule in
    beta carrying the density sin(beta) / (8 pi^2).  Nodes are (alpha, beta,
    gamma) triples; ``euler_zyz`` turns them into matrices.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    ang = 2 * np.pi * (np.arange(N) + 0.5) / N
    bg = gauss_interval(N, 0.0, np.pi)
    A, B, G = np.meshgrid(ang, bg.nodes, ang, indexing="ij")
    w = np.einsum("i,j,k->ijk", np.full(N, 2 * np.pi / N), bg.weights * np.sin(bg.nodes),
                  np.full(N, 2 * np.pi / N))
    w = w / (8 * np.pi**2)
    w /= w.sum()
    nodes = np.stack([A.ravel(), B.ravel(), G.ravel()], axis=1)
    return QuadratureGrid(nodes, w.ravel(), "so3")


def graded_levels(length: float, min_width: float, ratio: float = 3.0) -> int:
    """Number of geometric panels needed to grade from ``length`` down to ``min_width``."""
    if min_width >= length / 2:
        return 2
    return max(2, int(math.ceil(math.log(length / min_width) / math.log(ratio))) + 1)


def graded_side(length, min_width, levels: int, m: int):
    """Composite Gauss rule on [0, length] with panels graded toward 0.

    Panel breakpoints are 0, w, w q, ..., length with w = ``min_width`` and a
    common ratio q fixed by ``levels``.  ``length`` and ``min_width`` may be
    arrays (one rule per entry, all with ``levels * m`` nodes).
    Returns (nodes, weights) with a trailing axis of size levels * m.
    """
    length = np.asarray(length, dtype=float)
    w = np.minimum(np.asarray(min_width, dtype=float), length / levels)
    k = np.arange(1, levels + 1)
    expo = (levels - k) / (levels - 1)
    inner = length[..., None] * (w / length)[..., None] ** expo
    br = np.concatenate([np.zeros(inner.shape[:-1] + (1,)), inner], axis=-1)
    x, gw = np.polynomial.legendre.leggauss(m)
    lo, hi = br[..., :-1, None], br[..., 1:, None]
    nodes = (0.5 * (lo + hi) + 0.5 * (hi - lo) * x).reshape(br.shape[:-1] + (-1,))
    weights = (0.5 * (hi - lo) * gw).reshape(br.shape[:-1] + (-1,))
    return nodes, weights


def graded_symmetric(half_length, min_width, levels: int, m: int):
    """Offsets in [-half_length, half_length] graded toward 0 from both sides."""
    x, w = graded_side(half_length, min_width, levels, m)
    return (np.concatenate([-x[..., ::-1], x], axis=-1),
            np.concatenate([w[..., ::-1], w], axis=-1))


def graded_periodic_grid(period: float, centers, min_width: float, m: int = 8,
                         ratio: float = 3.0, levels: int | None = None) -> QuadratureGrid:
    """Probability grid on [0, period) refined geometrically toward each center.

    The circle is cut at the midpoints between consecutive centers; each
    piece is covered by two graded rules meeting at its center.  Weights are
    divided by the period, so the grid integrates the uniform probability
    measure.  Nodes increase over one period starting at the left end of the
    first piece, without wrap-around: a node at c - x is never stored as
    c - x + period, which keeps full relative precision in x near a center.
    """
    c = np.sort(np.mod(np.atleast_1d(np.asarray(centers, dtype=float)), period))
    gaps = np.diff(np.concatenate([c, [c[0] + period]]))
    # center i owns [c_i - left_i, c_i + right_i]
    right = gaps / 2
    left = np.roll(gaps, 1) / 2
    if levels is None:
        levels = graded_levels(float(min(left.min(), right.min())), min_width, ratio)
    nodes, weights = [], []
    for ci, lh, rh in zip(c, left, right):
        xl, wl = graded_side(lh, min_width, levels, m)
        xr, wr = graded_side(rh, min_width, levels, m)
        nodes += [ci - xl[::-1], ci + xr]
        weights += [wl[::-1], wr]
    return QuadratureGrid(np.concatenate(nodes), np.concatenate(weights) / period, "graded")


def _simplex_rule(dim: int, N: int):
    """Collapsed-coordinate Gauss rule on the simplex {w >= 0, sum w = 1} of dimension dim.

    Returns barycentric points (P, dim + 1) and weights w.r.t. the Lebesgue
    measure dw_1 ... dw_dim.
    """
    if dim == 0:
        return np.ones((1, 1)), np.ones(1)
    g = gauss_interval(N, 0.0, 1.0)
    grids = np.meshgrid(*([g.nodes] * dim), indexing="ij")
    wts = np.meshgrid(*([g.weights] * dim), indexing="ij")
    tau = np.stack([x.ravel() for x in grids], axis=1)
    w = np.prod(np.stack([x.ravel() for x in wts], axis=1), axis=1)
    pts = np.zeros((tau.shape[0], dim + 1))
    rest = np.ones(tau.shape[0])
    for i in range(dim):
        pts[:, i] = rest * tau[:, i]
        w = w * rest if i > 0 else w
        rest = rest * (1 - tau[:, i])
    pts[:, dim] = rest
    return pts, w


def chamber_grid(datum: RootDatum, radius: float, N: int,
                 angular_points: int | None = None, inner_radius: float = 0.0) -> QuadratureGrid:
    """Lebesgue quadrature over {H in a+ : inner_radius <= |H| <= radius}.

    Works in simple-root coordinates s_i = alpha_i(H) >= 0, H = sum s_i w_i
    (w_i the fundamental coweights), written radially as s = r * omega with
    omega on the unit simplex.  Along each direction the radial Gauss rule
    stops exactly at the norm ball, so the truncation is exact.  Weights carry
    r^(dim a - 1) and the coordinate-change factor sqrt(det Gram(w_i)) under
    the datum's norm.  Nodes are diagonal coordinates, shape (P, n).
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if not 0 <= inner_radius < radius:
        raise ValueError("need 0 <= inner_radius < radius")
    if N < 2:
        raise ValueError("N must be >= 2")
    m = datum.cartan_dim
    cow = fundamental_coweights(datum)
    gram = norm_factor(datum) ** 2 * cow @ cow.T
    vol_factor = math.sqrt(np.linalg.det(gram))
    omega, w_omega = _simplex_rule(m - 1, angular_points or N)
    dirs = omega @ cow  # H at s = omega
    dir_norm = killing_norm(datum, dirs)
    rmin, rmax = inner_radius / dir_norm, radius / dir_norm
    x, gw = np.polynomial.legendre.leggauss(N)
    half = 0.5 * (rmax - rmin)[:, None]
    r = rmin[:, None] + half * (1 + x)
    wr = half * gw * r ** (m - 1)
    nodes = r[:, :, None] * dirs[:, None, :]
    weights = vol_factor * w_omega[:, None] * wr
    return QuadratureGrid(nodes.reshape(-1, datum.n), weights.ravel(), "chamber")
