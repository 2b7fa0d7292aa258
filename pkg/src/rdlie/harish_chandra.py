"""The Harish-Chandra function Xi(g) = <lambda(g) 1, 1>, by two routes.

* boundary route (n = 2): pair lambda(exp H) 1 with 1 on a boundary grid.
* Iwasawa route (n = 2, 3): Xi(g) = int_K exp(-rho(H_iw(g k))) dk.

For large |H| both integrands concentrate on sets of width ~exp(-alpha(H));
the default grids are graded toward those sets (see ``adapted_k_grid``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryFunction, adapted_boundary_grid, inner, quasi_regular_apply
from .exceptions import PreconditionError, UnsupportedRankError
from .lie_structure import (ChamberVector, RootDatum, build_root_datum, in_closed_chamber,
                            killing_norm, rho)
from .polar import as_group_element, cartan_decompose, exp_diag, iwasawa_projection, rotation2
from .quadrature import (QuadratureGrid, euler_zyz, graded_levels, graded_periodic_grid,
                         graded_side, graded_symmetric)

ROUTES = ("boundary", "iwasawa")
_CHUNK = 200_000


@dataclass(frozen=True)
class XiSample:
    H: ChamberVector
    xi_value: float
    route: str

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"route must be one of {ROUTES}")
        if not 0 < self.xi_value <= 1 + 1e-9:
            raise ValueError(f"Xi value out of range (0, 1]: {self.xi_value}")


def _as_chamber(H) -> ChamberVector:
    if isinstance(H, ChamberVector):
        return H
    return ChamberVector(np.asarray(H, dtype=float), chamber_flag=True)


def xi_boundary(H, grid: QuadratureGrid | None = None, points: int = 512) -> float:
    """Xi(exp H) = <lambda(exp H) 1, 1> for SL(2, R)."""
    H = _as_chamber(H)
    if H.coords.size != 2:
        raise UnsupportedRankError("the boundary route is implemented for n = 2 only")
    if not in_closed_chamber(H.coords):
        raise PreconditionError("H must lie in the closed chamber")
    g = exp_diag(H)
    if grid is None:
        grid = adapted_boundary_grid(g, points=points)
    one = BoundaryFunction.constant(grid)
    return inner(quasi_regular_apply(g, one), one)


def adapted_k_grid(H, m: int | None = None, ratio: float = 3.0) -> QuadratureGrid:
    """K-grid for k -> exp(-rho(H_iw(exp(H) k))), graded toward its peaks.

    n = 2: a probability grid on SO(2) (angles) graded toward the two angles
    where |exp(H) u_phi| is smallest.

    n = 3: Euler-angle (ZYZ) nodes.  The integrand only depends on k through
    u = k e1 and v = k e3 and is invariant under the diagonal sign group M
    on both sides; after integrating out gamma it is also invariant under
    diagonal reflections of v.  The rule therefore covers alpha in [0, pi/2],
    beta in [0, pi/2] and, for each (alpha, beta), a half circle in gamma
    centred on the minimizer of |exp(H) u|.  It integrates functions with
    these symmetries only.  Panels are graded to the root scales
    exp(-alpha(H)).
    """
    h = _as_chamber(H).coords
    n = h.size
    if n == 2:
        t = 0.5 * (h[0] - h[1])
        width = 0.1 * np.exp(-2 * t)
        return graded_periodic_grid(2 * np.pi, [np.pi / 2, 3 * np.pi / 2], width,
                                    m=m or 8, ratio=2.5)
    if n != 3:
        raise UnsupportedRankError("adapted K-grids exist for n = 2, 3")
    m = m or 6
    a = np.exp(h)
    half = np.pi / 2
    w12 = 0.1 * np.exp(-(h[0] - h[1]))
    w13 = 0.1 * np.exp(-(h[0] - h[2]))
    lv_a = graded_levels(half, w12, ratio)
    lv_b = graded_levels(half, w13, ratio)
    al, wa = graded_side(half, w12, lv_a, m)
    off, wb = graded_side(half, w13, lv_b, m)
    be = half - off
    A, B = np.meshgrid(al, be, indexing="ij")
    W2 = np.outer(wa, wb * np.sin(be))
    ca, sa, cb, sb = np.cos(A), np.sin(A), np.cos(B), np.sin(B)
    p = np.stack([ca * cb, sa * cb, -sb], -1) * a
    q = np.stack([-sa, ca, np.zeros_like(ca)], -1) * a
    Q = np.stack([np.stack([(p * p).sum(-1), (p * q).sum(-1)], -1),
                  np.stack([(p * q).sum(-1), (q * q).sum(-1)], -1)], -2)
    lam, vec = np.linalg.eigh(Q)
    gstar = np.arctan2(vec[..., 1, 0], vec[..., 0, 0])
    width = 0.1 * np.sqrt(np.maximum(lam[..., 0], 0) / lam[..., 1])
    lv_g = graded_levels(half, float(width.min()), ratio)
    goff, wg = graded_symmetric(np.full(width.shape, half), width, lv_g, m)
    G = gstar[..., None] + goff
    A3 = np.broadcast_to(A[..., None], G.shape)
    B3 = np.broadcast_to(B[..., None], G.shape)
    weights = W2[..., None] * wg
    weights = weights / weights.sum()
    nodes = np.stack([A3.ravel(), B3.ravel(), G.ravel()], axis=1)
    return QuadratureGrid(nodes, weights.ravel(), "so3-bi-M")


def _k_matrices(Kgrid: QuadratureGrid, n: int, sl: slice) -> np.ndarray:
    nodes = Kgrid.nodes[sl]
    if n == 2:
        return rotation2(nodes)
    return euler_zyz(nodes[:, 0], nodes[:, 1], nodes[:, 2])


def xi_iwasawa(g, Kgrid: QuadratureGrid | None = None, datum: RootDatum | None = None,
               m: int | None = None, ratio: float = 3.0) -> float:
    """Xi(g) = sum_K w exp(-rho(H_iw(g k))).

    With no grid, an adapted grid is built for the Cartan part exp(H) of
    g = k1 exp(H) k2 and translated by k2^{-1} (Haar invariance), so the
    summand is literally exp(-rho(H_iw(g k))) at k = k2^T k'.

    Angles are stored absolutely, so peaks narrower than about 1e-13 rad
    (largest root value alpha(H) beyond ~28) are not resolved; the boundary
    route has no such limit for n = 2.
    """
    g = as_group_element(g)
    n = g.shape[0]
    if n not in (2, 3):
        raise UnsupportedRankError("Xi is computed for SL(2, R) and SL(3, R)")
    if datum is None:
        datum = build_root_datum(n)
    left = np.eye(n)
    if Kgrid is None:
        triple = cartan_decompose(g)
        Kgrid = adapted_k_grid(triple.H, m=m, ratio=ratio)
        left = triple.k2.T
    gl = g @ left
    total = 0.0
    for start in range(0, len(Kgrid), _CHUNK):
        sl = slice(start, start + _CHUNK)
        hk = iwasawa_projection(gl @ _k_matrices(Kgrid, n, sl))
        total += float(np.dot(Kgrid.weights[sl], np.exp(-rho(datum, hk))))
    return total


def xi(H, route: str | None = None, datum: RootDatum | None = None, **kwargs) -> float:
    """Xi(exp H) using the boundary route for n = 2 and the Iwasawa route otherwise."""
    H = _as_chamber(H)
    n = H.coords.size
    route = route or ("boundary" if n == 2 else "iwasawa")
    if route == "boundary":
        return xi_boundary(H, **kwargs)
    return xi_iwasawa(exp_diag(H), datum=datum, **kwargs)


def envelope_ratio(datum: RootDatum, H, xi_value):
    """Xi(exp H) e^{rho(H)} (1 + |H|)^{-r}."""
    return np.asarray(xi_value) * np.exp(rho(datum, H)) * (1 + killing_norm(datum, H)) ** (
        -datum.indivisible_count)


def decay_envelope_fit(datum: RootDatum, samples) -> float:
    """C_est = max over samples of Xi(e^H) e^{rho(H)} (1 + |H|)^{-r}.

    The constant used in tail bounds is 2 * C_est.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("decay_envelope_fit needs at least one sample")
    H = np.array([s.H.coords for s in samples])
    vals = np.array([s.xi_value for s in samples])
    return float(np.max(envelope_ratio(datum, H, vals)))


def ray_direction(n: int) -> np.ndarray:
    """Unit-step chamber direction (1, 0, ..., 0, -1) used for Xi curves."""
    d = np.zeros(n)
    d[0], d[-1] = 1.0, -1.0
    return d


def xi_ray(datum: RootDatum, ts, route: str | None = None, **kwargs) -> list[XiSample]:
    """Xi along the ray H_t = t (1, 0, ..., 0, -1)."""
    out = []
    direction = ray_direction(datum.n)
    for t in np.asarray(ts, dtype=float):
        H = ChamberVector(t * direction, chamber_flag=True)
        r = route or ("boundary" if datum.n == 2 else "iwasawa")
        out.append(XiSample(H, xi(H, route=r, datum=datum, **kwargs), r))
    return out
