"""Cartan (K A+ K) and Iwasawa (K A N) decompositions in SL(n, R).

K = SO(n), A = positive diagonal matrices of determinant one, N = unit
upper triangular matrices.  The exponential of an element of a is only ever
needed for diagonal arguments, so it is taken componentwise.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .exceptions import NumericError, PreconditionError
from .lie_structure import ChamberVector, RootDatum, build_root_datum, killing_norm

DET_TOL = 1e-9
COND_LIMIT = 1e14


def as_group_element(g) -> np.ndarray:
    """Validate and return g as a float array in SL(n, R).

    The determinant check is relative to the Hadamard bound prod_j |g e_j|,
    which is the natural scale of the rounding error in det(g).
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 2:
        raise PreconditionError(f"expected a square n x n matrix with n >= 2, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise PreconditionError("matrix entries must be finite")
    scale = max(1.0, float(np.prod(np.linalg.norm(g, axis=0))))
    det = np.linalg.det(g)
    if abs(det - 1.0) > DET_TOL * scale:
        raise PreconditionError(f"matrix is not unimodular: det = {det!r}")
    return g


def exp_diag(H) -> np.ndarray:
    """exp(H) for H in a (stacked coordinates allowed)."""
    h = H.coords if isinstance(H, ChamberVector) else np.asarray(H, dtype=float)
    out = np.zeros(h.shape + (h.shape[-1],))
    idx = np.arange(h.shape[-1])
    out[..., idx, idx] = np.exp(h)
    return out


def rotation2(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


@dataclass(frozen=True)
class PolarTriple:
    k1: np.ndarray
    H: ChamberVector
    k2: np.ndarray
    recon_error: float = 0.0

    def reconstruct(self) -> np.ndarray:
        return self.k1 @ exp_diag(self.H) @ self.k2

    def to_dict(self) -> dict:
        return {
            "k1": self.k1.tolist(),
            "H": self.H.coords.tolist(),
            "k2": self.k2.tolist(),
            "recon_error": float(self.recon_error),
        }


def cartan_decompose(g) -> PolarTriple:
    """g = k1 exp(H) k2 with k1, k2 in SO(n) and H in the closed chamber.

    H is the log of the singular values in descending order.  When the SVD
    factors have determinant -1 (they always do so together, since det g > 0)
    the last column of k1 and last row of k2 are negated; the diagonal
    factor is unchanged by this.
    """
    g = as_group_element(g)
    try:
        u, s, vt = np.linalg.svd(g)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed: {exc}") from exc
    if np.any(s <= 0) or not np.all(np.isfinite(s)):
        raise NumericError("singular values are not strictly positive")
    if np.linalg.det(u) < 0:
        u[:, -1] *= -1
        vt[-1, :] *= -1
    h = np.log(s)
    h -= h.mean()  # remove the O(eps) trace drift from rounding in det g
    H = ChamberVector(h, chamber_flag=True)
    recon = u @ np.diag(np.exp(h)) @ vt
    err = float(np.linalg.norm(recon - g))
    return PolarTriple(u, H, vt, err)


def length(g, datum: RootDatum | None = None) -> float:
    """L(g) = |H| for g = k1 exp(H) k2."""
    triple = cartan_decompose(g)
    if datum is None:
        datum = build_root_datum(triple.H.coords.size)
    return float(killing_norm(datum, triple.H))


def _qr_positive(g: np.ndarray):
    try:
        q, r = np.linalg.qr(g)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"QR failed: {exc}") from exc
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    if np.any(diag == 0) or not np.all(np.isfinite(r)):
        raise NumericError("matrix is singular")
    sign = np.where(diag < 0, -1.0, 1.0)
    q = q * sign[..., None, :]
    r = r * sign[..., :, None]
    return q, r


def iwasawa(g):
    """g = k exp(H_iw) n_part with k in SO(n), n_part unit upper triangular.

    Computed by orthonormalizing the columns of g (QR with positive diagonal).
    Returns (k, H_iw, n_part) where H_iw is a ChamberVector without the
    chamber flag.
    """
    g = as_group_element(g)
    if np.linalg.cond(g) > COND_LIMIT:
        raise NumericError("matrix is ill-conditioned beyond tolerance")
    k, r = _qr_positive(g)
    d = np.diag(r)
    n_part = r / d[:, None]
    h = np.log(d)
    h -= h.mean()
    return k, ChamberVector(h), n_part


def iwasawa_projection(g) -> np.ndarray:
    """Iwasawa A-coordinates H_iw(g) for a stack of matrices of shape (..., n, n).

    No unimodularity check; callers pass products of validated elements.
    The last coordinate is fixed by det = 1 instead of read from R, whose
    last diagonal entry carries the largest rounding error.
    """
    _, r = _qr_positive(np.asarray(g, dtype=float))
    h = np.log(np.diagonal(r, axis1=-2, axis2=-1))
    h[..., -1] = -h[..., :-1].sum(axis=-1)
    return h


def parse_matrix(text: str) -> np.ndarray:
    """Parse a row-major JSON array into a validated group element."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"matrix is not valid JSON: {exc}") from exc
    try:
        g = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise PreconditionError(f"matrix must be a rectangular numeric array: {exc}") from exc
    return as_group_element(g)


def random_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-random element of SO(n) (QR of a Gaussian matrix, sign-fixed)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def random_group_element(rng: np.random.Generator, n: int, max_length: float = 5.0,
                         datum: RootDatum | None = None) -> np.ndarray:
    """k1 exp(H) k2 with random rotations and a random chamber H of length <= max_length."""
    if datum is None:
        datum = build_root_datum(n)
    h = np.sort(rng.standard_normal(n))[::-1]
    h -= h.mean()
    size = float(killing_norm(datum, h))
    if size > 0:
        h *= rng.uniform(0, max_length) / size
    return random_rotation(rng, n) @ np.diag(np.exp(h)) @ random_rotation(rng, n)
