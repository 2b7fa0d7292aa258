"""Restricted root data of sl(n, R) and the scalar functions built from it.

Elements H of the Cartan subspace a (traceless real diagonal matrices) are
stored by their n diagonal coordinates (h_1, ..., h_n).  A root is stored as
a coefficient vector over the same coordinates, so alpha(H) is a dot
product.  Every function here accepts stacked coordinates of shape (..., n).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, InvalidRankError, PreconditionError

CHAMBER_TOL = 1e-12
NORMS = ("killing", "trace")


@dataclass(frozen=True)
class RootDatum:
    """Positive restricted roots of sl(n, R) with multiplicities."""

    rank_ambient: int
    cartan_dim: int
    positive_roots: np.ndarray = field(repr=False)
    multiplicities: np.ndarray = field(repr=False)
    indivisible_count: int
    norm: str = "killing"

    @property
    def n(self) -> int:
        return self.rank_ambient

    def to_dict(self) -> dict:
        return {
            "n": self.rank_ambient,
            "cartan_dim": self.cartan_dim,
            "roots": self.positive_roots.astype(int).tolist(),
            "multiplicities": self.multiplicities.astype(int).tolist(),
            "r": self.indivisible_count,
            "threshold": float(rd_threshold(self)),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class ChamberVector:
    """An element of a; ``chamber_flag`` asserts h_1 >= h_2 >= ... >= h_n."""

    coords: np.ndarray
    chamber_flag: bool = False

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 1 or coords.size < 2:
            raise PreconditionError("coords must be a vector of length n >= 2")
        if not np.all(np.isfinite(coords)):
            raise PreconditionError("coords must be finite")
        scale = max(1.0, float(np.abs(coords).max()))
        if abs(coords.sum()) > CHAMBER_TOL * scale:
            raise PreconditionError(f"coords must sum to zero, got {coords.sum():.3e}")
        if self.chamber_flag and not in_closed_chamber(coords):
            raise DomainError(f"{coords} is not in the closed positive chamber")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_t(cls, t: float, n: int = 2) -> "ChamberVector":
        """Point t * (1, 0, ..., 0, -1) on the chamber ray through the highest root."""
        coords = np.zeros(n)
        coords[0], coords[-1] = t, -t
        return cls(coords, chamber_flag=t >= 0)


def _coords(H) -> np.ndarray:
    if isinstance(H, ChamberVector):
        return H.coords
    return np.asarray(H, dtype=float)


def in_closed_chamber(H, tol: float = CHAMBER_TOL) -> np.ndarray:
    h = _coords(H)
    return np.all(np.diff(h, axis=-1) <= tol * np.maximum(1.0, np.abs(h).max(axis=-1, keepdims=True)), axis=-1)


def build_root_datum(n: int, norm: str = "killing") -> RootDatum:
    """A_{n-1} root datum {e_i - e_j : i < j}, all multiplicities 1."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidRankError(f"SL(n, R) needs integer n >= 2, got {n!r}")
    if norm not in NORMS:
        raise ValueError(f"norm must be one of {NORMS}, got {norm!r}")
    n = int(n)
    roots = []
    for i in range(n):
        for j in range(i + 1, n):
            alpha = np.zeros(n)
            alpha[i], alpha[j] = 1.0, -1.0
            roots.append(alpha)
    roots = np.array(roots)
    mult = np.ones(len(roots), dtype=int)
    datum = RootDatum(n, n - 1, roots, mult, 0, norm)
    object.__setattr__(datum, "indivisible_count", indivisible_count(datum))
    return datum


def indivisible_count(datum: RootDatum) -> int:
    """Number of positive roots alpha with alpha/2 not a positive root."""
    roots = datum.positive_roots
    count = 0
    for alpha in roots:
        if not np.any(np.all(np.isclose(roots, alpha / 2), axis=1)):
            count += 1
    return count


def rho_vector(datum: RootDatum) -> np.ndarray:
    """Coefficient vector of rho = (1/2) sum n_alpha alpha."""
    return 0.5 * (datum.multiplicities[:, None] * datum.positive_roots).sum(axis=0)


def rho(datum: RootDatum, H) -> np.ndarray | float:
    return _coords(H) @ rho_vector(datum)


def root_values(datum: RootDatum, H) -> np.ndarray:
    """alpha(H) for every positive root, shape (..., |Sigma+|)."""
    return _coords(H) @ datum.positive_roots.T


def jacobian(datum: RootDatum, H) -> np.ndarray | float:
    """Polar-coordinate Haar density J(H) = prod sinh(alpha(H))^{n_alpha}.

    Raises DomainError if H lies outside the closed chamber.
    """
    vals = root_values(datum, H)
    h = _coords(H)
    scale = np.maximum(1.0, np.abs(h).max(axis=-1, keepdims=True))
    if np.any(vals < -CHAMBER_TOL * scale):
        raise DomainError("jacobian is only defined on the closed positive chamber")
    vals = np.maximum(vals, 0.0)
    return np.prod(np.sinh(vals) ** datum.multiplicities, axis=-1)


def norm_factor(datum: RootDatum) -> float:
    """|H| = norm_factor * Euclidean norm of the diagonal coordinates."""
    return math.sqrt(2 * datum.n) if datum.norm == "killing" else 1.0


def killing_norm(datum: RootDatum, H) -> np.ndarray | float:
    """|H| = sqrt(-B(H, theta H)); Killing form B = 2n tr(XY) unless datum.norm == 'trace'."""
    return norm_factor(datum) * np.linalg.norm(_coords(H), axis=-1)


def rd_threshold(datum: RootDatum) -> float:
    """dim(a) + 2r: RD holds for every decay exponent strictly above this."""
    return float(datum.cartan_dim + 2 * datum.indivisible_count)


def simple_roots(datum: RootDatum) -> np.ndarray:
    n = datum.n
    out = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    out[idx, idx] = 1.0
    out[idx, idx + 1] = -1.0
    return out


def fundamental_coweights(datum: RootDatum) -> np.ndarray:
    """Rows w_i in a with alpha_j(w_i) = delta_ij for the simple roots alpha_j."""
    n = datum.n
    out = np.zeros((n - 1, n))
    for i in range(n - 1):
        out[i, : i + 1] = 1.0
        out[i] -= (i + 1) / n
    return out
