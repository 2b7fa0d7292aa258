"""The weighted spherical integral

    I_d(R) = int_{a+, |H| <= R} Xi(e^H)^2 (1 + |H|)^{-d} J(H) dH

with a certified bound on the neglected tail |H| > R.

Partial integrals are accumulated over annuli R/4 <= |H| <= R/2 <= |H| <= R,
so successive radius doublings differ by an exactly nonnegative annulus
contribution and the doubling diagnostic costs nothing extra.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from .exceptions import PreconditionError, UnsupportedRankError
from .harish_chandra import envelope_ratio, xi
from .lie_structure import RootDatum, in_closed_chamber, jacobian, killing_norm, rd_threshold
from .quadrature import QuadratureGrid, chamber_grid

# per-rank defaults: radial Gauss points per annulus, simplex points, Xi options
GRID_DEFAULTS = {
    2: {"radial": 48, "angular": 1, "xi": {}},
    3: {"radial": 10, "angular": 8, "xi": {"m": 5, "ratio": 4.0}},
}
CONVERGED_TAIL_FRACTION = 0.05


def _check_rank(datum: RootDatum) -> None:
    if datum.n not in GRID_DEFAULTS:
        raise UnsupportedRankError("Xi, hence the RD integrand, is computed for n = 2, 3 only")


def _xi_values(datum: RootDatum, nodes: np.ndarray, xi_opts: dict) -> np.ndarray:
    """Xi at each chamber node; nodes with J = 0 are skipped (value 1 is a placeholder)."""
    vals = np.ones(len(nodes))
    for i, h in enumerate(nodes):
        if jacobian(datum, h) > 0:
            vals[i] = xi(h, datum=datum, **xi_opts)
    return vals


def rd_integrand(datum: RootDatum, H, d: float, xi_value: float | None = None, **xi_opts) -> float:
    """Xi(e^H)^2 (1 + |H|)^{-d} J(H) for H in the closed chamber."""
    _check_rank(datum)
    h = H.coords if hasattr(H, "coords") else np.asarray(H, dtype=float)
    if not in_closed_chamber(h):
        raise PreconditionError("H must lie in the closed chamber")
    J = float(jacobian(datum, h))
    if J == 0.0:
        return 0.0
    if xi_value is None:
        xi_value = xi(h, datum=datum, **xi_opts)
    return float(xi_value**2 * (1 + killing_norm(datum, h)) ** (-d) * J)


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere in R^dim (2 for dim = 1)."""
    return float(2 * math.pi ** (dim / 2) / gamma_fn(dim / 2))


def tail_bound(datum: RootDatum, d: float, radius: float, C: float) -> float:
    """Upper bound for the integral over |H| > radius; math.inf at or below threshold.

    Uses Xi(e^H) <= C e^{-rho(H)} (1 + |H|)^r, J(H) <= e^{2 rho(H)} and the
    full sphere in place of the chamber sector:

        tail <= C^2 omega_m int_R^inf (1 + s)^{2r - d} s^{m - 1} ds,   m = dim a,

    with (1 + s)^{2r-d} <= s^{2r-d} on s >= 1 and <= 1 on s < 1.
    """
    if radius <= 0 or C <= 0:
        raise PreconditionError("radius and C must be positive")
    m, r = datum.cartan_dim, datum.indivisible_count
    if d <= rd_threshold(datum):
        return math.inf
    p = 2 * r - d + m  # power of the majorant after the s^{m-1} factor, < 0
    if radius >= 1:
        radial = radius**p / -p
    else:
        radial = (1 - radius**m) / m + 1 / -p
    return C * C * sphere_area(m) * radial


@dataclass
class RDReport:
    n: int
    d: float
    radius: float
    estimate: float
    tail_bound: float
    C_used: float
    C_est: float
    grid: dict
    converged: bool
    divergent_tail: bool
    # partial integrals at radius/4, radius/2, radius and the tail bounds there
    doubling: list = field(default_factory=list)
    refined_estimate: float | None = None
    refinement_rel_change: float | None = None

    def __post_init__(self):
        if self.estimate < 0:
            raise ValueError("estimate must be nonnegative")
        if self.converged and not self.tail_bound <= CONVERGED_TAIL_FRACTION * self.estimate:
            raise ValueError("a converged report needs tail_bound <= 0.05 * estimate")

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("tail_bound",):
            if math.isinf(out[key]):
                out[key] = "infinite"
        for row in out["doubling"]:
            if math.isinf(row["tail_bound"]):
                row["tail_bound"] = "infinite"
        return out


def annulus_grids(datum: RootDatum, radius: float, radial: int, angular: int,
                  radii=None) -> list[QuadratureGrid]:
    """Chamber grids on the annuli between 0 < radii[0] < ... (default radius/4, radius/2, radius)."""
    if radii is None:
        radii = [radius / 4, radius / 2, float(radius)]
    inner_r, grids = 0.0, []
    for R in radii:
        grids.append(chamber_grid(datum, R, radial, angular_points=angular, inner_radius=inner_r))
        inner_r = R
    return grids


def _annulus_sums(datum: RootDatum, d: float, radii, radial: int, angular: int, xi_opts: dict):
    """Partial integrals at each radius (cumulative over annuli) and the envelope constant."""
    partial, total = [], 0.0
    c_est, nodes_used = 1.0, 0  # H = 0 has envelope ratio exactly 1
    for grid in annulus_grids(datum, radii[-1], radial, angular, radii):
        vals = _xi_values(datum, grid.nodes, xi_opts)
        integrand = vals**2 * (1 + killing_norm(datum, grid.nodes)) ** (-d) * jacobian(datum, grid.nodes)
        total += grid.integrate(integrand)
        partial.append(total)
        c_est = max(c_est, float(np.max(envelope_ratio(datum, grid.nodes, vals))))
        nodes_used += len(grid)
    return partial, c_est, nodes_used


def rd_constant(datum: RootDatum, d: float, radius: float, radial: int | None = None,
                angular: int | None = None, C: float | None = None, refine: bool = True,
                xi_opts: dict | None = None) -> RDReport:
    """Estimate I_d(radius), bound the tail and judge convergence.

    The report is converged iff the tail bound at ``radius`` is at most 5%
    of the estimate and each radius doubling R/4 -> R/2 -> R changes the
    partial integral by no more than the tail bound at the smaller radius.
    ``refine`` repeats the computation with doubled node counts (and a finer
    Xi rule for n = 3) and reports the relative change.
    """
    _check_rank(datum)
    if d <= 0 or radius <= 0:
        raise PreconditionError("d and radius must be positive")
    cfg = GRID_DEFAULTS[datum.n]
    radial = radial or cfg["radial"]
    angular = angular or cfg["angular"]
    xi_opts = dict(cfg["xi"]) if xi_opts is None else dict(xi_opts)
    radii = [radius / 4, radius / 2, float(radius)]
    partial, c_est, nodes_used = _annulus_sums(datum, d, radii, radial, angular, xi_opts)
    c_used = float(C) if C is not None else 2.0 * c_est
    tails = [tail_bound(datum, d, R, c_used) for R in radii]
    doubling = [{"radius": R, "estimate": I, "tail_bound": T} for R, I, T in zip(radii, partial, tails)]
    estimate = partial[-1]
    divergent = math.isinf(tails[-1])
    converged = (not divergent
                 and tails[-1] <= CONVERGED_TAIL_FRACTION * estimate
                 and partial[1] - partial[0] <= tails[0]
                 and partial[2] - partial[1] <= tails[1])
    refined = rel_change = None
    if refine:
        fine_opts = dict(xi_opts)
        if datum.n == 3:
            fine_opts["m"] = fine_opts.get("m", 5) + 1
        else:
            fine_opts["points"] = 2 * fine_opts.get("points", 512)
        fine, _, _ = _annulus_sums(datum, d, radii, 2 * radial,
                                   2 * angular if datum.n > 2 else 1, fine_opts)
        refined = fine[-1]
        rel_change = abs(refined - estimate) / refined if refined > 0 else 0.0
    grid = {"radial_per_annulus": radial, "angular": angular if datum.n > 2 else 1,
            "annuli": len(radii), "chamber_nodes": nodes_used, "xi": xi_opts}
    return RDReport(datum.n, float(d), float(radius), estimate, tails[-1], c_used, c_est, grid,
                    converged, divergent, doubling, refined, rel_change)


def divergence_scan(datum: RootDatum, d: float, radii, radial: int | None = None,
                    angular: int | None = None, xi_opts: dict | None = None) -> list[dict]:
    """Partial integrals I_d(R) for increasing radii; no convergence claim."""
    _check_rank(datum)
    radii = [float(R) for R in radii]
    if not radii or radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise PreconditionError("radii must be positive and strictly increasing")
    cfg = GRID_DEFAULTS[datum.n]
    xi_opts = dict(cfg["xi"]) if xi_opts is None else dict(xi_opts)
    partial, _, _ = _annulus_sums(datum, d, radii, radial or cfg["radial"],
                                  angular or cfg["angular"], xi_opts)
    return [{"radius": R, "partial_integral": I} for R, I in zip(radii, partial)]


def report_json(report: RDReport) -> str:
    return json.dumps(report.to_dict())
