"""Numerical verification of the RD argument for SL(2, R) on random positive vectors.

Each check isolates one step of the argument:

* linearization: <lambda(g) xi, xi>^2 = <sigma(g) xi(x)xi, xi(x)xi>, sigma = lambda (x) lambda;
* Cauchy-Schwarz: F(x, y) = int_K xi(k^-1 x) xi(k^-1 y) dk <= sqrt(f(x) f(y)) with
  f(x) = int_K xi(k^-1 x)^2 dk constant, hence F <= 1;
* K-averaging: the double K-integral of <sigma(k1 a k2) xi(x)xi, xi(x)xi> equals
  <sigma(a) F, F> (two summation orders);
* domination: <sigma(e^H) F, F> <= Xi(e^H)^2;
* master inequality: the truncated polar integral of <lambda(g) xi, xi>^2 (1 + L)^{-d}
  is at most the computed constant C0 plus the certified tail bound.

Test vectors are real and positive, so lambda-bar = lambda throughout.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .boundary import (BoundaryFunction, BoundaryKernel, act, adapted_boundary_grid, cocycle,
                       inner, k_average_f, k_average_F, kernel_pairing, quasi_regular_apply,
                       rotate_boundary, tensor, _inv2)
from .exceptions import DivergentTailError, PreconditionError
from .harish_chandra import xi_boundary
from .lie_structure import ChamberVector, build_root_datum, jacobian, killing_norm, rd_threshold
from .polar import exp_diag, random_group_element
from .quadrature import QuadratureGrid, boundary_probability_grid, circle_probability_grid
from .rd_integral import GRID_DEFAULTS, RDReport, annulus_grids, rd_constant

DEFAULT_TS = tuple(0.5 * np.arange(1, 11))
LINEARIZATION_TOL = 1e-9
FUBINI_TOL = 1e-9
MASTER_REL = 1e-6


def random_positive_unit(seed: int, bandwidth: int = 3, N: int = 512, eps0: float = 0.05) -> BoundaryFunction:
    """xi = |p|^2 + eps0, normalized; p a seeded trigonometric polynomial in e^{2i theta}.

    xi has frequencies up to 2 * bandwidth, so the N-point midpoint grid
    integrates xi^2 exactly when N > 4 * bandwidth.
    """
    if bandwidth < 1:
        raise PreconditionError("bandwidth must be >= 1")
    if N <= 4 * bandwidth:
        raise PreconditionError("grid too coarse for the bandwidth")
    rng = np.random.default_rng(seed)
    freqs = np.arange(-bandwidth, bandwidth + 1)
    coef = rng.standard_normal(freqs.size) + 1j * rng.standard_normal(freqs.size)
    coef /= np.linalg.norm(coef)  # mean of |p|^2 is 1
    grid = boundary_probability_grid(N)

    def raw(theta):
        theta = np.asarray(theta, dtype=float)
        p = np.exp(2j * np.multiply.outer(theta, freqs)) @ coef
        return np.abs(p) ** 2 + eps0

    scale = 1.0 / math.sqrt(float(np.dot(grid.weights, raw(grid.nodes) ** 2)))
    return BoundaryFunction.from_callable(lambda theta: scale * raw(theta), grid)


def sigma_apply(g, F: BoundaryKernel, grid: QuadratureGrid | None = None) -> BoundaryKernel:
    """(sigma(g) F)(x, y) = c(g^-1, x)^{1/2} c(g^-1, y)^{1/2} F(g^-1 x, g^-1 y)."""
    g = np.asarray(g, dtype=float)
    if g.shape != (2, 2):
        raise PreconditionError("sigma is implemented for SL(2, R)")
    gi = _inv2(g)

    def func(x, y, _gi=gi, _F=F):
        return np.sqrt(cocycle(_gi, x) * cocycle(_gi, y)) * _F(act(_gi, x), act(_gi, y))

    return BoundaryKernel.from_callable(func, grid if grid is not None else F.grid)


def linearization_identity_check(xi: BoundaryFunction, g, grid: QuadratureGrid | None = None) -> float:
    """|<lambda(g) xi, xi>^2 - <sigma(g)(xi (x) xi), xi (x) xi>| on a grid adapted to g."""
    if grid is None:
        grid = adapted_boundary_grid(g)
    x = xi.on(grid)
    coeff = inner(quasi_regular_apply(g, x), x)
    T = tensor(x, x, grid)
    pairing = kernel_pairing(sigma_apply(g, T, grid), T)
    return abs(coeff**2 - pairing)


def _k_matrix(xi: BoundaryFunction, g, grid: QuadratureGrid, Kgrid: QuadratureGrid) -> np.ndarray:
    """M[i, j] = <lambda(k_i g k_j) xi, xi> = <lambda(g) lambda(k_j) xi, lambda(k_i^-1) xi>."""
    gi = _inv2(np.asarray(g, dtype=float))
    theta = grid.nodes
    phi = Kgrid.nodes
    pulled = act(gi, theta)
    half = np.sqrt(cocycle(gi, theta))
    A = half * xi(rotate_boundary(pulled[None, :], phi[:, None]))   # lambda(g) lambda(k_j) xi
    B = xi(rotate_boundary(theta[None, :], -phi[:, None]))          # lambda(k_i^-1) xi
    return (B * grid.weights) @ A.T


def k_double_average(xi: BoundaryFunction, g, grid: QuadratureGrid, Kgrid: QuadratureGrid) -> float:
    """sum_{i,j} w_i w_j <lambda(k_i g k_j) xi, xi>^2."""
    M = _k_matrix(xi, g, grid, Kgrid)
    return float(Kgrid.weights @ (M * M) @ Kgrid.weights)


def fubini_exchange_check(xi: BoundaryFunction, g, Kgrid: QuadratureGrid | None = None,
                          grid: QuadratureGrid | None = None) -> float:
    """|K x K average of squared coefficients - <sigma(g) F, F>|."""
    Kgrid = Kgrid or circle_probability_grid(64)
    grid = grid or adapted_boundary_grid(g)
    F = k_average_F(xi, Kgrid, grid)
    return abs(k_double_average(xi, g, grid, Kgrid) - kernel_pairing(sigma_apply(g, F, grid), F))


@dataclass
class ChainReport:
    nodewise_violations: int
    f_spread: float
    max_F: float
    worst_margin: float

    @property
    def violations(self) -> int:
        return self.nodewise_violations


def cauchy_schwarz_chain_check(xi: BoundaryFunction, Kgrid: QuadratureGrid | None = None,
                               grid: QuadratureGrid | None = None, tol: float = 1e-8) -> ChainReport:
    """F <= sqrt(f(x) f(y)) nodewise, f constant and max F <= 1.

    Violations count nodes where F exceeds sqrt(f f) by more than tol, plus
    one each if the spread of f or max F - 1 exceeds tol.
    """
    Kgrid = Kgrid or circle_probability_grid(64)
    grid = grid or xi.grid
    F = k_average_F(xi, Kgrid, grid).values
    f = k_average_f(xi, grid.nodes, Kgrid)
    bound = np.sqrt(np.outer(f, f))
    excess = F - bound
    count = int(np.sum(excess > tol))
    spread = float(f.max() - f.min())
    max_F = float(F.max())
    count += int(spread > tol) + int(max_F > 1 + tol)
    return ChainReport(count, spread, max_F, float(max(excess.max(), max_F - 1)))


def domination_check(xi: BoundaryFunction, ts=DEFAULT_TS, Kgrid: QuadratureGrid | None = None,
                     tol: float = 1e-8):
    """Count H_t with <sigma(e^H) F, F> > Xi(e^H)^2 + tol; returns (count, worst lhs - rhs)."""
    Kgrid = Kgrid or circle_probability_grid(64)
    count, worst = 0, -math.inf
    for t in ts:
        H = ChamberVector.from_t(float(t), 2)
        g = exp_diag(H)
        grid = adapted_boundary_grid(g)
        F = k_average_F(xi, Kgrid, grid)
        lhs = kernel_pairing(sigma_apply(g, F, grid), F)
        margin = lhs - xi_boundary(H, grid=grid) ** 2
        worst = max(worst, margin)
        count += int(margin > tol)
    return count, worst


@dataclass(frozen=True)
class MasterResult:
    lhs: float
    C0: float
    tail: float
    passed: bool

    @property
    def margin(self) -> float:
        return self.lhs - self.C0 * (1 + MASTER_REL) - self.tail


def rd_master_check(xi: BoundaryFunction, d: float, radius: float, report: RDReport | None = None,
                    Kgrid: QuadratureGrid | None = None) -> MasterResult:
    """Truncated int_G <lambda(g) xi, xi>^2 (1 + L(g))^{-d} dg against C0 + tail.

    dg = dk1 J(H) dH dk2 with both K factors of mass 1; the chamber nodes are
    those used by ``rd_constant`` at the same (d, radius), and each Xi and
    each coefficient is evaluated on the same grid adapted to e^H.
    """
    datum = build_root_datum(2)
    if d <= rd_threshold(datum):
        raise DivergentTailError(f"d = {d} is not above the threshold {rd_threshold(datum):g}")
    if report is None:
        report = rd_constant(datum, d, radius, refine=False)
    if report.d != d or report.radius != radius or report.n != 2:
        raise PreconditionError("report does not match (n, d, radius)")
    Kgrid = Kgrid or circle_probability_grid(64)
    radial = report.grid["radial_per_annulus"]
    lhs = 0.0
    for grid_H in annulus_grids(datum, radius, radial, 1):
        weights = grid_H.weights * (1 + killing_norm(datum, grid_H.nodes)) ** (-d) * jacobian(datum, grid_H.nodes)
        for h, w in zip(grid_H.nodes, weights):
            g = exp_diag(h)
            grid = adapted_boundary_grid(g)
            lhs += w * k_double_average(xi, g, grid, Kgrid)
    passed = lhs <= report.estimate * (1 + MASTER_REL) + report.tail_bound
    return MasterResult(float(lhs), report.estimate, report.tail_bound, bool(passed))


@dataclass
class VerificationRun:
    seed: int
    trials: int
    d: float
    radius: float
    bandwidth: int
    tolerances: dict
    violations: dict = field(default_factory=dict)
    worst_margins: dict = field(default_factory=dict)
    C0: float = 0.0
    tail_bound: float = 0.0

    @property
    def passed(self) -> bool:
        return all(v == 0 for v in self.violations.values())

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def trial_seeds(seed: int, trials: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(trials)]


def run_verification(seed: int = 42, trials: int = 100, d: float = 4.0, radius: float = 20.0,
                     tol: float = 1e-8, ts=DEFAULT_TS, bandwidth: int = 3,
                     max_length: float = 5.0) -> VerificationRun:
    """Run every check on ``trials`` seeded random positive unit vectors (n = 2)."""
    datum = build_root_datum(2)
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    if d <= rd_threshold(datum):
        raise DivergentTailError(f"d = {d} is not above the threshold {rd_threshold(datum):g}")
    report = rd_constant(datum, d, radius, refine=False)
    Kgrid = circle_probability_grid(64)
    names = ("cauchy_schwarz", "domination", "linearization", "fubini", "master")
    run = VerificationRun(seed, trials, float(d), float(radius), bandwidth,
                          {"inequality": tol, "linearization": LINEARIZATION_TOL,
                           "fubini": FUBINI_TOL, "master_relative": MASTER_REL},
                          {k: 0 for k in names}, {k: -math.inf for k in names},
                          report.estimate, report.tail_bound)
    for s in trial_seeds(seed, trials):
        xi = random_positive_unit(s, bandwidth)
        rng = np.random.default_rng(s)
        g = random_group_element(rng, 2, max_length, datum)

        cs = cauchy_schwarz_chain_check(xi, Kgrid, tol=tol)
        _record(run, "cauchy_schwarz", cs.violations, cs.worst_margin)
        count, worst = domination_check(xi, ts, Kgrid, tol)
        _record(run, "domination", count, worst)
        lin = linearization_identity_check(xi, g)
        _record(run, "linearization", int(lin >= LINEARIZATION_TOL), lin)
        fub = fubini_exchange_check(xi, g, Kgrid)
        _record(run, "fubini", int(fub >= FUBINI_TOL), fub)
        master = rd_master_check(xi, d, radius, report, Kgrid)
        _record(run, "master", int(not master.passed), master.margin)
    return run


def _record(run: VerificationRun, key: str, violations: int, margin: float) -> None:
    run.violations[key] += violations
    run.worst_margins[key] = max(run.worst_margins[key], float(margin))
