"""The boundary G/P of SL(2, R), its cocycle and the quasi-regular representation.

G/P is the projective line, charted by theta in [0, pi) through the unit
vectors u_theta = (cos theta, sin theta) up to sign.  mu is the rotation
invariant probability measure d theta / pi.  The cocycle is the derivative
of the action,

    c(g, theta) = |g u_theta|^{-2} = d(act(g, .))/d theta,

so that c(gh, x) = c(g, hx) c(h, x) and
(lambda(g) xi)(x) = c(g^{-1}, x)^{1/2} xi(g^{-1} x) is unitary.  For
general n only the cocycle along K is provided (``cocycle_n``), through the
Iwasawa projection.

Functions on G/P are carried as ``BoundaryFunction``: samples on a grid plus
an evaluator for off-grid points.  Band-limited functions on the uniform
midpoint grid are evaluated by trigonometric interpolation, which is exact
for them; transformed functions keep an exact composed evaluator.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import GridMismatchError, PreconditionError
from .lie_structure import RootDatum, build_root_datum, rho
from .polar import iwasawa_projection
from .quadrature import QuadratureGrid, boundary_probability_grid, circle_probability_grid


def _inv2(g: np.ndarray) -> np.ndarray:
    return np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])


def act(g, theta):
    """Direction of g u_theta, reduced mod pi."""
    g = np.asarray(g, dtype=float)
    theta = np.asarray(theta, dtype=float)
    x = g[0, 0] * np.cos(theta) + g[0, 1] * np.sin(theta)
    y = g[1, 0] * np.cos(theta) + g[1, 1] * np.sin(theta)
    return np.mod(np.arctan2(y, x), np.pi)


def cocycle(g, theta):
    """c(g, theta) = |g u_theta|^{-2}, the derivative of theta -> act(g, theta)."""
    g = np.asarray(g, dtype=float)
    theta = np.asarray(theta, dtype=float)
    x = g[0, 0] * np.cos(theta) + g[0, 1] * np.sin(theta)
    y = g[1, 0] * np.cos(theta) + g[1, 1] * np.sin(theta)
    return 1.0 / (x * x + y * y)


def cocycle_n(g, k, datum: RootDatum | None = None):
    """Cocycle on G/P = K/M for SL(n, R): exp(-2 rho(H_iw(g k))).

    ``k`` may be a stack of rotations of shape (..., n, n).
    """
    g = np.asarray(g, dtype=float)
    if datum is None:
        datum = build_root_datum(g.shape[0])
    h = iwasawa_projection(g @ np.asarray(k, dtype=float))
    return np.exp(-2.0 * rho(datum, h))


def _is_uniform(grid: QuadratureGrid) -> bool:
    N = len(grid)
    return grid.kind == "boundary" and np.allclose(grid.nodes, np.pi * (np.arange(N) + 0.5) / N, atol=1e-15)


def trig_coefficients(values: np.ndarray) -> np.ndarray:
    """Fourier coefficients c_m (fft order) of samples on the midpoint grid of [0, pi).

    The interpolant is sum_m c_m exp(2 i m theta).
    """
    N = values.shape[-1]
    m = np.fft.fftfreq(N, 1.0 / N)
    return np.fft.fft(values, axis=-1) / N * np.exp(-1j * np.pi * m / N)


def trig_evaluate(coeffs: np.ndarray, theta) -> np.ndarray:
    """Evaluate the real trigonometric interpolant at arbitrary theta."""
    N = coeffs.size
    m = np.fft.fftfreq(N, 1.0 / N)
    c = coeffs.copy()
    if N % 2 == 0:
        # split the Nyquist mode symmetrically so the interpolant is real
        c[N // 2] *= 0.5
        m = np.append(m, N // 2)
        c = np.append(c, c[N // 2])
    theta = np.asarray(theta, dtype=float)
    phase = np.exp(2j * np.multiply.outer(theta, m))
    return (phase @ c).real


@dataclass
class BoundaryFunction:
    """A real function on G/P sampled on a quadrature grid."""

    grid: QuadratureGrid
    values: np.ndarray
    func: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.grid),):
            raise ValueError("values must have one entry per grid node")
        if self.func is None and _is_uniform(self.grid):
            coeffs = trig_coefficients(self.values)
            self.func = lambda theta, _c=coeffs: trig_evaluate(_c, np.mod(theta, np.pi))

    def __call__(self, theta) -> np.ndarray:
        if self.func is None:
            raise ValueError("off-grid evaluation needs a uniform grid or an explicit evaluator")
        return self.func(theta)

    @classmethod
    def from_callable(cls, func: Callable, grid: QuadratureGrid) -> "BoundaryFunction":
        return cls(grid, func(grid.nodes), func)

    @classmethod
    def constant(cls, grid: QuadratureGrid, value: float = 1.0) -> "BoundaryFunction":
        return cls.from_callable(lambda theta: np.full(np.shape(theta), float(value)), grid)

    def on(self, grid: QuadratureGrid) -> "BoundaryFunction":
        """Resample onto another grid using the exact evaluator."""
        return BoundaryFunction(grid, self(grid.nodes), self.func)

    def norm(self) -> float:
        return float(np.sqrt(inner(self, self)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["theta", "value", "weight"])
        for t, v, w in zip(self.grid.nodes, self.values, self.grid.weights):
            writer.writerow([f"{t:.17g}", f"{v:.17g}", f"{w:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BoundaryFunction":
        rows = list(csv.DictReader(io.StringIO(text)))
        theta = np.array([float(r["theta"]) for r in rows])
        values = np.array([float(r["value"]) for r in rows])
        weights = np.array([float(r["weight"]) for r in rows])
        N = theta.size
        uniform = (np.allclose(theta, np.pi * (np.arange(N) + 0.5) / N, atol=1e-15)
                   and np.allclose(weights, 1.0 / N, rtol=1e-15))
        grid = QuadratureGrid(theta, weights, "boundary" if uniform else "generic")
        return cls(grid, values)


def _check_grids(a: QuadratureGrid, b: QuadratureGrid) -> None:
    if a is b:
        return
    if a.nodes.shape != b.nodes.shape or not (np.array_equal(a.nodes, b.nodes)
                                                and np.array_equal(a.weights, b.weights)):
        raise GridMismatchError("functions live on different grids")


def inner(xi: BoundaryFunction, eta: BoundaryFunction) -> float:
    """<xi, eta> in L^2(G/P, mu) (real functions)."""
    _check_grids(xi.grid, eta.grid)
    return float(np.dot(xi.grid.weights, xi.values * eta.values))


def quasi_regular_apply(g, xi: BoundaryFunction, grid: QuadratureGrid | None = None) -> BoundaryFunction:
    """(lambda(g) xi)(theta) = c(g^{-1}, theta)^{1/2} xi(g^{-1} theta).

    The result is sampled on ``grid`` (default: xi's grid) and keeps an exact
    evaluator, so representations can be composed without interpolation.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (2, 2):
        raise PreconditionError("the boundary representation is implemented for SL(2, R)")
    gi = _inv2(g)

    def func(theta, _gi=gi, _g=g, _xi=xi):
        return np.sqrt(cocycle(_gi, theta)) * _xi(act(_gi, theta))

    return BoundaryFunction.from_callable(func, grid if grid is not None else xi.grid)


def peak_direction(g) -> float:
    """Boundary point where c(g^{-1}, .) = |g^{-1} u_theta|^{-2} is largest."""
    u, _, _ = np.linalg.svd(np.asarray(g, dtype=float))
    v = u[:, 0]
    return float(np.mod(np.arctan2(v[1], v[0]), np.pi))


def peak_width(g) -> float:
    """Angular width s_min / s_max of the cocycle peak of lambda(g)."""
    s = np.linalg.svd(np.asarray(g, dtype=float), compute_uv=False)
    return float(s[-1] / s[0])


def adapted_boundary_grid(g, points: int = 512, m: int = 8) -> QuadratureGrid:
    """Probability grid on [0, pi) graded toward the peak of lambda(g)'s cocycle.

    About ``points`` nodes; the panel count follows from the peak width so
    the rule resolves c(g^{-1}, .)^{1/2} for any |H|.
    """
    from .quadrature import graded_levels, graded_periodic_grid

    width = 0.1 * peak_width(g)
    levels = graded_levels(np.pi / 2, width)
    m = max(m, points // (2 * levels))
    return graded_periodic_grid(np.pi, [peak_direction(g)], width, m=m, levels=levels)


def rotate_boundary(theta, phi):
    """act(k_phi^{-1}, theta) for the rotation k_phi by angle phi."""
    return np.mod(np.asarray(theta) - np.asarray(phi), np.pi)


def k_average_f(xi: BoundaryFunction, theta, Kgrid: QuadratureGrid | None = None):
    """f(theta) = int_K xi^2(k^{-1} theta) dk (K-grid of rotation angles)."""
    if Kgrid is None:
        Kgrid = circle_probability_grid(64)
    theta = np.asarray(theta, dtype=float)
    shifted = rotate_boundary(np.multiply.outer(theta, np.ones(len(Kgrid))), Kgrid.nodes)
    return xi(shifted) ** 2 @ Kgrid.weights


@dataclass
class BoundaryKernel:
    """A real function F(x, y) on G/P x G/P sampled on grid x grid."""

    grid: QuadratureGrid
    values: np.ndarray
    func: Callable | None = field(default=None, repr=False)

    def __call__(self, x, y) -> np.ndarray:
        if self.func is None:
            raise ValueError("kernel has no off-grid evaluator")
        return self.func(x, y)

    @classmethod
    def from_callable(cls, func: Callable, grid: QuadratureGrid) -> "BoundaryKernel":
        x, y = np.meshgrid(grid.nodes, grid.nodes, indexing="ij")
        return cls(grid, func(x, y), func)

    def on(self, grid: QuadratureGrid) -> "BoundaryKernel":
        return BoundaryKernel.from_callable(self.func, grid)


def tensor(xi: BoundaryFunction, eta: BoundaryFunction, grid: QuadratureGrid | None = None) -> BoundaryKernel:
    """(xi (x) eta)(x, y) = xi(x) eta(y) (real functions, so no conjugation)."""
    grid = grid if grid is not None else xi.grid
    return BoundaryKernel.from_callable(lambda x, y: xi(x) * eta(y), grid)


def kernel_pairing(F: BoundaryKernel, G: BoundaryKernel) -> float:
    """<F, G> in L^2(G/P x G/P, mu x mu)."""
    _check_grids(F.grid, G.grid)
    w = F.grid.weights
    return float(w @ (F.values * G.values) @ w)


def k_average_F(xi: BoundaryFunction, Kgrid: QuadratureGrid | None = None,
                grid: QuadratureGrid | None = None) -> BoundaryKernel:
    """F(x, y) = int_K xi(k^{-1} x) xi(k^{-1} y) dk, i.e. the K-average of sigma(k)(xi (x) xi)."""
    if Kgrid is None:
        Kgrid = circle_probability_grid(64)
    phi, w = Kgrid.nodes, Kgrid.weights

    def func(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim == 2 and np.all(x == x[:, :1]) and np.all(y == y[:1, :]):
            # outer-product layout: evaluate once per axis
            X = xi(rotate_boundary(x[:, :1], phi))
            Y = xi(rotate_boundary(y[:1, :].T, phi))
            return (X * w) @ Y.T
        X = xi(rotate_boundary(x[..., None], phi))
        Y = xi(rotate_boundary(y[..., None], phi))
        return (X * Y) @ w

    return BoundaryKernel.from_callable(func, grid if grid is not None else xi.grid)


def default_boundary_grid(N: int = 512) -> QuadratureGrid:
    return boundary_probability_grid(N)
