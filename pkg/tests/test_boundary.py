import numpy as np
import pytest

from rdlie.boundary import (BoundaryFunction, act, adapted_boundary_grid, cocycle, cocycle_n,
                            inner, k_average_F, k_average_f, kernel_pairing, quasi_regular_apply,
                            tensor, trig_coefficients, trig_evaluate)
from rdlie.exceptions import GridMismatchError
from rdlie.polar import random_group_element, random_rotation, rotation2
from rdlie.quadrature import boundary_probability_grid, circle_probability_grid
from rdlie.verify import random_positive_unit


def test_cocycle_identity(rng):
    for _ in range(200):
        g, h = random_group_element(rng, 2, 5.0), random_group_element(rng, 2, 5.0)
        theta = rng.uniform(0, np.pi, 5)
        lhs = cocycle(g @ h, theta)
        rhs = cocycle(g, act(h, theta)) * cocycle(h, theta)
        assert np.allclose(lhs, rhs, rtol=1e-8)


def test_cocycle_is_derivative_of_action(rng):
    for _ in range(10):
        g = random_group_element(rng, 2, 2.0)
        theta, eps = rng.uniform(0, np.pi), 1e-6
        ends = np.unwrap([act(g, theta - eps), act(g, theta + eps)], period=np.pi)
        assert cocycle(g, theta) == pytest.approx((ends[1] - ends[0]) / (2 * eps), rel=1e-7)


def test_quasi_invariance_mass(rng):
    for _ in range(50):
        g = random_group_element(rng, 2, 5.0)
        grid = adapted_boundary_grid(np.linalg.inv(g))
        assert grid.integrate(cocycle(g, grid.nodes)) == pytest.approx(1.0, abs=1e-8)


def test_cocycle_n_matches_sl2(rng):
    for _ in range(20):
        g = random_group_element(rng, 2, 3.0)
        phi = rng.uniform(0, 2 * np.pi)
        assert cocycle_n(g, rotation2(phi)) == pytest.approx(cocycle(g, phi), rel=1e-10)


def test_cocycle_n_mass_sl3(rng):
    from rdlie.quadrature import so3_probability_grid, euler_zyz
    grid = so3_probability_grid(40)
    g = random_group_element(rng, 3, 0.8)
    k = euler_zyz(*grid.nodes.T)
    assert grid.integrate(cocycle_n(g, k)) == pytest.approx(1.0, rel=1e-6)


def test_trig_interpolation_exact():
    grid = boundary_probability_grid(32)
    f = lambda t: 1 + np.cos(2 * t) - 0.3 * np.sin(6 * t) + 0.2 * np.cos(30 * t)
    c = trig_coefficients(f(grid.nodes))
    x = np.linspace(0, np.pi, 17)
    assert np.allclose(trig_evaluate(c, x), f(x), atol=1e-13)


def test_unitarity_band_limited(rng):
    xi = random_positive_unit(3)
    for _ in range(20):
        g = random_group_element(rng, 2, 5.0)
        grid = adapted_boundary_grid(g)
        moved = quasi_regular_apply(g, xi.on(grid))
        assert inner(moved, moved) == pytest.approx(1.0, abs=1e-6)


def test_representation_is_homomorphism(rng):
    xi = random_positive_unit(5)
    g, h = random_group_element(rng, 2, 2.0), random_group_element(rng, 2, 2.0)
    two_step = quasi_regular_apply(g, quasi_regular_apply(h, xi))
    one_step = quasi_regular_apply(g @ h, xi)
    assert np.allclose(two_step.values, one_step.values, rtol=1e-10)


def test_positivity_preserved(rng):
    xi = random_positive_unit(8)
    for _ in range(10):
        assert np.all(quasi_regular_apply(random_group_element(rng, 2, 5.0), xi).values > 0)


def test_rotation_acts_by_translation(rng):
    xi = random_positive_unit(2)
    phi = 0.4
    moved = quasi_regular_apply(rotation2(phi), xi)
    assert np.allclose(moved.values, xi(xi.grid.nodes - phi), atol=1e-12)


def test_grid_mismatch():
    a = BoundaryFunction.constant(boundary_probability_grid(8))
    b = BoundaryFunction.constant(boundary_probability_grid(16))
    with pytest.raises(GridMismatchError):
        inner(a, b)


def test_csv_round_trip():
    xi = random_positive_unit(4, N=64)
    back = BoundaryFunction.from_csv(xi.to_csv())
    assert np.array_equal(back.values, xi.values)
    assert np.allclose(back(np.array([0.1, 2.0])), xi(np.array([0.1, 2.0])), atol=1e-13)


def test_k_averages():
    xi = random_positive_unit(9, N=128)
    K = circle_probability_grid(64)
    f = k_average_f(xi, xi.grid.nodes, K)
    assert np.allclose(f, 1.0, atol=1e-12)  # = |xi|^2
    F = k_average_F(xi, K)
    assert np.allclose(F.values, F.values.T, atol=1e-15)
    assert np.allclose(np.diag(F.values), f, atol=1e-12)
    T = tensor(xi, xi)
    assert kernel_pairing(T, T) == pytest.approx(1.0, rel=1e-12)
