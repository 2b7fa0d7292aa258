import math

import numpy as np
import pytest

from conftest import xi_sl2_closed_form
from rdlie.boundary import (BoundaryFunction, adapted_boundary_grid, k_average_F, kernel_pairing,
                            quasi_regular_apply, tensor)
from rdlie.exceptions import DivergentTailError, PreconditionError
from rdlie.harish_chandra import xi_boundary
from rdlie.lie_structure import ChamberVector, build_root_datum
from rdlie.polar import exp_diag, random_group_element
from rdlie.quadrature import boundary_probability_grid, circle_probability_grid
from rdlie.rd_integral import rd_constant
from rdlie.verify import (cauchy_schwarz_chain_check, domination_check, fubini_exchange_check,
                          k_double_average, linearization_identity_check, random_positive_unit,
                          rd_master_check, run_verification, sigma_apply, trial_seeds)


@pytest.fixture(scope="module")
def report20():
    return rd_constant(build_root_datum(2), 4.0, 20.0, refine=False)


def one():
    return BoundaryFunction.constant(boundary_probability_grid(512))


def test_random_positive_unit():
    for seed in range(5):
        xi = random_positive_unit(seed)
        assert xi.norm() == pytest.approx(1.0, abs=1e-12)
        assert xi.values.min() > 0
    a, b = random_positive_unit(1), random_positive_unit(2)
    assert np.max(np.abs(a.values - b.values)) > 1e-3
    assert np.array_equal(random_positive_unit(3).values, random_positive_unit(3).values)
    with pytest.raises(PreconditionError):
        random_positive_unit(0, bandwidth=0)


def test_sigma_identity_and_tensor(rng):
    xi = random_positive_unit(11, N=128)
    T = tensor(xi, xi)
    assert np.allclose(sigma_apply(np.eye(2), T).values, T.values, rtol=0, atol=1e-13)
    g = random_group_element(rng, 2, 3.0)
    moved = quasi_regular_apply(g, xi)
    assert np.allclose(sigma_apply(g, T).values, np.outer(moved.values, moved.values), atol=1e-10)
    assert np.all(sigma_apply(g, T).values >= 0)


def test_linearization(rng):
    xi = random_positive_unit(4)
    assert linearization_identity_check(xi, np.eye(2)) < 1e-14
    for _ in range(10):
        assert linearization_identity_check(xi, random_group_element(rng, 2, 5.0)) < 1e-9


def test_linearization_for_constant_gives_xi_squared():
    H = ChamberVector.from_t(1.5)
    g = exp_diag(H)
    grid = adapted_boundary_grid(g)
    c = BoundaryFunction.constant(grid)
    coeff = kernel_pairing(sigma_apply(g, tensor(c, c, grid), grid), tensor(c, c, grid))
    assert coeff == pytest.approx(xi_sl2_closed_form(1.5) ** 2, rel=1e-12)


def test_cauchy_schwarz_chain():
    c = cauchy_schwarz_chain_check(one())
    assert c.violations == 0 and c.max_F == pytest.approx(1.0, abs=1e-14)
    for seed in range(5):
        report = cauchy_schwarz_chain_check(random_positive_unit(seed))
        assert report.violations == 0 and report.f_spread < 1e-8 and report.max_F <= 1 + 1e-8


def test_domination():
    count, worst = domination_check(one())
    assert count == 0 and abs(worst) < 1e-10
    count, worst = domination_check(random_positive_unit(6))
    assert count == 0 and worst < 0


def test_domination_at_identity():
    xi = random_positive_unit(7)
    F = k_average_F(xi, circle_probability_grid(64))
    assert kernel_pairing(F, F) <= 1.0 + 1e-12


def test_fubini_exchange(rng):
    xi = random_positive_unit(8)
    for _ in range(5):
        assert fubini_exchange_check(xi, random_group_element(rng, 2, 5.0)) < 1e-9


def test_k_integrals_trivial_for_constant():
    H = ChamberVector.from_t(2.0)
    g = exp_diag(H)
    grid = adapted_boundary_grid(g)
    c = BoundaryFunction.constant(grid)
    assert k_double_average(c, g, grid, circle_probability_grid(16)) == pytest.approx(
        xi_boundary(H, grid=grid) ** 2, abs=1e-10)


def test_master_check_constant_collapses(report20):
    res = rd_master_check(one(), 4.0, 20.0, report20)
    assert res.passed and res.lhs == pytest.approx(res.C0, rel=1e-10)


def test_master_check_random(report20):
    for seed in range(3):
        res = rd_master_check(random_positive_unit(seed), 4.0, 20.0, report20)
        assert res.passed and res.lhs <= res.C0 * (1 + 1e-6)


def test_master_check_below_threshold():
    with pytest.raises(DivergentTailError):
        rd_master_check(one(), 3.0, 20.0)
    with pytest.raises(DivergentTailError):
        run_verification(trials=1, d=2.0)


def test_run_is_deterministic():
    a = run_verification(seed=5, trials=2)
    b = run_verification(seed=5, trials=2)
    assert a.to_dict() == b.to_dict() and a.passed
    assert trial_seeds(5, 3) == trial_seeds(5, 3) and len(set(trial_seeds(5, 3))) == 3
