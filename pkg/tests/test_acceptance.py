"""Acceptance criteria, one test per criterion; each prints a single PASS/FAIL line."""
import subprocess
import sys
import time

import numpy as np
import pytest

from rdlie.boundary import (act, adapted_boundary_grid, cocycle, inner, quasi_regular_apply)
from rdlie.cli import run
from rdlie.harish_chandra import decay_envelope_fit, envelope_ratio, xi_boundary, xi_iwasawa, xi_ray
from rdlie.lie_structure import ChamberVector, build_root_datum, rd_threshold
from rdlie.polar import (cartan_decompose, exp_diag, iwasawa, length, random_group_element,
                         random_rotation)
from rdlie.rd_integral import divergence_scan, rd_constant, tail_bound
from rdlie.verify import random_positive_unit, run_verification


@pytest.fixture
def emit(capsys):
    def _emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    return _emit


def test_criterion_1_structure(emit):
    start = time.perf_counter()
    ok = True
    for n in range(2, 9):
        datum = build_root_datum(n)
        ok &= rd_threshold(datum) == n * n - 1 and len(datum.positive_roots) == n * (n - 1) // 2
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1.0
    emit(1, ok, f"thresholds n^2-1 and root counts n(n-1)/2 for n=2..8 ({elapsed:.3f} s)")
    assert ok


def test_criterion_2_decompositions(emit):
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    worst_rt, violations = 0.0, 0
    for n in (2, 3):
        for _ in range(1000):
            g = random_group_element(rng, n, 5.0)
            triple = cartan_decompose(g)
            k, H, n_part = iwasawa(g)
            worst_rt = max(worst_rt, np.linalg.norm(triple.reconstruct() - g),
                           np.linalg.norm(k @ exp_diag(H) @ n_part - g))
            h = random_group_element(rng, n, 5.0)
            k1, k2 = random_rotation(rng, n), random_rotation(rng, n)
            Lg = length(g)
            violations += length(g @ h) > Lg + length(h) + 1e-9
            violations += abs(length(k1 @ g @ k2) - Lg) > 1e-9
    elapsed = time.perf_counter() - start
    ok = worst_rt < 1e-9 and violations == 0 and elapsed < 10
    emit(2, ok, f"max round-trip error {worst_rt:.2e}, L violations {violations}, {elapsed:.1f} s")
    assert ok


def test_criterion_3_boundary(emit):
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    worst_id = worst_mass = 0.0
    for _ in range(1000):
        g, h = random_group_element(rng, 2, 5.0), random_group_element(rng, 2, 5.0)
        theta = rng.uniform(0, np.pi)
        lhs = cocycle(g @ h, theta)
        worst_id = max(worst_id, abs(lhs - cocycle(g, act(h, theta)) * cocycle(h, theta)) / lhs)
        grid = adapted_boundary_grid(np.linalg.inv(g))
        worst_mass = max(worst_mass, abs(grid.integrate(cocycle(g, grid.nodes)) - 1))
    worst_unit = 0.0
    for seed in range(20):
        xi = random_positive_unit(seed)
        g = random_group_element(rng, 2, 5.0)
        grid = adapted_boundary_grid(g)
        moved = quasi_regular_apply(g, xi.on(grid))
        worst_unit = max(worst_unit, abs(inner(moved, moved) - 1))
    elapsed = time.perf_counter() - start
    ok = worst_id < 1e-8 and worst_mass < 1e-8 and worst_unit < 1e-6 and elapsed < 30
    emit(3, ok, f"cocycle identity {worst_id:.1e}, mass {worst_mass:.1e}, unitarity {worst_unit:.1e}, "
                f"{elapsed:.1f} s")
    assert ok


def test_criterion_4_xi_cross_check(emit):
    start = time.perf_counter()
    ts = np.arange(0, 10.5, 0.5)
    b = np.array([xi_boundary(ChamberVector.from_t(t), points=512) for t in ts])
    i = np.array([xi_iwasawa(exp_diag(ChamberVector.from_t(t))) for t in ts])
    gap = float(np.max(np.abs(b - i)))
    at_e = abs(b[0] - 1)
    shape = bool(np.all(b <= 1 + 1e-12) and np.all(np.diff(b) < 0))
    elapsed = time.perf_counter() - start
    ok = gap <= 1e-8 and at_e <= 1e-12 and shape and elapsed < 60
    emit(4, ok, f"max |boundary - iwasawa| {gap:.1e}, |Xi(e) - 1| {at_e:.1e}, "
                f"decreasing and <= 1: {shape}, {elapsed:.1f} s")
    assert ok


def test_criterion_5_envelope(emit):
    datum = build_root_datum(2)
    samples = xi_ray(datum, [10.0, 20.0, 30.0])
    r = [float(envelope_ratio(datum, s.H.coords, s.xi_value)) for s in samples]
    spread = max(abs(a - b) / max(a, b) for a in r for b in r)
    C = decay_envelope_fit(datum, samples)
    ok = spread <= 0.05 and np.isfinite(C)
    emit(5, ok, f"ratios {r[0]:.5f}, {r[1]:.5f}, {r[2]:.5f} (max pairwise {100 * spread:.2f}%), "
                f"C_est {C:.5f}")
    assert ok


def test_criterion_6_rd_integral(emit):
    start = time.perf_counter()
    sl2 = build_root_datum(2)
    rep2 = rd_constant(sl2, 4.0, 40.0)
    est = {row["radius"]: row["estimate"] for row in rep2.doubling}
    t20 = tail_bound(sl2, 4.0, 20.0, rep2.C_used)
    a = abs(est[40.0] - est[20.0]) < t20
    b = rep2.tail_bound / rep2.estimate < 0.05
    c = rep2.converged
    rep3 = rd_constant(build_root_datum(3), 9.0, 20.0)
    d = rep3.converged
    e = rep3.refinement_rel_change < 1e-3
    elapsed = time.perf_counter() - start
    ok = a and b and c and d and e and elapsed < 600
    emit(6, ok,
         f"sl2 d=4: |I40-I20| {abs(est[40.0] - est[20.0]):.2e} < tail(20) {t20:.2e}: {a}; "
         f"tail(40)/estimate {rep2.tail_bound / rep2.estimate:.3f} < 0.05: {b}; converged: {c} | "
         f"sl3 d=9 R=20: converged: {d} (tail {rep3.tail_bound:.3f}, estimate {rep3.estimate:.3e}); "
         f"refinement change {rep3.refinement_rel_change:.1e} < 1e-3: {e} | {elapsed:.0f} s")
    assert ok


def test_criterion_7_growth(emit):
    sl2 = build_root_datum(2)
    rows = divergence_scan(sl2, 2.0, [10.0, 20.0, 40.0])
    ratio = rows[2]["partial_integral"] / rows[1]["partial_integral"]
    report = rd_constant(sl2, 2.0, 40.0, refine=False)
    no_claim = (not report.converged and report.divergent_tail
                and all(set(r) == {"radius", "partial_integral"} for r in rows))
    ok = ratio > 1.5 and no_claim
    emit(7, ok, f"I(40)/I(20) = {ratio:.3f}; no convergence claim: {no_claim}")
    assert ok


def test_criterion_8_monte_carlo(emit):
    start = time.perf_counter()
    res = run_verification(seed=42, trials=100, d=4.0, radius=20.0, tol=1e-8)
    elapsed = time.perf_counter() - start
    ok = res.passed and elapsed < 900
    counts = ", ".join(f"{k} {v}" for k, v in res.violations.items())
    emit(8, ok, f"violations: {counts}; {elapsed:.0f} s")
    assert ok


def test_criterion_9_cli(emit, capsys):
    def call(*argv):
        code = run(list(argv))
        return code, capsys.readouterr().out

    paths = {
        "exit 0": call("threshold", "--group", "sl3") == (0, "8\n"),
        "exit 1": call("verify", "--group", "sl2", "--trials", "1", "--tol", "1e-300")[0] == 1,
        "exit 2": call("roots", "--group", "sl1")[0] == 2,
        "exit 3": call("verify", "--group", "sl2", "--d", "2", "--trials", "1")[0] == 3,
    }
    argv = [sys.executable, "-m", "rdlie", "verify", "--group", "sl2", "--d", "4", "--trials", "3",
            "--seed", "42", "--radius", "20", "--tol", "1e-8"]
    outs = [subprocess.run(argv, capture_output=True).stdout for _ in range(2)]
    same = outs[0] == outs[1] and len(outs[0]) > 0
    ok = all(paths.values()) and same
    emit(9, ok, ", ".join(f"{k}: {v}" for k, v in paths.items()) + f"; byte-identical reruns: {same}")
    assert ok
