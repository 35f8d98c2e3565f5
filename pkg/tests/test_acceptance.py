"""Acceptance criteria, each run at its stated tolerance and time budget.

Every test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from grandlp import (
    Constant,
    Cosine,
    Exponent,
    FiniteMap,
    FiniteSpace,
    HypothesisError,
    Indicator,
    IntervalSpace,
    Power,
    Sampled,
    birkhoff_average,
    check_measure_preserving,
    evaluate,
    grand_norm,
    luxemburg_norm,
    modular,
    run_theorem,
    vanishing_limit,
)
from grandlp.cli import main
from grandlp.dynamics import GOLDEN_ROTATION
from grandlp.ergodic import (
    verify_invariance,
    verify_modular_contraction,
    verify_norm_convergence,
    verify_pointwise_limit,
)
from grandlp.reference import dirichlet_kernel_average, finite_constant_norm

from helpers import random_finite_system, report_criterion

pytestmark = pytest.mark.acceptance

SING = IntervalSpace(singular_points=(0.0,))
P2 = Exponent.constant(2.0)
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _random_space(rng, max_atoms=32):
    n = int(rng.integers(1, max_atoms + 1))
    w = rng.uniform(0.05, 1.0, n)
    return FiniteSpace(w / w.sum()), n


def test_criterion_1_constant_exponent_coincidence():
    rng = np.random.default_rng(1)
    cases = []
    for _ in range(1000):
        space, n = _random_space(rng)
        f = rng.normal(size=n) * 10.0 ** rng.uniform(-3, 3)
        cases.append((space, Sampled(f), float(rng.uniform(1.05, 8.0))))
    oracles = [finite_constant_norm(s.weights, f.values, p0).value for s, f, p0 in cases]
    t0 = time.perf_counter()
    got = [luxemburg_norm(s, f, Exponent.constant(p0)) for s, f, p0 in cases]
    elapsed = time.perf_counter() - t0
    worst = max(abs(g - o) / o for g, o in zip(got, oracles))
    ok = worst <= 1e-9 and elapsed < 5.0
    report_criterion(1, "constant-exponent coincidence", ok,
                     f"1000 cases, worst rel err {worst:.2e} (tol 1e-9), {elapsed:.2f}s (< 5s)")
    assert ok


def test_criterion_2_grand_norm_oracle():
    t0 = time.perf_counter()
    power = grand_norm(SING, Power(-0.5), P2, 1.0).value
    one = grand_norm(SING, Constant(1.0), P2, 1.0).value
    elapsed = time.perf_counter() - t0
    ok = abs(power - 2.0) <= 1e-3 and abs(one - 1.0) <= 1e-3 and elapsed < 2.0
    report_criterion(2, "grand-norm oracle", ok,
                     f"Power(-1/2) -> {power:.9f} (2 +- 1e-3), f=1 -> {one:.9f} (1 +- 1e-3), {elapsed:.2f}s (< 2s)")
    assert ok


def test_criterion_3_closure_membership():
    t0 = time.perf_counter()
    v1 = vanishing_limit(SING, Power(-0.5), P2, 1.0)
    v2 = vanishing_limit(SING, Power(-0.5), P2, 2.0)
    bounded = [
        (FiniteSpace.uniform(5), Sampled([3, -1, 0, 7, 2])),
        (IntervalSpace(), Cosine(1)),
        (IntervalSpace(), Cosine(5)),
        (IntervalSpace(), Constant(4.0)),
        (IntervalSpace(), Indicator(0.3, 0.9)),
    ]
    members = []
    for space, f in bounded:
        for p0 in (1.5, 2.0, 4.0):
            for theta in (0.25, 1.0, 3.0):
                members.append(vanishing_limit(space, f, Exponent.constant(p0), theta).is_member)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(v1.limit_estimate - math.sqrt(2)) <= 1e-3 and not v1.is_member
        and v2.limit_estimate <= 1e-6 and v2.is_member
        and all(members) and elapsed < 5.0
    )
    report_criterion(3, "closure membership", ok,
                     f"theta=1 limit {v1.limit_estimate:.7f} member={v1.is_member}; theta=2 limit "
                     f"{v2.limit_estimate:.1e} member={v2.is_member}; bounded members {sum(members)}/{len(members)}; "
                     f"{elapsed:.2f}s (< 5s)")
    assert ok


def _systems(count=500, seed=2024):
    rng = np.random.default_rng(seed)
    return [random_finite_system(rng) for _ in range(count)]


def test_criterion_4_norm_and_modular_contraction():
    systems = _systems()
    t0 = time.perf_counter()
    worst_mod, worst_norm, rows = -math.inf, -math.inf, 0
    for space, f, T, p in systems:
        part_i = verify_pointwise_limit(space, f, T, 1.0, p)
        worst_norm = max(worst_norm, part_i.fav_grand_norm - part_i.f_grand_norm)
        for r in verify_modular_contraction(space, f, T, p):
            worst_mod = max(worst_mod, r.modular_fav - r.modular_f)
            rows += 1
    elapsed = time.perf_counter() - t0
    ok = worst_mod <= 1e-10 and worst_norm <= 1e-8 and elapsed < 30.0
    report_criterion(4, "grand-norm and modular contraction", ok,
                     f"500 systems, {rows} rows, max(rho(f_av)-rho(f)) {worst_mod:.2e} (<= 1e-10), "
                     f"max(|f_av|-|f|) {worst_norm:.2e} (<= 1e-8), {elapsed:.2f}s (< 30s)")
    assert ok


def test_criterion_5_invariance_and_mean():
    worst_inv, worst_mean = 0.0, 0.0
    for space, f, T, p in _systems():
        r = verify_invariance(space, f, T, p)
        worst_inv = max(worst_inv, r.invariance_residual)
        worst_mean = max(worst_mean, r.mean_residual)
    ok = worst_inv <= 1e-12 and worst_mean <= 1e-12
    report_criterion(5, "invariance and mean residuals", ok,
                     f"500 systems, max invariance {worst_inv:.1e}, max mean {worst_mean:.1e} (tol 1e-12)")
    assert ok


def test_criterion_6_cycle_exactness(two_cycle):
    space, f, T, p = two_cycle
    conv = verify_norm_convergence(space, f, T, p, 1.0, [3, 6, 9])
    inv = verify_invariance(space, f, T, p)
    diffs = [r.diff_grand_norm for r in conv.rows]
    ok = diffs == [0.0, 0.0, 0.0] and inv.integral_f == 1.5 and inv.integral_fav == 1.5
    report_criterion(6, "two-cycle exactness", ok,
                     f"diff at n=3,6,9: {diffs}; integral f = {inv.integral_f!r}, f_av = {inv.integral_fav!r}")
    assert ok


def test_criterion_7_rotation_decay():
    t0 = time.perf_counter()
    conv = verify_norm_convergence(IntervalSpace(), Cosine(1), GOLDEN_ROTATION, P2, 1.0, [1, 10, 100, 1000, 10_000])
    final = conv.rows[-1].diff_grand_norm
    x = np.linspace(0.0, 0.95, 20) + 0.0123
    amp_err = 0.0
    for n in (1, 7, 100, 1000, 10_000):
        a = birkhoff_average(IntervalSpace(), Cosine(1), GOLDEN_ROTATION, n)
        amp = np.hypot(evaluate(a, x), evaluate(a, (x + 0.25) % 1))
        amp_err = max(amp_err, float(np.max(np.abs(amp - dirichlet_kernel_average(GOLDEN_ROTATION.alpha, n).value))))
    elapsed = time.perf_counter() - t0
    ok = final <= 1e-3 and amp_err <= 1e-10 and elapsed < 10.0
    report_criterion(7, "rotation decay", ok,
                     f"n=1e4 diff {final:.3e} (<= 1e-3), Dirichlet amplitude err {amp_err:.1e} (<= 1e-10), "
                     f"{elapsed:.2f}s (< 10s)")
    assert ok


def test_criterion_8_hypothesis_gating(tmp_path):
    res = CliRunner().invoke(main, ["verify", str(CONFIGS / "block_swap.json"), "--out-dir", str(tmp_path)])
    cli_ok = res.exit_code == 2 and '"check": "exponent_invariant"' in res.stderr
    space = FiniteSpace.uniform(2)
    mp = check_measure_preserving(FiniteMap([0, 0]), space)
    try:
        run_theorem(space, Sampled([1.0, 2.0]), FiniteMap([0, 0]), P2, 1.0)
        gate = None
    except HypothesisError as exc:
        gate = exc.check
    ok = cli_ok and not mp and gate == "measure_preserving"
    report_criterion(8, "hypothesis gating", ok,
                     f"block swap exit {res.exit_code} ({res.stderr.strip()}); non-bijective map rejected as {gate}")
    assert ok


def test_criterion_9_norm_axioms():
    rng = np.random.default_rng(9)
    fails = {"homogeneity": 0, "triangle": 0, "monotonicity": 0, "unit_ball": 0}
    t0 = time.perf_counter()
    for _ in range(1000):
        space, n = _random_space(rng)
        p = Exponent.sampled(rng.uniform(1.1, 5.0, n))
        theta = float(rng.uniform(0.2, 3.0))
        f = rng.normal(size=n) * 10.0 ** rng.uniform(-2, 2)
        g = rng.normal(size=n) * 10.0 ** rng.uniform(-2, 2)
        c = float(10.0 ** rng.uniform(-3, 3)) * rng.choice([-1, 1])
        h = g * rng.uniform(0, 1, n)

        def lux(v):
            return luxemburg_norm(space, Sampled(v), p)

        def grand(v):
            return grand_norm(space, Sampled(v), p, theta).value

        lf, lg, gf, gg = lux(f), lux(g), grand(f), grand(g)
        if not (math.isclose(lux(c * f), abs(c) * lf, rel_tol=1e-8)
                and math.isclose(grand(c * f), abs(c) * gf, rel_tol=1e-8)):
            fails["homogeneity"] += 1
        if lux(f + g) > lf + lg + 1e-8 or grand(f + g) > gf + gg + 1e-8:
            fails["triangle"] += 1
        if lux(h) > lg + 1e-10 or grand(h) > gg + 1e-10:
            fails["monotonicity"] += 1
        if abs(modular(space, Sampled(f / lf), p) - 1.0) > 1e-8:
            fails["unit_ball"] += 1
    elapsed = time.perf_counter() - t0
    ok = not any(fails.values())
    report_criterion(9, "norm axioms", ok,
                     f"1000 instances, failures {fails}, {elapsed:.1f}s")
    assert ok
