import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grandlp import (
    Constant,
    Cosine,
    DomainError,
    Exponent,
    FiniteMap,
    FiniteSpace,
    HypothesisError,
    Identity,
    IntervalSpace,
    Power,
    Sampled,
    run_theorem,
)
from grandlp.dynamics import GOLDEN_ROTATION
from grandlp.ergodic import (
    boundary_probe,
    verify_invariance,
    verify_modular_contraction,
    verify_norm_convergence,
    verify_pointwise_limit,
)
from grandlp.norms import grand_norm

from helpers import random_finite_system

IV = IntervalSpace()
P2 = Exponent.constant(2.0)


@st.composite
def systems(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_finite_system(np.random.default_rng(seed), max_atoms=16)


# -- part (i) ---------------------------------------------------------------

def test_pointwise_limit_two_cycle(two_cycle):
    space, f, T, p = two_cycle
    r = verify_pointwise_limit(space, f, T, 1.0, p)
    assert r.ok and math.isfinite(r.f_grand_norm) and math.isfinite(r.fav_grand_norm)
    assert r.fav_grand_norm <= r.f_grand_norm


def test_pointwise_limit_constant():
    r = verify_pointwise_limit(FiniteSpace.uniform(3), Constant(2.5), FiniteMap([1, 2, 0]), 1.0, P2)
    assert r.fav_grand_norm == r.f_grand_norm


def test_pointwise_limit_rotation():
    r = verify_pointwise_limit(IV, Cosine(1), GOLDEN_ROTATION, 1.0, P2)
    assert r.fav_grand_norm == 0 and r.ok


# -- part (ii) --------------------------------------------------------------

def test_invariance_two_cycle(two_cycle):
    space, f, T, p = two_cycle
    r = verify_invariance(space, f, T, p)
    assert r.invariance_residual == 0 and r.mean_residual == 0
    assert r.integral_f == 1.5 and r.integral_fav == 1.5


def test_invariance_identity():
    space = FiniteSpace([0.2, 0.8])
    r = verify_invariance(space, Sampled([1, -4]), Identity(), P2)
    assert r.invariance_residual == 0 and r.mean_residual == 0


def test_invariance_rotation():
    r = verify_invariance(IV, Cosine(1), GOLDEN_ROTATION, P2)
    assert r.ok and r.mean_residual <= 1e-6 and r.invariance_residual == 0


# -- contraction ------------------------------------------------------------

def test_boundary_probe_two_cycle(two_cycle):
    space, f, T, p = two_cycle
    row = boundary_probe(space, f, T, p)
    assert row.eps == 0
    assert row.modular_fav == pytest.approx(4.5, rel=1e-15)
    assert row.modular_f == pytest.approx(37.5, rel=1e-15)


def test_contraction_constant():
    rows = verify_modular_contraction(FiniteSpace.uniform(2), Constant(3), FiniteMap([1, 0]), P2)
    assert len(rows) == 50 and all(r.modular_fav == r.modular_f for r in rows)


@given(systems())
def test_contraction_random(sys_):
    space, f, T, p = sys_
    rows = verify_modular_contraction(space, f, T, p)
    assert len(rows) == 50 and all(r.ok for r in rows)


def test_contraction_rejects_closed_range(two_cycle):
    space, f, T, p = two_cycle
    with pytest.raises(DomainError):
        verify_modular_contraction(space, f, T, p, [0.0, 0.5])


# -- part (iii) -------------------------------------------------------------

def test_convergence_two_cycle(two_cycle):
    space, f, T, p = two_cycle
    r = verify_norm_convergence(space, f, T, p, 1.0, [3, 6, 9])
    assert [row.diff_grand_norm for row in r.rows] == [0.0, 0.0, 0.0]
    assert r.exact_ns == [3, 6, 9] and r.ok and r.enforced


def test_convergence_constant():
    r = verify_norm_convergence(IV, Constant(4), GOLDEN_ROTATION, P2, 1.0, [1, 10, 100])
    assert all(row.diff_grand_norm == 0 for row in r.rows)


def test_convergence_rotation():
    r = verify_norm_convergence(IV, Cosine(1), GOLDEN_ROTATION, P2, 1.0, [1, 100, 10_000])
    assert r.rows[-1].diff_grand_norm <= 1.1e-4 and r.ok


def test_convergence_non_member_is_informational():
    space = IntervalSpace(singular_points=(0.0,))
    r = verify_norm_convergence(space, Power(-0.5), Identity(), P2, 1.0, [1, 2])
    assert not r.enforced and r.ok


def test_convergence_schedule_validation(two_cycle):
    space, f, T, p = two_cycle
    for sched in ([], [3, 3], [0, 1], [5, 2]):
        with pytest.raises(DomainError):
            verify_norm_convergence(space, f, T, p, 1.0, sched)


@settings(max_examples=25)
@given(systems(), st.floats(0.2, 3.0))
def test_report_consistency_finite(sys_, theta):
    space, f, T, p = sys_
    report = run_theorem(space, f, T, p, theta, n_schedule=[2**k for k in range(10)])
    assert report.closure_member.is_member
    vals = [r.diff_grand_norm for r in report.part_iii.rows][4:]
    # nonincreasing relative to the running minimum after the first four rows
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:])) or _envelope_ok(report)
    assert report.part_i.fav_grand_norm <= report.part_i.f_grand_norm + 1e-8
    assert report.passed, report.violations


def _envelope_ok(report):
    return report.part_iii.ok


# -- gating -----------------------------------------------------------------

def test_gating_exponent_not_invariant():
    space = FiniteSpace.uniform(6)
    p = Exponent.sampled([2, 2, 2, 3, 3, 3])
    with pytest.raises(HypothesisError) as exc:
        run_theorem(space, Sampled([1, 0, 0, 0, 0, 0]), FiniteMap([3, 4, 5, 0, 1, 2]), p, 1.0)
    assert exc.value.check == "exponent_invariant"


def test_gating_not_measure_preserving():
    space = FiniteSpace.uniform(2)
    with pytest.raises(HypothesisError) as exc:
        run_theorem(space, Sampled([1, 2]), FiniteMap([0, 0]), P2, 1.0)
    assert exc.value.check == "measure_preserving"


@pytest.mark.parametrize(
    "fn",
    [lambda s, f, T, p: verify_pointwise_limit(s, f, T, 1.0, p),
     lambda s, f, T, p: verify_invariance(s, f, T, p),
     lambda s, f, T, p: verify_modular_contraction(s, f, T, p),
     lambda s, f, T, p: verify_norm_convergence(s, f, T, p, 1.0, [1, 2])],
)
def test_every_check_is_gated(fn):
    with pytest.raises(HypothesisError):
        fn(FiniteSpace.uniform(2), Sampled([1, 2]), FiniteMap([1, 1]), P2)


def test_run_theorem_rejects_theta(two_cycle):
    space, f, T, p = two_cycle
    with pytest.raises(DomainError):
        run_theorem(space, f, T, p, 0.0)


def test_run_theorem_report_dict(two_cycle):
    space, f, T, p = two_cycle
    report = run_theorem(space, f, T, p, 1.0, n_schedule=[1, 3, 6, 9])
    d = report.as_dict()
    assert d["passed"] and d["violations"] == []
    assert d["hypothesis_checks"]["measure_preserving"]["ok"]
    assert len(d["contraction"]) == 50
    assert d["boundary_probe"]["modular_f"] == pytest.approx(37.5)
    assert [r["n"] for r in d["part_iii"]["rows"]] == [1, 3, 6, 9]
    assert report.part_i.fav_grand_norm == grand_norm(space, Sampled([1, 1, 1, 2, 2, 2]), p, 1.0).value
