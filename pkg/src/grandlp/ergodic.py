"""Numerical checks of the ergodic theorem in grand variable exponent spaces.

Given a probability space, a measure-preserving map ``T`` and a ``T``-invariant
exponent ``p``, the harness checks

- part (i): ``f_av`` exists and its grand norm does not exceed that of ``f``;
- part (ii): ``f_av o T = f_av`` and ``integral f_av = integral f``;
- the modular contraction ``rho_{p - eps}(f_av) <= rho_{p - eps}(f)``;
- part (iii): ``||f_av - A_n f||_{p(.), theta} -> 0`` for functions in the
  vanishing (closure) subspace.

Each check returns a small record; :func:`run_theorem` assembles them into a
:class:`TheoremReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    FiniteMap,
    apply_map,
    birkhoff_average,
    check_exponent_invariant,
    check_measure_preserving,
    cycles,
    difference,
    exact_limit_average,
)
from .errors import DomainError, HypothesisError
from .norms import GridSpec, VanishingVerdict, grand_norm, modular_curve, vanishing_limit
from .space import (
    Exponent,
    FiniteSpace,
    FunctionRep,
    ProbabilitySpace,
    breakpoints_of,
    evaluate,
    exponent_bounds,
    integrate,
    sample_points,
)

NORM_SLACK = 1e-8
MODULAR_SLACK = 1e-10
FINITE_RESIDUAL_TOL = 1e-10
INTERVAL_RESIDUAL_TOL = 1e-6
ENVELOPE_FLOOR = 1e-6


def default_schedule() -> list[int]:
    return [2**k for k in range(15)]


def default_contraction_grid(pminus: float, points: int = 50) -> np.ndarray:
    d = pminus - 1.0
    return d * np.arange(1, points + 1) / (points + 1)


def check_hypotheses(space: ProbabilitySpace, T, p: Exponent, tol: float = 1e-12):
    """Run both hypothesis checks; raise :class:`HypothesisError` on failure."""
    mp = check_measure_preserving(T, space, tol)
    if not mp:
        raise HypothesisError("measure_preserving", mp.detail or "T does not preserve the measure")
    ei = check_exponent_invariant(T, p, space, tol)
    if not ei:
        raise HypothesisError("exponent_invariant", ei.detail or "p is not T-invariant")
    return mp, ei


@dataclass(frozen=True)
class PartI:
    fav_grand_norm: float
    f_grand_norm: float
    fav_argmax_eps: float
    f_argmax_eps: float
    method: str
    ok: bool


@dataclass(frozen=True)
class PartII:
    invariance_residual: float
    mean_residual: float
    integral_f: float
    integral_fav: float
    tolerance: float
    ok: bool


@dataclass(frozen=True)
class ContractionRow:
    eps: float
    modular_fav: float
    modular_f: float
    ok: bool


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    diff_grand_norm: float
    argmax_eps: float


@dataclass(frozen=True)
class PartIII:
    """Grand norms of ``f_av - A_n f`` along the schedule.

    ``enforced`` is false for functions outside the closure subspace; their
    rows are informational. ``exact_ns`` lists the schedule entries that every
    cycle length divides (finite maps), where the difference must vanish.
    """

    rows: list
    envelope: float
    exact_ns: list
    enforced: bool
    ok: bool


def verify_pointwise_limit(space, f, T, theta, p, grid: GridSpec | None = None) -> PartI:
    """Grand norms of ``f`` and of its limit average ``f_av``."""
    check_hypotheses(space, T, p)
    fav = exact_limit_average(space, f, T)
    gf = grand_norm(space, f, p, theta, grid)
    gav = grand_norm(space, fav.rep, p, theta, grid)
    ok = gav.value <= gf.value + NORM_SLACK
    if math.isfinite(gf.value) and not math.isfinite(gav.value):
        ok = False
    return PartI(gav.value, gf.value, gav.argmax_eps, gf.argmax_eps, fav.method, bool(ok))


def verify_invariance(space, f, T, p) -> PartII:
    """Residuals of ``f_av(T(x)) = f_av(x)`` and ``integral f_av = integral f``."""
    check_hypotheses(space, T, p)
    fav = exact_limit_average(space, f, T).rep
    x = sample_points(space, breakpoints_of(f) + p.breakpoints())
    inv = float(np.max(np.abs(evaluate(fav, apply_map(T, space, x)) - evaluate(fav, x))))
    i_f = integrate(space, f)
    i_av = integrate(space, fav)
    mean = abs(i_av - i_f)
    tol = FINITE_RESIDUAL_TOL if isinstance(space, FiniteSpace) else INTERVAL_RESIDUAL_TOL
    return PartII(inv, mean, i_f, i_av, tol, bool(inv <= tol and mean <= tol))


def verify_modular_contraction(space, f, T, p, eps_grid=None) -> list:
    """Rows ``(eps, rho(f_av), rho(f))`` for shifts inside ``(0, p- - 1)``."""
    check_hypotheses(space, T, p)
    pminus, _ = exponent_bounds(p, space)
    eps = default_contraction_grid(pminus) if eps_grid is None else np.asarray(eps_grid, float)
    if np.any((eps <= 0) | (eps >= pminus - 1)):
        raise DomainError("contraction shifts must lie in the open range (0, p- - 1)")
    fav = exact_limit_average(space, f, T).rep
    lhs = modular_curve(space, fav, p, eps)
    rhs = modular_curve(space, f, p, eps)
    return [
        ContractionRow(float(e), float(a), float(b), bool(a <= b + MODULAR_SLACK))
        for e, a, b in zip(eps, lhs, rhs)
    ]


def boundary_probe(space, f, T, p) -> ContractionRow:
    """The contraction at ``eps = 0``; informational, outside the open range."""
    fav = exact_limit_average(space, f, T).rep
    a = float(modular_curve(space, fav, p, [0.0])[0])
    b = float(modular_curve(space, f, p, [0.0])[0])
    return ContractionRow(0.0, a, b, a <= b + MODULAR_SLACK)


def _exact_ns(space, T, schedule):
    if not isinstance(T, FiniteMap):
        return []
    lengths = {len(c) for c in cycles(T)}
    return [n for n in schedule if all(n % L == 0 for L in lengths)]


def verify_norm_convergence(
    space,
    f,
    T,
    p,
    theta,
    n_schedule=None,
    closure: VanishingVerdict | None = None,
    grid: GridSpec | None = None,
) -> PartIII:
    """Grand norm of ``f_av - A_n f`` for each ``n`` in the schedule.

    For closure members the last row must lie below
    ``max(1e-6, K * C / n_last)`` with ``C`` the grand norm of ``f - f_av``
    (the ``n = 1`` row; computed separately if 1 is not scheduled), and rows at ``n``
    divisible by every cycle length must be exactly 0. ``K`` is 1 except for
    finite maps, where ``K = max(1, L - 1)`` for the longest cycle length
    ``L``: there ``A_n f - f_av`` is ``1/n`` times a sum of at most ``L - 1``
    translates of ``f - f_av``, each with grand norm ``C``.
    """
    check_hypotheses(space, T, p)
    schedule = default_schedule() if n_schedule is None else [int(n) for n in n_schedule]
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])) or schedule[0] < 1:
        raise DomainError("n_schedule must be a strictly increasing list of positive integers")
    if closure is None:
        closure = vanishing_limit(space, f, p, theta)
    fav = exact_limit_average(space, f, T).rep
    rows = []
    for n in schedule:
        diff = difference(fav, birkhoff_average(space, f, T, n), space)
        g = grand_norm(space, diff, p, theta, grid)
        rows.append(ConvergenceRow(n, g.value, g.argmax_eps))
    k = 1
    if isinstance(T, FiniteMap):
        k = max(1, max(len(c) for c in cycles(T)) - 1)
    if schedule[0] == 1:
        c = rows[0].diff_grand_norm
    else:
        c = grand_norm(space, difference(fav, f, space), p, theta, grid).value
    envelope = max(ENVELOPE_FLOOR, k * c / schedule[-1])
    exact = _exact_ns(space, T, schedule)
    ok = rows[-1].diff_grand_norm <= envelope
    ok = ok and all(r.diff_grand_norm == 0.0 for r in rows if r.n in exact)
    return PartIII(rows, envelope, exact, closure.is_member, bool(ok) or not closure.is_member)


@dataclass
class TheoremReport:
    hypothesis_checks: dict
    part_i: PartI
    part_ii: PartII
    contraction: list
    boundary: ContractionRow
    part_iii: PartIII
    closure_member: VanishingVerdict
    theta: float
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "violations": list(self.violations),
            "theta": self.theta,
            "hypothesis_checks": {k: v.as_dict() for k, v in self.hypothesis_checks.items()},
            "part_i": vars(self.part_i),
            "part_ii": vars(self.part_ii),
            "contraction": [vars(r) for r in self.contraction],
            "boundary_probe": vars(self.boundary),
            "part_iii": {
                "rows": [vars(r) for r in self.part_iii.rows],
                "envelope": self.part_iii.envelope,
                "exact_ns": self.part_iii.exact_ns,
                "enforced": self.part_iii.enforced,
                "ok": self.part_iii.ok,
            },
            "closure_member": self.closure_member.as_dict(),
        }


def run_theorem(
    space: ProbabilitySpace,
    f: FunctionRep,
    T,
    p: Exponent,
    theta: float,
    n_schedule=None,
    eps_grid=None,
    grid: GridSpec | None = None,
    vanishing_eps=None,
) -> TheoremReport:
    """Run every check and collect violations.

    Raises :class:`HypothesisError` before any theorem check when ``T`` is not
    measure preserving or ``p`` is not ``T``-invariant.
    """
    if not theta > 0:
        raise DomainError("theta must be positive")
    mp, ei = check_hypotheses(space, T, p)
    closure = vanishing_limit(space, f, p, theta, vanishing_eps)
    part_i = verify_pointwise_limit(space, f, T, theta, p, grid)
    part_ii = verify_invariance(space, f, T, p)
    rows = verify_modular_contraction(space, f, T, p, eps_grid)
    part_iii = verify_norm_convergence(space, f, T, p, theta, n_schedule, closure, grid)

    violations = []
    if not part_i.ok:
        violations.append(
            f"part_i: grand norm of f_av {part_i.fav_grand_norm!r} exceeds that of f {part_i.f_grand_norm!r}"
        )
    if not part_ii.ok:
        violations.append(
            f"part_ii: residuals {part_ii.invariance_residual!r}, {part_ii.mean_residual!r} above {part_ii.tolerance}"
        )
    bad = [r.eps for r in rows if not r.ok]
    if bad:
        violations.append(f"contraction: modular of f_av exceeds that of f at eps {bad}")
    if not part_iii.ok:
        violations.append(
            f"part_iii: final difference {part_iii.rows[-1].diff_grand_norm!r} above envelope {part_iii.envelope!r}"
        )
    return TheoremReport(
        {"measure_preserving": mp, "exponent_invariant": ei},
        part_i,
        part_ii,
        rows,
        boundary_probe(space, f, T, p),
        part_iii,
        closure,
        float(theta),
        violations,
    )
