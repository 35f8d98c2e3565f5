"""Modular, Luxemburg norm, grand variable exponent norm and the vanishing test.

All norms are computed for the shifted exponent ``p(.) - eps``. Internally the
modular of ``f / lam`` is evaluated in log space,

    rho(lam) = integral exp((p(x) - eps) * (log|f(x)| - log lam)) dmu,

so that scaling by ``lam`` never under- or overflows before the sum. The
Luxemburg norm is the root of ``rho(lam) = 1``; it is bracketed by doubling
or halving from ``lam = 1`` and then bisected. Every routine is vectorised
over a batch of shifts so that a whole epsilon grid is solved at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError
from .space import (
    Constant,
    Cosine,
    Exponent,
    FiniteSpace,
    FunctionRep,
    Indicator,
    IntervalSpace,
    Pointwise,
    Power,
    ProbabilitySpace,
    Sampled,
    _check_function,
    breakpoints_of,
    kinks_of,
    evaluate,
    exponent_bounds,
    quadrature_rule,
)

LOG2 = math.log(2.0)
MAX_BRACKET = 1024
MAX_BISECTIONS = 200
MEMBERSHIP_TOL = 1e-6


# ---------------------------------------------------------------------------
# Modular kernels
# ---------------------------------------------------------------------------


class _NodalKernel:
    """Modular from values at atoms or quadrature nodes."""

    def __init__(self, absf, q, weights=None, rule=None):
        with np.errstate(divide="ignore"):
            self.logf = np.log(absf)
        self.q = np.asarray(q, dtype=float)
        self.weights = weights
        self.rule = rule
        self.zero = not np.any(absf > 0)
        qs = np.broadcast_to(self.q, np.shape(absf))[np.asarray(absf) > 0]
        self.qrange = (float(qs.min()), float(qs.max())) if qs.size else (1.0, 1.0)

    def __call__(self, log_lam, eps):
        log_lam = np.asarray(log_lam, dtype=float)[..., None]
        eps = np.asarray(eps, dtype=float)[..., None]
        with np.errstate(over="ignore", invalid="ignore"):
            terms = np.exp((self.q - eps) * (self.logf - log_lam))
        if self.rule is None:
            return terms @ self.weights
        return self.rule.integrate(terms)

    def log_modular(self, log_lam, eps):
        """``log rho(f / lam)`` without overflow; integration is homogeneous."""
        log_lam = np.asarray(log_lam, dtype=float)[..., None]
        eps = np.asarray(eps, dtype=float)[..., None]
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            expo = (self.q - eps) * (self.logf - log_lam)
            top = np.max(expo, axis=-1, keepdims=True)
            terms = np.exp(expo - top)
            total = terms @ self.weights if self.rule is None else self.rule.integrate(terms)
            return np.log(total) + top[..., 0]

    def divergent(self, eps):
        return np.zeros(np.shape(eps), dtype=bool)


class _PiecewisePowerKernel:
    """Exact modular for ``C * x**a`` restricted to pieces of constant exponent.

    Each piece is ``(C, a, lo, hi, p)``; the integrand on it is
    ``(C / lam)**(p - eps) * x**(a * (p - eps))``.
    """

    def __init__(self, pieces):
        pieces = [pc for pc in pieces if pc[0] > 0 and pc[3] > pc[2]]
        arr = np.array(pieces, dtype=float).reshape(-1, 5)
        self.logc = np.log(arr[:, 0])
        self.a, self.lo, self.hi, self.p = arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4]
        self.zero = arr.shape[0] == 0
        self.qrange = (float(self.p.min()), float(self.p.max())) if arr.size else (1.0, 1.0)

    def _segment(self, eps):
        eps = np.asarray(eps, dtype=float)[..., None]
        q = self.p - eps
        c = self.a * q
        lo, hi = np.broadcast_to(self.lo, c.shape), np.broadcast_to(self.hi, c.shape)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.where(
                np.isclose(c, -1.0, rtol=0, atol=1e-14),
                np.log(hi / lo),
                (hi ** (c + 1) - lo ** (c + 1)) / (c + 1),
            )
        out = np.where((lo == 0) & (c <= -1), np.inf, out)
        return q, out

    def __call__(self, log_lam, eps):
        if self.zero:
            return np.zeros(np.shape(eps))
        q, seg = self._segment(eps)
        log_lam = np.asarray(log_lam, dtype=float)[..., None]
        with np.errstate(over="ignore", invalid="ignore"):
            return np.sum(np.exp(q * (self.logc - log_lam)) * seg, axis=-1)

    def log_modular(self, log_lam, eps):
        q, seg = self._segment(eps)
        log_lam = np.asarray(log_lam, dtype=float)[..., None]
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            expo = q * (self.logc - log_lam) + np.log(seg)
            top = np.max(expo, axis=-1, keepdims=True)
            return np.log(np.sum(np.exp(expo - top), axis=-1)) + top[..., 0]

    def divergent(self, eps):
        if self.zero:
            return np.zeros(np.shape(eps), dtype=bool)
        _, seg = self._segment(eps)
        return np.any(np.isinf(seg), axis=-1)


def _pieces_of(p: Exponent):
    if p.kind == "constant":
        return [(0.0, 1.0, p.p)]
    return [pc for pc in p.pieces if pc[1] > pc[0]]


def _kernel(space: ProbabilitySpace, f: FunctionRep, p: Exponent):
    _check_function(f, space)
    exponent_bounds(p, space)
    if isinstance(space, FiniteSpace):
        x = np.arange(space.atom_count)
        return _NodalKernel(np.abs(evaluate(f, x)), p.at(x), weights=space.weights)
    if isinstance(f, Power):
        return _PiecewisePowerKernel([(1.0, f.a, lo, hi, q) for lo, hi, q in _pieces_of(p)])
    if isinstance(f, Constant):
        return _PiecewisePowerKernel([(abs(f.c), 0.0, lo, hi, q) for lo, hi, q in _pieces_of(p)])
    if isinstance(f, Indicator):
        pieces = []
        for lo, hi, q in _pieces_of(p):
            a, b = max(lo, f.lo), min(hi, f.hi)
            if b > a:
                pieces.append((1.0, 0.0, a, b, q))
        return _PiecewisePowerKernel(pieces)
    if isinstance(f, (Cosine, Pointwise)):
        rule = quadrature_rule(space, p.breakpoints() + breakpoints_of(f), kinks_of(f))
        return _NodalKernel(np.abs(evaluate(f, rule.nodes)), p.at(rule.nodes), rule=rule)
    raise TypeError(f"not a function representation: {f!r}")


def _check_shift(eps, pminus):
    e = np.asarray(eps, dtype=float)
    bad = (e != 0) & ~((e > 0) & (e < pminus - 1))
    if np.any(bad) or np.any(e < 0):
        raise DomainError(f"eps shift must be 0 or lie in (0, {pminus - 1}); got {eps}")


# ---------------------------------------------------------------------------
# Modular and Luxemburg norm
# ---------------------------------------------------------------------------


def modular(space: ProbabilitySpace, f: FunctionRep, p: Exponent, eps_shift: float = 0.0) -> float:
    """Integral of ``|f(x)|**(p(x) - eps_shift)``; ``inf`` when divergent."""
    _check_shift(eps_shift, p.pminus)
    k = _kernel(space, f, p)
    return float(k(0.0, eps_shift))


def modular_curve(space, f, p, eps) -> np.ndarray:
    """Modular of ``f`` at each shift in ``eps``."""
    eps = np.asarray(eps, dtype=float)
    _check_shift(eps, p.pminus)
    k = _kernel(space, f, p)
    return np.asarray(k(np.zeros_like(eps), eps), dtype=float)


def _power_of_two_bracket(kernel, e):
    """Smallest integer ``k`` per shift with ``rho(f / 2**k) <= 1``, by doubling/halving from 1."""
    k = np.zeros(e.shape, dtype=int)
    above = kernel(k * LOG2, e) > 1.0
    k[~above] -= 1
    todo = np.ones(e.shape, dtype=bool)
    for _ in range(2 * MAX_BRACKET + 2):
        m = kernel(k * LOG2, e) > 1.0
        # rho(2**k) <= 1 is required; rho(2**(k-1)) > 1 also, for descending starts
        step_up = todo & above & m
        step_down = todo & ~above & ~m
        todo = step_up | step_down
        if not todo.any():
            break
        k[step_up] += 1
        k[step_down] -= 1
        if np.any(np.abs(k) > MAX_BRACKET):
            raise ConvergenceError("Luxemburg bracket left [2**-1024, 2**1024]")
    k[~above] += 1
    if np.any(np.abs(k) > MAX_BRACKET):
        raise ConvergenceError("Luxemburg bracket left [2**-1024, 2**1024]")
    return k


def _solve_norms(kernel, eps: np.ndarray, rel_tol: float, guess=None) -> np.ndarray:
    """Luxemburg norms of the kernel's function at each shift in ``eps``.

    Works with ``g(t) = log rho(f / e**t)``, decreasing in ``t`` with slope
    between ``-(q_max - eps)`` and ``-(q_min - eps)``. The value at
    ``t0 = log(guess)`` (default ``lam = 1``) therefore brackets the root; a
    bracket that fails to verify falls back to doubling/halving from
    ``lam = 1``. The bracket is then shrunk to relative width ``rel_tol``.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    out = np.zeros(eps.shape)
    if kernel.zero:
        return out
    div = kernel.divergent(eps)
    out[div] = np.inf
    live = np.flatnonzero(~div)
    if live.size == 0:
        return out
    e = eps[live]
    qmin, qmax = kernel.qrange[0] - e, kernel.qrange[1] - e

    g = kernel.log_modular
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t0 = np.zeros(e.shape)
        if guess is not None:
            t0 = np.log(np.broadcast_to(np.asarray(guess, dtype=float), eps.shape)[live])
            t0 = np.where(np.isfinite(t0), t0, 0.0)
        g0 = g(t0, e)
        pos = g0 > 0
        tl = t0 + np.where(pos, g0 / qmax, g0 / qmin)
        th = t0 + np.where(pos, g0 / qmin, g0 / qmax)
        slack = 1e-12 * (1.0 + np.abs(g0) + np.abs(t0))
        tl, th = tl - slack, th + slack
        both = g(np.concatenate([tl, th]), np.concatenate([e, e]))
        gl, gh = both[: e.size], both[e.size:]
        bad = ~(np.isfinite(tl) & np.isfinite(th) & (gl > 0) & ~(gh > 0))
        if bad.any():
            k = _power_of_two_bracket(kernel, e[bad])
            tl[bad], th[bad] = (k - 1) * LOG2, k * LOG2
            gl[bad] = g(tl[bad], e[bad])
            gh[bad] = g(th[bad], e[bad])

        # false position (Illinois variant); g is close to linear in t. A
        # bisection step replaces any unusable secant step.
        width = -math.log1p(-rel_tol)
        pad = 0.25 * width
        side = np.zeros(e.shape, dtype=int)
        for _ in range(MAX_BISECTIONS):
            active = th - tl > width
            if not active.any():
                break
            t = th - gh * (th - tl) / (gh - gl)
            usable = np.isfinite(t) & (t > tl) & (t < th) & (np.abs(side) < 3)
            t = np.where(usable, t, 0.5 * (tl + th))
            # keep probes off the ends so the bracket closes from both sides
            t = np.minimum(np.maximum(t, tl + pad), th - pad)
            gt = g(t, e)
            up = active & (gt > 0)
            down = active & ~(gt > 0)
            # Illinois: halve the stale end's value when the same end moves twice
            gh = np.where(up & (side > 0), 0.5 * gh, gh)
            gl = np.where(down & (side < 0), 0.5 * gl, gl)
            tl, gl = np.where(up, t, tl), np.where(up, gt, gl)
            th, gh = np.where(down, t, th), np.where(down, gt, gh)
            # count repeated moves of one end; three in a row forces a bisection
            side = np.where(up, np.where(side > 0, side + 1, 1),
                            np.where(down, np.where(side < 0, side - 1, -1), side))
            side = np.where(np.abs(side) > 3, 0, side)
        else:
            raise ConvergenceError("Luxemburg bisection exceeded its iteration cap")
    out[live] = 0.5 * (np.exp(tl) + np.exp(th))
    return out


def _check_rel_tol(rel_tol):
    if not 0 < rel_tol <= 1e-3:
        raise DomainError("rel_tol must lie in (0, 1e-3]")


def luxemburg_norm(
    space: ProbabilitySpace,
    f: FunctionRep,
    p: Exponent,
    eps_shift: float = 0.0,
    rel_tol: float = 1e-10,
) -> float:
    """Luxemburg norm ``inf{lam > 0 : rho_{p - eps}(f / lam) <= 1}``.

    Returns 0 for the zero function and ``inf`` when the modular diverges for
    every ``lam`` (detected analytically for catalog functions).
    """
    _check_rel_tol(rel_tol)
    _check_shift(eps_shift, p.pminus)
    return float(_solve_norms(_kernel(space, f, p), np.array([eps_shift]), rel_tol)[0])


def shifted_norms(space, f, p, eps, rel_tol: float = 1e-10) -> np.ndarray:
    """Luxemburg norms ``||f||_{p(.) - eps}`` for an array of shifts."""
    _check_rel_tol(rel_tol)
    eps = np.asarray(eps, dtype=float)
    _check_shift(eps, p.pminus)
    return _solve_norms(_kernel(space, f, p), eps, rel_tol)


# ---------------------------------------------------------------------------
# Grand norm
# ---------------------------------------------------------------------------


def grand_weight(eps, pminus: float, theta: float):
    """``eps**(theta / (pminus - eps))`` for ``0 < eps < pminus - 1``."""
    if not theta > 0:
        raise DomainError("theta must be positive")
    e = np.asarray(eps, dtype=float)
    if np.any(~((e > 0) & (e < pminus - 1))):
        raise DomainError(f"eps must lie in (0, {pminus - 1})")
    w = e ** (theta / (pminus - e))
    return float(w) if np.ndim(eps) == 0 else w


@dataclass(frozen=True)
class GridSpec:
    """Epsilon grid for the grand-norm supremum.

    ``n_geometric`` points spaced geometrically from ``edge * d`` and
    ``n_uniform`` points spaced uniformly up to ``(1 - edge) * d``, where
    ``d = p- - 1``; the best points are then refined by golden-section search
    until the bracket is narrower than ``golden_tol``.
    """

    n_geometric: int = 64
    n_uniform: int = 64
    edge: float = 1e-6
    golden_tol: float = 1e-8
    refine_peaks: int = 3

    def doubled(self) -> "GridSpec":
        return GridSpec(2 * self.n_geometric - 1, 2 * self.n_uniform - 1, self.edge,
                        self.golden_tol, self.refine_peaks)

    def points(self, pminus: float) -> np.ndarray:
        d = pminus - 1.0
        geo = np.geomspace(self.edge * d, (1 - self.edge) * d, self.n_geometric)
        uni = np.linspace(self.edge * d, (1 - self.edge) * d, self.n_uniform)
        return np.unique(np.concatenate([geo, uni]))


@dataclass(frozen=True)
class GrandNormEstimate:
    """Grid estimate of the grand norm; a lower bound for the supremum.

    ``samples`` holds ``(eps, weight, shifted_norm, product)`` for every
    evaluated shift, grid and refinement points alike.
    """

    value: float
    argmax_eps: float
    samples: list
    theta: float
    grid_spec: GridSpec

    def as_dict(self):
        return {
            "value": self.value,
            "argmax_eps": self.argmax_eps,
            "theta": self.theta,
            "grid": vars(self.grid_spec),
            "samples": [list(s) for s in self.samples],
        }


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fun, a, b, tol):
    """Golden-section searches for maxima on the open intervals ``(a[i], b[i])``.

    The searches run in lockstep; ``fun`` maps an array of points to values.
    """
    a, b = np.array(a, dtype=float), np.array(b, dtype=float)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    while True:
        live = b - a >= tol
        if not live.any():
            break
        left = fc >= fd
        # left: keep (a, d); right: keep (c, b)
        nb = np.where(left, d, b)
        na = np.where(left, a, c)
        keep = np.where(left, c, d)
        fkeep = np.where(left, fc, fd)
        probe = np.where(left, nb - _INVPHI * (nb - na), na + _INVPHI * (nb - na))
        fprobe = np.full(a.shape, -np.inf)
        fprobe[live] = fun(probe[live])
        nc = np.where(left, probe, keep)
        nd = np.where(left, keep, probe)
        nfc = np.where(left, fprobe, fkeep)
        nfd = np.where(left, fkeep, fprobe)
        a, b = np.where(live, na, a), np.where(live, nb, b)
        c, d = np.where(live, nc, c), np.where(live, nd, d)
        fc, fd = np.where(live, nfc, fc), np.where(live, nfd, fd)


def grand_norm(
    space: ProbabilitySpace,
    f: FunctionRep,
    p: Exponent,
    theta: float,
    grid: GridSpec | None = None,
    rel_tol: float = 1e-10,
) -> GrandNormEstimate:
    """Grand norm ``sup_{0 < eps < p- - 1} eps**(theta/(p- - eps)) * ||f||_{p(.) - eps}``."""
    if not theta > 0:
        raise DomainError("theta must be positive")
    grid = grid or GridSpec()
    pminus, _ = exponent_bounds(p, space)
    kernel = _kernel(space, f, p)
    d = pminus - 1.0

    eps = grid.points(pminus)
    norms = _solve_norms(kernel, eps, rel_tol)
    weights = grand_weight(eps, pminus, theta)
    with np.errstate(invalid="ignore"):
        prods = np.where(norms == 0, 0.0, weights * norms)
    samples = list(zip(eps.tolist(), weights.tolist(), norms.tolist(), prods.tolist()))

    if np.any(np.isinf(norms)):
        i = int(np.flatnonzero(np.isinf(norms))[-1])
        return GrandNormEstimate(math.inf, float(eps[i]), samples, theta, grid)

    if np.any(prods > 0):
        extra = []

        log_norms = np.log(norms)

        def fun(e):
            # warm start from the grid norms, interpolated in log space
            n = _solve_norms(kernel, e, rel_tol, np.exp(np.interp(e, eps, log_norms)))
            w = grand_weight(e, pminus, theta)
            v = w * n
            extra.extend(zip(e.tolist(), w.tolist(), n.tolist(), v.tolist()))
            return v

        # local maxima of the grid, best first
        padded = np.concatenate([[-np.inf], prods, [-np.inf]])
        peaks = np.flatnonzero((padded[1:-1] >= padded[:-2]) & (padded[1:-1] >= padded[2:]))
        peaks = peaks[np.argsort(-prods[peaks], kind="stable")][: grid.refine_peaks]
        # one search per side of each peak; the edge brackets (0, eps[0])
        # and (eps[-1], d) then do not depend on the grid density
        lo, hi = [], []
        for i in peaks:
            lo += [eps[i - 1] if i > 0 else 0.0, eps[i]]
            hi += [eps[i], eps[i + 1] if i + 1 < eps.size else d]
        _golden_max(fun, lo, hi, grid.golden_tol)
        samples.extend(extra)

    best = max(range(len(samples)), key=lambda j: samples[j][3])
    return GrandNormEstimate(float(samples[best][3]), float(samples[best][0]), samples, theta, grid)


# ---------------------------------------------------------------------------
# Closure (vanishing) subspace
# ---------------------------------------------------------------------------


def default_vanishing_sequence(pminus: float, terms: int = 40) -> np.ndarray:
    k = np.arange(1, terms + 1)
    return 2.0 ** (-k) * (pminus - 1.0) / 2.0


@dataclass(frozen=True)
class VanishingVerdict:
    """Outcome of the test ``lim_{eps -> 0} eps**(theta/(p- - eps)) ||f||_{p - eps} = 0``.

    ``status`` is one of ``"decay"`` (power-law decay to 0), ``"plateau"``
    (the tail has settled on a value), ``"divergent"`` (norms become infinite)
    or ``"nonconvergent"``. ``is_member`` is only true for converged traces
    whose limit is within ``MEMBERSHIP_TOL`` of 0.
    """

    limit_estimate: float
    is_member: bool
    trace: list
    converged: bool
    status: str

    def as_dict(self):
        return {
            "limit_estimate": self.limit_estimate,
            "is_member": self.is_member,
            "converged": self.converged,
            "status": self.status,
            "trace": [list(t) for t in self.trace],
        }


def _tail_verdict(eps, vals):
    """Classify the last three trace values."""
    e3, v3 = eps[-3:], vals[-3:]
    if np.all(v3 == 0):
        return 0.0, True, "decay"
    if np.all(v3 > 0):
        slopes = np.diff(np.log(v3)) / np.diff(np.log(e3))
        # consistent positive log-log slope: value ~ C * eps**s with s > 0
        if np.all(slopes > 0) and abs(slopes[0] - slopes[1]) <= 0.1 * max(slopes):
            return 0.0, True, "decay"
        if v3.max() <= 1.1 * v3.min():
            return float(vals[-1]), True, "plateau"
    return float(vals[-1]), False, "nonconvergent"


def vanishing_limit(
    space: ProbabilitySpace,
    f: FunctionRep,
    p: Exponent,
    theta: float,
    eps_sequence=None,
    rel_tol: float = 1e-10,
) -> VanishingVerdict:
    """Estimate the weighted shifted norm as ``eps -> 0`` and decide closure membership."""
    if not theta > 0:
        raise DomainError("theta must be positive")
    pminus, _ = exponent_bounds(p, space)
    eps = default_vanishing_sequence(pminus) if eps_sequence is None else np.asarray(eps_sequence, float)
    if eps.size < 3 or np.any(np.diff(eps) >= 0):
        raise DomainError("eps sequence must be strictly decreasing with at least 3 terms")
    norms = _solve_norms(_kernel(space, f, p), eps, rel_tol)
    w = grand_weight(eps, pminus, theta)
    with np.errstate(invalid="ignore"):
        vals = np.where(norms == 0, 0.0, w * norms)
    trace = list(zip(eps.tolist(), vals.tolist()))

    inf = np.isinf(vals)
    if inf.any():
        first = int(np.flatnonzero(inf)[0])
        if inf[first:].all():
            return VanishingVerdict(math.inf, False, trace, True, "divergent")
        return VanishingVerdict(float(vals[-1]), False, trace, False, "nonconvergent")
    limit, converged, status = _tail_verdict(eps, vals)
    member = converged and limit <= MEMBERSHIP_TOL
    return VanishingVerdict(limit, member, trace, converged, status)
