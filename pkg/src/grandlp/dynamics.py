"""Measure-preserving maps, Birkhoff averages and their limits.

Finite spaces use index maps; the interval supports the rotation
``x -> x + alpha mod 1`` and the doubling map ``x -> 2x mod 1``.

Doubling orbits are computed exactly on fractions ``k / DOUBLING_MODULUS``.
In binary floating point every orbit of the doubling map reaches 0 after
about 52 steps, so float seeds are first moved to the nearest such fraction.
The modulus is an odd prime for which 2 is a primitive root, so these orbits
only repeat after ``DOUBLING_MODULUS - 1`` steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .space import (
    Constant,
    Exponent,
    FiniteSpace,
    FunctionRep,
    IntervalSpace,
    Pointwise,
    ProbabilitySpace,
    Sampled,
    _check_function,
    breakpoints_of,
    kinks_of,
    catalog_mean,
    check_exponent,
    evaluate,
    integrate,
    is_bounded,
    sample_points,
)

DOUBLING_MODULUS = 4611686018427387787
_ORBIT_CHUNK = 1024


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True, eq=False)
class FiniteMap:
    """Self-map of ``{0, ..., N-1}`` given by its image list."""

    mapping: np.ndarray

    def __post_init__(self):
        m = np.array(self.mapping, dtype=np.int64).ravel()
        if m.size == 0 or np.any(m < 0) or np.any(m >= m.size):
            raise DomainError("finite map images must lie in {0, ..., N-1}")
        m.setflags(write=False)
        object.__setattr__(self, "mapping", m)

    @property
    def is_bijection(self) -> bool:
        return np.unique(self.mapping).size == self.mapping.size

    def __repr__(self):
        return f"FiniteMap({self.mapping.tolist()})"


@dataclass(frozen=True)
class Rotation:
    """``x -> x + alpha mod 1``.

    ``rational`` is ``(p, q)`` when the caller declares ``alpha = p/q``;
    irrationality cannot be read off a float.
    """

    alpha: float
    rational: tuple | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("rotation angle must lie in (0, 1)")
        if self.rational is not None:
            pq = tuple(int(v) for v in self.rational)
            if len(pq) != 2 or pq[1] <= 0 or abs(pq[0] / pq[1] - self.alpha) > 1e-12:
                raise DomainError("rational flag (p, q) must satisfy p/q == alpha")
            object.__setattr__(self, "rational", pq)


@dataclass(frozen=True)
class Doubling:
    """``x -> 2x mod 1``."""


Transformation = Identity | FiniteMap | Rotation | Doubling

GOLDEN_ROTATION = Rotation((math.sqrt(5.0) - 1.0) / 2.0)


def _check_map(T, space: ProbabilitySpace) -> None:
    if isinstance(T, Identity):
        return
    if isinstance(space, FiniteSpace):
        if not isinstance(T, FiniteMap):
            raise DomainError(f"{type(T).__name__} is not a map of a finite space")
        if T.mapping.size != space.atom_count:
            raise DomainError("finite map size differs from the atom count")
    elif not isinstance(T, (Rotation, Doubling)):
        raise DomainError(f"{type(T).__name__} is not a map of the interval")


def apply_map(T, space: ProbabilitySpace, x):
    """Image ``T(x)`` of an atom index or interval point (scalar or array)."""
    _check_map(T, space)
    if isinstance(T, Identity):
        return x
    if isinstance(T, FiniteMap):
        out = T.mapping[np.asarray(x, dtype=int)]
        return int(out) if np.ndim(x) == 0 else out
    xs = np.asarray(x, dtype=float)
    out = np.mod(xs + T.alpha, 1.0) if isinstance(T, Rotation) else np.mod(2.0 * xs, 1.0)
    return float(out) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Hypothesis checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MapCheck:
    """Verdict of a hypothesis check; truthy when it passed.

    ``worst`` is the atom or probe point with the largest violation and
    ``residual`` that violation.
    """

    ok: bool
    method: str
    residual: float
    worst: float | int | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok

    def as_dict(self):
        return {"ok": self.ok, "method": self.method, "residual": self.residual,
                "worst": self.worst, "detail": self.detail}


def check_measure_preserving(T, space: ProbabilitySpace, tol: float = 1e-12) -> MapCheck:
    """Check ``mu(T^-1(A)) = mu(A)``.

    On a finite space it suffices to compare, for every atom ``y``, the mass
    pushed onto ``y`` with ``mu({y})``. Rotations and the doubling map preserve
    Lebesgue measure; that is certified analytically.
    """
    _check_map(T, space)
    if isinstance(T, Identity):
        return MapCheck(True, "identity", 0.0)
    if isinstance(T, FiniteMap):
        w = space.weights
        pushed = np.bincount(T.mapping, weights=w, minlength=w.size)
        err = np.abs(pushed - w)
        i = int(np.argmax(err))
        ok = bool(err[i] <= tol)
        detail = "" if ok else f"mu(T^-1{{{i}}}) = {float(pushed[i])!r} but mu({{{i}}}) = {float(w[i])!r}"
        return MapCheck(ok, "pushforward", float(err[i]), i, detail)
    return MapCheck(True, "analytic", 0.0, detail=f"{type(T).__name__.lower()} preserves Lebesgue measure")


def check_exponent_invariant(T, p: Exponent, space: ProbabilitySpace, tol: float = 1e-12) -> MapCheck:
    """Check ``p(T(x)) = p(x)`` on atoms, or at quadrature nodes of the interval."""
    _check_map(T, space)
    check_exponent(p, space)
    x = sample_points(space, p.breakpoints())
    err = np.abs(p.at(apply_map(T, space, x)) - p.at(x))
    i = int(np.argmax(err))
    ok = bool(err[i] <= tol)
    worst = int(x[i]) if isinstance(space, FiniteSpace) else float(x[i])
    detail = "" if ok else f"|p(T(x)) - p(x)| = {float(err[i])!r} at x = {worst!r}"
    return MapCheck(ok, "probe", float(err[i]), worst, detail)


# ---------------------------------------------------------------------------
# Orbits and averages
# ---------------------------------------------------------------------------


def cycles(T: FiniteMap) -> list[list[int]]:
    """Cycle decomposition of a bijective finite map."""
    if not T.is_bijection:
        raise DomainError("cycle decomposition needs a bijection")
    m = T.mapping
    seen = np.zeros(m.size, dtype=bool)
    out = []
    for start in range(m.size):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = int(m[i])
        out.append(cyc)
    return out


def _to_lattice(x: np.ndarray) -> np.ndarray:
    k = np.rint(np.asarray(x, dtype=float) * DOUBLING_MODULUS).astype(np.int64)
    return np.clip(k, 1, DOUBLING_MODULUS - 1)


def _orbit_sum(f: FunctionRep, T, x: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape)
    if isinstance(T, Rotation):
        for start in range(0, n, _ORBIT_CHUNK):
            j = np.arange(start, min(n, start + _ORBIT_CHUNK), dtype=float)
            pts = np.mod(x[..., None] + j * T.alpha, 1.0)
            total += evaluate(f, pts).sum(axis=-1)
        return total
    # doubling: exact integer arithmetic on k / DOUBLING_MODULUS
    k = _to_lattice(x)
    for _ in range(n):
        total += evaluate(f, k / DOUBLING_MODULUS)
        k = (2 * k) % DOUBLING_MODULUS
    return total


def orbit(T, space: ProbabilitySpace, x, n: int) -> np.ndarray:
    """The points ``x, T(x), ..., T^(n-1)(x)``."""
    _check_map(T, space)
    if isinstance(T, Doubling):
        k = int(_to_lattice(np.array([x]))[0])
        pts = []
        for _ in range(n):
            pts.append(k / DOUBLING_MODULUS)
            k = 2 * k % DOUBLING_MODULUS
        return np.array(pts)
    if isinstance(T, Rotation):
        return np.mod(x + np.arange(n) * T.alpha, 1.0)
    pts = [x]
    for _ in range(n - 1):
        pts.append(apply_map(T, space, pts[-1]))
    return np.array(pts)


def _cycle_birkhoff(vals: np.ndarray, T: FiniteMap, n: int) -> np.ndarray:
    # Exact rational orbit sums: n = q*L + r on a cycle of length L gives
    # q * (cycle sum) + (sum of the next r values along the orbit).
    out = np.empty(vals.size)
    for cyc in cycles(T):
        L = len(cyc)
        q, r = divmod(n, L)
        fr = [Fraction(float(vals[i])) for i in cyc]
        prefix = [Fraction(0)]
        for v in fr + fr:
            prefix.append(prefix[-1] + v)
        total = prefix[L]
        for pos, i in enumerate(cyc):
            out[i] = float((q * total + prefix[pos + r] - prefix[pos]) / n)
    return out


def birkhoff_average(space: ProbabilitySpace, f: FunctionRep, T, n: int) -> FunctionRep:
    """``A_n f = (1/n) sum_{j<n} f o T^j``.

    Finite spaces give an exact :class:`Sampled` result. On the interval the
    result is a :class:`Pointwise` function evaluated along orbits.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    n = int(n)
    _check_map(T, space)
    _check_function(f, space)
    if n == 1 or isinstance(T, Identity) or isinstance(f, Constant):
        return f
    if isinstance(space, FiniteSpace):
        if T.is_bijection:
            return Sampled(_cycle_birkhoff(f.values, T, n))
        vals = f.values
        idx = np.arange(vals.size)
        total = np.zeros(vals.size)
        for _ in range(n):
            total += vals[idx]
            idx = T.mapping[idx]
        return Sampled(total / n)
    return Pointwise(
        lambda x: _orbit_sum(f, T, x, n) / n,
        label=f"A_{n}[{f!r}]",
        bounded=is_bounded(f),
    )


def compose(f: FunctionRep, T, space: ProbabilitySpace) -> FunctionRep:
    """``f o T``."""
    _check_map(T, space)
    _check_function(f, space)
    if isinstance(T, Identity) or isinstance(f, Constant):
        return f
    if isinstance(space, FiniteSpace):
        return Sampled(f.values[T.mapping])
    return Pointwise(lambda x: evaluate(f, apply_map(T, space, x)), label=f"{f!r} o T",
                     breakpoints=_preimages(T, breakpoints_of(f)), bounded=is_bounded(f),
                     kinks=_preimages(T, kinks_of(f), wrap=False))


def _preimages(T, points, wrap=True) -> tuple:
    """Points of (0, 1) that ``T`` maps onto ``points`` (and onto the wrap point 0)."""
    pts = ((0.0,) if wrap else ()) + tuple(points)
    if isinstance(T, Rotation):
        out = {(b - T.alpha) % 1.0 for b in pts}
    else:
        out = {b / 2.0 for b in pts} | {(b + 1.0) / 2.0 for b in pts}
    return tuple(sorted(x for x in out if 0.0 < x < 1.0))


def difference(f: FunctionRep, g: FunctionRep, space: ProbabilitySpace) -> FunctionRep:
    """``f - g``."""
    _check_function(f, space)
    _check_function(g, space)
    if isinstance(f, Constant) and isinstance(g, Constant):
        return Constant(f.c - g.c)
    if isinstance(space, FiniteSpace):
        x = np.arange(space.atom_count)
        return Sampled(evaluate(f, x) - evaluate(g, x))
    return Pointwise(lambda x: evaluate(f, x) - evaluate(g, x), label=f"{f!r} - {g!r}",
                     bounded=is_bounded(f) and is_bounded(g))


@dataclass(frozen=True)
class LimitAverage:
    """Limit ``f_av`` of the Birkhoff averages and how it was obtained."""

    rep: FunctionRep
    method: str


def exact_limit_average(space: ProbabilitySpace, f: FunctionRep, T) -> LimitAverage:
    """Exact ``f_av = lim A_n f``.

    Finite maps: the weighted mean of ``f`` over each cycle. Irrational
    rotations and the doubling map: the space mean ``integral f dmu`` (almost
    everywhere). Identity: ``f`` itself.
    """
    _check_map(T, space)
    _check_function(f, space)
    if isinstance(T, Identity):
        return LimitAverage(f, "identity")
    if isinstance(T, FiniteMap):
        if isinstance(f, Constant):
            return LimitAverage(f, "cycle_decomposition")
        if not check_measure_preserving(T, space):
            raise DomainError("cycle averages need a measure-preserving finite map")
        w, vals = space.weights, f.values
        out = np.empty(vals.size)
        for cyc in cycles(T):
            # exact rational weighted mean, rounded once
            num = sum(Fraction(float(w[i])) * Fraction(float(vals[i])) for i in cyc)
            out[cyc] = float(num / sum(Fraction(float(w[i])) for i in cyc))
        return LimitAverage(Sampled(out), "cycle_decomposition")
    if isinstance(T, Rotation) and T.rational is not None:
        raise DomainError("rotation by a rational angle is not ergodic; limit average not implemented")
    mean = catalog_mean(f)
    if mean is None:
        mean = integrate(space, f)
    if not math.isfinite(mean):
        raise DomainError("f is not integrable; the limit average does not exist")
    method = "unique_ergodicity" if isinstance(T, Rotation) else "ergodicity"
    return LimitAverage(Constant(mean), method)
