"""Probability spaces, measurable functions, variable exponents and integration.

Two kinds of probability space are supported:

- :class:`FiniteSpace`: ``N`` atoms with strictly positive weights summing to one.
- :class:`IntervalSpace`: the unit interval with Lebesgue measure, integrated by
  composite Gauss-Legendre quadrature on panels graded geometrically toward
  registered singular points.

Divergent integrals are represented by ``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError

WEIGHT_TOL = 1e-12


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    """Finite atomic probability space.

    Atoms are the integers ``0, ..., N-1``; ``weights[i]`` is the measure of atom ``i``.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        if w.size == 0:
            raise DomainError("finite space needs at least one atom")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DomainError("finite space weights must be strictly positive")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise DomainError(f"weights sum to {w.sum()!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int) -> "FiniteSpace":
        return cls(np.full(n, 1.0 / n))

    @property
    def atom_count(self) -> int:
        return self.weights.size

    def __repr__(self):
        return f"FiniteSpace(atom_count={self.atom_count})"


@dataclass(frozen=True)
class IntervalSpace:
    """The interval (0, 1) with Lebesgue measure.

    Parameters
    ----------
    panels : int
        Target number of quadrature panels over (0, 1).
    nodes_per_panel : int
        Gauss-Legendre nodes per panel.
    grading : float
        Geometric ratio of successive panel widths toward a singular point.
    singular_points : tuple of float
        Points in [0, 1] where integrands may blow up (integrably).
    """

    panels: int = 64
    nodes_per_panel: int = 8
    grading: float = 0.5
    singular_points: tuple = ()

    def __post_init__(self):
        if self.panels < 1:
            raise DomainError("quadrature needs at least one panel")
        if self.nodes_per_panel < 2:
            raise DomainError("quadrature needs at least two nodes per panel")
        if not 0.0 < self.grading < 1.0:
            raise DomainError("grading ratio must lie in (0, 1)")
        pts = tuple(sorted({float(s) for s in self.singular_points}))
        if any(not 0.0 <= s <= 1.0 for s in pts):
            raise DomainError("singular points must lie in [0, 1]")
        object.__setattr__(self, "singular_points", pts)

    def refined(self) -> "IntervalSpace":
        """Same space with twice as many panels."""
        return IntervalSpace(2 * self.panels, self.nodes_per_panel, self.grading, self.singular_points)


ProbabilitySpace = Union[FiniteSpace, IntervalSpace]


# ---------------------------------------------------------------------------
# Functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Sampled:
    """Function given by its values on the atoms of a finite space."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise DomainError("sampled values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __repr__(self):
        return f"Sampled({self.values.tolist()!r})"


@dataclass(frozen=True)
class Power:
    """``x**a`` on (0, 1)."""

    a: float


@dataclass(frozen=True)
class Cosine:
    """``cos(2*pi*k*x)``."""

    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise DomainError("cosine frequency must be a positive integer")


@dataclass(frozen=True)
class Indicator:
    """Indicator of ``[lo, hi)`` inside [0, 1)."""

    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise DomainError(f"indicator interval [{self.lo}, {self.hi}) is not inside [0, 1)")


@dataclass(frozen=True)
class Constant:
    c: float


@dataclass(frozen=True, eq=False)
class Pointwise:
    """Interval function given by a vectorised callable.

    Used for composites such as Birkhoff averages that are only available
    pointwise. ``bounded`` records whether the function is known to be bounded.
    """

    func: Callable[[np.ndarray], np.ndarray]
    label: str = "pointwise"
    breakpoints: tuple = ()
    bounded: bool = False
    kinks: tuple = ()


FunctionRep = Union[Sampled, Power, Cosine, Indicator, Constant, Pointwise]
CATALOG = (Power, Cosine, Indicator, Constant)


def is_bounded(f: FunctionRep) -> bool:
    if isinstance(f, Power):
        return f.a >= 0
    if isinstance(f, Pointwise):
        return f.bounded
    return True


def _check_function(f: FunctionRep, space: ProbabilitySpace) -> None:
    if isinstance(space, FiniteSpace):
        if isinstance(f, Sampled):
            if f.values.size != space.atom_count:
                raise DomainError(
                    f"sampled function has {f.values.size} values, space has {space.atom_count} atoms"
                )
        elif not isinstance(f, Constant):
            raise DomainError(f"{type(f).__name__} is not defined on a finite space")
    else:
        if isinstance(f, Sampled):
            raise DomainError("sampled functions live on finite spaces only")
        if isinstance(f, Power) and f.a < 0 and 0.0 not in space.singular_points:
            raise DomainError("Power with negative exponent needs 0 registered as a singular point")


def evaluate(f: FunctionRep, x, space: ProbabilitySpace | None = None):
    """Evaluate ``f`` at ``x``.

    ``x`` is an atom index (or integer array) for finite spaces and a point
    (or array of points) in (0, 1) for the interval. Returns a float for scalar
    input and an array otherwise.
    """
    if space is not None:
        _check_function(f, space)
    scalar = np.ndim(x) == 0
    if isinstance(f, Sampled):
        idx = np.asarray(x)
        if idx.dtype.kind not in "iu":
            if not np.all(np.equal(np.mod(idx, 1), 0)):
                raise DomainError("sampled functions are only defined at atom indices")
            idx = idx.astype(int)
        if np.any(idx < 0) or np.any(idx >= f.values.size):
            raise DomainError("atom index out of range")
        out = f.values[idx]
    else:
        xs = np.asarray(x, dtype=float)
        if isinstance(f, Constant):
            out = np.full(xs.shape, float(f.c))
        elif isinstance(f, Power):
            if f.a < 0 and np.any(xs == 0):
                raise DomainError("Power with negative exponent evaluated at its singular point 0")
            out = np.power(xs, float(f.a))
        elif isinstance(f, Cosine):
            out = np.cos(2.0 * np.pi * f.k * xs)
        elif isinstance(f, Indicator):
            out = ((xs >= f.lo) & (xs < f.hi)).astype(float)
        elif isinstance(f, Pointwise):
            out = np.asarray(f.func(xs), dtype=float)
        else:
            raise TypeError(f"not a function representation: {f!r}")
    return float(out) if scalar else out


def breakpoints_of(f: FunctionRep) -> tuple:
    """Interior points where ``f`` jumps; quadrature panels are cut there."""
    if isinstance(f, Indicator):
        return tuple(b for b in (f.lo, f.hi) if 0.0 < b < 1.0)
    if isinstance(f, Pointwise):
        return tuple(f.breakpoints)
    return ()


def kinks_of(f: FunctionRep) -> tuple:
    """Sign changes of a continuous ``f``, where ``|f|**q`` is not smooth.

    Quadrature panels are graded toward these points like singular points.
    """
    if isinstance(f, Cosine):
        return tuple((2 * j + 1) / (4 * f.k) for j in range(2 * f.k))
    if isinstance(f, Pointwise):
        return tuple(f.kinks)
    return ()


# ---------------------------------------------------------------------------
# Exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Exponent:
    """Variable exponent ``p(.)`` with cached essential bounds.

    Build with :meth:`constant`, :meth:`piecewise` or :meth:`sampled`.
    ``pieces`` is a tuple of ``(lo, hi, p)`` partitioning [0, 1).
    """

    kind: str
    p: float | None = None
    pieces: tuple = ()
    values: np.ndarray | None = None
    pminus: float = field(init=False)
    pplus: float = field(init=False)

    def __post_init__(self):
        if self.kind == "constant":
            lo = hi = float(self.p)
        elif self.kind == "piecewise":
            pieces = tuple((float(a), float(b), float(q)) for a, b, q in self.pieces)
            if not pieces or pieces[0][0] != 0.0 or pieces[-1][1] != 1.0:
                raise DomainError("exponent pieces must partition [0, 1)")
            for (a0, b0, _), (a1, _, _) in zip(pieces, pieces[1:]):
                if b0 != a1:
                    raise DomainError("exponent pieces must partition [0, 1)")
            if any(b < a for a, b, _ in pieces):
                raise DomainError("exponent piece with hi < lo")
            object.__setattr__(self, "pieces", pieces)
            # essential bounds ignore null pieces
            ps = [q for a, b, q in pieces if b > a]
            lo, hi = min(ps), max(ps)
        elif self.kind == "sampled":
            v = np.array(self.values, dtype=float).ravel()
            v.setflags(write=False)
            object.__setattr__(self, "values", v)
            lo, hi = float(v.min()), float(v.max())
        else:
            raise DomainError(f"unknown exponent kind {self.kind!r}")
        if not math.isfinite(hi):
            raise DomainError("exponent must be bounded (p+ < inf)")
        if not lo > 1.0:
            raise DomainError(f"p- = {lo} but the grand norm needs p- > 1")
        object.__setattr__(self, "pminus", lo)
        object.__setattr__(self, "pplus", hi)

    @classmethod
    def constant(cls, p: float) -> "Exponent":
        return cls("constant", p=float(p))

    @classmethod
    def piecewise(cls, pieces: Sequence) -> "Exponent":
        return cls("piecewise", pieces=tuple(pieces))

    @classmethod
    def sampled(cls, values) -> "Exponent":
        return cls("sampled", values=values)

    @property
    def is_constant(self) -> bool:
        return self.pminus == self.pplus

    def breakpoints(self) -> tuple:
        if self.kind == "piecewise":
            return tuple(a for a, _, _ in self.pieces[1:] if 0.0 < a < 1.0)
        return ()

    def at(self, x):
        """Exponent values at atom indices or interval points."""
        scalar = np.ndim(x) == 0
        if self.kind == "constant":
            out = np.full(np.shape(x), self.p)
        elif self.kind == "sampled":
            out = self.values[np.asarray(x, dtype=int)]
        else:
            edges = np.array([b for _, b, _ in self.pieces[:-1]])
            ps = np.array([q for _, _, q in self.pieces])
            out = ps[np.searchsorted(edges, np.asarray(x, dtype=float), side="right")]
        return float(out) if scalar else out

    def __repr__(self):
        if self.kind == "constant":
            return f"Exponent.constant({self.p})"
        if self.kind == "piecewise":
            return f"Exponent.piecewise({list(self.pieces)})"
        return f"Exponent.sampled({self.values.tolist()})"


def check_exponent(p: Exponent, space: ProbabilitySpace) -> None:
    if isinstance(space, FiniteSpace):
        if p.kind == "piecewise":
            raise DomainError("piecewise exponents live on the interval")
        if p.kind == "sampled" and p.values.size != space.atom_count:
            raise DomainError("sampled exponent length differs from the atom count")
    elif p.kind == "sampled":
        raise DomainError("sampled exponents live on finite spaces")


def exponent_bounds(p: Exponent, space: ProbabilitySpace) -> tuple[float, float]:
    """Essential infimum and supremum ``(p-, p+)`` of ``p`` on ``space``."""
    check_exponent(p, space)
    if not p.pminus > 1.0:
        raise DomainError(f"p- = {p.pminus} but the grand norm needs p- > 1")
    return p.pminus, p.pplus


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Composite Gauss-Legendre rule on (0, 1).

    ``nodes`` and ``weights`` are laid out panel by panel. Each entry of
    ``tails`` is ``(inner, p1, p2, p3)``: the panel touching a singular point
    and the three graded panels next to it, smallest first. Panel widths grow
    by ``growth = 1/grading``, so near the point the panel integrals behave
    like ``A*rho**k + B*growth**k`` (power singularity plus a bounded part).
    The inner panel integral is replaced by the sum of that model over the
    panels it contains, which is exact for ``x**c`` and ``x**c + const``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    panel_count: int
    tails: tuple
    growth: float = 2.0

    def panel_sums(self, values: np.ndarray) -> np.ndarray:
        v = np.asarray(values, dtype=float)
        v = v.reshape(v.shape[:-1] + (self.panel_count, -1))
        w = self.weights.reshape(self.panel_count, -1)
        with np.errstate(invalid="ignore"):
            return np.sum(v * w, axis=-1)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate node values; leading axes are batch axes."""
        sums = self.panel_sums(values)
        if not self.tails:
            return sums.sum(axis=-1)
        sums = sums.copy()
        s = self.growth
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for inner, p1, p2, p3 in self.tails:
                i1, i2, i3 = sums[..., p1], sums[..., p2], sums[..., p3]
                j1 = i2 - s * i1
                j2 = i3 - s * i2
                rho = j2 / j1
                tail = (i1 - j1 / (rho - 1)) / (s - 1)
                # rho <= 1 means a non-integrable trend; keep plain Gauss-Legendre
                # j1 at round-off level: no singular part, plain rule is exact
                ok = np.isfinite(tail) & np.isfinite(rho) & (rho > 1) & (np.abs(j1) > 1e-9 * np.abs(i2))
                sums[..., inner] = np.where(ok, tail, sums[..., inner])
        return sums.sum(axis=-1)


def _graded_edges(a: float, b: float, m: int, ratio: float, toward_a: bool):
    """Panel edges on [a, b] graded toward one end; returns edges and inner index.

    Half of the panels are uniform, the rest shrink geometrically by ``ratio``.
    """
    u = max(1, m // 2)
    g = m - u
    t = [j / u for j in range(1, u + 1)]
    t += [(1.0 / u) * ratio**k for k in range(1, g + 1)]
    t.append(0.0)
    t = sorted(set(t))
    if toward_a:
        return [a + (b - a) * s for s in t], 0
    return [b - (b - a) * s for s in reversed(t)], len(t) - 2


# panels on each side of a graded point: enough geometric panels for the tail model
MIN_GRADED_PANELS = 16


def _inner_points(a, b, left, right):
    # the graded endpoints of a segment, in the order _rule lists their inner panels
    return [p for p, flag in ((a, left), (b, right)) if flag]


@lru_cache(maxsize=256)
def _rule(space: IntervalSpace, extra: tuple, graded: tuple = ()) -> QuadratureRule:
    singular = set(space.singular_points) | set(graded)
    cuts = sorted({0.0, 1.0, *singular, *(e for e in extra if 0.0 < e < 1.0)})
    segments = [(a, b) for a, b in zip(cuts, cuts[1:]) if b > a]
    per = max(2, space.panels // len(segments))
    if graded:
        per = max(per, 2 * MIN_GRADED_PANELS)
    edges: list[float] = []
    tails = []
    for a, b in segments:
        left, right = a in singular, b in singular
        offset = max(len(edges) - 1, 0)
        if left and right:
            mid = 0.5 * (a + b)
            e1, i1 = _graded_edges(a, mid, max(per // 2, 2), space.grading, True)
            e2, i2 = _graded_edges(mid, b, max(per // 2, 2), space.grading, False)
            seg = e1 + e2[1:]
            inner = [i1, len(e1) - 1 + i2]
        elif left or right:
            seg, i = _graded_edges(a, b, per, space.grading, left)
            inner = [i]
        else:
            seg = list(np.linspace(a, b, per + 1))
            inner = []
        widths = np.diff(seg)
        # the tail model is for power singularities; kinks only need grading
        inner = [i for i, at in zip(inner, _inner_points(a, b, left, right)) if at in space.singular_points]
        for i in inner:
            step = 1 if i == 0 or (left and right and i == inner[0]) else -1
            idx = [i + k * step for k in range(4)]
            if min(idx) < 0 or max(idx) >= widths.size:
                continue
            w = widths[idx]
            # the tail model needs truly geometric panels next to the point
            if np.allclose(w[2:] / w[1:3], 1.0 / space.grading, rtol=1e-9):
                tails.append(tuple(offset + j for j in idx))
        edges.extend(seg if not edges else seg[1:])
    e = np.array(edges)
    x, w = np.polynomial.legendre.leggauss(space.nodes_per_panel)
    half = 0.5 * np.diff(e)
    mid = 0.5 * (e[:-1] + e[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, e.size - 1, tuple(tails), 1.0 / space.grading)


def quadrature_rule(
    space: IntervalSpace, breakpoints: Sequence[float] = (), kinks: Sequence[float] = ()
) -> QuadratureRule:
    """Quadrature rule for ``space`` with extra panel cuts.

    ``breakpoints`` are plain cuts (jumps); ``kinks`` are graded like the
    space's singular points.
    """
    def norm(pts):
        return tuple(sorted(set(float(b) for b in pts if 0.0 <= b <= 1.0)))

    return _rule(space, norm(breakpoints), norm(kinks))


def sample_points(space: ProbabilitySpace, breakpoints: Sequence[float] = ()) -> np.ndarray:
    """Atoms of a finite space, or quadrature nodes of the interval."""
    if isinstance(space, FiniteSpace):
        return np.arange(space.atom_count)
    return quadrature_rule(space, breakpoints).nodes


def power_integral(c: float, lo: float = 0.0, hi: float = 1.0) -> float:
    """Exact integral of ``x**c`` over [lo, hi] within [0, 1]; ``inf`` when divergent."""
    if hi <= lo:
        return 0.0
    if lo == 0.0 and c <= -1.0:
        return math.inf
    if c == -1.0:
        return math.log(hi / lo)
    return (hi ** (c + 1) - lo ** (c + 1)) / (c + 1)


def catalog_mean(f: FunctionRep) -> float | None:
    """Exact integral over (0, 1) of a catalog function, or None."""
    if isinstance(f, Constant):
        return float(f.c)
    if isinstance(f, Cosine):
        return 0.0
    if isinstance(f, Indicator):
        return f.hi - f.lo
    if isinstance(f, Power):
        return power_integral(float(f.a))
    return None


def integrate(space: ProbabilitySpace, g, breakpoints: Sequence[float] = ()) -> float:
    """Integral of ``g`` against the measure of ``space``.

    ``g`` is a function representation or a vectorised callable. Finite spaces
    use the exact weighted sum. On the interval a pure :class:`Power` is
    integrated in closed form (``inf`` when divergent); everything else uses
    the graded Gauss-Legendre rule, and is assumed integrable.
    """
    if isinstance(space, FiniteSpace):
        if callable(g) and not isinstance(g, (Sampled, Constant)):
            vals = np.asarray(g(np.arange(space.atom_count)), dtype=float)
        else:
            vals = evaluate(g, np.arange(space.atom_count), space)
        vals = np.broadcast_to(np.asarray(vals, dtype=float), space.weights.shape)
        if not np.all(np.isfinite(vals)):
            return float(np.dot(space.weights, vals))
        # exact rational sum of the float products, rounded once
        return float(sum(Fraction(w) * Fraction(v) for w, v in zip(space.weights.tolist(), vals.tolist())))
    if isinstance(g, Power):
        _check_function(g, space)
        return power_integral(float(g.a))
    if isinstance(g, (Sampled, Power, Cosine, Indicator, Constant, Pointwise)):
        _check_function(g, space)
        rule = quadrature_rule(space, tuple(breakpoints) + breakpoints_of(g), kinks_of(g))
        vals = evaluate(g, rule.nodes)
    else:
        rule = quadrature_rule(space, breakpoints)
        vals = np.asarray(g(rule.nodes), dtype=float)
    return float(rule.integrate(vals))
