"""Closed-form oracles used to validate the numerical paths in tests.

Nothing here calls into :mod:`grandlp.norms` or :mod:`grandlp.dynamics`;
the formulas are evaluated directly with numpy / scipy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .space import Constant, Cosine, Indicator, Power


@dataclass(frozen=True)
class OracleResult:
    value: float
    formula_id: str


def closed_form_shifted_norm(a: float, p0: float, eps: float) -> OracleResult:
    """``||x**a||_{L^q(0,1)}`` with ``q = p0 - eps``: ``(1/(a q + 1))**(1/q)``."""
    q = p0 - eps
    if a * q <= -1:
        return OracleResult(math.inf, "power:divergent")
    return OracleResult((1.0 / (a * q + 1.0)) ** (1.0 / q), "power:(1/(aq+1))^(1/q)")


def _cosine_moment(q):
    # mean of |cos(2 pi k x)|**q over a period: Gamma((q+1)/2) / (sqrt(pi) Gamma(q/2 + 1))
    return np.exp(gammaln((q + 1) / 2) - gammaln(q / 2 + 1) - 0.5 * math.log(math.pi))


def catalog_shifted_norms(f, p0: float, eps) -> np.ndarray:
    """``||f||_{L^(p0 - eps)(0,1)}`` for a catalog function, vectorised over ``eps``."""
    q = p0 - np.asarray(eps, dtype=float)
    if isinstance(f, Constant):
        return np.full(q.shape, abs(f.c))
    if isinstance(f, Indicator):
        return (f.hi - f.lo) ** (1.0 / q)
    if isinstance(f, Cosine):
        return _cosine_moment(q) ** (1.0 / q)
    if isinstance(f, Power):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (1.0 / (f.a * q + 1.0)) ** (1.0 / q)
        return np.where(f.a * q <= -1, np.inf, out)
    raise TypeError(f"no closed form for {f!r}")


def finite_constant_norm(weights, values, p0: float) -> OracleResult:
    """``(sum w_i |f_i|**p0)**(1/p0)`` on a finite space."""
    w = np.asarray(weights, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    m = float(v.max()) if v.size else 0.0
    if m == 0.0:
        return OracleResult(0.0, "finite:zero")
    # factor out max |f| so tiny or huge values neither underflow nor overflow
    return OracleResult(m * float(np.dot(w, (v / m) ** p0) ** (1.0 / p0)), "finite:(sum w|f|^p)^(1/p)")


def brute_force_grand_sup(shifted_norm, pminus: float, theta: float, grid_size: int = 100_000) -> OracleResult:
    """Dense uniform-grid maximum of ``eps**(theta/(pminus - eps)) * shifted_norm(eps)``.

    ``shifted_norm`` maps an array of shifts to norms.
    """
    if grid_size < 100_000:
        raise ValueError("the brute-force oracle needs at least 1e5 grid points")
    d = pminus - 1.0
    eps = d * np.arange(1, grid_size + 1) / (grid_size + 1)
    norms = np.asarray(shifted_norm(eps), dtype=float)
    if np.any(np.isinf(norms)):
        return OracleResult(math.inf, "grid:divergent")
    with np.errstate(invalid="ignore"):
        prod = np.where(norms == 0, 0.0, eps ** (theta / (pminus - eps)) * norms)
    return OracleResult(float(prod.max()), f"grid:uniform[{grid_size}]")


def dirichlet_kernel_average(alpha: float, n: int) -> OracleResult:
    """Amplitude ``|sin(pi n alpha)| / (n |sin(pi alpha)|)`` of ``A_n cos(2 pi .)`` under rotation."""
    s = math.sin(math.pi * alpha)
    if s == 0 or float(alpha).is_integer():
        raise ValueError("sin(pi alpha) = 0: the rotation is trivial")
    return OracleResult(abs(math.sin(math.pi * n * alpha)) / (n * abs(s)), "dirichlet")
