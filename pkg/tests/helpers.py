"""Random instance generators shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from grandlp import Exponent, FiniteMap, FiniteSpace, Sampled
from grandlp.dynamics import cycles


def random_finite_system(rng, max_atoms=32, p_range=(1.2, 4.0)):
    """Random weight-preserving permutation with a cycle-invariant exponent.

    Weights and exponent values are constant on each cycle so that the
    permutation preserves the measure and the exponent.
    """
    n = int(rng.integers(1, max_atoms + 1))
    T = FiniteMap(rng.permutation(n))
    raw = rng.uniform(0.1, 2.0, size=n)
    pv = np.empty(n)
    for cyc in cycles(T):
        raw[cyc] = raw[cyc[0]]
        pv[cyc] = rng.uniform(*p_range)
    space = FiniteSpace(raw / raw.sum())
    f = Sampled(rng.uniform(-5, 5, size=n) * (rng.random(n) < 0.8))
    return space, f, T, Exponent.sampled(pv)


@st.composite
def finite_instances(draw, max_atoms=12, pairs=False):
    """A finite space, an exponent and one (or two) sampled functions."""
    n = draw(st.integers(1, max_atoms))
    w = np.array(draw(st.lists(st.floats(0.05, 5.0), min_size=n, max_size=n)))
    p = draw(st.lists(st.floats(1.1, 5.0), min_size=n, max_size=n))
    vals = st.lists(st.floats(-100, 100, allow_subnormal=False), min_size=n, max_size=n)
    space = FiniteSpace(w / w.sum())
    out = (space, Exponent.sampled(p), Sampled(draw(vals)))
    if pairs:
        out += (Sampled(draw(vals)),)
    return out


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
