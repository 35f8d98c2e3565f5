import math

import numpy as np
import pytest

from grandlp import (
    Constant,
    Cosine,
    Exponent,
    Indicator,
    IntervalSpace,
    Power,
    birkhoff_average,
    evaluate,
    grand_norm,
    luxemburg_norm,
)
from grandlp.dynamics import GOLDEN_ROTATION, Rotation
from grandlp.reference import (
    brute_force_grand_sup,
    catalog_shifted_norms,
    closed_form_shifted_norm,
    dirichlet_kernel_average,
    finite_constant_norm,
)

SING = IntervalSpace(singular_points=(0.0,))
GOLDEN = (math.sqrt(5) - 1) / 2


# -- oracle examples --------------------------------------------------------

def test_closed_form_examples():
    assert closed_form_shifted_norm(-0.5, 2, 0.5).value == pytest.approx(4 ** (2 / 3), rel=1e-15)
    for p0, eps in [(2, 0), (3, 1.5), (1.5, 0.2)]:
        assert closed_form_shifted_norm(0, p0, eps).value == 1
    assert closed_form_shifted_norm(-0.5, 2, 0).value == math.inf


def test_brute_force_examples():
    one = brute_force_grand_sup(lambda e: np.ones_like(e), 2, 1)
    assert 1 - 1e-5 <= one.value < 1
    pw = brute_force_grand_sup(lambda e: (2 / e) ** (1 / (2 - e)), 2, 1)
    assert 2 - 1e-4 <= pw.value < 2
    assert brute_force_grand_sup(lambda e: np.zeros_like(e), 2, 1).value == 0
    with pytest.raises(ValueError):
        brute_force_grand_sup(lambda e: np.ones_like(e), 2, 1, grid_size=1000)


def test_dirichlet_examples():
    assert dirichlet_kernel_average(GOLDEN, 1).value == pytest.approx(1, rel=1e-15)
    assert dirichlet_kernel_average(0.5, 2).value == pytest.approx(0, abs=1e-15)
    assert dirichlet_kernel_average(GOLDEN, 10_000).value <= 1.1e-4
    with pytest.raises(ValueError):
        dirichlet_kernel_average(1.0, 3)


def test_finite_constant_norm():
    assert finite_constant_norm([0.25] * 4, [2, 0, 0, 0], 2).value == 1.0
    assert finite_constant_norm([0.5, 0.5], [0, 0], 3).value == 0


def test_oracles_reproducible():
    a = catalog_shifted_norms(Cosine(2), 2.5, np.linspace(0.01, 1.4, 50))
    b = catalog_shifted_norms(Cosine(2), 2.5, np.linspace(0.01, 1.4, 50))
    assert np.array_equal(a, b)


# -- agreement with the main path ---------------------------------------------

@pytest.mark.parametrize("a", [-0.9, -0.5, 0.0, 1.0])
@pytest.mark.parametrize("p0", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("eps", [0.0, 0.1, 0.4])
def test_luxemburg_matches_closed_form(a, p0, eps):
    if eps >= p0 - 1:
        pytest.skip("shift outside the grand range")
    exact = closed_form_shifted_norm(a, p0, eps).value
    got = luxemburg_norm(SING, Power(a), Exponent.constant(p0), eps)
    if math.isinf(exact):
        assert got == math.inf
    else:
        assert got == pytest.approx(exact, rel=1e-8)


CATALOG = [Constant(1), Constant(-3.5), Constant(0), Cosine(1), Cosine(4), Indicator(0.1, 0.6),
           Indicator(0.0, 0.05), Power(-0.5), Power(-0.25), Power(0.5), Power(2.0), Power(-0.9)]


@pytest.mark.parametrize("f", CATALOG, ids=repr)
@pytest.mark.parametrize("p0,theta", [(2.0, 1.0), (3.0, 0.5), (1.5, 2.0)])
def test_grand_norm_matches_brute_force(f, p0, theta):
    oracle = brute_force_grand_sup(lambda e: catalog_shifted_norms(f, p0, e), p0, theta)
    got = grand_norm(SING, f, Exponent.constant(p0), theta).value
    if math.isinf(oracle.value):
        assert got == math.inf
    else:
        assert abs(got - oracle.value) <= 1e-3


@pytest.mark.parametrize("f", [Cosine(1), Cosine(3), Indicator(0.2, 0.45)], ids=repr)
@pytest.mark.parametrize("eps", [0.05, 0.5, 1.2])
def test_quadrature_norms_match_closed_form(f, eps):
    got = luxemburg_norm(IntervalSpace(), f, Exponent.constant(2.5), eps)
    assert got == pytest.approx(catalog_shifted_norms(f, 2.5, eps), rel=1e-9)


@pytest.mark.parametrize("alpha", [GOLDEN, math.sqrt(2) - 1, 0.1234567])
@pytest.mark.parametrize("n", [1, 5, 64, 999, 10_000])
def test_birkhoff_amplitude_matches_dirichlet(alpha, n):
    a = birkhoff_average(IntervalSpace(), Cosine(1), Rotation(alpha), n)
    x = np.linspace(0.0, 0.9, 10) + 0.013
    amp = np.hypot(evaluate(a, x), evaluate(a, (x + 0.25) % 1))
    assert np.max(np.abs(amp - dirichlet_kernel_average(alpha, n).value)) <= 1e-10


def test_golden_rotation_constant():
    assert GOLDEN_ROTATION.alpha == GOLDEN
