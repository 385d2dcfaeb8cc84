import math

import mpmath
import pytest

from fixedkde.elementary import REMEZ_COEFFS_Q62, REMEZ_DEGREE
from fixedkde.errors import ConvergenceError
from fixedkde.remez import PolyApprox, remez_minimax

LN2_HALF = math.log(2) / 2
DOMAIN = (-LN2_HALF, LN2_HALF)


@pytest.fixture(scope="module")
def deg7():
    return remez_minimax("exp", DOMAIN, 7)


def dense_max_error(approx: PolyApprox, points: int = 4001) -> float:
    """Max |p - exp| on an even grid, evaluated in 40-digit arithmetic."""
    lo, hi = (mpmath.mpf(v) for v in approx.domain)
    worst = mpmath.mpf(0)
    with mpmath.workdps(40):
        for k in range(points):
            x = lo + (hi - lo) * k / (points - 1)
            p = mpmath.mpf(0)
            for c in reversed(approx.coefficients):
                p = p * x + c
            worst = max(worst, abs(p - mpmath.exp(x)))
    return float(worst)


def test_degree_one_closed_form():
    # minimax line for e**x on [0, 1]: slope e - 1, touching at ln(e - 1)
    b = math.e - 1
    xs = math.log(b)
    expected = (b - 1 - b * xs) / 2
    approx = remez_minimax("exp", (0.0, 1.0), 1)
    assert float(approx.coefficients[1]) == pytest.approx(b, rel=1e-6)
    assert approx.certified_max_abs_error == pytest.approx(abs(expected), rel=1e-6)


def test_point_domain_gives_constant():
    approx = remez_minimax("exp", (0.0, 0.0), 0)
    assert approx.degree == 0
    assert approx.coefficients[0] == 1
    assert approx.certified_max_abs_error == 0.0


def test_embedded_coefficients_are_reproducible(deg7):
    assert deg7.degree == REMEZ_DEGREE
    assert deg7.q62 == REMEZ_COEFFS_Q62


def test_certified_error_matches_independent_sampling(deg7):
    dense = dense_max_error(deg7)
    assert dense <= deg7.certified_max_abs_error * (1 + 1e-6)
    assert dense >= deg7.certified_max_abs_error * 0.999


def test_degree_7_below_2_34(deg7):
    assert deg7.certified_max_abs_error <= 2.0**-34


def test_equioscillation(deg7):
    assert deg7.equioscillation_points() >= deg7.degree + 2
    signs = [e > 0 for e in deg7.reference_errors]
    assert all(a != b for a, b in zip(signs, signs[1:]))


@pytest.mark.parametrize("degree", [4, 5, 6, 8])
def test_error_shrinks_with_degree(degree):
    lower = remez_minimax("exp", DOMAIN, degree)
    higher = remez_minimax("exp", DOMAIN, degree + 1)
    assert higher.certified_max_abs_error < lower.certified_max_abs_error
    assert lower.equioscillation_points() >= degree + 2


def test_degree_6_error_level():
    # the best possible degree-6 error is about 2**-29, five bits above 2**-34
    approx = remez_minimax("exp", DOMAIN, 6)
    assert 2.0**-30 < approx.certified_max_abs_error < 2.0**-28
    assert approx.equioscillation_points() >= 8


def test_json_layout(deg7):
    obj = deg7.to_json()
    assert set(obj) >= {"degree", "domain", "coefficients", "coefficients_q62", "certified_max_abs_error"}
    assert len(obj["coefficients"]) == len(obj["coefficients_q62"]) == 8
    assert all(isinstance(c, str) for c in obj["coefficients"])
    assert obj["coefficients_q62"] == list(REMEZ_COEFFS_Q62)


def test_bad_arguments():
    with pytest.raises(ValueError):
        remez_minimax("sin", DOMAIN, 3)
    with pytest.raises(ValueError):
        remez_minimax("exp", DOMAIN, -1)
    with pytest.raises(ConvergenceError):
        remez_minimax("exp", DOMAIN, 7, max_iterations=1, tol=1e-30)
