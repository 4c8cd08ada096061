import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from opart.constants import C, C1, C2, ConstantSet, N0, N1, constants_for, pochhammer, pochhammer_half
from opart.interval import CertifiedInterval


def encloses(iv, x):
    with mpmath.workdps(80):
        return mpmath.mpf(iv.lo) <= x <= mpmath.mpf(iv.hi)


def oracle_constants(r):
    """Plain mpmath evaluation of the threshold arguments, 60 digits."""
    with mpmath.workdps(60):
        pi = mpmath.pi
        poch = lambda a, j: mpmath.rf(a, j)
        c = pi / 2 * poch(mpmath.mpf(1) / 2, r - 1)
        c1 = math.factorial(r - 1) + 4 * r * r * c
        c2 = sum(poch(mpmath.mpf(k + 1) / 2, r) / ((k + 1) * pi ** (k + 1) * r**k) for k in range(2 * r - 1))
        c2 += mpmath.mpf(r) / 10**r
        m = 2 * r + 2
        n0 = 2 * m * mpmath.log(m) - m * mpmath.log(mpmath.log(m))
        n1 = max(85, int(mpmath.ceil(4 / pi**2 * n0**2)))
        n2 = int(mpmath.ceil(((1 + c1) / c) ** 2))
        tail = int(mpmath.ceil((2 ** (r + 1) * (c2 + 1) / math.factorial(r - 1)) ** 2))
        root = int(mpmath.ceil((2**r * c**2 / math.factorial(r - 1)) ** (mpmath.mpf(1) / (r - 1))))
        n3 = max(n1, 2 * r * r, tail, root)
        return dict(C=c, C1=c1, C2=c2, N1=n1, N2=n2, N3=n3, N=max(n2, n3), tail=tail, root=root)


def test_pochhammer_examples():
    assert pochhammer_half(0) == 1
    assert pochhammer_half(1) == Fraction(1, 2)
    assert pochhammer_half(2) == Fraction(3, 4)
    with pytest.raises(ValueError):
        pochhammer(Fraction(1, 2), -1)


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=50), st.integers(0, 12))
def test_pochhammer_matches_gamma_ratio(a, j):
    with mpmath.workdps(50):
        x = mpmath.mpf(a.numerator) / a.denominator
        expected = mpmath.gamma(x + j) / mpmath.gamma(x)
        got = pochhammer(a, j)
        assert abs(mpmath.mpf(got.numerator) / got.denominator / expected - 1) < mpmath.mpf(10) ** -40


def test_n0_examples():
    assert N0(1, 128).contains(1) and N0(1, 128).is_point()
    with mpmath.workdps(60):
        n0_2 = 4 * mpmath.log(2) - 2 * mpmath.log(mpmath.log(2))
        n0_6 = 12 * mpmath.log(6) - 6 * mpmath.log(mpmath.log(6))
    assert encloses(N0(2, 128), n0_2)
    assert abs(float(N0(2, 128)) - 3.50561) < 1e-5
    assert encloses(N0(6, 128), n0_6)
    assert abs(float(N0(6, 128)) - 18.0019) < 1e-4


@pytest.mark.parametrize("r", range(1, 8))
def test_C_values(r):
    with mpmath.workdps(60):
        assert encloses(C(r, 128), mpmath.pi / 2 * mpmath.rf(mpmath.mpf(1) / 2, r - 1))


@pytest.mark.parametrize("r", range(1, 10))
def test_C_ratio(r):
    ratio = C(r + 1, 256) / C(r, 256)
    assert ratio.contains(Fraction(2 * r - 1, 2))


@pytest.mark.parametrize("r", range(2, 7))
def test_constant_enclosures(r):
    ref = oracle_constants(r)
    assert encloses(C1(r, 128), ref["C1"])
    assert encloses(C2(r, 128), ref["C2"])


def test_published_thresholds():
    two = constants_for(2)
    assert (two.N1, two.N2, two.N3, two.N) == (132, 344, 132, 344)
    assert constants_for(3).N == 1486


def test_n3_components_r2():
    ref = oracle_constants(2)
    assert ref["tail"] == 112 and ref["root"] == 3
    assert ref["N3"] == 132


def test_n1_for_first_order():
    assert N1(1) == 85
    with pytest.raises(ValueError):
        N1(0)


@pytest.mark.parametrize("r", range(2, 11))
def test_thresholds_match_oracle(r):
    ref = oracle_constants(r)
    got = constants_for(r)
    assert (got.N1, got.N2, got.N3, got.N) == (ref["N1"], ref["N2"], ref["N3"], ref["N"])
    assert got.N == max(got.N2, got.N3)
    assert got.N3 >= 2 * r * r


def test_constant_set_validation():
    good = constants_for(2)
    with pytest.raises(ValueError):
        ConstantSet(2, good.C, good.C1, good.C2, good.N1, good.N2, good.N3, good.N + 1)
    with pytest.raises(ValueError):
        constants_for(1)


def test_to_json_shape():
    payload = constants_for(2).to_json()
    assert payload["N"] == 344
    assert set(payload) == {"r", "C", "C1", "C2", "N1", "N2", "N3", "N"}
    assert float(payload["C"]["lo"]) <= math.pi / 4 <= float(payload["C"]["hi"])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.fractions(min_value=Fraction(1, 100), max_value=400, max_denominator=1000))
def test_polynomial_exponential_bound(m, x):
    # x^m e^(-x) < 1 once x exceeds N0(m)
    n0 = N0(m, 128)
    if x <= n0.hi_fraction():
        return
    xi = CertifiedInterval.point(x, 128)
    value = xi.pow_integer(m) * (-xi).exp()
    assert value.hi_fraction() < 1
