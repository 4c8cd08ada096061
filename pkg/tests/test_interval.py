import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from opart.interval import (
    CeilingAmbiguityError,
    CertifiedInterval,
    DomainError,
    Ordering,
    PrecisionPolicy,
    certified_ceiling,
    certified_compare,
    certify_le,
    certify_lt,
    exact_linear_combination,
    interval_constant_pi,
    log_of_big_integer,
    policy_from_env,
    working_bits,
)

HP = 300  # decimal digits for the mpmath reference values


def reference(fn):
    with mpmath.workdps(HP):
        return fn()


def encloses(iv: CertifiedInterval, x) -> bool:
    """Compare a high-precision mpf against the exact endpoints."""
    with mpmath.workdps(HP + 50):
        return mpmath.mpf(iv.lo) <= x <= mpmath.mpf(iv.hi)


def point(x, bits=64):
    return CertifiedInterval.point(x, bits)


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=10**6)
positive = st.fractions(min_value=Fraction(1, 1000), max_value=50, max_denominator=10**6)
small = st.fractions(min_value=-8, max_value=8, max_denominator=10**4)


def test_pi_enclosure():
    pi = interval_constant_pi(64)
    assert encloses(pi, reference(lambda: +mpmath.pi))
    assert pi.width_log2() < -60


def test_log_exp_round_trip():
    x = point(1, 256).exp().log()
    assert x.contains(1)
    assert x.width_log2() < -200


def test_exact_special_cases():
    assert point(0).sinh().is_point() and point(0).sinh().contains(0)
    assert point(0).exp().is_point() and point(0).exp().contains(1)
    one = log_of_big_integer(1, 128)
    assert one.is_point() and one.contains(0)


def test_log_of_eight_against_log_two():
    iv = log_of_big_integer(8, 128)
    assert encloses(iv, reference(lambda: 3 * mpmath.log(2)))


def test_log_of_large_count(table_small):
    m = table_small[100]
    iv = log_of_big_integer(m, 128)
    assert iv.width_log2() < -100
    # squeeze with 2^a <= m < 2^b
    a = m.bit_length() - 1
    assert Fraction(a) * Fraction(math.log(2)) * Fraction(999, 1000) < iv.lo_fraction()
    assert encloses(iv, reference(lambda: mpmath.log(m)))


def test_log_domain():
    with pytest.raises(DomainError):
        point(0).log()
    with pytest.raises(DomainError):
        CertifiedInterval.from_bounds(-1, 2, 64).log()
    assert CertifiedInterval.from_bounds(-1, 2, 64).log_extended().lo == mpmath.ninf._mpf_


def test_division_by_zero_interval():
    with pytest.raises(DomainError):
        point(1) / CertifiedInterval.from_bounds(-1, 1, 64)


def test_from_bounds_order():
    with pytest.raises(ValueError):
        CertifiedInterval.from_bounds(2, 1, 64)


@pytest.mark.parametrize(
    "a, b, expected",
    [((1, 2), (3, 4), Ordering.LESS), ((1, 3), (2, 4), Ordering.UNDECIDED),
     ((5, 5), (5, 5), Ordering.UNDECIDED), ((3, 4), (1, 2), Ordering.GREATER)],
)
def test_compare_examples(a, b, expected):
    x = CertifiedInterval.from_bounds(*a, 64)
    y = CertifiedInterval.from_bounds(*b, 64)
    assert certified_compare(x, y) is expected


def test_three_valued_comparisons():
    five = point(5)
    assert certify_lt(five, five) is False
    assert certify_le(five, five) is True
    assert certify_lt(point(1), point(2)) is True
    wide = CertifiedInterval.from_bounds(0, 10, 64)
    assert certify_lt(wide, five) is None


def test_ceiling_examples():
    policy = PrecisionPolicy()
    assert certified_ceiling(point(Fraction(16, 5)), policy=policy) == 4
    assert certified_ceiling(point(5), policy=policy) == 5
    assert certified_ceiling(point(-Fraction(1, 2)), policy=policy) == 0


def test_ceiling_ambiguity():
    straddle = CertifiedInterval.from_bounds(Fraction(9, 10), Fraction(11, 10), 64)
    with pytest.raises(CeilingAmbiguityError):
        certified_ceiling(straddle, lambda bits: straddle, PrecisionPolicy(64, 2, 256))


def test_ceiling_refines():
    target = reference(lambda: mpmath.sqrt(2) * 100)
    calls = []

    def refine(bits):
        calls.append(bits)
        return point(2, bits).sqrt() * 100

    coarse = point(2, 4).sqrt() * 100
    assert certified_ceiling(coarse, refine, PrecisionPolicy(4, 2, 1024)) == math.ceil(target)


def test_precision_policy():
    policy = PrecisionPolicy(128, 2, 1024)
    assert list(policy.ladder(128)) == [128, 256, 512, 1024]
    with pytest.raises(ValueError):
        PrecisionPolicy(0, 2, 1024)
    assert working_bits(2000, 3, policy) > working_bits(100, 1, policy)


def test_policy_from_env(monkeypatch):
    monkeypatch.setenv("OPART_PRECISION_BITS", "200")
    assert policy_from_env().base_bits == 200


def test_exact_linear_combination():
    values = [point(Fraction(1, 3), 64), point(Fraction(2, 3), 64)]
    combo = exact_linear_combination([3, -6], values)
    assert combo.contains(Fraction(-3))
    assert combo.width_log2() < -55


def test_pow_rational():
    iv = point(8, 128).pow_rational(2, 3)
    assert iv.contains(4) and iv.width_log2() < -110
    assert point(9, 128).pow_rational(3, 2).contains(27)


def test_decimal_strings_enclose():
    pi = interval_constant_pi(128)
    lo, hi = pi.to_decimal_strings(20)
    assert mpmath.mpf(lo) <= mpmath.pi <= mpmath.mpf(hi)
    assert lo.startswith("3.14159265358979")


# -- properties -----------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(rationals, rationals)
def test_field_ops_enclose_exact(a, b):
    x, y = point(a), point(b)
    assert (x + y).contains(a + b)
    assert (x - y).contains(a - b)
    assert (x * y).contains(a * b)
    if b != 0:
        assert (x / y).contains(a / b)


@settings(max_examples=100, deadline=None)
@given(small)
def test_transcendentals_enclose(a):
    x = point(a)
    ref = Fraction(a)
    num = reference(lambda: mpmath.mpf(ref.numerator) / ref.denominator)
    assert encloses(x.exp(), reference(lambda: mpmath.exp(num)))
    assert encloses(x.sinh(), reference(lambda: mpmath.sinh(num)))
    assert encloses(x.cosh(), reference(lambda: mpmath.cosh(num)))
    c, s = x.cos_sin()
    assert encloses(c, reference(lambda: mpmath.cos(num)))
    assert encloses(s, reference(lambda: mpmath.sin(num)))


@settings(max_examples=100, deadline=None)
@given(positive)
def test_log_sqrt_enclose(a):
    x = point(a)
    num = reference(lambda: mpmath.mpf(a.numerator) / a.denominator)
    assert encloses(x.log(), reference(lambda: mpmath.log(num)))
    assert encloses(x.sqrt(), reference(lambda: mpmath.sqrt(num)))


@settings(max_examples=50, deadline=None)
@given(positive, st.sampled_from([64, 128, 256]))
def test_refinement_never_widens(a, bits):
    coarse = point(a, bits).log()
    fine = point(a, 2 * bits).log()
    assert fine.width <= coarse.width


@settings(max_examples=100, deadline=None)
@given(rationals, rationals)
def test_compare_antisymmetric(a, b):
    x = CertifiedInterval.from_bounds(min(a, b), max(a, b), 64)
    y = point(b - a)
    flip = {Ordering.LESS: Ordering.GREATER, Ordering.GREATER: Ordering.LESS,
            Ordering.UNDECIDED: Ordering.UNDECIDED}
    assert certified_compare(y, x) is flip[certified_compare(x, y)]


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=10**60))
def test_log_of_big_integer_encloses(m):
    assume(m > 0)
    assert encloses(log_of_big_integer(m, 128), reference(lambda: mpmath.log(m)))
