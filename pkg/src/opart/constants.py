"""Explicit constants C(r), C1(r), C2(r) and thresholds N0..N3, N for the
order-r difference inequalities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .interval import (
    DEFAULT_POLICY,
    CertifiedInterval,
    PrecisionPolicy,
    certified_ceiling,
    interval_constant_pi,
)

__all__ = [
    "ConstantSet",
    "C",
    "C1",
    "C2",
    "N0",
    "N1",
    "constants_for",
    "pochhammer",
    "pochhammer_half",
]


def pochhammer(alpha: Fraction, j: int) -> Fraction:
    """Rising factorial alpha (alpha+1) ... (alpha+j-1); empty product is 1."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    result = Fraction(1)
    for i in range(j):
        result *= alpha + i
    return result


def pochhammer_half(j: int) -> Fraction:
    return pochhammer(Fraction(1, 2), j)


def C(r: int, precision: int) -> CertifiedInterval:
    """(pi/2) (1/2)_{r-1}; also defined for r = 1 where it is pi/2."""
    if r < 1:
        raise ValueError("r must be positive")
    return interval_constant_pi(precision) * (pochhammer_half(r - 1) / 2)


def C1(r: int, precision: int) -> CertifiedInterval:
    return C(r, precision) * (4 * r * r) + math.factorial(r - 1)


def C2(r: int, precision: int) -> CertifiedInterval:
    pi = interval_constant_pi(precision)
    total = CertifiedInterval.point(Fraction(r, 10**r), precision)
    for k in range(2 * r - 1):
        coeff = pochhammer(Fraction(k + 1, 2), r) / ((k + 1) * r**k)
        total = total + CertifiedInterval.point(coeff, precision) / pi.pow_integer(k + 1)
    return total


def N0(m: int, precision: int) -> CertifiedInterval:
    """1 for m = 1, else 2m log m - m log log m."""
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return CertifiedInterval.point(1, precision)
    log_m = CertifiedInterval.point(m, precision).log()
    return log_m * (2 * m) - log_m.log() * m


def _n1_argument(r: int, precision: int) -> CertifiedInterval:
    pi = interval_constant_pi(precision)
    n0 = N0(2 * r + 2, precision)
    return n0 * n0 * 4 / (pi * pi)


def N1(r: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    """max(85, ceil((4/pi^2) N0(2r+2)^2)); evaluated for any r >= 1."""
    if r < 1:
        raise ValueError("r must be positive")
    bits = policy.base_bits
    return max(85, certified_ceiling(_n1_argument(r, bits), lambda p: _n1_argument(r, p), policy))


def _n2_argument(r: int, precision: int) -> CertifiedInterval:
    q = (C1(r, precision) + 1) / C(r, precision)
    return q * q


def _n3_tail_argument(r: int, precision: int) -> CertifiedInterval:
    q = (C2(r, precision) + 1) * Fraction(2 ** (r + 1), math.factorial(r - 1))
    return q * q


def _n3_root_argument(r: int, precision: int) -> CertifiedInterval:
    c = C(r, precision)
    base = c * c * Fraction(2**r, math.factorial(r - 1))
    if r == 2:
        return base
    return base.pow_rational(1, r - 1)


@dataclass(frozen=True)
class ConstantSet:
    r: int
    C: CertifiedInterval
    C1: CertifiedInterval
    C2: CertifiedInterval
    N1: int
    N2: int
    N3: int
    N: int

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("constant sets are defined for r >= 2")
        if self.N != max(self.N2, self.N3):
            raise ValueError("N must equal max(N2, N3)")
        if not self.C.is_positive():
            raise ValueError("C must be positive")

    def to_json(self, digits: int = 30) -> dict:
        return {
            "r": self.r,
            "C": self.C.to_json(digits),
            "C1": self.C1.to_json(digits),
            "C2": self.C2.to_json(digits),
            "N1": self.N1,
            "N2": self.N2,
            "N3": self.N3,
            "N": self.N,
        }


def constants_for(r: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> ConstantSet:
    """All thresholds for order ``r >= 2`` with certified ceilings."""
    if r < 2:
        raise ValueError("constants_for needs r >= 2")
    bits = policy.base_bits

    def ceil_of(fn):
        return certified_ceiling(fn(r, bits), lambda p: fn(r, p), policy)

    n1 = N1(r, policy)
    n2 = ceil_of(_n2_argument)
    n3 = max(n1, 2 * r * r, ceil_of(_n3_tail_argument), ceil_of(_n3_root_argument))
    return ConstantSet(
        r=r,
        C=C(r, bits),
        C1=C1(r, bits),
        C2=C2(r, bits),
        N1=n1,
        N2=n2,
        N3=n3,
        N=max(n2, n3),
    )
