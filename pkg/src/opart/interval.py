"""Arbitrary-precision interval arithmetic with outward (directed) rounding.

Every real quantity the toolkit decides an inequality about lives in a
:class:`CertifiedInterval`.  Endpoints are raw mpmath ``mpf`` tuples; the
basic operations (add, sub, mul, div, sqrt) are correctly rounded by
mpmath in the requested direction, and the transcendental functions are
additionally widened by one unit in the last place as a guard.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Union

import mpmath
from mpmath import libmp
from mpmath.libmp import libmpi

__all__ = [
    "CertifiedInterval",
    "CeilingAmbiguityError",
    "DomainError",
    "Ordering",
    "PrecisionPolicy",
    "DEFAULT_POLICY",
    "certified_ceiling",
    "certified_compare",
    "certify_le",
    "certify_lt",
    "escalate",
    "exact_linear_combination",
    "interval_constant_pi",
    "log_of_big_integer",
    "policy_from_env",
    "working_bits",
]

_FLOOR = libmp.round_floor
_CEIL = libmp.round_ceiling
_ZERO = libmp.fzero
_ONE = libmp.fone
_INF = libmp.finf
_NINF = libmp.fninf

Real = Union[int, Fraction]


class DomainError(ArithmeticError):
    """An interval operation was applied outside its domain."""


class CeilingAmbiguityError(ArithmeticError):
    """Precision escalation could not isolate a unique integer ceiling."""


@dataclass(frozen=True)
class PrecisionPolicy:
    base_bits: int = 128
    escalation_factor: int = 2
    max_bits: int = 1_048_576

    def __post_init__(self):
        if self.base_bits < 1:
            raise ValueError("base_bits must be positive")
        if self.base_bits > self.max_bits:
            raise ValueError("base_bits must not exceed max_bits")
        if self.escalation_factor < 2:
            raise ValueError("escalation_factor must be at least 2")

    def ladder(self, start_bits: int):
        """Yield the precisions tried when escalating from ``start_bits``.

        Always yields at least once, clamped to ``max_bits``.
        """
        bits = min(max(1, start_bits), self.max_bits)
        while bits <= self.max_bits:
            yield bits
            bits *= self.escalation_factor


DEFAULT_POLICY = PrecisionPolicy()


def policy_from_env(policy: PrecisionPolicy = DEFAULT_POLICY) -> PrecisionPolicy:
    """Apply the ``OPART_PRECISION_BITS`` override, if set."""
    raw = os.environ.get("OPART_PRECISION_BITS")
    if not raw:
        return policy
    bits = int(raw)
    return PrecisionPolicy(bits, policy.escalation_factor, max(policy.max_bits, bits))


def working_bits(n: int, r: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    """Starting precision for order-``r`` differences around index ``n``.

    log p(n) grows like pi*sqrt(n) and the r-th difference shrinks like
    n^(1/2 - r), so the budget grows with both.
    """
    n = max(n, 0)
    return (
        policy.base_bits
        + 2 * r
        + math.ceil((r + 1) * math.log2(n + 2))
        + math.ceil(math.log2(math.pi * math.sqrt(n) + 1))
    )


def _is_zero(x) -> bool:
    return x == _ZERO


def _guard_down(x, prec):
    if x in (_ZERO, _INF, _NINF):
        return x
    sign, man, exp, bc = x
    ulp = libmp.from_man_exp(1, exp + bc - prec)
    return libmp.mpf_sub(x, ulp, prec, _FLOOR)


def _guard_up(x, prec):
    if x in (_ZERO, _INF, _NINF):
        return x
    sign, man, exp, bc = x
    ulp = libmp.from_man_exp(1, exp + bc - prec)
    return libmp.mpf_add(x, ulp, prec, _CEIL)


def _to_fraction(x) -> Fraction:
    sign, man, exp, bc = x
    if x in (_INF, _NINF) or x == libmp.fnan:
        raise OverflowError("infinite endpoint has no rational value")
    value = Fraction(int(man)) * (Fraction(2) ** exp)
    return -value if sign else value


def _decimal_string(x, digits: int, rounding) -> str:
    if x == _INF:
        return "inf"
    if x == _NINF:
        return "-inf"
    q = _to_fraction(x)
    ctx = Context(prec=digits, rounding=rounding)
    return str(ctx.divide(Decimal(q.numerator), Decimal(q.denominator)))


@dataclass(frozen=True)
class CertifiedInterval:
    """Closed interval ``[lo, hi]`` of extended reals.

    ``lo`` and ``hi`` are mpmath raw ``mpf`` tuples.  Instances are
    immutable and every operation returns an enclosure of the exact image.
    """

    lo: tuple
    hi: tuple
    precision_bits: int

    def __post_init__(self):
        if self.precision_bits < 1:
            raise ValueError("precision_bits must be positive")
        if libmp.fnan in (self.lo, self.hi):
            raise DomainError("NaN endpoint")
        if libmp.mpf_gt(self.lo, self.hi):
            raise ValueError("interval endpoints out of order")

    # -- construction -----------------------------------------------------

    @classmethod
    def point(cls, value: Real, precision_bits: int) -> "CertifiedInterval":
        """Enclose an exact integer or rational.

        Integers are represented exactly; rationals are rounded outward.
        """
        if isinstance(value, int) and not isinstance(value, bool):
            x = libmp.from_int(value)
            return cls(x, x, precision_bits)
        if isinstance(value, Fraction):
            if value.denominator == 1:
                return cls.point(value.numerator, precision_bits)
            p, q = value.numerator, value.denominator
            return cls(
                libmp.from_rational(p, q, precision_bits, _FLOOR),
                libmp.from_rational(p, q, precision_bits, _CEIL),
                precision_bits,
            )
        raise TypeError(f"unsupported exact value {value!r}")

    @classmethod
    def from_bounds(cls, lo: Real, hi: Real, precision_bits: int) -> "CertifiedInterval":
        a = cls.point(lo, precision_bits)
        b = cls.point(hi, precision_bits)
        return cls(a.lo, b.hi, precision_bits)

    @classmethod
    def hull(cls, *items: "CertifiedInterval") -> "CertifiedInterval":
        lo = items[0].lo
        hi = items[0].hi
        for it in items[1:]:
            if libmp.mpf_lt(it.lo, lo):
                lo = it.lo
            if libmp.mpf_gt(it.hi, hi):
                hi = it.hi
        return cls(lo, hi, max(it.precision_bits for it in items))

    def _coerce(self, other) -> "CertifiedInterval":
        if isinstance(other, CertifiedInterval):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return CertifiedInterval.point(other, self.precision_bits)
        return NotImplemented

    def _wrap(self, pair, prec) -> "CertifiedInterval":
        return CertifiedInterval(pair[0], pair[1], prec)

    def with_precision(self, precision_bits: int) -> "CertifiedInterval":
        """Round the endpoints outward to ``precision_bits``."""
        return CertifiedInterval(
            libmp.mpf_pos(self.lo, precision_bits, _FLOOR),
            libmp.mpf_pos(self.hi, precision_bits, _CEIL),
            precision_bits,
        )

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.precision_bits, other.precision_bits)
        return self._wrap(libmpi.mpi_add((self.lo, self.hi), (other.lo, other.hi), prec), prec)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.precision_bits, other.precision_bits)
        return self._wrap(libmpi.mpi_sub((self.lo, self.hi), (other.lo, other.hi), prec), prec)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return CertifiedInterval(libmp.mpf_neg(self.hi), libmp.mpf_neg(self.lo), self.precision_bits)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.precision_bits, other.precision_bits)
        return self._wrap(libmpi.mpi_mul((self.lo, self.hi), (other.lo, other.hi), prec), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.contains_zero():
            raise DomainError("division by an interval containing 0")
        prec = max(self.precision_bits, other.precision_bits)
        return self._wrap(libmpi.mpi_div((self.lo, self.hi), (other.lo, other.hi), prec), prec)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __abs__(self):
        if libmp.mpf_sign(self.lo) >= 0:
            return self
        if libmp.mpf_sign(self.hi) <= 0:
            return -self
        hi = self.hi if libmp.mpf_ge(self.hi, libmp.mpf_neg(self.lo)) else libmp.mpf_neg(self.lo)
        return CertifiedInterval(_ZERO, hi, self.precision_bits)

    def scale2(self, e: int) -> "CertifiedInterval":
        """Multiply by 2**e (exact)."""
        return CertifiedInterval(libmp.mpf_shift(self.lo, e), libmp.mpf_shift(self.hi, e), self.precision_bits)

    # -- elementary functions --------------------------------------------

    def sqrt(self) -> "CertifiedInterval":
        if libmp.mpf_sign(self.lo) < 0:
            raise DomainError("sqrt of an interval with negative part")
        prec = self.precision_bits
        return CertifiedInterval(
            libmp.mpf_sqrt(self.lo, prec, _FLOOR), libmp.mpf_sqrt(self.hi, prec, _CEIL), prec
        )

    def exp(self) -> "CertifiedInterval":
        prec = self.precision_bits
        lo = _ONE if _is_zero(self.lo) else _guard_down(libmp.mpf_exp(self.lo, prec, _FLOOR), prec)
        hi = _ONE if _is_zero(self.hi) else _guard_up(libmp.mpf_exp(self.hi, prec, _CEIL), prec)
        if libmp.mpf_sign(lo) < 0:
            lo = _ZERO
        return CertifiedInterval(lo, hi, prec)

    def log(self) -> "CertifiedInterval":
        if libmp.mpf_sign(self.lo) <= 0:
            raise DomainError("log of an interval touching or below 0")
        prec = self.precision_bits
        lo = _ZERO if self.lo == _ONE else _guard_down(libmp.mpf_log(self.lo, prec, _FLOOR), prec)
        hi = _ZERO if self.hi == _ONE else _guard_up(libmp.mpf_log(self.hi, prec, _CEIL), prec)
        return CertifiedInterval(lo, hi, prec)

    def log_extended(self) -> "CertifiedInterval":
        """Natural log with log(x) = -inf for x <= 0."""
        if libmp.mpf_sign(self.lo) > 0:
            return self.log()
        prec = self.precision_bits
        if libmp.mpf_sign(self.hi) <= 0:
            return CertifiedInterval(_NINF, _NINF, prec)
        hi = _ZERO if self.hi == _ONE else _guard_up(libmp.mpf_log(self.hi, prec, _CEIL), prec)
        return CertifiedInterval(_NINF, hi, prec)

    def sinh(self) -> "CertifiedInterval":
        # sinh is increasing, so evaluate at each endpoint.
        prec = self.precision_bits
        return CertifiedInterval(_sinh_endpoint(self.lo, prec, _FLOOR), _sinh_endpoint(self.hi, prec, _CEIL), prec)

    def cosh(self) -> "CertifiedInterval":
        prec = self.precision_bits
        if libmp.mpf_sign(self.lo) >= 0:
            a, b = self.lo, self.hi
        elif libmp.mpf_sign(self.hi) <= 0:
            a, b = libmp.mpf_neg(self.hi), libmp.mpf_neg(self.lo)
        else:
            top = self.hi if libmp.mpf_ge(self.hi, libmp.mpf_neg(self.lo)) else libmp.mpf_neg(self.lo)
            return CertifiedInterval(_ONE, _cosh_endpoint(top, prec, _CEIL), prec)
        return CertifiedInterval(_cosh_endpoint(a, prec, _FLOOR), _cosh_endpoint(b, prec, _CEIL), prec)

    def cos_sin(self) -> tuple["CertifiedInterval", "CertifiedInterval"]:
        prec = self.precision_bits
        c, s = libmpi.mpi_cos_sin((self.lo, self.hi), prec)
        return (_clamp_unit(c, prec), _clamp_unit(s, prec))

    def pow_integer(self, k: int) -> "CertifiedInterval":
        if k < 0:
            return 1 / self.pow_integer(-k)
        if k == 0:
            return CertifiedInterval(_ONE, _ONE, self.precision_bits)
        base = abs(self) if k % 2 == 0 else self
        result = None
        sq = base
        while k:
            if k & 1:
                result = sq if result is None else result * sq
            k >>= 1
            if k:
                sq = sq * sq
        return result

    def pow_rational(self, p: int, q: int) -> "CertifiedInterval":
        """``x ** (p/q)`` for a positive interval ``x``."""
        if q <= 0:
            raise ValueError("q must be positive")
        if libmp.mpf_sign(self.lo) <= 0:
            raise DomainError("pow_rational requires a positive base")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q == 1:
            return self.pow_integer(p)
        if q == 2:
            return self.sqrt().pow_integer(p)
        guard = self.precision_bits + 20
        widened = self.with_precision(guard)
        return (widened.log() * Fraction(p, q)).exp().with_precision(self.precision_bits)

    # -- queries ----------------------------------------------------------

    def contains_zero(self) -> bool:
        return libmp.mpf_sign(self.lo) <= 0 <= libmp.mpf_sign(self.hi)

    def contains(self, value) -> bool:
        if isinstance(value, CertifiedInterval):
            return libmp.mpf_le(self.lo, value.lo) and libmp.mpf_ge(self.hi, value.hi)
        if isinstance(value, int) and not isinstance(value, bool):
            x = libmp.from_int(value)
            return libmp.mpf_le(self.lo, x) and libmp.mpf_le(x, self.hi)
        if isinstance(value, Fraction):
            lo_ok = self.lo == _NINF or _to_fraction(self.lo) <= value
            hi_ok = self.hi == _INF or value <= _to_fraction(self.hi)
            return lo_ok and hi_ok
        raise TypeError(f"cannot test containment of {value!r}")

    def is_positive(self) -> bool:
        return libmp.mpf_sign(self.lo) > 0

    def is_negative(self) -> bool:
        return libmp.mpf_sign(self.hi) < 0

    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self):
        """Upper bound on ``hi - lo`` as an mpmath ``mpf``."""
        if self.lo == _NINF or self.hi == _INF:
            return mpmath.inf
        return mpmath.mpf(libmp.mpf_sub(self.hi, self.lo, self.precision_bits + 10, _CEIL))

    def width_log2(self) -> float:
        """log2 of the width, ``-inf`` for a degenerate interval."""
        if self.lo == self.hi:
            return -math.inf
        w = libmp.mpf_sub(self.hi, self.lo, 53, _CEIL)
        if w == _INF:
            return math.inf
        sign, man, exp, bc = w
        return math.log2(man) + exp

    @property
    def mid(self):
        return mpmath.mpf(libmp.mpf_shift(libmp.mpf_add(self.lo, self.hi, self.precision_bits + 2), -1))

    def lo_fraction(self) -> Fraction:
        return _to_fraction(self.lo)

    def hi_fraction(self) -> Fraction:
        return _to_fraction(self.hi)

    def to_decimal_strings(self, digits: int = 30) -> tuple[str, str]:
        """Outward-rounded decimal endpoints (still an enclosure)."""
        return _decimal_string(self.lo, digits, ROUND_FLOOR), _decimal_string(self.hi, digits, ROUND_CEILING)

    def to_json(self, digits: int = 30) -> dict:
        lo, hi = self.to_decimal_strings(digits)
        return {"lo": lo, "hi": hi}

    def __float__(self):
        return libmp.to_float(self.mid._mpf_)

    def __repr__(self):
        lo = libmp.to_str(self.lo, 20)
        hi = libmp.to_str(self.hi, 20)
        return f"CertifiedInterval([{lo}, {hi}], bits={self.precision_bits})"


def _clamp_unit(pair, prec) -> CertifiedInterval:
    lo, hi = pair
    lo = _guard_down(lo, prec)
    hi = _guard_up(hi, prec)
    minus_one = libmp.mpf_neg(_ONE)
    if libmp.mpf_lt(lo, minus_one):
        lo = minus_one
    if libmp.mpf_gt(hi, _ONE):
        hi = _ONE
    return CertifiedInterval(lo, hi, prec)


def _sinh_endpoint(x, prec, rnd):
    if _is_zero(x) or x in (_INF, _NINF):
        return x
    # sinh(x) = (e^x - e^-x)/2; the guard bits absorb cancellation near 0.
    wp = prec + 20 + max(0, -(x[2] + x[3]))
    e = CertifiedInterval(x, x, wp).exp()
    inv = 1 / e
    s = (e - inv).scale2(-1)
    return libmp.mpf_pos(s.lo if rnd == _FLOOR else s.hi, prec, rnd)


def _cosh_endpoint(x, prec, rnd):
    if _is_zero(x):
        return _ONE
    if x in (_INF, _NINF):
        return _INF
    wp = prec + 20
    e = CertifiedInterval(x, x, wp).exp()
    c = (e + 1 / e).scale2(-1)
    return libmp.mpf_pos(c.lo if rnd == _FLOOR else c.hi, prec, rnd)


def exact_linear_combination(coefficients, intervals,
                             precision_bits: Optional[int] = None) -> CertifiedInterval:
    """Enclose ``sum(c_i * x_i)`` for integer ``c_i``.

    Endpoint sums are formed exactly, so the result does not depend on how
    the sum is grouped.  With ``precision_bits`` the result is rounded
    outward once at the end; without it the endpoints stay exact.
    """
    intervals = list(intervals)
    lo = hi = _ZERO
    for c, x in zip(coefficients, intervals):
        if c == 0:
            continue
        cm = libmp.from_int(c)
        a, b = (x.lo, x.hi) if c > 0 else (x.hi, x.lo)
        lo = libmp.mpf_add(lo, libmp.mpf_mul(cm, a), 0)
        hi = libmp.mpf_add(hi, libmp.mpf_mul(cm, b), 0)
    if precision_bits is None:
        return CertifiedInterval(lo, hi, max(x.precision_bits for x in intervals))
    return CertifiedInterval(lo, hi, precision_bits).with_precision(precision_bits)


def interval_constant_pi(precision_bits: int) -> CertifiedInterval:
    lo, hi = libmpi.mpi_pi(precision_bits)
    return CertifiedInterval(_guard_down(lo, precision_bits), _guard_up(hi, precision_bits), precision_bits)


def log_of_big_integer(m: int, precision_bits: int) -> CertifiedInterval:
    """Enclosure of ``ln m`` for an exact integer ``m >= 1``."""
    if m < 1:
        raise DomainError(f"log_of_big_integer needs m >= 1, got {m}")
    return CertifiedInterval.point(m, precision_bits).log()


class Ordering(Enum):
    LESS = "less"
    GREATER = "greater"
    UNDECIDED = "undecided"


def certified_compare(a: CertifiedInterval, b: CertifiedInterval) -> Ordering:
    if libmp.mpf_lt(a.hi, b.lo):
        return Ordering.LESS
    if libmp.mpf_gt(a.lo, b.hi):
        return Ordering.GREATER
    return Ordering.UNDECIDED


def certify_lt(a: CertifiedInterval, b: CertifiedInterval) -> Optional[bool]:
    """Three-valued ``a < b``: True/False when certified, else None."""
    if libmp.mpf_lt(a.hi, b.lo):
        return True
    if libmp.mpf_ge(a.lo, b.hi):
        return False
    return None


def certify_le(a: CertifiedInterval, b: CertifiedInterval) -> Optional[bool]:
    """Three-valued ``a <= b``."""
    if libmp.mpf_le(a.hi, b.lo):
        return True
    if libmp.mpf_gt(a.lo, b.hi):
        return False
    return None


def escalate(evaluate: Callable[[int], Optional[object]], start_bits: int,
             policy: PrecisionPolicy = DEFAULT_POLICY):
    """Run ``evaluate(bits)`` on a doubling ladder until it returns non-None.

    Returns ``(result, bits)``; ``result`` is None when ``max_bits`` was
    reached without a decision.
    """
    bits = start_bits
    for bits in policy.ladder(start_bits):
        result = evaluate(bits)
        if result is not None:
            return result, bits
    return None, bits


def _ceil_mpf(x) -> int:
    return int(libmp.to_int(libmp.mpf_ceil(x)))


def certified_ceiling(x: CertifiedInterval,
                      refine: Optional[Callable[[int], CertifiedInterval]] = None,
                      policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    """Ceiling of the real number enclosed by ``x``.

    ``refine(bits)`` recomputes the enclosure at higher precision; it is
    called on a doubling ladder until the ceiling is unique or
    ``policy.max_bits`` is exhausted.
    """
    current = x
    bits = x.precision_bits
    while True:
        if current.lo in (_NINF, _INF) or current.hi in (_NINF, _INF):
            raise DomainError("ceiling of an unbounded interval")
        lo_ceil = _ceil_mpf(current.lo)
        hi_ceil = _ceil_mpf(current.hi)
        if lo_ceil == hi_ceil:
            return hi_ceil
        bits *= policy.escalation_factor
        if refine is None or bits > policy.max_bits:
            raise CeilingAmbiguityError(
                f"cannot isolate ceiling of {current!r} within {policy.max_bits} bits"
            )
        current = refine(bits)
