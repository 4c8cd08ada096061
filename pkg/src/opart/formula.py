"""Zuckerman's series for overpartitions, Engel's tail bound, and the
main-term split p(n) = T(n) * (1 + e(n)).

The multiplier omega(h, k) is carried as an exact rational phase; all
complex exponentials are reduced to cosines and sines of rational
multiples of pi before any rounding happens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .counts import OverpartitionTable
from .interval import CertifiedInterval, DomainError, interval_constant_pi

__all__ = [
    "FormulaContext",
    "InconsistencyError",
    "OmegaPhase",
    "e_hat",
    "e_hat_bound",
    "engel_error_bound",
    "main_term_T",
    "multiplier_phase",
    "omega_phase",
    "shnk_derivative",
    "zuckerman_truncated",
]


class InconsistencyError(ArithmeticError):
    """A quantity that must be real came out with a certified imaginary part."""


def _reduce_mod2(t: Fraction) -> Fraction:
    """Representative of t modulo 2 in (-1, 1]."""
    t = t - 2 * math.floor(t / 2)
    return t - 2 if t > 1 else t


@dataclass(frozen=True)
class OmegaPhase:
    """omega(h, k) = exp(pi * i * numerator / denominator), in lowest terms."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        if math.gcd(self.numerator, self.denominator) != 1:
            raise ValueError("phase must be in lowest terms")

    @property
    def turns(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def conjugate(self) -> "OmegaPhase":
        t = _reduce_mod2(-self.turns)
        return OmegaPhase(t.numerator, t.denominator)


def _dedekind_sum(h: int, k: int) -> Fraction:
    # sum_{r=1}^{k-1} (r/k) * ((hr mod k)/k - 1/2), over the common denominator 2k^2
    total = 0
    for r in range(1, k):
        total += r * (2 * (h * r % k) - k)
    return Fraction(total, 2 * k * k)


def omega_phase(h: int, k: int) -> OmegaPhase:
    """Exact phase of omega(h, k), reduced into (-1, 1]."""
    if k < 1:
        raise ValueError("k must be positive")
    if not 0 <= h < k:
        raise ValueError(f"h must satisfy 0 <= h < k, got h={h}, k={k}")
    if math.gcd(h, k) != 1:
        raise ValueError(f"gcd({h}, {k}) != 1")
    t = _reduce_mod2(_dedekind_sum(h, k))
    return OmegaPhase(t.numerator, t.denominator)


def multiplier_phase(h: int, k: int, n: int) -> Fraction:
    """Phase t with omega(h,k)^2 / omega(2h,k) * exp(-2 pi i n h / k) = exp(pi i t)."""
    if k % 2 == 0:
        raise ValueError("only odd k enter the overpartition series")
    t = 2 * omega_phase(h, k).turns - omega_phase(2 * h % k, k).turns - Fraction(2 * n * h, k)
    return _reduce_mod2(t)


@dataclass(frozen=True)
class FormulaContext:
    n: int
    N: int
    precision_bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.N < 1:
            raise ValueError("truncation level N must be positive")
        if self.precision_bits < 1:
            raise ValueError("precision_bits must be positive")

    def mu(self) -> CertifiedInterval:
        """pi * sqrt(n)."""
        return mu_hat(self.n, self.precision_bits)

    @property
    def moduli(self) -> range:
        return range(1, self.N + 1, 2)


def mu_hat(n: int, precision: int) -> CertifiedInterval:
    return interval_constant_pi(precision) * CertifiedInterval.point(n, precision).sqrt()


def shnk_derivative(n: int, k: int, precision: int) -> CertifiedInterval:
    """d/dn [sinh(pi sqrt(n)/k) / sqrt(n)] in closed form.

    (pi/(2kn)) cosh(pi sqrt(n)/k) - sinh(pi sqrt(n)/k) / (2 n^(3/2))
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    # The two terms cancel to O(k^-3) for large k; give the guard bits room.
    wp = precision + 20 + 3 * max(0, k.bit_length())
    pi = interval_constant_pi(wp)
    root = CertifiedInterval.point(n, wp).sqrt()
    x = pi * root / k
    first = pi * x.cosh() / (2 * k * n)
    second = x.sinh() / (root * (2 * n))
    return (first - second).with_precision(precision)


def _zuckerman_parts(ctx: FormulaContext) -> tuple[CertifiedInterval, CertifiedInterval]:
    prec = ctx.precision_bits
    pi = interval_constant_pi(prec)
    real = CertifiedInterval.point(0, prec)
    imag = CertifiedInterval.point(0, prec)
    for k in ctx.moduli:
        a_re = CertifiedInterval.point(0, prec)
        a_im = CertifiedInterval.point(0, prec)
        for h in range(k):
            if math.gcd(h, k) != 1:
                continue
            t = multiplier_phase(h, k, ctx.n)
            if t == 0:
                a_re = a_re + 1
                continue
            c, s = (pi * t).cos_sin()
            a_re = a_re + c
            a_im = a_im + s
        weight = CertifiedInterval.point(k, prec).sqrt() * shnk_derivative(ctx.n, k, prec)
        real = real + a_re * weight
        imag = imag + a_im * weight
    two_pi = pi * 2
    return real / two_pi, imag / two_pi


def zuckerman_truncated(ctx: FormulaContext) -> CertifiedInterval:
    """Enclosure of the Zuckerman series truncated to odd k <= N."""
    real, imag = _zuckerman_parts(ctx)
    if not imag.contains_zero():
        raise InconsistencyError(f"imaginary part {imag!r} excludes 0 at n={ctx.n}, N={ctx.N}")
    return real


def engel_error_bound(n: int, N: int, precision: int) -> CertifiedInterval:
    """N^(5/2) / (pi n^(3/2)) * sinh(pi sqrt(n) / N)."""
    if n < 1 or N < 1:
        raise ValueError("n and N must be positive")
    pi = interval_constant_pi(precision)
    n_i = CertifiedInterval.point(n, precision)
    N_i = CertifiedInterval.point(N, precision)
    scale = N_i.pow_rational(5, 2) / (pi * n_i.pow_rational(3, 2))
    return scale * (pi * n_i.sqrt() / N).sinh()


def main_term_T(n: int, precision: int) -> CertifiedInterval:
    """(1/(8n)) (1 - 1/mu) e^mu with mu = pi sqrt(n)."""
    if n < 1:
        raise ValueError("n must be positive")
    mu = mu_hat(n, precision)
    return (1 - 1 / mu) * mu.exp() / (8 * n)


def e_hat(n: int, table: OverpartitionTable, precision: int) -> CertifiedInterval:
    """(p(n) - T(n)) / T(n) with p(n) taken exactly from ``table``."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > table.max_n:
        raise IndexError(f"n={n} beyond table max_n={table.max_n}")
    return CertifiedInterval.point(table[n], precision) / main_term_T(n, precision) - 1


def e_hat_bound(n: int, precision: int) -> CertifiedInterval:
    """(1/2) exp(-pi sqrt(n) / 2), the bound on |e(n)| for n >= 85."""
    return (-mu_hat(n, precision)).scale2(-1).exp().scale2(-1)


def log1p_e_hat(n: int, table: OverpartitionTable, precision: int) -> CertifiedInterval:
    """log(1 + e(n)), refusing when 1 + e(n) is not certified positive."""
    arg = e_hat(n, table, precision) + 1
    if not arg.is_positive():
        raise DomainError(f"1 + e({n}) is not certifiably positive: {arg!r}")
    return arg.log()
