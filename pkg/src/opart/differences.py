"""Signed finite differences (-1)^(r-1) Delta^r log p(n) and their split
into a smooth part H_r and an exponentially small part G_r."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .constants import ConstantSet
from .counts import OverpartitionTable
from .formula import log1p_e_hat, mu_hat
from .interval import (
    CertifiedInterval,
    exact_linear_combination,
    interval_constant_pi,
    log_of_big_integer,
)

__all__ = [
    "DifferenceRequest",
    "G_r_value",
    "H_r_value",
    "difference_coefficients",
    "iterated_difference",
    "lemma24_bounds",
    "lemma25_bounds",
    "signed_difference",
]


@dataclass(frozen=True)
class DifferenceRequest:
    r: int
    n: int
    table: OverpartitionTable
    precision_bits: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("difference order r must be positive")
        if self.n < 1:
            raise ValueError("base index n must be positive")
        if self.n + self.r > self.table.max_n:
            raise IndexError(
                f"table too short: need p({self.n + self.r}), have up to p({self.table.max_n})"
            )


def difference_coefficients(r: int) -> list[int]:
    """Weights c_i with (-1)^(r-1) Delta^r f(n) = sum_i c_i f(n+i)."""
    return [(-1) ** (i + 1) * math.comb(r, i) for i in range(r + 1)]


def _log_counts(req: DifferenceRequest) -> list[CertifiedInterval]:
    return [log_of_big_integer(req.table[req.n + i], req.precision_bits) for i in range(req.r + 1)]


def signed_difference(req: DifferenceRequest) -> CertifiedInterval:
    """(-1)^(r-1) Delta^r log p(n) via the alternating binomial sum."""
    return exact_linear_combination(difference_coefficients(req.r), _log_counts(req), req.precision_bits)


def iterated_difference(req: DifferenceRequest) -> CertifiedInterval:
    """Same quantity as :func:`signed_difference`, by applying Delta r times."""
    values = _log_counts(req)
    for _ in range(req.r):
        values = [exact_linear_combination((-1, 1), pair) for pair in zip(values, values[1:])]
    (result,) = values
    if req.r % 2 == 0:
        result = -result
    return result.with_precision(req.precision_bits)


def _smooth_part(m: int, precision: int) -> CertifiedInterval:
    # pi sqrt(m) - 3 log(pi sqrt(m)) + log(pi sqrt(m) - 1)
    mu = mu_hat(m, precision)
    return mu - mu.log() * 3 + (mu - 1).log()


def H_r_value(r: int, n: int, precision: int) -> CertifiedInterval:
    if r < 1 or n < 1:
        raise ValueError("r and n must be positive")
    values = [_smooth_part(n + i, precision) for i in range(r + 1)]
    return exact_linear_combination(difference_coefficients(r), values, precision)


def G_r_value(r: int, n: int, table: OverpartitionTable, precision: int) -> CertifiedInterval:
    if r < 1 or n < 1:
        raise ValueError("r and n must be positive")
    if n + r > table.max_n:
        raise IndexError(f"table too short: need p({n + r}), have up to p({table.max_n})")
    values = [log1p_e_hat(n + i, table, precision) for i in range(r + 1)]
    return exact_linear_combination(difference_coefficients(r), values, precision)


def lemma24_bounds(n: int, precision: int) -> tuple[CertifiedInterval, CertifiedInterval]:
    """(L1(n), U1(n)) bracketing H_1."""
    if n < 1:
        raise ValueError("n must be positive")
    pi = interval_constant_pi(precision)

    def piece(root_index: int, other: int) -> CertifiedInterval:
        root = CertifiedInterval.point(root_index, precision).sqrt()
        mu = mu_hat(root_index, precision)
        half = pi / (root * 2)
        return half - Fraction(3, 2 * other) + half / (mu - 1)

    upper = piece(n, n + 1)
    lower = piece(n + 1, n)
    return lower, upper


def lemma25_bounds(r: int, n: int, constants: ConstantSet,
                   precision: int) -> tuple[CertifiedInterval, CertifiedInterval]:
    """Two-sided bound on H_r valid for n >= 2r^2."""
    if r < 2:
        raise ValueError("r must be at least 2")
    if constants.r != r:
        raise ValueError(f"constants are for r={constants.r}, not r={r}")
    if n < 2 * r * r:
        raise ValueError(f"n={n} is below 2r^2={2 * r * r}")
    n_i = CertifiedInterval.point(n, precision)
    root_n = n_i.sqrt()
    n_pow_r = n_i.pow_integer(r)
    lead = constants.C * root_n / n_pow_r
    lower = lead - constants.C1 / n_pow_r
    upper = lead - Fraction(math.factorial(r - 1), 2**r) / n_pow_r + constants.C2 / (n_pow_r * root_n)
    return lower, upper
