"""Exact overpartition counts.

Two independent routes: a naive product expansion used as an oracle for
small n, and a pentagonal-number recurrence used to build tables.
"""

from __future__ import annotations

import contextlib
import io
import math
import sys
from dataclasses import dataclass
from typing import BinaryIO, Iterator, TextIO, Union

__all__ = [
    "BRUTE_FORCE_LIMIT",
    "MalformedRowError",
    "MissingIndexError",
    "MonotonicityError",
    "OverpartitionTable",
    "ParityError",
    "TableBuildError",
    "TableParseError",
    "brute_force_count",
    "build_table",
    "load_table",
    "pentagonal_terms",
    "save_table",
]

BRUTE_FORCE_LIMIT = 40
CSV_HEADER = "n,overpartition"


class TableBuildError(RuntimeError):
    """The table could not be built (e.g. memory exhausted)."""


class TableParseError(ValueError):
    """A count-table file failed to parse or validate."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MalformedRowError(TableParseError):
    pass


class MissingIndexError(TableParseError):
    pass


class MonotonicityError(TableParseError):
    pass


class ParityError(TableParseError):
    pass


@dataclass(frozen=True)
class OverpartitionTable:
    """Exact counts p(0), ..., p(max_n) of overpartitions."""

    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(self.counts))
        if not self.counts:
            raise ValueError("a table holds at least p(0)")
        problem = _invariant_violation(self.counts)
        if problem is not None:
            index, kind = problem
            raise ValueError(f"{kind} at n={index}")

    @property
    def max_n(self) -> int:
        return len(self.counts) - 1

    def __getitem__(self, n: int) -> int:
        if n < 0 or n > self.max_n:
            raise IndexError(f"n={n} outside table range 0..{self.max_n}")
        return self.counts[n]

    def __len__(self) -> int:
        return len(self.counts)


def _invariant_violation(counts) -> Union[tuple[int, str], None]:
    if counts[0] != 1:
        return 0, "p(0) must be 1"
    for n in range(1, len(counts)):
        if counts[n] % 2:
            return n, "parity violation"
        if counts[n] <= counts[n - 1]:
            return n, "non-monotone counts"
    return None


def brute_force_count(n: int) -> int:
    """Coefficient of q^n in prod_{j<=n} (1+q^j)/(1-q^j), expanded naively.

    Only meant as an oracle; limited to ``n <= 40``.
    """
    if not 0 <= n <= BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute_force_count supports 0 <= n <= {BRUTE_FORCE_LIMIT}, got {n}")
    series = [1] + [0] * n
    for j in range(1, n + 1):
        # (1 + q^j) * sum_m q^(j*m), written out as one factor polynomial
        factor = [0] * (n + 1)
        for m in range(0, n // j + 1):
            factor[j * m] += 1
            if j * (m + 1) <= n:
                factor[j * (m + 1)] += 1
        product = [0] * (n + 1)
        for a, ca in enumerate(series):
            if ca:
                for b in range(0, n + 1 - a):
                    if factor[b]:
                        product[a + b] += ca * factor[b]
        series = product
    return series[n]


def pentagonal_terms(limit: int) -> Iterator[tuple[int, int]]:
    """Yield ``(g_k, (-1)^k)`` for generalized pentagonal numbers 0 < g_k <= limit."""
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 > limit:
            return
        sign = -1 if k % 2 else 1
        yield g1, sign
        g2 = k * (3 * k + 1) // 2
        if g2 <= limit:
            yield g2, sign
        k += 1


def build_table(max_n: int) -> OverpartitionTable:
    """Exact p(0..max_n) from the pentagonal number theorem.

    Distinct-partition counts come from Q(q)E(q) = E(q^2); overpartitions
    from P(q)E(q) = Q(q), with E(q) = sum_k (-1)^k q^(k(3k-1)/2).
    """
    if max_n < 0:
        raise ValueError("max_n must be nonnegative")
    try:
        terms = list(pentagonal_terms(max_n))
        distinct = [0] * (max_n + 1)
        for n in range(max_n + 1):
            acc = 0
            if n % 2 == 0:
                acc = _pentagonal_coefficient(n // 2)
            for g, sign in terms:
                if g > n:
                    break
                acc -= sign * distinct[n - g]
            distinct[n] = acc
        counts = [0] * (max_n + 1)
        for n in range(max_n + 1):
            acc = distinct[n]
            for g, sign in terms:
                if g > n:
                    break
                acc -= sign * counts[n - g]
            counts[n] = acc
    except MemoryError as exc:
        raise TableBuildError(f"out of memory building table to n={max_n}") from exc
    return OverpartitionTable(tuple(counts))


def _pentagonal_coefficient(m: int) -> int:
    """Coefficient of q^m in E(q)."""
    if m == 0:
        return 1
    # m = k(3k-1)/2 for k != 0 iff 24m+1 is a square s^2 with s = 6k-1 or 1-6k
    d = 24 * m + 1
    s = _isqrt_exact(d)
    if s is None:
        return 0
    if (s + 1) % 6 == 0:
        k = (s + 1) // 6
    elif (s - 1) % 6 == 0:
        k = (s - 1) // 6
    else:
        return 0
    return -1 if k % 2 else 1


def _isqrt_exact(d: int):
    s = math.isqrt(d)
    return s if s * s == d else None


@contextlib.contextmanager
def _unlimited_int_digits():
    # Counts past n ~ 10^7 exceed the default int/str conversion limit.
    getter = getattr(sys, "get_int_max_str_digits", None)
    if getter is None:
        yield
        return
    old = getter()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def save_table(table: OverpartitionTable, destination: Union[TextIO, BinaryIO]) -> None:
    """Write the table as LF-terminated CSV with a ``n,overpartition`` header."""
    body = io.StringIO()
    body.write(CSV_HEADER + "\n")
    with _unlimited_int_digits():
        for n, value in enumerate(table.counts):
            body.write(f"{n},{value}\n")
    text = body.getvalue()
    if isinstance(destination, io.TextIOBase):
        destination.write(text)
    else:
        destination.write(text.encode("ascii"))


def load_table(source: Union[TextIO, BinaryIO]) -> OverpartitionTable:
    """Parse and validate a count-table CSV."""
    raw = source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("ascii")
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise MalformedRowError(f"expected header {CSV_HEADER!r}", 1)
    with _unlimited_int_digits():
        return _parse_rows(lines)


def _parse_rows(lines: list[str]) -> OverpartitionTable:
    counts: list[int] = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.rstrip("\r").split(",")
        if len(fields) != 2:
            raise MalformedRowError(f"expected 2 fields, got {len(fields)}", lineno)
        try:
            n, value = int(fields[0]), int(fields[1])
        except ValueError:
            raise MalformedRowError(f"non-integer field in {line!r}", lineno) from None
        if n != len(counts):
            raise MissingIndexError(f"expected index {len(counts)}, found {n}", lineno)
        if n == 0 and value != 1:
            raise MalformedRowError("p(0) must be 1", lineno)
        if n >= 1:
            if value % 2:
                raise ParityError(f"parity violation: p({n}) = {value} is odd", lineno)
            if value <= counts[-1]:
                raise MonotonicityError(f"non-monotone counts at n={n}", lineno)
        counts.append(value)
    if not counts:
        raise MissingIndexError("table has no rows", 2)
    return OverpartitionTable(tuple(counts))
