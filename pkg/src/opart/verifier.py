"""Certified verification suites and their reports.

Each suite checks one family of inequalities index by index.  A check
returns three-valued results per inequality (True/False/None); None
triggers precision escalation and, if it survives ``max_bits``, an
Undecided verdict.  Holds is only ever reported from a certified True.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

from . import constants as K
from .constants import ConstantSet, constants_for
from .counts import OverpartitionTable
from .differences import (
    DifferenceRequest,
    G_r_value,
    H_r_value,
    lemma24_bounds,
    lemma25_bounds,
    signed_difference,
)
from .formula import (
    FormulaContext,
    e_hat,
    e_hat_bound,
    engel_error_bound,
    zuckerman_truncated,
)
from .interval import (
    DEFAULT_POLICY,
    CertifiedInterval,
    PrecisionPolicy,
    certify_le,
    certify_lt,
    interval_constant_pi,
    log_of_big_integer,
    working_bits,
)

__all__ = [
    "REPORT_SCHEMA",
    "ProbePoint",
    "ProbeReport",
    "Status",
    "Verdict",
    "VerificationReport",
    "convergence_probe",
    "theorem_envelope",
    "verify_corollaries",
    "verify_lemmas",
    "verify_main1",
    "verify_main2",
]

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": [
        "claim_id", "r", "range", "holds", "fails", "undecided",
        "precision_base_bits", "wall_time_s",
    ],
    "properties": {
        "claim_id": {"type": "string"},
        "r": {"type": ["integer", "null"]},
        "range": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "holds": {"type": "integer", "minimum": 0},
        "fails": {"type": "array", "items": {"type": "integer"}},
        "undecided": {"type": "array", "items": {"type": "integer"}},
        "precision_base_bits": {"type": "integer", "minimum": 1},
        "wall_time_s": {"type": "number", "minimum": 0},
        "parts": {"type": "array", "items": {"$ref": "#"}},
    },
}


class Status(Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Verdict:
    n: int
    status: Status
    precision_used: int
    note: Optional[str] = None


@dataclass
class VerificationReport:
    claim_id: str
    r: Optional[int]
    range: tuple[int, int]
    verdicts: list[Verdict]
    policy: PrecisionPolicy
    wall_time: float = 0.0
    claimed_from: Optional[int] = None
    parts: list["VerificationReport"] = field(default_factory=list)

    @property
    def holds(self) -> int:
        return sum(v.status is Status.HOLDS for v in self.verdicts)

    @property
    def fails(self) -> list[int]:
        return [v.n for v in self.verdicts if v.status is Status.FAILS]

    @property
    def undecided(self) -> list[int]:
        return [v.n for v in self.verdicts if v.status is Status.UNDECIDED]

    @property
    def annotations(self) -> dict[int, str]:
        return {v.n: v.note for v in self.verdicts if v.note}

    @property
    def ok(self) -> bool:
        return not self.fails and not self.undecided

    def part(self, claim_id: str, r: Optional[int] = None) -> "VerificationReport":
        for p in self.parts:
            if p.claim_id == claim_id and (r is None or p.r == r):
                return p
        raise KeyError((claim_id, r))

    def verdict(self, n: int) -> Verdict:
        for v in self.verdicts:
            if v.n == n:
                return v
        raise KeyError(n)

    def to_json(self, include_wall_time: bool = True) -> dict:
        out = {
            "claim_id": self.claim_id,
            "r": self.r,
            "range": [self.range[0], self.range[1]],
            "holds": self.holds,
            "fails": self.fails,
            "undecided": self.undecided,
            "precision_base_bits": self.policy.base_bits,
            "wall_time_s": round(self.wall_time, 6) if include_wall_time else 0.0,
            "max_precision_bits": max((v.precision_used for v in self.verdicts), default=0),
        }
        if self.claimed_from is not None:
            out["claimed_from"] = self.claimed_from
        if self.annotations:
            out["annotations"] = {str(n): note for n, note in sorted(self.annotations.items())}
        if self.parts:
            out["parts"] = [p.to_json(include_wall_time) for p in self.parts]
        return out

    def dumps(self, include_wall_time: bool = True) -> str:
        return json.dumps(self.to_json(include_wall_time), indent=2, sort_keys=False)

    def summary_line(self) -> str:
        lo, hi = self.range
        state = "PASS" if self.ok else "FAIL"
        r = "" if self.r is None else f" r={self.r}"
        return (
            f"{state} {self.claim_id}{r} [{lo}, {hi}]: holds={self.holds} "
            f"fails={len(self.fails)} undecided={len(self.undecided)}"
        )


# -- claim machinery ------------------------------------------------------

CheckResult = tuple[dict[str, Optional[bool]], Optional[str]]


@dataclass(frozen=True)
class _Claim:
    claim_id: str
    r: Optional[int]
    check: Callable[..., CheckResult]
    args: tuple
    order: Optional[int]  # None marks an exact (precision-free) check
    domain_lo: int
    domain_hi: int
    claimed_from: int


def _evaluate(claim: _Claim, n: int, policy: PrecisionPolicy):
    """Return (part results, bits used, note) for one index."""
    if claim.order is None:
        results, note = claim.check(n, 0, *claim.args)
        return results, 0, note
    decided: dict[str, Optional[bool]] = {}
    note = None
    bits = working_bits(n, claim.order, policy)
    for bits in policy.ladder(bits):
        results, note = claim.check(n, bits, *claim.args)
        for name, value in results.items():
            if decided.get(name) is None:
                decided[name] = value
        if all(v is not None for v in decided.values()):
            break
    return decided, bits, note


def _status(values: Iterable[Optional[bool]]) -> Status:
    values = list(values)
    if not values:
        return Status.UNDECIDED
    if any(v is False for v in values):
        return Status.FAILS
    if all(v is True for v in values):
        return Status.HOLDS
    return Status.UNDECIDED


def _run_block(claim: _Claim, indices: Sequence[int], policy: PrecisionPolicy):
    return [(n, *_evaluate(claim, n, policy)) for n in indices]


def _run_claim(claim: _Claim, lo: int, hi: int, policy: PrecisionPolicy,
               workers: int = 1) -> VerificationReport:
    start = time.perf_counter()
    lo_eff = max(lo, claim.domain_lo)
    hi_eff = min(hi, claim.domain_hi)
    indices = list(range(lo_eff, hi_eff + 1))
    if workers > 1 and len(indices) > 64:
        chunk = math.ceil(len(indices) / (workers * 4))
        blocks = [indices[i:i + chunk] for i in range(0, len(indices), chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, claim, b, policy) for b in blocks]
            rows = [row for f in futures for row in f.result()]
    else:
        rows = _run_block(claim, indices, policy)
    rows.sort(key=lambda row: row[0])

    part_names = list(rows[0][1]) if rows else []
    overall = [Verdict(n, _status(res.values()), bits, note) for n, res, bits, note in rows]
    parts = []
    if len(part_names) > 1:
        for name in part_names:
            verdicts = [Verdict(n, _status([res[name]]), bits) for n, res, bits, _ in rows]
            parts.append(VerificationReport(
                f"{claim.claim_id}.{name}", claim.r, (lo_eff, hi_eff), verdicts, policy,
                claimed_from=claim.claimed_from,
            ))
    report = VerificationReport(
        claim.claim_id, claim.r, (lo_eff, hi_eff), overall, policy,
        claimed_from=claim.claimed_from, parts=parts,
    )
    report.wall_time = time.perf_counter() - start
    for p in parts:
        p.wall_time = report.wall_time
    return report


def _aggregate(claim_id: str, r: Optional[int], lo: int, hi: int,
               subreports: list[VerificationReport], policy: PrecisionPolicy,
               wall_time: float) -> VerificationReport:
    """Combine sub-reports, counting each only where its claim applies."""
    verdicts = []
    for n in range(lo, hi + 1):
        statuses = []
        bits = 0
        for sub in subreports:
            start = sub.claimed_from if sub.claimed_from is not None else sub.range[0]
            if sub.range[0] <= n <= sub.range[1] and n >= start:
                v = sub.verdict(n)
                statuses.append(v.status)
                bits = max(bits, v.precision_used)
        if not statuses:
            continue
        if all(s is Status.HOLDS for s in statuses):
            status = Status.HOLDS
        elif Status.FAILS in statuses:
            status = Status.FAILS
        else:
            status = Status.UNDECIDED
        verdicts.append(Verdict(n, status, bits))
    return VerificationReport(claim_id, r, (lo, hi), verdicts, policy, wall_time, parts=subreports)


def _check_range(lo: int, hi: int, table: OverpartitionTable, reach: int) -> None:
    if lo > hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if lo < 1:
        raise ValueError("ranges start at n >= 1")
    if hi + reach > table.max_n:
        raise ValueError(
            f"range [{lo}, {hi}] needs p({hi + reach}) but the table stops at p({table.max_n})"
        )


# -- individual checks (module level so worker processes can unpickle them) --

def _point(x, bits):
    return CertifiedInterval.point(x, bits)


def _half_pi_over_root(n: int, bits: int) -> CertifiedInterval:
    return interval_constant_pi(bits) / (_point(n, bits).sqrt() * 2)


def _main1_bounds(n: int, bits: int):
    a = _half_pi_over_root(n, bits)
    pi = interval_constant_pi(bits)
    lower = (a + 1).log()
    upper = (a + pi * pi / (40 * n) + 1).log()
    return lower, upper


def _main2_bounds(n: int, bits: int, r: int):
    n_i = _point(n, bits)
    n_pow = n_i.pow_integer(r)
    x = K.C(r, bits) * n_i.sqrt() / n_pow
    y = K.C1(r, bits) / n_pow
    return (x - y + 1).log_extended(), (x + 1).log()


def _check_main1(n, bits, table):
    s = signed_difference(DifferenceRequest(1, n, table, bits))
    lower, upper = _main1_bounds(n, bits)
    return {"lower": certify_lt(lower, s), "upper": certify_lt(s, upper)}, None


def _check_main2(n, bits, table, r):
    s = signed_difference(DifferenceRequest(r, n, table, bits))
    lower, upper = _main2_bounds(n, bits, r)
    zero = _point(0, bits)
    return {
        "positive": certify_lt(zero, lower),
        "lower": certify_lt(lower, s),
        "upper": certify_lt(s, upper),
    }, None


def _check_log_concavity(n, bits, table):
    lhs = table[n] ** 2
    rhs = table[n - 1] * table[n + 1]
    return {"strict": lhs > rhs}, ("exact equality" if lhs == rhs else None)


def _check_liu_zhang(n, bits, table):
    # p(n-1)/p(n) (1 + pi/(4 n^(3/2))) > p(n)/p(n+1), cleared of denominators
    factor = interval_constant_pi(bits) / (_point(n, bits).pow_rational(3, 2) * 4) + 1
    rhs = factor * (table[n - 1] * table[n + 1])
    return {"strict": certify_lt(_point(table[n] ** 2, bits), rhs)}, None


def _check_ratio_log_convexity(n, bits, table):
    lhs = table[n + 2] * table[n] ** 3
    rhs = table[n + 1] ** 3 * table[n - 1]
    return {"strict": lhs > rhs}, ("exact equality" if lhs == rhs else None)


_EXACT_POWER_BUDGET = 1 << 20


def _check_root_log_convexity(n, bits, table):
    def scaled_log(m):
        return log_of_big_integer(table[m], bits) / m

    value = scaled_log(n + 1) + scaled_log(n - 1) - scaled_log(n) * 2
    verdict = certify_lt(_point(0, bits), value)
    if verdict is None and n * n * table[n + 1].bit_length() <= _EXACT_POWER_BUDGET:
        # Clear denominators: p(n+1)^(n(n-1)) p(n-1)^(n(n+1)) vs p(n)^(2(n^2-1))
        lhs = table[n + 1] ** (n * (n - 1)) * table[n - 1] ** (n * (n + 1))
        rhs = table[n] ** (2 * (n * n - 1))
        return {"strict": lhs > rhs}, ("exact equality" if lhs == rhs else None)
    return {"strict": verdict}, None


def _check_e_hat(n, bits, table):
    return {"bound": certify_lt(abs(e_hat(n, table, bits)), e_hat_bound(n, bits))}, None


def _check_engel(n, bits, table, N):
    prec = bits + table[n].bit_length()
    z = zuckerman_truncated(FormulaContext(n, N, prec))
    err = abs(z - table[n])
    return {"containment": certify_lt(err, engel_error_bound(n, N, prec))}, None


def _check_g_bound(n, bits, table, r):
    g = abs(G_r_value(r, n, table, bits))
    return {"bound": certify_lt(g, 1 / _point(n, bits).pow_integer(r + 1))}, None


def _check_lemma24(n, bits):
    lower, upper = lemma24_bounds(n, bits)
    h = H_r_value(1, n, bits)
    return {"lower": certify_le(lower, h), "upper": certify_le(h, upper)}, None


def _check_lemma25(n, bits, consts):
    lower, upper = lemma25_bounds(consts.r, n, consts, bits)
    h = H_r_value(consts.r, n, bits)
    return {"lower": certify_lt(lower, h), "upper": certify_lt(h, upper)}, None


def _check_sandwich(n, bits, table, r):
    s = signed_difference(DifferenceRequest(r, n, table, bits))
    h = H_r_value(r, n, bits)
    slack = 1 / _point(n, bits).pow_integer(r + 1)
    return {"lower": certify_lt(h - slack, s), "upper": certify_lt(s, h + slack)}, None


def _check_identity(n, bits, table, r):
    s = signed_difference(DifferenceRequest(r, n, table, bits))
    residual = s - H_r_value(r, n, bits) - G_r_value(r, n, table, bits)
    # An enclosure that excludes 0 would certify the identity false.
    return {"residual": True if residual.contains_zero() else False}, None


# -- suites ---------------------------------------------------------------

def verify_main1(lo: int, hi: int, table: OverpartitionTable,
                 policy: PrecisionPolicy = DEFAULT_POLICY, workers: int = 1) -> VerificationReport:
    """log(1 + pi/(2 sqrt n)) < Delta log p(n) < log(1 + pi/(2 sqrt n) + pi^2/(40 n))."""
    _check_range(lo, hi, table, 1)
    claim = _Claim("main1", None, _check_main1, (table,), 1, 1, table.max_n - 1, 26)
    return _run_claim(claim, lo, hi, policy, workers)


def verify_main2(r: int, lo: int, hi: int, table: OverpartitionTable,
                 constants: Optional[ConstantSet] = None,
                 policy: PrecisionPolicy = DEFAULT_POLICY, workers: int = 1,
                 allow_below_threshold: bool = False) -> VerificationReport:
    """0 < log(1 + C/n^(r-1/2) - C1/n^r) < (-1)^(r-1) Delta^r log p(n) < log(1 + C/n^(r-1/2))."""
    if r < 2:
        raise ValueError("verify_main2 needs r >= 2")
    constants = constants or constants_for(r, policy)
    if constants.r != r:
        raise ValueError(f"constants are for r={constants.r}, not r={r}")
    _check_range(lo, hi, table, r)
    if lo < constants.N and not allow_below_threshold:
        raise ValueError(
            f"range starts below N({r}) = {constants.N}; pass allow_below_threshold to probe"
        )
    claim = _Claim("main2", r, _check_main2, (table, r), r, 1, table.max_n - r, constants.N)
    return _run_claim(claim, lo, hi, policy, workers)


COROLLARY_CLAIMS = {
    # claim id: (check, order, first index the check is defined at, reach, claimed from)
    "log_concavity": (_check_log_concavity, None, 1, 1, 4),
    "liu_zhang": (_check_liu_zhang, 2, 1, 1, 2),
    "ratio_log_convexity": (_check_ratio_log_convexity, None, 1, 2, 18),
    "nth_root_log_convexity": (_check_root_log_convexity, 1, 2, 1, 4),
}


def verify_corollaries(lo: int, hi: int, table: OverpartitionTable,
                       policy: PrecisionPolicy = DEFAULT_POLICY,
                       workers: int = 1) -> VerificationReport:
    """One sub-report per corollary; the top-level verdict only counts
    indices at or beyond each corollary's stated start."""
    _check_range(lo, hi, table, 2)
    start = time.perf_counter()
    subs = []
    for claim_id, (check, order, first, reach, claimed) in COROLLARY_CLAIMS.items():
        claim = _Claim(claim_id, None, check, (table,), order, first, table.max_n - reach, claimed)
        subs.append(_run_claim(claim, lo, hi, policy, workers))
    return _aggregate("corollaries", None, lo, hi, subs, policy, time.perf_counter() - start)


IDENTITY_GRID = (100, 500, 1000)


def verify_lemmas(r_max: int, lo: int, hi: int, table: OverpartitionTable,
                  constants: Optional[dict[int, ConstantSet]] = None,
                  policy: PrecisionPolicy = DEFAULT_POLICY, workers: int = 1,
                  engel_terms: int = 3) -> VerificationReport:
    """Lemma-level checks over [lo, hi], each restricted to its hypotheses."""
    if r_max < 1:
        raise ValueError("r_max must be positive")
    _check_range(lo, hi, table, r_max)
    constants = dict(constants or {})
    for r in range(2, r_max + 1):
        constants.setdefault(r, constants_for(r, policy))
    start = time.perf_counter()
    top = table.max_n
    claims = [
        _Claim("e_hat_bound", None, _check_e_hat, (table,), 1, 85, top, 85),
        _Claim("engel_containment", None, _check_engel, (table, engel_terms), 1, 1, top, 1),
        _Claim("lemma24", 1, _check_lemma24, (), 1, 1, top, 1),
    ]
    for r in range(1, r_max + 1):
        g_from = K.N1(r, policy)
        claims.append(_Claim("G_bound", r, _check_g_bound, (table, r), r, g_from, top - r, g_from))
        claims.append(_Claim("sandwich", r, _check_sandwich, (table, r), r, g_from, top - r, g_from))
        claims.append(_Claim("identity", r, _check_identity, (table, r), r, 1, top - r, 1))
    for r in range(2, r_max + 1):
        claims.append(_Claim("lemma25", r, _check_lemma25, (constants[r],), r,
                             2 * r * r, top, 2 * r * r))
    subs = [_run_claim(c, lo, hi, policy, workers) for c in claims]
    return _aggregate("lemmas", None, lo, hi, subs, policy, time.perf_counter() - start)


def identity_grid(r_max: int, lo: int, hi: int) -> list[tuple[int, int]]:
    """The (r, n) grid used for spot checks of the decomposition identity."""
    points = [n for n in IDENTITY_GRID if lo <= n <= hi]
    if len(points) < len(IDENTITY_GRID):
        step = max(1, (hi - lo) // (len(IDENTITY_GRID) - 1))
        points = sorted({min(hi, lo + i * step) for i in range(len(IDENTITY_GRID))})
    return [(r, n) for r in range(1, r_max + 1) for n in points]


# -- convergence probe ----------------------------------------------------

def theorem_envelope(r: int, n: int, bits: int) -> tuple[CertifiedInterval, CertifiedInterval]:
    """Main-theorem lower and upper bounds on the signed difference at n."""
    if r == 1:
        return _main1_bounds(n, bits)
    return _main2_bounds(n, bits, r)


@dataclass(frozen=True)
class ProbePoint:
    n: int
    scaled: CertifiedInterval
    ratio: CertifiedInterval
    envelope_lo: CertifiedInterval
    envelope_hi: CertifiedInterval
    status: Status
    precision_used: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "scaled": self.scaled.to_json(),
            "ratio": self.ratio.to_json(),
            "envelope": {
                "lo": self.envelope_lo.to_json()["lo"],
                "hi": self.envelope_hi.to_json()["hi"],
            },
            "status": self.status.value,
            "precision_bits": self.precision_used,
        }


@dataclass
class ProbeReport:
    r: int
    points: list[ProbePoint]
    policy: PrecisionPolicy
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return all(p.status is Status.HOLDS for p in self.points)

    def to_json(self, include_wall_time: bool = True) -> dict:
        ns = [p.n for p in self.points]
        return {
            "claim_id": "probe",
            "r": self.r,
            "range": [min(ns), max(ns)] if ns else [0, 0],
            "holds": sum(p.status is Status.HOLDS for p in self.points),
            "fails": [p.n for p in self.points if p.status is Status.FAILS],
            "undecided": [p.n for p in self.points if p.status is Status.UNDECIDED],
            "precision_base_bits": self.policy.base_bits,
            "wall_time_s": round(self.wall_time, 6) if include_wall_time else 0.0,
            "points": [p.to_json() for p in self.points],
        }


def _probe_point(r: int, n: int, table: OverpartitionTable, bits: int):
    n_i = _point(n, bits)
    scale = n_i.pow_integer(r) / n_i.sqrt()
    c = K.C(r, bits)
    s = signed_difference(DifferenceRequest(r, n, table, bits))
    lower, upper = theorem_envelope(r, n, bits)
    scaled = s * scale
    ratio = scaled / c
    env_lo = lower * scale / c
    env_hi = upper * scale / c
    inside = [certify_lt(env_lo, ratio), certify_lt(ratio, env_hi)]
    return ProbePoint(n, scaled, ratio, env_lo, env_hi, _status(inside), bits)


def convergence_probe(r: int, n_points: Sequence[int], table: OverpartitionTable,
                      policy: PrecisionPolicy = DEFAULT_POLICY) -> ProbeReport:
    """n^(r-1/2) times the signed difference, and its ratio to C(r), checked
    against the envelope the main-theorem bounds give at each finite n."""
    if r < 1:
        raise ValueError("r must be positive")
    start = time.perf_counter()
    points = []
    for n in sorted(n_points):
        if n < 1 or n + r > table.max_n:
            raise ValueError(f"probe point n={n} outside the table for r={r}")
        point = None
        for bits in policy.ladder(working_bits(n, r, policy)):
            point = _probe_point(r, n, table, bits)
            if point.status is not Status.UNDECIDED:
                break
        points.append(point)
    return ProbeReport(r, points, policy, time.perf_counter() - start)
