"""``opart`` command-line front end.

Exit codes: 0 success, 1 some index Fails, 2 Undecided (no Fails),
64 usage or input error, 70 internal inconsistency.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .constants import constants_for
from .counts import TableParseError, build_table, load_table, save_table
from .formula import FormulaContext, InconsistencyError, engel_error_bound, zuckerman_truncated
from .interval import CeilingAmbiguityError, PrecisionPolicy, certify_lt, policy_from_env
from .verifier import (
    VerificationReport,
    convergence_probe,
    verify_corollaries,
    verify_lemmas,
    verify_main1,
    verify_main2,
)

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_UNDECIDED = 2
EXIT_USAGE = 64
EXIT_INTERNAL = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opart", description="Certified computations for the overpartition function.")
    parser.add_argument("--precision-bits", type=int, help="base working precision (overrides OPART_PRECISION_BITS)")
    parser.add_argument("--max-bits", type=int, help="precision escalation ceiling")
    parser.add_argument("--threads", type=int, default=1, help="worker processes for verification")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="build an exact count table")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("zuckerman", help="evaluate the truncated explicit formula")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--terms", type=int, required=True)
    p.add_argument("--table", type=Path)
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("constants", help="thresholds and constants for order r")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--r-max", type=int)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("claim", choices=("main1", "main2", "corollaries", "lemmas"))
    p.add_argument("--r", type=int)
    p.add_argument("--table", type=Path, required=True)
    p.add_argument("--from", dest="lo", type=int, required=True)
    p.add_argument("--to", dest="hi", type=int, required=True)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--allow-below-threshold", action="store_true",
                   help="main2: probe indices below N(r) (reported, not asserted)")

    p = sub.add_parser("probe", help="scaled differences against the theorem envelope")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--points", required=True, help="comma-separated indices")
    p.add_argument("--table", type=Path, required=True)
    return parser


def _policy(args) -> PrecisionPolicy:
    try:
        policy = policy_from_env()
    except ValueError as exc:
        raise UsageError(f"bad OPART_PRECISION_BITS: {exc}") from None
    base = args.precision_bits or policy.base_bits
    max_bits = args.max_bits or max(policy.max_bits, base)
    try:
        return PrecisionPolicy(base, policy.escalation_factor, max_bits)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_table(path: Path):
    if not path.exists():
        raise UsageError(f"table file {path} not found; build one with `opart compute --max-n N --out {path}`")
    try:
        with path.open("rb") as fh:
            return load_table(fh)
    except TableParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _report_rows(report: VerificationReport, rows: list):
    rows.append([
        report.claim_id, "" if report.r is None else report.r, report.range[0], report.range[1],
        report.holds, ";".join(map(str, report.fails)), ";".join(map(str, report.undecided)),
    ])
    for part in report.parts:
        _report_rows(part, rows)


def _render(report: VerificationReport, fmt: str) -> str:
    if fmt == "json":
        return report.dumps()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["claim_id", "r", "from", "to", "holds", "fails", "undecided"])
        rows: list = []
        _report_rows(report, rows)
        writer.writerows(rows)
        return buf.getvalue().rstrip("\n")
    lines = [report.summary_line()]
    lines += ["  " + p.summary_line() for p in report.parts]
    for p in report.parts:
        for n, note in sorted(p.annotations.items()):
            lines.append(f"  note: {p.claim_id} n={n}: {note}")
    return "\n".join(lines)


def _exit_for(has_fails: bool, undecided: bool) -> int:
    if has_fails:
        return EXIT_FAILS
    if undecided:
        return EXIT_UNDECIDED
    return EXIT_OK


def _cmd_compute(args, policy, out) -> int:
    if args.max_n < 0:
        raise UsageError("--max-n must be nonnegative")
    table = build_table(args.max_n)
    with args.out.open("wb") as fh:
        save_table(table, fh)
    print(f"wrote p(0..{args.max_n}) to {args.out}", file=out)
    return EXIT_OK


def _cmd_zuckerman(args, policy, out) -> int:
    if args.n < 1 or args.terms < 1:
        raise UsageError("--n and --terms must be positive")
    exact = None
    if args.table is not None:
        table = _read_table(args.table)
        if args.n > table.max_n:
            raise UsageError(f"n={args.n} beyond table max_n={table.max_n}")
        exact = table[args.n]
    bits = policy.base_bits + (exact.bit_length() if exact else int(4.6 * args.n ** 0.5) + 8)
    value = zuckerman_truncated(FormulaContext(args.n, args.terms, bits))
    bound = engel_error_bound(args.n, args.terms, bits)
    payload = {"n": args.n, "terms": args.terms, "value": value.to_json(), "error_bound": bound.to_json()}
    status = EXIT_OK
    if exact is not None:
        err = abs(value - exact)
        contained = certify_lt(err, bound) is True
        payload["exact"] = str(exact)
        payload["within_bound"] = contained
        if not contained:
            status = EXIT_FAILS
    if args.format == "json":
        print(json.dumps(payload, indent=2), file=out)
    else:
        for key, val in payload.items():
            print(f"{key}: {val}", file=out)
    return status


def _cmd_constants(args, policy, out) -> int:
    r_max = args.r_max if args.r_max is not None else args.r
    if args.r < 2 or r_max < args.r:
        raise UsageError("need 2 <= r <= r-max")
    sets = [constants_for(r, policy).to_json() for r in range(args.r, r_max + 1)]
    print(json.dumps(sets[0] if args.r_max is None else sets, indent=2), file=out)
    return EXIT_OK


def _cmd_verify(args, policy, out) -> int:
    if args.lo > args.hi:
        raise UsageError(f"malformed range: --from {args.lo} exceeds --to {args.hi}")
    table = _read_table(args.table)
    workers = max(1, args.threads)
    try:
        if args.claim == "main1":
            report = verify_main1(args.lo, args.hi, table, policy, workers)
        elif args.claim == "main2":
            if args.r is None:
                raise UsageError("verify main2 needs --r")
            report = verify_main2(args.r, args.lo, args.hi, table, None, policy, workers,
                                  allow_below_threshold=args.allow_below_threshold)
        elif args.claim == "corollaries":
            report = verify_corollaries(args.lo, args.hi, table, policy, workers)
        else:
            report = verify_lemmas(args.r or 4, args.lo, args.hi, table, None, policy, workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(_render(report, args.format), file=out)
    return _exit_for(bool(report.fails), bool(report.undecided))


def _cmd_probe(args, policy, out) -> int:
    try:
        points = [int(x) for x in args.points.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"malformed --points {args.points!r}") from None
    if not points:
        raise UsageError("--points is empty")
    table = _read_table(args.table)
    try:
        report = convergence_probe(args.r, points, table, policy)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = report.to_json()
    print(json.dumps(payload, indent=2), file=out)
    return _exit_for(bool(payload["fails"]), bool(payload["undecided"]))


COMMANDS = {
    "compute": _cmd_compute,
    "zuckerman": _cmd_zuckerman,
    "constants": _cmd_constants,
    "verify": _cmd_verify,
    "probe": _cmd_probe,
}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        policy = _policy(args)
        return COMMANDS[args.command](args, policy, out)
    except UsageError as exc:
        print(f"opart: error: {exc}", file=err)
        return EXIT_USAGE
    except InconsistencyError as exc:
        print(f"opart: internal inconsistency: {exc}", file=err)
        return EXIT_INTERNAL
    except CeilingAmbiguityError as exc:
        print(f"opart: undecided: {exc}", file=err)
        return EXIT_UNDECIDED


if __name__ == "__main__":
    sys.exit(main())
