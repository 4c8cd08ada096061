import json

import jsonschema
import pytest

from opart.constants import constants_for
from opart.interval import PrecisionPolicy
from opart.verifier import (
    REPORT_SCHEMA,
    Status,
    convergence_probe,
    identity_grid,
    theorem_envelope,
    verify_corollaries,
    verify_lemmas,
    verify_main1,
    verify_main2,
)

STARVED = PrecisionPolicy(8, 2, 16)


def validate(payload):
    jsonschema.validate(payload, REPORT_SCHEMA)


def test_main1_boundary(table_5k):
    report = verify_main1(20, 40, table_5k)
    assert report.verdict(26).status is Status.HOLDS
    assert all(report.verdict(n).status is Status.HOLDS for n in range(26, 41))
    validate(report.to_json())


def test_main1_below_claim_is_reported(table_5k):
    report = verify_main1(1, 25, table_5k)
    assert len(report.verdicts) == 25
    assert report.claimed_from == 26
    assert all(v.status is not Status.UNDECIDED for v in report.verdicts)


def test_main2_requires_threshold(table_5k):
    with pytest.raises(ValueError):
        verify_main2(2, 5, 343, table_5k)
    with pytest.raises(ValueError):
        verify_main2(1, 400, 500, table_5k)


def test_main2_below_threshold_window(table_5k):
    report = verify_main2(2, 5, 343, table_5k, allow_below_threshold=True)
    assert report.part("main2.lower").ok
    assert report.part("main2.upper").ok


def test_main2_short_range(table_5k):
    report = verify_main2(2, 344, 400, table_5k)
    assert report.ok and report.holds == 57
    validate(report.to_json())


def test_range_errors(table_small):
    with pytest.raises(ValueError):
        verify_main1(10, 5, table_small)
    with pytest.raises(ValueError):
        verify_main1(0, 5, table_small)
    with pytest.raises(ValueError):
        verify_main1(1, table_small.max_n, table_small)


def test_corollaries_small_range(table_small):
    report = verify_corollaries(1, 150, table_small)
    lc = report.part("log_concavity")
    assert lc.fails == [1, 2]
    assert lc.annotations == {1: "exact equality", 2: "exact equality"}
    assert report.part("liu_zhang").ok
    ratio = report.part("ratio_log_convexity")
    assert max(ratio.fails) < 18
    root = report.part("nth_root_log_convexity")
    assert max(root.fails) < 4 and not root.undecided
    # every index is covered by at least one claim, and each is past its start
    assert report.ok
    validate(report.to_json())


def test_exact_checks_precision_independent(table_small):
    default = verify_corollaries(1, 100, table_small)
    starved = verify_corollaries(1, 100, table_small, STARVED)
    for name in ("log_concavity", "ratio_log_convexity"):
        a = default.part(name)
        b = starved.part(name)
        assert a.verdicts == b.verdicts
        assert a.verdicts and all(v.precision_used == 0 for v in a.verdicts)


def test_undecided_never_reported_as_holds(table_5k):
    report = verify_main2(3, 1486, 1496, table_5k, constants_for(3), STARVED)
    assert report.holds == 0
    assert report.undecided == list(range(1486, 1497))
    assert not report.ok


def test_report_is_deterministic(table_5k):
    a = verify_main1(26, 300, table_5k).dumps(include_wall_time=False)
    b = verify_main1(26, 300, table_5k).dumps(include_wall_time=False)
    assert a == b


def test_parallel_matches_serial(table_5k):
    serial = verify_main1(26, 400, table_5k).to_json(include_wall_time=False)
    parallel = verify_main1(26, 400, table_5k, workers=2).to_json(include_wall_time=False)
    assert serial == parallel


def test_lemmas_small_range(table_5k):
    report = verify_lemmas(3, 80, 200, table_5k)
    assert report.ok, [p.summary_line() for p in report.parts if not p.ok]
    ids = {(p.claim_id, p.r) for p in report.parts}
    assert ("e_hat_bound", None) in ids and ("lemma25", 3) in ids
    validate(json.loads(report.dumps()))


def test_identity_grid():
    grid = identity_grid(4, 1, 2000)
    assert len(grid) == 12
    assert {n for _, n in grid} == {100, 500, 1000}
    assert len(identity_grid(2, 1, 50)) == 6


def test_probe(table_5k):
    report = convergence_probe(1, [1000, 4000], table_5k)
    assert report.ok
    payload = report.to_json()
    validate(payload)
    assert [p["n"] for p in payload["points"]] == [1000, 4000]
    with pytest.raises(ValueError):
        convergence_probe(1, [table_5k.max_n], table_5k)


def test_envelope_narrows():
    lo1, hi1 = theorem_envelope(1, 10**4, 128)
    lo2, hi2 = theorem_envelope(1, 4 * 10**4, 128)
    assert (hi2 - lo2).hi_fraction() < (hi1 - lo1).lo_fraction()
