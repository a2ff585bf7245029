"""Findings checks: pass on the shipped calibration, fail under ablation,
and demand a complete matrix."""

import dataclasses

import pytest

from hetnet154 import errors
from hetnet154.devices import with_restart_disabled
from hetnet154.findings import check_findings
from hetnet154.platforms import PlatformId
from hetnet154.reporting import findings_report, metrics_to_csv, parse_metrics_csv
from hetnet154.simulator import Scenario, run_scenario

EXPECTED_IDS = [
    "isense-rx-lossless", "isense-tx-range", "arduino-far-loss",
    "telosb-sunspot-ratio", "sunspot-rate-constant", "isense-fastest",
    "arduino-rx-decline", "loss-grows-with-distance", "sunspot-buffering",
]


def small_scenario(pset, **overrides):
    base = dict(profiles=pset, payload_sizes=(6, 28, 53, 96),
                distances_m=(1.0, 8.5), beacons_per_run=200, repetitions=2,
                seed=7)
    base.update(overrides)
    return Scenario(**base)


def test_all_checks_pass_on_default_run(default_records):
    checks = check_findings(default_records)
    assert [c.id for c in checks] == EXPECTED_IDS
    assert all(c.passed for c in checks), [
        (c.id, c.offending) for c in checks if not c.passed]
    by_id = {c.id: c for c in checks}
    assert by_id["isense-rx-lossless"].evaluated == 240
    assert by_id["isense-tx-range"].evaluated == 80


def test_checks_survive_csv_round_trip(default_records):
    again = parse_metrics_csv(metrics_to_csv(default_records))
    a = [(c.id, c.passed) for c in check_findings(default_records)]
    b = [(c.id, c.passed) for c in check_findings(again)]
    assert a == b


def test_checks_pass_on_small_complete_matrix(pset):
    checks = check_findings(run_scenario(small_scenario(pset)))
    assert all(c.passed for c in checks)


def test_restart_ablation_flips_the_buffering_check(pset):
    ablated = small_scenario(with_restart_disabled(pset))
    checks = check_findings(run_scenario(ablated))
    failed = [c.id for c in checks if not c.passed]
    assert failed == ["sunspot-buffering"]
    bad = next(c for c in checks if c.id == "sunspot-buffering")
    assert bad.offending  # evidence cells are listed


def test_isense_sensitivity_ablation_breaks_losslessness(pset):
    deaf = dict(pset.profiles)
    ise = deaf[PlatformId.ISENSE]
    deaf[PlatformId.ISENSE] = dataclasses.replace(ise, sensitivity_dbm=-60.0)
    pset2 = dataclasses.replace(pset, profiles=deaf)
    checks = check_findings(run_scenario(small_scenario(pset2)))
    by_id = {c.id: c for c in checks}
    assert not by_id["isense-rx-lossless"].passed


def test_empty_records_rejected():
    with pytest.raises(errors.IncompleteMatrix):
        check_findings([])


def test_missing_cell_rejected(default_records):
    with pytest.raises(errors.IncompleteMatrix):
        check_findings(default_records[:-1])


def test_single_distance_rejected(pset):
    records = run_scenario(small_scenario(pset, distances_m=(1.0,)))
    with pytest.raises(errors.IncompleteMatrix):
        check_findings(records)


def test_payload_span_required(pset):
    records = run_scenario(small_scenario(pset, payload_sizes=(6, 20)))
    with pytest.raises(errors.IncompleteMatrix):
        check_findings(records)


def test_report_formats(default_records):
    checks = check_findings(default_records)
    text = findings_report(checks, "text")
    assert text.count("\n") == len(EXPECTED_IDS)
    assert text.startswith("PASS isense-rx-lossless")
    jsonl = findings_report(checks, "jsonl")
    import json
    rows = [json.loads(line) for line in jsonl.splitlines()]
    assert [r["id"] for r in rows] == EXPECTED_IDS
    assert all(r["status"] == "pass" for r in rows)
    with pytest.raises(ValueError):
        findings_report(checks, "yaml")
