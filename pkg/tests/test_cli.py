"""CLI harness end to end (small scenarios keep this fast)."""

import os

import pytest

from hetnet154.cli import main
from hetnet154.devices import default_profiles, dump_profiles
from hetnet154.reporting import CSV_HEADER

SMALL_SCENARIO = """\
[scenario]
payload_sizes = 6, 28, 53, 96
distances_m = 1.0, 8.5
beacons_per_run = 200
repetitions = 2
seed = 7
"""

REDUCED_SCENARIO = """\
[scenario]
transmitters = telosb
receivers = telosb, isense
distances_m = 1.0
payload_sizes = 6, 10
beacons_per_run = 20
repetitions = 1
seed = 1
"""


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.ini"
    path.write_text(SMALL_SCENARIO)
    return str(path)


def read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def test_run_writes_artifacts_and_passes(tmp_path, scenario_file, capsys):
    out = str(tmp_path / "out")
    code = main(["run", "--scenario", scenario_file, "--out", out])
    assert code == 0
    csv = read(os.path.join(out, "metrics.csv"))
    lines = csv.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) - 1 == 4 * 4 * 2 * 4  # tx * rx * distances * payloads
    report = read(os.path.join(out, "findings.txt"))
    assert "FAIL" not in report
    assert "PASS isense-rx-lossless" in capsys.readouterr().out


def test_run_row_count_scales_with_matrix(tmp_path):
    scenario = tmp_path / "reduced.ini"
    scenario.write_text(REDUCED_SCENARIO)
    out = str(tmp_path / "out")
    code = main(["run", "--scenario", str(scenario), "--out", out])
    assert code == 1  # matrix too small for the findings gate
    lines = read(os.path.join(out, "metrics.csv")).strip().splitlines()
    assert len(lines) - 1 == 1 * 2 * 1 * 2
    assert "SKIP findings" in read(os.path.join(out, "findings.txt"))


def test_rerun_is_byte_identical(tmp_path, scenario_file):
    out_a = str(tmp_path / "a")
    out_b = str(tmp_path / "b")
    assert main(["run", "--scenario", scenario_file, "--out", out_a]) == 0
    assert main(["run", "--scenario", scenario_file, "--out", out_b]) == 0
    assert read(os.path.join(out_a, "metrics.csv")) \
        == read(os.path.join(out_b, "metrics.csv"))
    assert read(os.path.join(out_a, "findings.txt")) \
        == read(os.path.join(out_b, "findings.txt"))


def test_seed_flag_and_env_fallback(tmp_path, scenario_file, monkeypatch):
    out_a = str(tmp_path / "a")
    out_b = str(tmp_path / "b")
    out_c = str(tmp_path / "c")
    main(["run", "--scenario", scenario_file, "--out", out_a, "--seed", "99"])
    monkeypatch.setenv("HETNET_SEED", "99")
    main(["run", "--scenario", scenario_file, "--out", out_b])
    monkeypatch.delenv("HETNET_SEED")
    main(["run", "--scenario", scenario_file, "--out", out_c])  # file seed 7
    a = read(os.path.join(out_a, "metrics.csv"))
    b = read(os.path.join(out_b, "metrics.csv"))
    c = read(os.path.join(out_c, "metrics.csv"))
    assert a == b
    assert a != c


def test_jsonl_findings_format(tmp_path, scenario_file):
    out = str(tmp_path / "out")
    code = main(["run", "--scenario", scenario_file, "--out", out,
                 "--format", "jsonl"])
    assert code == 0
    import json
    rows = [json.loads(line)
            for line in read(os.path.join(out, "findings.jsonl")).splitlines()]
    assert all(r["status"] == "pass" for r in rows)


def test_custom_profiles_flag(tmp_path, scenario_file):
    profiles = tmp_path / "profiles.ini"
    profiles.write_text(dump_profiles(default_profiles()))
    out = str(tmp_path / "out")
    assert main(["run", "--scenario", scenario_file, "--out", out,
                 "--profiles", str(profiles)]) == 0


def test_unreadable_profiles_exit_nonzero(tmp_path, scenario_file, capsys):
    code = main(["run", "--scenario", scenario_file,
                 "--profiles", str(tmp_path / "missing.ini"),
                 "--out", str(tmp_path / "out")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_check_verb_round_trip(tmp_path, scenario_file, capsys):
    out = str(tmp_path / "out")
    main(["run", "--scenario", scenario_file, "--out", out])
    capsys.readouterr()
    code = main(["check", "--metrics", os.path.join(out, "metrics.csv")])
    assert code == 0
    assert "PASS" in capsys.readouterr().out
    assert main(["check", "--metrics", str(tmp_path / "nope.csv")]) == 2


def test_codec_round_trip(capsys):
    code = main(["codec", "encode", "--platform", "sunspot",
                 "--dest", "0xffff", "--src", "0x0002", "--seq", "9",
                 "--payload", "0a0b0c"])
    assert code == 0
    wire = capsys.readouterr().out.strip()
    assert wire == wire.lower() and set(wire) <= set("0123456789abcdef")
    code = main(["codec", "decode", "--platform", "isense", wire])
    assert code == 0
    dump = capsys.readouterr().out
    assert "payload (3 bytes): 0a0b0c" in dump
    assert "seq: 9" in dump
    assert "dest: 0xffff (broadcast)" in dump


def test_codec_detects_corruption(capsys):
    main(["codec", "encode", "--platform", "arduino-xbee", "--payload", "ff"])
    wire = capsys.readouterr().out.strip()
    corrupted = wire[:-2] + ("00" if wire[-2:] != "00" else "01")
    assert main(["codec", "decode", "--platform", "arduino-xbee",
                 corrupted]) == 2
    assert "error:" in capsys.readouterr().err


def test_codec_dispatch_mismatch(capsys):
    main(["codec", "encode", "--platform", "telosb", "--payload", "aa"])
    wire = capsys.readouterr().out.strip()
    code = main(["codec", "decode", "--platform", "telosb",
                 "--dispatch", "c000", wire])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_codec_rejects_bad_hex(capsys):
    assert main(["codec", "decode", "--platform", "telosb", "zz"]) == 2
    assert "error:" in capsys.readouterr().err


def test_export_writes_one_file_per_distance(tmp_path, scenario_file, capsys):
    out = str(tmp_path / "out")
    main(["run", "--scenario", scenario_file, "--out", out])
    plots = str(tmp_path / "plots")
    for axis in ("pps", "loss", "rssi"):
        code = main(["export", axis, "--metrics",
                     os.path.join(out, "metrics.csv"), "--out", plots])
        assert code == 0
    capsys.readouterr()
    for name in ("pps_1m.csv", "pps_8.5m.csv", "loss_1m.csv",
                 "loss_8.5m.csv", "rssi_1m.csv", "rssi_8.5m.csv"):
        assert os.path.exists(os.path.join(plots, name))
    pps = read(os.path.join(plots, "pps_1m.csv")).splitlines()
    assert pps[0].split(",")[0] == "payload_bytes"
    assert len(pps[0].split(",")) == 1 + 16
    assert len(pps) == 1 + 4  # header + payload rows
    rssi = read(os.path.join(plots, "rssi_8.5m.csv")).splitlines()
    assert len(rssi[0].split(",")) == 1 + 32  # dbm + raw per pair


def test_export_isense_receiver_columns_are_lossless(tmp_path, scenario_file):
    out = str(tmp_path / "out")
    main(["run", "--scenario", scenario_file, "--out", out])
    plots = str(tmp_path / "plots")
    main(["export", "loss", "--metrics", os.path.join(out, "metrics.csv"),
          "--out", plots])
    for name in ("loss_1m.csv", "loss_8.5m.csv"):
        lines = read(os.path.join(plots, name)).splitlines()
        header = lines[0].split(",")
        isense_cols = [i for i, h in enumerate(header)
                       if h.endswith("->isense")]
        assert len(isense_cols) == 4
        for row in lines[1:]:
            cells = row.split(",")
            assert all(cells[i] == "0" for i in isense_cols)
