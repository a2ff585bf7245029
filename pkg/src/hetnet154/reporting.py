"""Byte-stable output: metrics CSV, findings report, per-figure exports.

All floating-point values are printed with 6 significant digits using
Python's correctly-rounded formatter (ties to even), so re-running a
scenario with the same seed reproduces every artifact byte for byte.
"""

import json
import math
import os

from .errors import ConfigError, IncompleteMatrix, ParseError
from .platforms import PlatformId
from .simulator import MetricsRecord

CSV_HEADER = ("tx_platform,rx_platform,distance_m,payload_bytes,"
              "sent,received,rx_pps,loss_pct,rssi_mean_dbm,rssi_raw_mean")


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return format(x, ".6g")


def metrics_to_csv(records) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join((
            r.tx_platform.value, r.rx_platform.value,
            fmt_float(r.distance_m), str(r.payload_bytes),
            str(r.sent), str(r.received),
            fmt_float(r.rx_pps), fmt_float(r.loss_pct),
            fmt_float(r.rssi_mean_dbm), fmt_float(r.rssi_raw_mean),
        )))
    return "\n".join(lines) + "\n"


def write_metrics_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(metrics_to_csv(records))


def parse_metrics_csv(text: str) -> list:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ParseError("not a metrics CSV (unexpected header)")
    records = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 10:
            raise ParseError(f"bad metrics row: {ln!r}")
        records.append(MetricsRecord(
            tx_platform=PlatformId.from_name(parts[0]),
            rx_platform=PlatformId.from_name(parts[1]),
            distance_m=float(parts[2]),
            payload_bytes=int(parts[3]),
            sent=int(parts[4]),
            received=int(parts[5]),
            rx_pps=float(parts[6]),
            loss_pct=float(parts[7]),
            rssi_mean_dbm=float(parts[8]),
            rssi_raw_mean=float(parts[9]),
        ))
    return records


def load_metrics_csv(path) -> list:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_metrics_csv(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read metrics file {path}: {exc}") from None


# --- findings report ---

def findings_report(checks, fmt: str = "text") -> str:
    """One line per check: id, status, evidence cell count."""
    if fmt == "jsonl":
        lines = []
        for c in checks:
            lines.append(json.dumps({
                "id": c.id, "status": c.status, "cells": c.evaluated,
                "offending": c.offending, "description": c.description,
            }, sort_keys=True))
        return "\n".join(lines) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = []
    for c in checks:
        line = f"{c.status.upper():4s} {c.id:24s} cells={c.evaluated:<4d} {c.description}"
        if c.offending:
            shown = "; ".join(c.offending[:4])
            more = len(c.offending) - 4
            line += f" [offending: {shown}" + (f"; +{more} more]" if more > 0 else "]")
        lines.append(line)
    return "\n".join(lines) + "\n"


# --- per-figure exports ---

_AXES = ("pps", "loss", "rssi")


def export_plotdata(records, axis: str, out_dir) -> list:
    """One plot-ready CSV per distance: rows are payload sizes, columns
    are (tx, rx) series.  The rssi axis emits both the normalized and
    the raw series."""
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {_AXES}, got {axis!r}")
    cells = {}
    for r in records:
        cells[(r.tx_platform, r.rx_platform, r.distance_m, r.payload_bytes)] = r
    txs = sorted({k[0] for k in cells}, key=list(PlatformId).index)
    rxs = sorted({k[1] for k in cells}, key=list(PlatformId).index)
    distances = sorted({k[2] for k in cells})
    payloads = sorted({k[3] for k in cells})
    for tx in txs:
        for rx in rxs:
            for d in distances:
                for p in payloads:
                    if (tx, rx, d, p) not in cells:
                        raise IncompleteMatrix(f"missing cell {(tx, rx, d, p)}")

    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for d in distances:
        header = ["payload_bytes"]
        for tx in txs:
            for rx in rxs:
                pair = f"{tx.value}->{rx.value}"
                if axis == "rssi":
                    header += [f"{pair}_dbm", f"{pair}_raw"]
                else:
                    header.append(pair)
        rows = [",".join(header)]
        for p in payloads:
            row = [str(p)]
            for tx in txs:
                for rx in rxs:
                    rec = cells[(tx, rx, d, p)]
                    if axis == "pps":
                        row.append(fmt_float(rec.rx_pps))
                    elif axis == "loss":
                        row.append(fmt_float(rec.loss_pct))
                    else:
                        row += [fmt_float(rec.rssi_mean_dbm),
                                fmt_float(rec.rssi_raw_mean)]
            rows.append(",".join(row))
        path = os.path.join(out_dir, f"{axis}_{d:g}m.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(rows) + "\n")
        paths.append(path)
    return paths
