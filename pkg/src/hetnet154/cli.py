"""Command-line harness.

Verbs:
  run     simulate a scenario matrix, write metrics.csv + findings report
  check   re-evaluate the findings against an existing metrics.csv
  codec   encode/decode frames through a platform adapter (debug aid)
  export  per-figure CSVs (pps | loss | rssi) from a metrics.csv

The scenario seed resolves in this order: --seed flag, HETNET_SEED
environment variable, the scenario file, the built-in default.
"""

import argparse
import dataclasses
import os
import sys

from . import devices, findings, reporting, simulator
from . import frame as fr
from . import platforms as pf
from .engine import load_backend
from .errors import HetnetError, IncompleteMatrix, ParseError


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="hetnet154",
        description="Heterogeneous 802.15.4 interop toolkit and testbed simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write artifacts")
    run.add_argument("--scenario", metavar="PATH",
                     help="scenario file (default: built-in full matrix)")
    run.add_argument("--profiles", metavar="PATH",
                     help="platform profile file (default: shipped calibration)")
    run.add_argument("--seed", metavar="U64", default=None,
                     help="seed override (also HETNET_SEED env var)")
    run.add_argument("--out", metavar="DIR", default="out",
                     help="output directory (default: out)")
    run.add_argument("--format", choices=("text", "jsonl"), default="text",
                     help="findings report format")
    run.add_argument("--engine", choices=("auto", "c", "py"), default="auto",
                     help="simulation kernel (default: compiled when built)")

    chk = sub.add_parser("check", help="evaluate findings on an existing CSV")
    chk.add_argument("--metrics", metavar="PATH", default="out/metrics.csv")
    chk.add_argument("--format", choices=("text", "jsonl"), default="text")

    cod = sub.add_parser("codec", help="frame codec debugging tool")
    codsub = cod.add_subparsers(dest="direction", required=True)

    def _codec_common(p):
        p.add_argument("--platform", required=True,
                       help="arduino-xbee | sunspot | telosb | isense")
        p.add_argument("--dispatch", metavar="HEX4", default="4100",
                       help="two dispatch bytes as 4 hex digits (default 4100)")
        p.add_argument("--pan", metavar="N", default=hex(pf.DEFAULT_PAN_ID),
                       help="PAN id (default %(default)s)")

    enc = codsub.add_parser("encode", help="field list to wrapped frame hex")
    _codec_common(enc)
    enc.add_argument("--dest", metavar="N", default="0xffff",
                     help="destination 16-bit address (default broadcast)")
    enc.add_argument("--src", metavar="N", default="0x0001",
                     help="source 16-bit address")
    enc.add_argument("--seq", metavar="N", default="0", help="sequence number")
    enc.add_argument("--payload", metavar="HEX", default="",
                     help="payload as lowercase hex")
    enc.add_argument("--ack", action="store_true",
                     help="set the ack-request flag")

    dec = codsub.add_parser("decode", help="frame hex to field dump")
    _codec_common(dec)
    dec.add_argument("hex", help="frame hex string (air or XBee serial)")

    exp = sub.add_parser("export", help="write per-figure CSV files")
    exp.add_argument("axis", choices=("pps", "loss", "rssi"))
    exp.add_argument("--metrics", metavar="PATH", default="out/metrics.csv")
    exp.add_argument("--out", metavar="DIR", default="plots")
    return ap


def _parse_int(text, what):
    try:
        return int(str(text), 0)
    except ValueError:
        raise ParseError(f"bad {what}: {text!r}") from None


def _parse_hex(text, what):
    text = (text or "").strip().lower()
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise ParseError(f"bad {what} hex string: {text!r}") from None


def _interop_config(args) -> pf.InteropConfig:
    dispatch = _parse_hex(args.dispatch, "dispatch")
    if len(dispatch) != 2:
        raise ParseError("dispatch prefix must be exactly two bytes")
    return pf.negotiate(pf.PLATFORMS,
                        dispatch=fr.DispatchPrefix(dispatch[0], dispatch[1]),
                        pan_id=_parse_int(args.pan, "pan id"))


def _resolve_seed(args) -> int | None:
    if args.seed is not None:
        return _parse_int(args.seed, "seed")
    env = os.environ.get("HETNET_SEED")
    if env is not None:
        return _parse_int(env, "HETNET_SEED")
    return None


def _cmd_run(args) -> int:
    pset = devices.load_profiles(args.profiles) if args.profiles \
        else devices.default_profiles()
    if args.scenario:
        scenario = simulator.load_scenario(args.scenario, pset)
    else:
        scenario = simulator.parse_scenario(
            simulator.packaged_default_scenario_text(), pset)
    seed = _resolve_seed(args)
    if seed is not None:
        scenario = dataclasses.replace(scenario, seed=seed)
    records = simulator.run_scenario(
        scenario, backend=load_backend(None if args.engine == "auto"
                                       else args.engine))
    os.makedirs(args.out, exist_ok=True)
    reporting.write_metrics_csv(records, os.path.join(args.out, "metrics.csv"))
    try:
        checks = findings.check_findings(records)
        report = reporting.findings_report(checks, args.format)
        ok = all(c.passed for c in checks)
    except IncompleteMatrix as exc:
        # Restricted scenarios still produce metrics; the findings gate
        # needs the full matrix and reports itself unevaluated.
        report = f"SKIP findings: {exc}\n"
        ok = False
    ext = "jsonl" if args.format == "jsonl" else "txt"
    with open(os.path.join(args.out, f"findings.{ext}"), "w",
              encoding="utf-8", newline="") as fh:
        fh.write(report)
    sys.stdout.write(report)
    return 0 if ok else 1


def _cmd_check(args) -> int:
    records = reporting.load_metrics_csv(args.metrics)
    checks = findings.check_findings(records)
    sys.stdout.write(reporting.findings_report(checks, args.format))
    return 0 if all(c.passed for c in checks) else 1


def _cmd_codec(args) -> int:
    platform = pf.PlatformId.from_name(args.platform)
    cfg = _interop_config(args)
    if args.direction == "encode":
        frame = fr.make_data_frame(
            dest=fr.short16(_parse_int(args.dest, "dest")),
            src=fr.short16(_parse_int(args.src, "src")),
            pan_id=cfg.pan_id,
            seq=_parse_int(args.seq, "seq"),
            payload=_parse_hex(args.payload, "payload"),
            ack_request=args.ack,
        )
        sys.stdout.write(pf.wrap(platform, frame, cfg).hex() + "\n")
        return 0
    data = _parse_hex(args.hex, "frame")
    frame = pf.unwrap(platform, data, cfg)
    serial = (pf.caps(platform).envelope == pf.Envelope.XBEE_API
              and data[:1] == bytes((pf.XBEE_START,)))
    out = [
        f"platform: {platform.value}",
        f"envelope: {'xbee-serial' if serial else 'air'}",
        f"frame_type: {frame.fc.frame_type.name.lower()}",
        f"seq: {frame.seq}",
        f"dest_pan: {frame.dest_pan:#06x}",
        f"dest: {frame.dest.value:#06x}"
        + (" (broadcast)" if frame.dest.is_broadcast else ""),
        f"src: {frame.src.value:#06x}",
        f"ack_request: {'yes' if frame.fc.ack_request else 'no'}",
        f"dispatch: verified ({cfg.dispatch.as_bytes.hex()})",
        f"payload ({len(frame.payload)} bytes): {frame.payload.hex()}",
    ]
    if serial:
        out.append("checksum: verified")
    else:
        out.append(f"fcs: verified ({frame.fcs:#06x})")
    sys.stdout.write("\n".join(out) + "\n")
    return 0


def _cmd_export(args) -> int:
    records = reporting.load_metrics_csv(args.metrics)
    paths = reporting.export_plotdata(records, args.axis, args.out)
    for p in paths:
        sys.stdout.write(p + "\n")
    return 0


_COMMANDS = {"run": _cmd_run, "check": _cmd_check,
             "codec": _cmd_codec, "export": _cmd_export}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except HetnetError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
