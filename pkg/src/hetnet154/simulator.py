"""Deterministic replay of the broadcast-beacon experiment.

One transmitter at a time broadcasts `beacons_per_run` beacons per
payload size while every receiver records arrivals, RSSI and losses;
the matrix covers every (transmitter, receiver, distance, payload)
combination and is averaged over `repetitions` runs that differ only by
their random substreams.

Each (transmitter, distance, payload, repetition) lane is an
independent event-driven simulation (see _lanesim_py for the kernel
contract), so lanes may run in any order, or in parallel, without
changing a single bit of the output.  Identical seed implies identical
metrics.
"""

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources

from . import engine
from .devices import ProfileSet, rx_service_time, tx_interval
from .errors import ConfigError, InvalidScenario
from .platforms import PLATFORMS, PlatformId, common_payload_limit, rx_host_bytes
from .rng import Stream, distance_key, lane_seed
from .rssi import RSSI_OFFSET_DBM, PathLossModel, path_loss_db, rssi_mode_for

DEFAULT_DISTANCES = (1.0, 3.0, 8.5)
DEFAULT_BEACONS = 500
DEFAULT_REPETITIONS = 9
DEFAULT_SEED = 802154


def default_payload_sweep(count: int = 20, lo: int = 6, hi: int = 96) -> tuple:
    """`count` payload sizes evenly spread over [lo, hi]."""
    span = hi - lo
    return tuple(round(lo + k * span / (count - 1)) for k in range(count))


def channel_per(rx_dbm: float, sensitivity_dbm: float, margin_db: float) -> float:
    """Packet error rate from the link budget.

    0 above sensitivity + margin, 1 below sensitivity - margin, linear
    ramp in between (0.5 exactly at sensitivity).
    """
    if margin_db <= 0:
        raise ValueError("margin must be positive")
    if rx_dbm >= sensitivity_dbm + margin_db:
        return 0.0
    if rx_dbm <= sensitivity_dbm - margin_db:
        return 1.0
    return (sensitivity_dbm + margin_db - rx_dbm) / (2.0 * margin_db)


def rng_stream(seed: int, lane: tuple) -> Stream:
    """Independent deterministic stream for one lane.

    `lane` is (tx, rx, distance_m, payload, repetition); streams are
    keyed by platform identity, not list position, so reordering the
    scenario's platform lists cannot change any lane's draws.
    """
    tx, rx, distance_m, payload, repetition = lane
    return Stream(lane_seed(seed, PLATFORMS.index(tx), PLATFORMS.index(rx),
                            distance_key(distance_m), payload, repetition))


@dataclass(frozen=True)
class Scenario:
    profiles: ProfileSet
    transmitters: tuple = PLATFORMS
    receivers: tuple = PLATFORMS
    distances_m: tuple = DEFAULT_DISTANCES
    payload_sizes: tuple = field(default_factory=default_payload_sweep)
    beacons_per_run: int = DEFAULT_BEACONS
    repetitions: int = DEFAULT_REPETITIONS
    seed: int = DEFAULT_SEED
    path_loss: PathLossModel | None = None   # None: take the profile set's
    margin_db: float | None = None

    def channel_model(self) -> PathLossModel:
        return self.path_loss if self.path_loss is not None \
            else self.profiles.path_loss

    def channel_margin(self) -> float:
        return self.margin_db if self.margin_db is not None \
            else self.profiles.margin_db

    def validate(self) -> None:
        if not self.transmitters or not self.receivers:
            raise InvalidScenario("transmitter and receiver lists must be non-empty")
        if len(set(self.transmitters)) != len(self.transmitters) \
                or len(set(self.receivers)) != len(self.receivers):
            raise InvalidScenario("platform lists must not repeat a platform")
        if self.channel_margin() <= 0:
            raise InvalidScenario("channel margin must be positive")
        if self.beacons_per_run < 1:
            raise InvalidScenario("beacons_per_run must be >= 1")
        if self.repetitions < 1:
            raise InvalidScenario("repetitions must be >= 1")
        if not self.payload_sizes:
            raise InvalidScenario("payload_sizes must be non-empty")
        if any(d <= 0 for d in self.distances_m) or not self.distances_m:
            raise InvalidScenario("distances must be positive")
        involved = set(self.transmitters) | set(self.receivers)
        limit = common_payload_limit(involved)
        bad = [p for p in self.payload_sizes if not 0 <= p <= limit]
        if bad:
            raise InvalidScenario(
                f"payload sizes {bad} exceed the common limit of {limit} bytes")
        if not 0 <= self.seed < (1 << 64):
            raise InvalidScenario("seed must fit in 64 bits")


@dataclass
class MetricsRecord:
    """One aggregated (tx, rx, distance, payload) cell."""

    tx_platform: PlatformId
    rx_platform: PlatformId
    distance_m: float
    payload_bytes: int
    sent: int
    received: int
    rx_pps: float
    loss_pct: float
    rssi_mean_dbm: float   # nan when nothing was received
    rssi_raw_mean: float
    # Drop taxonomy; not part of the CSV schema but preserved in memory
    # so conservation can be audited per cell.
    channel_drops: int = 0
    overload_drops: int = 0
    restart_drops: int = 0


def lane_args(s: Scenario, tx: PlatformId, distance_m: float, payload: int,
              repetition: int) -> dict:
    """Kernel arguments for one lane (shared with the test oracle)."""
    model = s.channel_model()
    margin = s.channel_margin()
    prof_tx = s.profiles[tx]
    interval_ns = round(tx_interval(prof_tx, payload) * 1e9)
    if interval_ns < 1:
        raise InvalidScenario("beacon interval rounds below 1 ns")
    loss = path_loss_db(model, distance_m)
    rx_list = list(s.receivers)
    args = dict(
        n_beacons=s.beacons_per_run,
        interval_ns=interval_ns,
        mean_dbm=[], sigma_db=[], sensitivity_dbm=[], margin_db=[],
        rssi_offset=[], rssi_bias=[], rssi_mode=[],
        service_ns=[], buffer_cap=[],
        restart_threshold=[], restart_window_ns=[], restart_duration_ns=[],
        seeds=[],
    )
    for rx in rx_list:
        prof = s.profiles[rx]
        args["mean_dbm"].append(prof_tx.tx_power_dbm - loss)
        args["sigma_db"].append(model.shadowing_sigma_db)
        args["sensitivity_dbm"].append(prof.sensitivity_dbm)
        args["margin_db"].append(margin)
        args["rssi_offset"].append(RSSI_OFFSET_DBM)
        args["rssi_bias"].append(prof.rssi_bias_db)
        args["rssi_mode"].append(rssi_mode_for(rx))
        service = rx_service_time(prof, rx_host_bytes(rx, payload))
        args["service_ns"].append(round(service * 1e9))
        args["buffer_cap"].append(prof.rx.buffer_packets)
        thr = prof.rx.restart_threshold_pps
        args["restart_threshold"].append(int(thr) if thr else 0)
        args["restart_window_ns"].append(round(prof.rx.restart_window_s * 1e9))
        args["restart_duration_ns"].append(round(prof.rx.restart_duration_s * 1e9))
        args["seeds"].append(lane_seed(
            s.seed, PLATFORMS.index(tx), PLATFORMS.index(rx),
            distance_key(distance_m), payload, repetition))
    return args


def run_scenario(s: Scenario, backend=None) -> list:
    """Run the full matrix; returns MetricsRecords in (tx, rx, distance,
    payload) order with repetitions aggregated by summation.

    Pure function of the scenario (seed included): identical scenarios
    produce bit-identical records on any kernel backend.
    """
    s.validate()
    kern = backend or engine.load_backend()
    acc = {}
    intervals = {}
    for tx in s.transmitters:
        for d in s.distances_m:
            for payload in s.payload_sizes:
                for rep in range(s.repetitions):
                    args = lane_args(s, tx, d, payload, rep)
                    intervals[(tx, payload)] = args["interval_ns"]
                    results = kern.run_lane(**args)
                    for r, rx in enumerate(s.receivers):
                        key = (tx, rx, d, payload)
                        cell = acc.setdefault(key, [0, 0, 0, 0, 0.0, 0])
                        got = results[r]
                        cell[0] += got[0]  # received
                        cell[1] += got[1]  # channel drops
                        cell[2] += got[2]  # overload drops
                        cell[3] += got[3]  # restart drops
                        cell[4] += got[4]  # rssi dBm sum
                        cell[5] += got[5]  # rssi raw sum

    records = []
    for tx in s.transmitters:
        for rx in s.receivers:
            for d in s.distances_m:
                for payload in s.payload_sizes:
                    rec = _build_record(s, acc, intervals, tx, rx, d, payload)
                    records.append(rec)
    return records


def _build_record(s, acc, intervals, tx, rx, d, payload):
    received, ch, ov, rs, dbm_sum, raw_sum = acc[(tx, rx, d, payload)]
    sent = s.beacons_per_run * s.repetitions
    if received + ch + ov + rs != sent:
        raise RuntimeError(
            f"conservation violated in cell {(tx, rx, d, payload)}: "
            f"{received}+{ch}+{ov}+{rs} != {sent}")
    interval_ns = intervals[(tx, payload)]
    span_s = sent * interval_ns * 1e-9
    return MetricsRecord(
        tx_platform=tx, rx_platform=rx, distance_m=d, payload_bytes=payload,
        sent=sent, received=received,
        rx_pps=received / span_s,
        loss_pct=100.0 * (sent - received) / sent,
        rssi_mean_dbm=dbm_sum / received if received else math.nan,
        rssi_raw_mean=raw_sum / received if received else math.nan,
        channel_drops=ch, overload_drops=ov, restart_drops=rs,
    )


# --- scenario files ---

def default_scenario(profiles: ProfileSet) -> Scenario:
    return Scenario(profiles=profiles)


def parse_scenario(text: str, profiles: ProfileSet) -> Scenario:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed scenario file: {exc}") from None
    if "scenario" not in cp:
        raise ConfigError("scenario file needs a [scenario] section")
    sec = cp["scenario"]

    def platform_list(key):
        raw = sec.get(key, "")
        if not raw.strip():
            return PLATFORMS
        return tuple(PlatformId.from_name(tok) for tok in raw.split(","))

    def float_list(key, default):
        raw = sec.get(key, "")
        if not raw.strip():
            return default
        return tuple(float(tok) for tok in raw.split(","))

    payload_raw = sec.get("payload_sizes", "default").strip()
    if payload_raw in ("", "default"):
        payloads = default_payload_sweep()
    else:
        payloads = tuple(int(tok) for tok in payload_raw.split(","))

    path_loss = None
    margin = None
    if "channel" in cp:
        ch = cp["channel"]
        path_loss = PathLossModel(
            ref_loss_db=ch.getfloat("ref_loss_db", profiles.path_loss.ref_loss_db),
            exponent=ch.getfloat("exponent", profiles.path_loss.exponent),
            shadowing_sigma_db=ch.getfloat(
                "shadowing_sigma_db", profiles.path_loss.shadowing_sigma_db),
        )
        margin = ch.getfloat("margin_db", profiles.margin_db)

    try:
        scenario = Scenario(
            profiles=profiles,
            transmitters=platform_list("transmitters"),
            receivers=platform_list("receivers"),
            distances_m=float_list("distances_m", DEFAULT_DISTANCES),
            payload_sizes=payloads,
            beacons_per_run=sec.getint("beacons_per_run", DEFAULT_BEACONS),
            repetitions=sec.getint("repetitions", DEFAULT_REPETITIONS),
            seed=sec.getint("seed", DEFAULT_SEED),
            path_loss=path_loss,
            margin_db=margin,
        )
    except ValueError as exc:
        raise ConfigError(f"bad scenario value: {exc}") from None
    scenario.validate()
    return scenario


def load_scenario(path, profiles: ProfileSet) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from None
    return parse_scenario(text, profiles)


def packaged_default_scenario_text() -> str:
    return resources.files("hetnet154").joinpath("data/default_scenario.ini") \
        .read_text(encoding="utf-8")
