"""Behavioral models of the four devices and their calibration.

Transmit side: one packet every t_base + t_byte * payload seconds.  The
reciprocal is the broadcast packets-per-second rate.

Receive side: a single server with service time service_base +
service_byte * envelope_bytes, a bounded FIFO buffer, and (Arduino only)
a restart rule: when more survivors than a threshold arrive within a
sliding window, the node drops everything and stays dark for a fixed
recovery time.  The Arduino service time is the UART drain of the
serial RX envelope at 38400 baud, which is what caps its receive rate.

Absolute numbers are calibration outputs, not measurements: `calibrate`
runs a deterministic solve/grid search against ordering, ratio and
link-budget targets and emits its choices to a report.  The shipped
default-profile file is exactly that output.
"""

import configparser
import io
import math
from dataclasses import dataclass, replace
from importlib import resources

from .errors import Infeasible, PayloadTooLarge, ProfileLoadError
from .platforms import PLATFORMS, PlatformCaps, PlatformId, caps, rx_host_bytes
from .rssi import PathLossModel, path_loss_db

#: Serial rate between the Arduino and its XBee module.
UART_BAUD = 38400


def uart_drain_time(total_bytes: int, baud: int = UART_BAUD) -> float:
    """Seconds to move `total_bytes` over a UART at 8N1 framing.

    Ten bits per byte on the wire (start + 8 data + stop).
    """
    if baud <= 0:
        raise ValueError(f"baud rate must be positive, got {baud}")
    if total_bytes < 0:
        raise ValueError("byte count must be >= 0")
    return total_bytes * 10 / baud


@dataclass(frozen=True)
class TxRateModel:
    t_base_s: float           # fixed per-packet overhead
    t_byte_s: float           # marginal cost per payload byte

    def __post_init__(self):
        if self.t_base_s <= 0:
            raise ValueError("t_base must be positive")
        if self.t_byte_s < 0:
            raise ValueError("t_byte must be >= 0")

    def interval(self, payload: int) -> float:
        return self.t_base_s + self.t_byte_s * payload

    def pps(self, payload: int) -> float:
        return 1.0 / self.interval(payload)


@dataclass(frozen=True)
class RxCapacityModel:
    service_base_s: float
    service_byte_s: float
    buffer_packets: int
    restart_threshold_pps: int | None = None
    restart_window_s: float = 1.0
    restart_duration_s: float = 1.0

    def __post_init__(self):
        if self.buffer_packets < 0:
            raise ValueError("buffer capacity must be >= 0")
        if self.restart_threshold_pps is not None and self.restart_threshold_pps <= 0:
            raise ValueError("restart threshold must be positive when set")

    def service_time(self, envelope_bytes: int) -> float:
        return self.service_base_s + self.service_byte_s * envelope_bytes


@dataclass(frozen=True)
class PlatformProfile:
    platform: PlatformId
    caps: PlatformCaps
    tx: TxRateModel
    rx: RxCapacityModel
    tx_power_dbm: float
    sensitivity_dbm: float
    rssi_bias_db: float = 0.0

    def __post_init__(self):
        if self.sensitivity_dbm >= self.tx_power_dbm:
            raise ValueError("sensitivity must lie below transmit power")


def tx_interval(profile: PlatformProfile, payload: int) -> float:
    """Seconds between broadcast beacons of the given payload size."""
    if payload + 2 > profile.caps.max_payload:
        raise PayloadTooLarge(
            f"{payload}+2 dispatch bytes exceeds {profile.platform.value} "
            f"limit of {profile.caps.max_payload}")
    return profile.tx.interval(payload)


def tx_pps(profile: PlatformProfile, payload: int) -> float:
    return 1.0 / tx_interval(profile, payload)


def rx_service_time(profile: PlatformProfile, envelope_bytes: int) -> float:
    return profile.rx.service_time(envelope_bytes)


@dataclass(frozen=True)
class ProfileSet:
    """Calibrated profiles plus the channel model they were solved against."""

    profiles: dict
    path_loss: PathLossModel
    margin_db: float

    def __getitem__(self, platform: PlatformId) -> PlatformProfile:
        return self.profiles[platform]


# --- calibration ---

@dataclass(frozen=True)
class CalibrationConstraints:
    """Qualitative targets the solved profiles must reproduce."""

    fastest: PlatformId = PlatformId.ISENSE
    slowest: PlatformId | None = None
    telosb_sunspot_ratio: tuple = (1.7, 2.3)
    sunspot_constant_rate: bool = True
    restart_threshold_pps: int = 150
    arduino_decline_onset_bytes: int = 28
    onset_tolerance_bytes: float = 2.0
    uart_baud: int = UART_BAUD
    payload_min: int = 6
    payload_max: int = 96
    near_distances: tuple = (1.0, 3.0)
    far_distance: float = 8.5
    arduino_far_per: tuple = (0.50, 0.60)
    ref_loss_db: float = 40.0
    margin_db: float = 3.0


@dataclass(frozen=True)
class CalibrationResult:
    profile_set: ProfileSet
    report: str


def _arduino_service_byte(baud: int) -> float:
    return uart_drain_time(1, baud)


def _solve_rates(c: CalibrationConstraints, notes: list):
    """Closed-form rate parameters from the ratio/onset/threshold targets."""
    lo, hi = c.telosb_sunspot_ratio
    if not 0 < lo <= hi:
        raise Infeasible(f"bad TelosB/SunSPOT ratio window {c.telosb_sunspot_ratio}")
    onset = c.arduino_decline_onset_bytes
    # Arduino receive service: pure UART drain of the RX envelope.
    svc_byte = _arduino_service_byte(c.uart_baud)
    onset_service = svc_byte * rx_host_bytes(PlatformId.ARDUINO_XBEE, onset)

    # TelosB: pick the steepest payload dependence whose rate span still
    # fits inside the ratio window with slack, anchoring the rate curve
    # so it crosses the Arduino service curve at the decline onset.
    span_budget = (hi / lo) / 1.08
    t_byte_t = 0.0
    for cand in (80e-6, 40e-6, 20e-6, 10e-6, 0.0):
        t_base = onset_service - onset * cand
        if t_base <= 0:
            continue
        span = (t_base + c.payload_max * cand) / (t_base + c.payload_min * cand)
        if span <= span_budget:
            t_byte_t = cand
            break
    t_base_t = onset_service - onset * t_byte_t
    telosb = TxRateModel(t_base_t, t_byte_t)
    notes.append(f"telosb tx: t_base={t_base_t:.9f}s t_byte={t_byte_t:.9f}s "
                 f"(onset anchor {onset} bytes)")

    # SunSPOT: constant rate inside the window the TelosB curve allows.
    s_hi = telosb.pps(c.payload_max) / lo
    s_lo = telosb.pps(c.payload_min) / hi
    if s_lo > s_hi:
        raise Infeasible(
            f"no constant SunSPOT rate fits ratio window [{lo}, {hi}]")
    s_rate = (s_lo + s_hi) / 2.0
    sunspot = TxRateModel(1.0 / s_rate, 0.0)
    notes.append(f"sunspot tx: t_base={1.0 / s_rate:.9f}s (constant {s_rate:.3f} pps)")

    # iSense: fastest everywhere and fast enough to trip the Arduino
    # restart rule at every payload size.
    t_byte_i = 10e-6
    floor_rate = max(1.03 * c.restart_threshold_pps,
                     1.06 * telosb.pps(c.payload_min))
    t_base_i = 1.0 / floor_rate - c.payload_max * t_byte_i
    if t_base_i <= 0:
        raise Infeasible("iSense rate floor is unreachable")
    isense = TxRateModel(t_base_i, t_byte_i)
    notes.append(f"isense tx: t_base={t_base_i:.9f}s t_byte={t_byte_i:.9f}s "
                 f"(floor {floor_rate:.3f} pps)")

    # Arduino: UART-bound per byte, base padded so it never outruns the
    # SunSPOT (both are the slow pair in the rate ordering).
    t_byte_a = 10.0 / c.uart_baud
    t_base_a = 1.0 / (0.97 * s_rate) - c.payload_min * t_byte_a
    arduino = TxRateModel(t_base_a, t_byte_a)
    notes.append(f"arduino tx: t_base={t_base_a:.9f}s t_byte={t_byte_a:.9f}s")

    return {PlatformId.ARDUINO_XBEE: arduino, PlatformId.SUNSPOT: sunspot,
            PlatformId.TELOSB: telosb, PlatformId.ISENSE: isense}


def _solve_services(c: CalibrationConstraints, tx_models, notes: list):
    svc_byte = _arduino_service_byte(c.uart_baud)
    telosb_top = tx_models[PlatformId.TELOSB].pps(c.payload_min)
    isense_low = tx_models[PlatformId.ISENSE].pps(c.payload_max)
    # SunSPOT serves slower than iSense transmits (buffered overload loss)
    # but faster than anything TelosB can send (no loss there).
    sun_rate = (telosb_top + isense_low) / 2.0
    services = {
        PlatformId.ARDUINO_XBEE: RxCapacityModel(
            0.0, svc_byte, buffer_packets=2,
            restart_threshold_pps=c.restart_threshold_pps),
        PlatformId.SUNSPOT: RxCapacityModel(1.0 / sun_rate, 0.0, buffer_packets=32),
        PlatformId.TELOSB: RxCapacityModel(2e-3, 20e-6, buffer_packets=4),
        PlatformId.ISENSE: RxCapacityModel(1e-3, 10e-6, buffer_packets=8),
    }
    notes.append(f"sunspot rx service: {1.0 / sun_rate:.9f}s ({sun_rate:.3f} pps)")
    return services


def _solve_link_budget(c: CalibrationConstraints, notes: list):
    """Grid over the path-loss exponent, then closed-form power levels.

    Targets (common tx power normalized to 0 dBm):
      * non-Arduino receivers decode the common platforms cleanly at
        every distance; the Arduino sits mid-ramp at the far distance;
      * the iSense transmit power is low enough that no other platform
        hears it at the far distance, yet everyone hears it at 3 m and
        the iSense receiver hears everything everywhere.
    """
    per_mid = (c.arduino_far_per[0] + c.arduino_far_per[1]) / 2.0
    margin = c.margin_db
    n = 2.0
    while n <= 4.0 + 1e-9:
        pl_near = c.ref_loss_db + 10 * n * math.log10(max(c.near_distances))
        pl_far = c.ref_loss_db + 10 * n * math.log10(c.far_distance)
        sens_a = -pl_far - margin + 2 * margin * per_mid
        sens_ts = -pl_far - margin - 1.0
        p_lo = max(sens_ts, sens_a) + margin + pl_near
        p_hi = min(sens_ts, sens_a) - margin + pl_far
        if p_hi - p_lo >= 2.0:
            p_isense = (p_lo + p_hi) / 2.0
            sens_i = min(p_isense, 0.0) - pl_far - margin - 3.0
            notes.append(
                f"link budget: exponent={n:.2f} isense_tx={p_isense:.3f}dBm "
                f"sens(arduino)={sens_a:.3f} sens(cc2420)={sens_ts:.3f} "
                f"sens(isense)={sens_i:.3f}")
            model = PathLossModel(ref_loss_db=c.ref_loss_db, exponent=round(n, 2),
                                  shadowing_sigma_db=0.0)
            powers = {p: 0.0 for p in PLATFORMS}
            powers[PlatformId.ISENSE] = p_isense
            sens = {PlatformId.ARDUINO_XBEE: sens_a, PlatformId.SUNSPOT: sens_ts,
                    PlatformId.TELOSB: sens_ts, PlatformId.ISENSE: sens_i}
            return model, powers, sens
        n = round(n + 0.05, 2)
    raise Infeasible("no path-loss exponent in [2, 4] separates the link budget")


def _ramp_per(rx_dbm: float, sensitivity: float, margin: float) -> float:
    if rx_dbm >= sensitivity + margin:
        return 0.0
    if rx_dbm <= sensitivity - margin:
        return 1.0
    return (sensitivity + margin - rx_dbm) / (2.0 * margin)


def _verify(c: CalibrationConstraints, pset: ProfileSet, notes: list):
    failures = []
    payloads = range(c.payload_min, c.payload_max + 1)
    prof = pset.profiles

    def rate(p, payload):
        return prof[p].tx.pps(payload)

    lo, hi = c.telosb_sunspot_ratio
    for payload in payloads:
        ratio = rate(PlatformId.TELOSB, payload) / rate(PlatformId.SUNSPOT, payload)
        if not lo <= ratio <= hi:
            failures.append(f"telosb/sunspot ratio {ratio:.3f} at {payload}B "
                            f"outside [{lo}, {hi}]")
            break
    if c.sunspot_constant_rate and prof[PlatformId.SUNSPOT].tx.t_byte_s != 0.0:
        failures.append("sunspot rate is not constant")
    for payload in payloads:
        fastest = rate(c.fastest, payload)
        others = [rate(p, payload) for p in PLATFORMS if p != c.fastest]
        if not all(fastest > o for o in others):
            failures.append(f"{c.fastest.value} not strictly fastest at {payload}B")
            break
    if c.slowest is not None:
        for payload in payloads:
            slowest = rate(c.slowest, payload)
            others = [rate(p, payload) for p in PLATFORMS if p != c.slowest]
            if not all(slowest < o for o in others):
                failures.append(
                    f"{c.slowest.value} not strictly slowest at {payload}B")
                break

    ard = prof[PlatformId.ARDUINO_XBEE]
    if ard.rx.restart_threshold_pps != c.restart_threshold_pps:
        failures.append("arduino restart threshold not applied")
    # Decline onset: where the UART drain crosses the TelosB beacon interval.
    tel = prof[PlatformId.TELOSB].tx
    svc = ard.rx
    onset = None
    for payload in payloads:
        if svc.service_time(rx_host_bytes(PlatformId.ARDUINO_XBEE, payload)) \
                > tel.interval(payload):
            onset = payload
            break
    if onset is None or abs(onset - c.arduino_decline_onset_bytes) \
            > c.onset_tolerance_bytes:
        failures.append(f"arduino decline onset {onset} not within "
                        f"{c.onset_tolerance_bytes} bytes of "
                        f"{c.arduino_decline_onset_bytes}")

    def per(tx, rx, d):
        rx_dbm = prof[tx].tx_power_dbm - path_loss_db(pset.path_loss, d)
        return _ramp_per(rx_dbm, prof[rx].sensitivity_dbm, pset.margin_db)

    common = [p for p in PLATFORMS if p != PlatformId.ISENSE]
    for tx in common:
        for d in c.near_distances:
            for rx in PLATFORMS:
                if per(tx, rx, d) != 0.0:
                    failures.append(f"{tx.value}->{rx.value} lossy at {d}m")
        for rx in common:
            if rx == PlatformId.ARDUINO_XBEE:
                p = per(tx, rx, c.far_distance)
                if not c.arduino_far_per[0] < p < c.arduino_far_per[1]:
                    failures.append(
                        f"arduino far-channel PER {p:.3f} outside "
                        f"{c.arduino_far_per}")
            elif per(tx, rx, c.far_distance) != 0.0:
                failures.append(f"{tx.value}->{rx.value} lossy at far distance")
    for d in list(c.near_distances) + [c.far_distance]:
        for tx in PLATFORMS:
            if per(tx, PlatformId.ISENSE, d) != 0.0:
                failures.append(f"isense receiver lossy from {tx.value} at {d}m")
    for rx in common:
        if per(PlatformId.ISENSE, rx, c.far_distance) != 1.0:
            failures.append(f"isense->{rx.value} not blacked out at far distance")
        for d in c.near_distances:
            if per(PlatformId.ISENSE, rx, d) != 0.0:
                failures.append(f"isense->{rx.value} lossy at {d}m")

    if failures:
        raise Infeasible("; ".join(failures))
    notes.extend("ok: " + line for line in (
        f"telosb/sunspot ratio within [{lo}, {hi}] for all payloads",
        f"{c.fastest.value} strictly fastest at all payloads",
        f"arduino decline onset at {onset} bytes",
        "link-budget PER targets met at all distances",
    ))


def calibrate(constraints: CalibrationConstraints | None = None) -> CalibrationResult:
    """Deterministic solve of the default profiles.

    Raises Infeasible when the constraint set cannot be satisfied (for
    example, one platform required to be both fastest and slowest).
    """
    c = constraints or CalibrationConstraints()
    notes = []
    tx_models = _solve_rates(c, notes)
    services = _solve_services(c, tx_models, notes)
    model, powers, sens = _solve_link_budget(c, notes)
    profiles = {
        p: PlatformProfile(platform=p, caps=caps(p), tx=tx_models[p],
                           rx=services[p], tx_power_dbm=powers[p],
                           sensitivity_dbm=sens[p])
        for p in PLATFORMS
    }
    pset = ProfileSet(profiles=profiles, path_loss=model, margin_db=c.margin_db)
    _verify(c, pset, notes)
    report = "\n".join(["calibration report", "=" * 18] + notes) + "\n"
    return CalibrationResult(profile_set=pset, report=report)


# --- profile file I/O (key-value per platform) ---

def dump_profiles(pset: ProfileSet) -> str:
    cp = configparser.ConfigParser()
    cp["channel"] = {
        "ref_loss_db": repr(pset.path_loss.ref_loss_db),
        "exponent": repr(pset.path_loss.exponent),
        "shadowing_sigma_db": repr(pset.path_loss.shadowing_sigma_db),
        "margin_db": repr(pset.margin_db),
    }
    for p in PLATFORMS:
        prof = pset.profiles[p]
        section = {
            "tx_t_base_s": repr(prof.tx.t_base_s),
            "tx_t_byte_s": repr(prof.tx.t_byte_s),
            "rx_service_base_s": repr(prof.rx.service_base_s),
            "rx_service_byte_s": repr(prof.rx.service_byte_s),
            "rx_buffer_packets": str(prof.rx.buffer_packets),
            "tx_power_dbm": repr(prof.tx_power_dbm),
            "sensitivity_dbm": repr(prof.sensitivity_dbm),
            "rssi_bias_db": repr(prof.rssi_bias_db),
        }
        if prof.rx.restart_threshold_pps is not None:
            section["rx_restart_threshold_pps"] = str(prof.rx.restart_threshold_pps)
            section["rx_restart_window_s"] = repr(prof.rx.restart_window_s)
            section["rx_restart_duration_s"] = repr(prof.rx.restart_duration_s)
        cp[p.value] = section
    out = io.StringIO()
    cp.write(out)
    return out.getvalue()


def parse_profiles(text: str) -> ProfileSet:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ProfileLoadError(f"malformed profile file: {exc}") from None
    try:
        ch = cp["channel"]
        model = PathLossModel(
            ref_loss_db=ch.getfloat("ref_loss_db"),
            exponent=ch.getfloat("exponent"),
            shadowing_sigma_db=ch.getfloat("shadowing_sigma_db", 0.0),
        )
        margin = ch.getfloat("margin_db", 3.0)
        profiles = {}
        for p in PLATFORMS:
            sec = cp[p.value]
            threshold = sec.getint("rx_restart_threshold_pps", fallback=None)
            rx = RxCapacityModel(
                service_base_s=sec.getfloat("rx_service_base_s"),
                service_byte_s=sec.getfloat("rx_service_byte_s"),
                buffer_packets=sec.getint("rx_buffer_packets"),
                restart_threshold_pps=threshold,
                restart_window_s=sec.getfloat("rx_restart_window_s", 1.0),
                restart_duration_s=sec.getfloat("rx_restart_duration_s", 1.0),
            )
            profiles[p] = PlatformProfile(
                platform=p, caps=caps(p),
                tx=TxRateModel(sec.getfloat("tx_t_base_s"),
                               sec.getfloat("tx_t_byte_s")),
                rx=rx,
                tx_power_dbm=sec.getfloat("tx_power_dbm"),
                sensitivity_dbm=sec.getfloat("sensitivity_dbm"),
                rssi_bias_db=sec.getfloat("rssi_bias_db", 0.0),
            )
    except (KeyError, ValueError) as exc:
        raise ProfileLoadError(f"profile file missing or bad field: {exc}") from None
    return ProfileSet(profiles=profiles, path_loss=model, margin_db=margin)


def load_profiles(path) -> ProfileSet:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProfileLoadError(f"cannot read profile file {path}: {exc}") from None
    return parse_profiles(text)


def default_profiles() -> ProfileSet:
    """The shipped calibration (see data/default_profiles.ini)."""
    text = resources.files("hetnet154").joinpath("data/default_profiles.ini") \
        .read_text(encoding="utf-8")
    return parse_profiles(text)


def with_restart_disabled(pset: ProfileSet) -> ProfileSet:
    """Ablation helper: the same profiles without the Arduino restart rule."""
    prof = dict(pset.profiles)
    ard = prof[PlatformId.ARDUINO_XBEE]
    prof[PlatformId.ARDUINO_XBEE] = replace(
        ard, rx=replace(ard.rx, restart_threshold_pps=None))
    return ProfileSet(profiles=prof, path_loss=pset.path_loss,
                      margin_db=pset.margin_db)
