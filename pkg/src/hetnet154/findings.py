"""Qualitative-claim checks over a metrics matrix.

Each check encodes one experimental finding as a predicate over the
aggregated records, lists the cells it evaluated, and carries the
offending cells when it fails, so a findings report doubles as a
regression gate for the shipped calibration.
"""

from dataclasses import dataclass, field

from .errors import IncompleteMatrix
from .platforms import PLATFORMS, PlatformId

#: Payload size above which the far-distance Arduino loss claim applies.
FAR_LOSS_PAYLOAD = 50
#: Payload size where the Arduino receive decline begins.
DECLINE_ONSET = 28


@dataclass
class FindingCheck:
    id: str
    description: str
    passed: bool
    evaluated: int                 # number of cells the predicate saw
    offending: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


def _cell_name(rec) -> str:
    return (f"{rec.tx_platform.value}->{rec.rx_platform.value}"
            f"@{rec.distance_m:g}m/{rec.payload_bytes}B")


class _Matrix:
    def __init__(self, records):
        if not records:
            raise IncompleteMatrix("empty record set")
        self.cells = {}
        for rec in records:
            key = (rec.tx_platform, rec.rx_platform, rec.distance_m,
                   rec.payload_bytes)
            if key in self.cells:
                raise IncompleteMatrix(f"duplicate cell {key}")
            self.cells[key] = rec
        self.txs = sorted({k[0] for k in self.cells}, key=PLATFORMS.index)
        self.rxs = sorted({k[1] for k in self.cells}, key=PLATFORMS.index)
        self.distances = sorted({k[2] for k in self.cells})
        self.payloads = sorted({k[3] for k in self.cells})
        for tx in self.txs:
            for rx in self.rxs:
                for d in self.distances:
                    for p in self.payloads:
                        if (tx, rx, d, p) not in self.cells:
                            raise IncompleteMatrix(
                                f"missing cell {(tx, rx, d, p)}")
        if set(self.txs) != set(PLATFORMS) or set(self.rxs) != set(PLATFORMS):
            raise IncompleteMatrix("findings need all four platforms on both sides")
        if len(self.distances) < 2:
            raise IncompleteMatrix("findings need at least two distances")
        if min(self.payloads) > DECLINE_ONSET \
                or max(self.payloads) <= FAR_LOSS_PAYLOAD:
            raise IncompleteMatrix(
                f"findings need payloads at or below {DECLINE_ONSET} "
                f"and above {FAR_LOSS_PAYLOAD} bytes")

    def get(self, tx, rx, d, p):
        return self.cells[(tx, rx, d, p)]

    @property
    def near(self):
        return self.distances[0]

    @property
    def far(self):
        return self.distances[-1]


def check_findings(records) -> list:
    """Evaluate every finding; deterministic order and content."""
    m = _Matrix(records)
    return [
        _isense_rx_lossless(m),
        _isense_tx_range(m),
        _arduino_far_loss(m),
        _rate_ratio(m),
        _sunspot_constant(m),
        _isense_fastest(m),
        _arduino_rx_decline(m),
        _loss_monotone(m),
        _sunspot_buffering(m),
    ]


def _isense_rx_lossless(m):
    offending, n = [], 0
    for key, rec in m.cells.items():
        if key[1] == PlatformId.ISENSE:
            n += 1
            if rec.loss_pct != 0.0:
                offending.append(_cell_name(rec))
    return FindingCheck(
        "isense-rx-lossless",
        "the iSense receiver loses no packets regardless of transmitter, "
        "distance and payload size",
        not offending, n, offending)


def _isense_tx_range(m):
    offending, n = [], 0
    for rx in m.rxs:
        for p in m.payloads:
            rec = m.get(PlatformId.ISENSE, rx, m.far, p)
            n += 1
            want_zero = rx == PlatformId.ISENSE
            ok = rec.loss_pct == (0.0 if want_zero else 100.0)
            if not ok:
                offending.append(_cell_name(rec))
    return FindingCheck(
        "isense-tx-range",
        f"at {m.far:g} m only the iSense receiver still hears the iSense "
        "transmitter; every other receiver loses 100%",
        not offending, n, offending)


def _arduino_far_loss(m):
    offending, n = [], 0
    payloads = [p for p in m.payloads if p > FAR_LOSS_PAYLOAD]
    for tx in m.txs:
        for p in payloads:
            for rx in m.rxs:
                rec = m.get(tx, rx, m.far, p)
                n += 1
                if rx == PlatformId.ARDUINO_XBEE:
                    if not rec.loss_pct > 50.0:
                        offending.append(_cell_name(rec))
                elif tx != PlatformId.ISENSE and rec.loss_pct > 50.0:
                    offending.append(_cell_name(rec))
    return FindingCheck(
        "arduino-far-loss",
        f"at {m.far:g} m with payloads over {FAR_LOSS_PAYLOAD} bytes the "
        "Arduino is the only receiver losing more than half the packets "
        "(iSense-transmitter blackout cells excepted)",
        not offending, n, offending)


def _tx_rate_rows(m, tx):
    """Broadcast pps per payload, observed through the lossless iSense rx."""
    return {p: m.get(tx, PlatformId.ISENSE, m.near, p).rx_pps
            for p in m.payloads}


def _rate_ratio(m, lo=1.7, hi=2.3):
    telosb = _tx_rate_rows(m, PlatformId.TELOSB)
    sunspot = _tx_rate_rows(m, PlatformId.SUNSPOT)
    offending = []
    for p in m.payloads:
        ratio = telosb[p] / sunspot[p]
        if not lo <= ratio <= hi:
            offending.append(f"payload {p}B ratio {ratio:.3f}")
    return FindingCheck(
        "telosb-sunspot-ratio",
        f"the TelosB broadcast rate is roughly double the SunSPOT rate "
        f"(within [{lo}, {hi}]) at every payload size",
        not offending, len(m.payloads), offending)


def _sunspot_constant(m):
    rows = _tx_rate_rows(m, PlatformId.SUNSPOT)
    spread = max(rows.values()) - min(rows.values())
    ok = spread == 0.0
    return FindingCheck(
        "sunspot-rate-constant",
        "the SunSPOT broadcast rate does not depend on payload size",
        ok, len(rows), [] if ok else [f"pps spread {spread!r}"])


def _isense_fastest(m):
    rates = {tx: _tx_rate_rows(m, tx) for tx in m.txs}
    offending = []
    for p in m.payloads:
        fastest = rates[PlatformId.ISENSE][p]
        for tx in m.txs:
            if tx != PlatformId.ISENSE and rates[tx][p] >= fastest:
                offending.append(f"{tx.value} at {p}B")
    return FindingCheck(
        "isense-fastest",
        "the iSense broadcast rate is strictly the highest at every "
        "payload size",
        not offending, len(m.payloads), offending)


def _arduino_rx_decline(m):
    tx = PlatformId.TELOSB
    decline = [p for p in m.payloads if p >= DECLINE_ONSET]
    offending = []
    prev = None
    for p in decline:
        pps = m.get(tx, PlatformId.ARDUINO_XBEE, m.near, p).rx_pps
        if prev is not None and pps > prev:
            offending.append(f"rx pps rose {prev:.3f}->{pps:.3f} at {p}B")
        prev = pps
    top = max(m.payloads)
    ard = m.get(tx, PlatformId.ARDUINO_XBEE, m.near, top).rx_pps
    for rx in m.rxs:
        if rx != PlatformId.ARDUINO_XBEE \
                and ard >= m.get(tx, rx, m.near, top).rx_pps:
            offending.append(f"not below {rx.value} at {top}B")
    return FindingCheck(
        "arduino-rx-decline",
        f"receiving from TelosB at {m.near:g} m, the Arduino receive rate "
        f"declines for payloads over {DECLINE_ONSET} bytes and ends below "
        "every other receiver",
        not offending, len(decline) + len(m.rxs) - 1, offending)


def _loss_monotone(m):
    offending, n = [], 0
    for tx in m.txs:
        for rx in m.rxs:
            for p in m.payloads:
                losses = [m.get(tx, rx, d, p).loss_pct for d in m.distances]
                n += 1
                if any(b < a for a, b in zip(losses, losses[1:])):
                    offending.append(f"{tx.value}->{rx.value}/{p}B {losses}")
    return FindingCheck(
        "loss-grows-with-distance",
        "per (transmitter, receiver, payload), packet loss never shrinks "
        "as distance grows",
        not offending, n, offending)


def _sunspot_buffering(m):
    offending, n = [], 0
    for p in m.payloads:
        ard = m.get(PlatformId.ISENSE, PlatformId.ARDUINO_XBEE, m.near, p)
        sun = m.get(PlatformId.ISENSE, PlatformId.SUNSPOT, m.near, p)
        n += 1
        if not 0.0 < sun.loss_pct < ard.loss_pct:
            offending.append(f"{p}B arduino={ard.loss_pct:.2f} "
                             f"sunspot={sun.loss_pct:.2f}")
    return FindingCheck(
        "sunspot-buffering",
        "under the fast iSense transmitter both slow receivers overload, "
        "but the SunSPOT's receive buffers keep its loss below the "
        "Arduino's at every payload size",
        not offending, n, offending)
