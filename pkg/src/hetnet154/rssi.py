"""RSSI normalization across the four platforms, plus the channel model.

Each receive path reports signal strength differently:

* sunspot / telosb -- CC2420 radio.  The RSSI_VAL register holds an
  8-bit signed two's-complement value averaged over 8 symbol periods;
  power is P = RSSI_VAL + RSSI_OFFSET dBm with RSSI_OFFSET ~ -45.
  The SunSPOT firmware interprets the register correctly; the TelosB
  receive function returns the register octet as an unsigned number and
  never applies the offset, so its values need repair (`telosb_fix`).
* arduino-xbee -- the RX indicator carries the magnitude of the
  (negative) received power, e.g. 72 means -72 dBm.
* isense -- signed dBm, passed through.

`normalize` maps any platform-tagged raw octet to dBm; `encode_raw` is
the inverse used when synthesizing readings.  A per-platform additive
bias (default 0) models systematic deviation between receivers without
asserting specific values for it.

The simulator synthesizes received power with a log-distance path-loss
model: P_rx = P_tx - ref_loss - 10*exponent*log10(d / 1 m) + N(0, sigma).
"""

import math
from dataclasses import dataclass

from .errors import NonPositiveDistance
from .platforms import PlatformId

#: Empirical CC2420 register-to-dBm offset.
RSSI_OFFSET_DBM = -45.0

#: Sanity window for normalized readings; values outside it indicate a
#: mis-decoded register (e.g. a two's-complement bug), not a real signal.
PLAUSIBLE_DBM = (-130.0, 10.0)

# Raw-octet interpretation families, also used by the simulation kernels.
MODE_CC2420 = 0
MODE_XBEE_MAGNITUDE = 1
MODE_SIGNED_DBM = 2

_MODE = {
    PlatformId.SUNSPOT: MODE_CC2420,
    PlatformId.TELOSB: MODE_CC2420,
    PlatformId.ARDUINO_XBEE: MODE_XBEE_MAGNITUDE,
    PlatformId.ISENSE: MODE_SIGNED_DBM,
}


def rssi_mode_for(platform: PlatformId) -> int:
    return _MODE[platform]


def is_plausible(dbm: float) -> bool:
    return PLAUSIBLE_DBM[0] <= dbm <= PLAUSIBLE_DBM[1]


def signed8(octet: int) -> int:
    """Reinterpret an octet as an 8-bit two's-complement value."""
    if not 0 <= octet <= 0xFF:
        raise ValueError(f"octet out of range: {octet}")
    return octet - 256 if octet >= 128 else octet


def _round_half_up(x: float) -> int:
    # floor(x + 0.5): identical in the C kernel, unlike banker's rounding.
    return math.floor(x + 0.5)


def cc2420_to_dbm(rssi_val: int, offset: float = RSSI_OFFSET_DBM) -> float:
    """Register value to power: P = RSSI_VAL + RSSI_OFFSET [dBm]."""
    if not -128 <= rssi_val <= 127:
        raise ValueError(f"RSSI_VAL out of signed 8-bit range: {rssi_val}")
    return float(rssi_val) + offset


def telosb_fix(raw: int, offset: float = RSSI_OFFSET_DBM) -> float:
    """Repair a TelosB reading.

    The TelosB receive path returns the raw RSSI_VAL octet without the
    two's-complement interpretation and without the offset; apply both.
    """
    return cc2420_to_dbm(signed8(raw), offset)


@dataclass(frozen=True)
class RawRssiReading:
    """A raw RSSI octet as reported by one platform's receive path."""

    platform: PlatformId
    raw: int

    def __post_init__(self):
        if not 0 <= self.raw <= 0xFF:
            raise ValueError(f"raw RSSI octet out of range: {self.raw}")


def normalize(reading: RawRssiReading, offset: float = RSSI_OFFSET_DBM) -> float:
    """Platform-tagged raw octet to dBm.

    Depends only on the platform and the octet, never on payload.
    """
    mode = _MODE[reading.platform]
    if mode == MODE_CC2420:
        # SunSPOT reads the register correctly; TelosB needs the full
        # repair.  Numerically both are signed register + offset.
        return cc2420_to_dbm(signed8(reading.raw), offset)
    if mode == MODE_XBEE_MAGNITUDE:
        return -float(reading.raw)
    return float(signed8(reading.raw))


def encode_raw(platform: PlatformId, dbm: float,
               offset: float = RSSI_OFFSET_DBM, bias_db: float = 0.0) -> int:
    """The raw octet a platform would report for a physical power.

    Inverse of `normalize` up to octet quantization and the platform's
    additive bias: normalize(encode_raw(P)) == P + bias within 0.5 dB
    (exactly, once clamped to the octet's representable range).
    """
    value = dbm + bias_db
    mode = _MODE[platform]
    if mode == MODE_CC2420:
        reg = _round_half_up(value - offset)
        return max(-128, min(127, reg)) & 0xFF
    if mode == MODE_XBEE_MAGNITUDE:
        return max(0, min(255, _round_half_up(-value)))
    reg = _round_half_up(value)
    return max(-128, min(127, reg)) & 0xFF


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance path loss with optional log-normal shadowing."""

    ref_loss_db: float = 40.0   # loss at the 1 m reference distance
    exponent: float = 2.0
    shadowing_sigma_db: float = 0.0

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("path-loss exponent must be >= 0")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing sigma must be >= 0")


def path_loss_db(model: PathLossModel, distance_m: float) -> float:
    if distance_m <= 0:
        raise NonPositiveDistance(f"distance must be positive, got {distance_m}")
    return model.ref_loss_db + 10.0 * model.exponent * math.log10(distance_m)


def synth_rssi(tx_power_dbm: float, distance_m: float, model: PathLossModel,
               rng=None) -> float:
    """Received power for a transmission at `distance_m`.

    `rng` supplies the shadowing draw (any object with gauss()); it is
    owned by the caller and only touched when sigma > 0.
    """
    value = tx_power_dbm - path_loss_db(model, distance_m)
    if model.shadowing_sigma_db > 0.0:
        if rng is None:
            raise ValueError("shadowing requires an explicit rng")
        value += rng.gauss(0.0, model.shadowing_sigma_db)
    return value
