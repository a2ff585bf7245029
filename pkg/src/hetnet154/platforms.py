"""Per-platform envelopes and capability tables.

Four radio stacks, four quirks:

* arduino-xbee -- the host talks to the radio over a serial API
  (MaxStream framing: 0x7E, 16-bit length, API id, checksum); the module
  itself puts a plain 802.15.4 frame on air.
* sunspot      -- natively 64-bit addressing with LowPAN on top; the
  custom stack forces 16-bit mode and bypasses LowPAN, so the air frame
  is a plain MAC frame whose payload starts with the dispatch bytes.
* telosb       -- plain frames, 16-bit addressing only, auto-ack disabled.
* isense       -- plain frames, both addressing modes.

Every stack prefixes payloads with the two dispatch bytes, so a frame
emitted through any adapter decodes through every other adapter.

XBee serial framing used here (API mode 1, no escaping):

    0x7E | length (2, big-endian) | api-specific body | checksum

    TX request (api 0x01):  frame_id, dest16 (BE), options, data
    RX indicator (api 0x81): src16 (BE), rssi, options, data

checksum = 0xFF - (sum of body octets) mod 256.
"""

from dataclasses import dataclass, field
from enum import Enum

from . import frame as fr
from .errors import (
    AddressingUnsupported,
    BadChecksum,
    ParseError,
    PayloadTooLarge,
    TruncatedFrame,
)


class PlatformId(str, Enum):
    ARDUINO_XBEE = "arduino-xbee"
    SUNSPOT = "sunspot"
    TELOSB = "telosb"
    ISENSE = "isense"

    @classmethod
    def from_name(cls, name: str) -> "PlatformId":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ParseError(
                f"unknown platform {name!r}; expected one of "
                + ", ".join(p.value for p in cls)) from None


#: Canonical platform ordering used by the simulator and CSV output.
PLATFORMS = (PlatformId.ARDUINO_XBEE, PlatformId.SUNSPOT,
             PlatformId.TELOSB, PlatformId.ISENSE)


class Envelope(Enum):
    XBEE_API = "xbee-api"
    LOWPAN_BYPASS = "lowpan-bypass"
    PLAIN = "plain"


@dataclass(frozen=True)
class HardwareInfo:
    """Informational hardware comparison fields (not used by any model)."""

    processor: str
    mips: int
    ram: str
    flash: str
    radio: str
    language: str


@dataclass(frozen=True)
class PlatformCaps:
    max_payload: int          # MAC payload budget in octets
    supports_addr16: bool     # native stack support, before any adapter
    supports_addr64: bool
    auto_ack: bool
    envelope: Envelope
    info: HardwareInfo


_CAPS = {
    PlatformId.ARDUINO_XBEE: PlatformCaps(
        max_payload=100, supports_addr16=True, supports_addr64=True,
        auto_ack=True, envelope=Envelope.XBEE_API,
        info=HardwareInfo("ATmega328 (16 MHz)", 16, "16 KB", "32 KB",
                          "XBee Series 1", "Wiring (C++)"),
    ),
    PlatformId.SUNSPOT: PlatformCaps(
        max_payload=113, supports_addr16=False, supports_addr64=True,
        auto_ack=True, envelope=Envelope.LOWPAN_BYPASS,
        info=HardwareInfo("ARM920T (180 MHz)", 200, "512 KB", "4 MB",
                          "CC2420", "J2ME"),
    ),
    PlatformId.TELOSB: PlatformCaps(
        max_payload=128, supports_addr16=True, supports_addr64=False,
        auto_ack=False, envelope=Envelope.PLAIN,
        info=HardwareInfo("MSP430 (16 MHz)", 16, "10 KB", "48 KB",
                          "CC2420", "nesC"),
    ),
    PlatformId.ISENSE: PlatformCaps(
        max_payload=116, supports_addr16=True, supports_addr64=True,
        auto_ack=True, envelope=Envelope.PLAIN,
        info=HardwareInfo("JN5139 (16 MHz)", 16, "96 KB", "128 KB",
                          "JN5139", "C++"),
    ),
}


def caps(platform: PlatformId) -> PlatformCaps:
    return _CAPS[platform]


DEFAULT_PAN_ID = 0x2154


@dataclass(frozen=True)
class InteropConfig:
    """Settings every node must share for cross-platform traffic."""

    dispatch: fr.DispatchPrefix = fr.DEFAULT_DISPATCH
    pan_id: int = DEFAULT_PAN_ID
    addressing: fr.AddrMode = fr.AddrMode.SHORT16
    ack_mode: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.addressing != fr.AddrMode.SHORT16:
            raise ValueError("interop addressing is always 16-bit")


def negotiate(platforms, dispatch: fr.DispatchPrefix = fr.DEFAULT_DISPATCH,
              pan_id: int = DEFAULT_PAN_ID) -> InteropConfig:
    """Common-denominator configuration for a set of platforms.

    16-bit addressing always (the SunSPOT side is handled by its custom
    stack), shared PAN id and dispatch prefix, per-platform auto-ack
    flags from the capability table.
    """
    platforms = set(platforms)
    if not platforms:
        raise ValueError("cannot negotiate an empty platform set")
    ack = {p: caps(p).auto_ack for p in PLATFORMS}
    return InteropConfig(dispatch=dispatch, pan_id=pan_id, ack_mode=ack)


def validate_payload(platform: PlatformId, size: int) -> None:
    """Check a logical payload size against the platform budget.

    The two dispatch bytes ride inside the MAC payload, so `size + 2`
    must fit the platform's maximum.
    """
    limit = caps(platform).max_payload
    if size + 2 > limit:
        raise PayloadTooLarge(
            f"{size}+2 dispatch bytes exceeds {platform.value} limit of {limit}")


def common_payload_limit(platforms=PLATFORMS) -> int:
    """Largest logical payload every given platform can carry."""
    return min(caps(p).max_payload for p in platforms) - 2


# --- XBee serial API framing ---

XBEE_START = 0x7E
API_TX64 = 0x00
API_TX16 = 0x01
API_RX64 = 0x80
API_RX16 = 0x81


def xbee_checksum(body: bytes) -> int:
    return 0xFF - (sum(body) & 0xFF)


def _xbee_envelope(body: bytes) -> bytes:
    return (bytes((XBEE_START,)) + len(body).to_bytes(2, "big")
            + body + bytes((xbee_checksum(body),)))


def _xbee_body(data: bytes) -> bytes:
    """Validate framing + checksum of a serial API frame, return the body."""
    if len(data) < 5:
        raise TruncatedFrame("XBee envelope needs at least 5 octets")
    if data[0] != XBEE_START:
        raise ParseError(f"XBee frames start with 0x7e, got {data[0]:#04x}")
    length = int.from_bytes(data[1:3], "big")
    if len(data) != length + 4:
        raise TruncatedFrame(
            f"XBee length field says {length}, envelope carries {len(data) - 4}")
    body = data[3:-1]
    if xbee_checksum(body) != data[-1]:
        raise BadChecksum(
            f"checksum {data[-1]:#04x} != computed {xbee_checksum(body):#04x}")
    return body


@dataclass
class XBeeModuleState:
    """The slice of XBee module state the channel emulation needs."""

    addr16: int = 0x0000
    next_seq: int = 0

    def take_seq(self) -> int:
        seq = self.next_seq & 0xFF
        self.next_seq = (self.next_seq + 1) & 0xFF
        return seq


def _check_addressing(platform: PlatformId, frame: fr.MacFrame) -> None:
    c = caps(platform)
    for addr in (frame.dest, frame.src):
        if addr.mode == fr.AddrMode.EXTENDED64 and not c.supports_addr64:
            raise AddressingUnsupported(
                f"{platform.value} cannot carry 64-bit addresses")
        # 16-bit mode is always available: natively or via the custom stack.


def wrap(platform: PlatformId, frame: fr.MacFrame, cfg: InteropConfig) -> bytes:
    """Host-side encoding of a logical frame for `platform`.

    Plain and LowPAN-bypass stacks emit the air frame directly (payload
    dispatch-prefixed); the XBee host emits a serial TX request whose
    data field is the dispatch-prefixed payload.
    """
    _check_addressing(platform, frame)
    wire_payload = fr.add_dispatch(frame.payload, cfg.dispatch,
                                   max_payload=caps(platform).max_payload)
    if caps(platform).envelope == Envelope.XBEE_API:
        if frame.dest.mode == fr.AddrMode.SHORT16:
            body = bytes((API_TX16, 0x01)) + frame.dest.value.to_bytes(2, "big")
        else:
            body = bytes((API_TX64, 0x01)) + frame.dest.value.to_bytes(8, "big")
        # Options bit 0 = disable ACK; broadcasts are never acked anyway,
        # so they keep the plain 0x00 octet.
        options = 0x00 if (frame.dest.is_broadcast or frame.fc.ack_request) \
            else 0x01
        body += bytes((options,)) + wire_payload
        return _xbee_envelope(body)
    air = fr.MacFrame(fc=frame.fc, seq=frame.seq, dest_pan=frame.dest_pan,
                      dest=frame.dest, src_pan=frame.src_pan, src=frame.src,
                      payload=wire_payload)
    return fr.encode_frame(air)


def _frame_from_air(data: bytes, cfg: InteropConfig) -> fr.MacFrame:
    air = fr.decode_frame(data)
    logical = fr.strip_dispatch(air.payload, cfg.dispatch)
    air.payload = logical
    return air


def _frame_from_serial(data: bytes, cfg: InteropConfig) -> fr.MacFrame:
    """Reconstruct a logical frame from a serial API envelope.

    The vendor envelope does not carry every MAC field: an RX indicator
    has no destination, PAN id or sequence number.  Missing fields are
    filled from the interop config (PAN id), the options octet
    (broadcast flag) or zeroed (sequence), which is exactly the view an
    XBee host application gets.
    """
    body = _xbee_body(data)
    api = body[0]
    if api == API_RX16 or api == API_RX64:
        alen = 2 if api == API_RX16 else 8
        if len(body) < 1 + alen + 2 + 2:
            raise TruncatedFrame("RX indicator too short")
        src_value = int.from_bytes(body[1:1 + alen], "big")
        options = body[2 + alen]
        data_field = body[3 + alen:]
        src = (fr.short16(src_value) if api == API_RX16
               else fr.extended64(src_value))
        dest = fr.short16(fr.BROADCAST16 if options & 0x02 else 0x0000)
        payload = fr.strip_dispatch(bytes(data_field), cfg.dispatch)
        return fr.make_data_frame(dest=dest, src=src, pan_id=cfg.pan_id,
                                  seq=0, payload=payload)
    if api == API_TX16 or api == API_TX64:
        alen = 2 if api == API_TX16 else 8
        if len(body) < 1 + 1 + alen + 1 + 2:
            raise TruncatedFrame("TX request too short")
        dest_value = int.from_bytes(body[2:2 + alen], "big")
        options = body[2 + alen]
        data_field = body[3 + alen:]
        dest = (fr.short16(dest_value) if api == API_TX16
                else fr.extended64(dest_value))
        payload = fr.strip_dispatch(bytes(data_field), cfg.dispatch)
        ack = (not dest.is_broadcast) and not (options & 0x01)
        return fr.make_data_frame(dest=dest, src=fr.short16(0), pan_id=cfg.pan_id,
                                  seq=0, payload=payload, ack_request=ack)
    raise ParseError(f"unhandled XBee API id {api:#04x}")


def unwrap(platform: PlatformId, data: bytes, cfg: InteropConfig) -> fr.MacFrame:
    """Host-side decoding: inverse of wrap up to envelope capability.

    Every platform accepts the air format (the view at its radio).  The
    arduino-xbee adapter additionally accepts serial API envelopes,
    distinguished by the 0x7E start delimiter, which can never begin a
    valid data frame (FCF frame-type 6 is reserved).
    """
    data = bytes(data)
    if (caps(platform).envelope == Envelope.XBEE_API
            and data[:1] == bytes((XBEE_START,))):
        return _frame_from_serial(data, cfg)
    return _frame_from_air(data, cfg)


# --- channel-side translation between host bytes and air bytes ---

def transmit(platform: PlatformId, host_bytes: bytes, cfg: InteropConfig,
             module: XBeeModuleState | None = None) -> bytes:
    """What the radio puts on air for the given host-side bytes.

    Identity for plain stacks.  For arduino-xbee this emulates the
    module: parse the TX request, then build the air frame with the
    module's own source address and sequence counter.
    """
    if caps(platform).envelope != Envelope.XBEE_API:
        return bytes(host_bytes)
    if module is None:
        module = XBeeModuleState()
    body = _xbee_body(bytes(host_bytes))
    api = body[0]
    if api not in (API_TX16, API_TX64):
        raise ParseError(f"expected a TX request, got API id {api:#04x}")
    alen = 2 if api == API_TX16 else 8
    dest_value = int.from_bytes(body[2:2 + alen], "big")
    dest = fr.short16(dest_value) if api == API_TX16 else fr.extended64(dest_value)
    options = body[2 + alen]
    data_field = bytes(body[3 + alen:])  # already dispatch-prefixed
    ack = (not dest.is_broadcast) and not (options & 0x01) \
        and cfg.ack_mode.get(platform, True)
    air = fr.make_data_frame(dest=dest, src=fr.short16(module.addr16),
                             pan_id=cfg.pan_id, seq=module.take_seq(),
                             payload=b"", ack_request=ack)
    air.payload = data_field
    return fr.encode_frame(air)


def deliver(platform: PlatformId, air_bytes: bytes, cfg: InteropConfig,
            rssi_dbm: float = -40.0) -> bytes:
    """What the host receives for the given air bytes.

    Identity for plain stacks.  For arduino-xbee this emulates the
    module's RX indicator, including the RSSI octet (magnitude of the
    negative dBm reading) and the broadcast options flag.
    """
    if caps(platform).envelope != Envelope.XBEE_API:
        return bytes(air_bytes)
    air = fr.decode_frame(bytes(air_bytes))
    raw_rssi = int(min(255, max(0, int(-rssi_dbm + 0.5))))
    options = 0x02 if air.dest.is_broadcast else 0x00
    if air.src.mode == fr.AddrMode.SHORT16:
        body = bytes((API_RX16,)) + air.src.value.to_bytes(2, "big")
    else:
        body = bytes((API_RX64,)) + air.src.value.to_bytes(8, "big")
    body += bytes((raw_rssi, options)) + air.payload
    return _xbee_envelope(body)


def rx_host_bytes(platform: PlatformId, payload_len: int) -> int:
    """Octets the host link must move to receive one logical payload.

    arduino-xbee: serial RX indicator = 4 framing + 5 header + 2 dispatch
    + payload.  Plain stacks read the air frame over SPI: 11 header +
    2 dispatch + payload + 2 FCS.
    """
    if caps(platform).envelope == Envelope.XBEE_API:
        return payload_len + 11
    return payload_len + 15
