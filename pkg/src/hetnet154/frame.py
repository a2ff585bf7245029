"""IEEE 802.15.4-2003 MAC data-frame codec.

On-air layout of the data frames exchanged by all four radio stacks
(no security, no superframes, header fields little-endian):

    | Offset | Size | Field                                      |
    |--------|------|--------------------------------------------|
    | 0      | 2    | frame control (FCF)                        |
    | 2      | 1    | sequence number                            |
    | 3      | 2    | destination PAN id                         |
    | 5      | 2/8  | destination address (16- or 64-bit)        |
    | ...    | 2    | source PAN id (absent when intra-PAN flag) |
    | ...    | 2/8  | source address (16- or 64-bit)             |
    | ...    | N    | MAC payload                                |
    | ...    | 2    | FCS (CRC-16, least significant octet first)|

FCF bits: 0-2 frame type, 3 security, 4 frame pending, 5 ack request,
6 intra-PAN, 10-11 dest addressing mode, 14-15 source addressing mode
(mode 2 = 16-bit, mode 3 = 64-bit).

The FCS is the reflected CRC-16 with polynomial x^16 + x^12 + x^5 + 1,
zero initial value and no final xor, computed over header plus payload.

Interoperating stacks additionally prefix every MAC payload with two
constant dispatch bytes meaning "not fragmented, not meshed", so that
the receiving network layers pass the packet straight up.
"""

from dataclasses import dataclass, field
from enum import IntEnum

from .errors import (
    BadFcs,
    DispatchMismatch,
    InconsistentAddressing,
    PayloadTooLarge,
    TruncatedFrame,
    UnsupportedFrameType,
)

# PHY caps the whole MAC frame (header + payload + FCS) at 127 octets.
PHY_MAX_FRAME = 127
FCS_LEN = 2

BROADCAST16 = 0xFFFF


class AddrMode(IntEnum):
    """Addressing mode, numbered with the FCF wire encoding."""

    SHORT16 = 2
    EXTENDED64 = 3


class FrameType(IntEnum):
    BEACON = 0
    DATA = 1
    ACK = 2
    MAC_COMMAND = 3


@dataclass(frozen=True)
class Address:
    mode: AddrMode
    value: int

    def __post_init__(self):
        bits = 16 if self.mode == AddrMode.SHORT16 else 64
        if not 0 <= self.value < (1 << bits):
            raise ValueError(f"{self.mode.name} address out of range: {self.value:#x}")

    @property
    def is_broadcast(self) -> bool:
        return self.mode == AddrMode.SHORT16 and self.value == BROADCAST16

    @property
    def nbytes(self) -> int:
        return 2 if self.mode == AddrMode.SHORT16 else 8


def short16(value: int) -> Address:
    return Address(AddrMode.SHORT16, value)


def extended64(value: int) -> Address:
    return Address(AddrMode.EXTENDED64, value)


@dataclass(frozen=True)
class FrameControl:
    frame_type: FrameType = FrameType.DATA
    ack_request: bool = False
    pan_id_compression: bool = False
    dest_mode: AddrMode = AddrMode.SHORT16
    src_mode: AddrMode = AddrMode.SHORT16
    # Always off in this stack; decode rejects frames that set them.
    security: bool = False
    frame_pending: bool = False

    def to_int(self) -> int:
        word = int(self.frame_type)
        word |= (1 << 3) if self.security else 0
        word |= (1 << 4) if self.frame_pending else 0
        word |= (1 << 5) if self.ack_request else 0
        word |= (1 << 6) if self.pan_id_compression else 0
        word |= int(self.dest_mode) << 10
        word |= int(self.src_mode) << 14
        return word

    @classmethod
    def from_int(cls, word: int) -> "FrameControl":
        if word & (1 << 3):
            raise UnsupportedFrameType("security-enabled frames are not supported")
        ftype = word & 0x7
        if ftype != FrameType.DATA:
            raise UnsupportedFrameType(f"frame type {ftype} not handled by this stack")
        dest_mode = (word >> 10) & 0x3
        src_mode = (word >> 14) & 0x3
        if dest_mode not in (2, 3) or src_mode not in (2, 3):
            raise UnsupportedFrameType("frames without both addresses are not supported")
        return cls(
            frame_type=FrameType(ftype),
            ack_request=bool(word & (1 << 5)),
            pan_id_compression=bool(word & (1 << 6)),
            dest_mode=AddrMode(dest_mode),
            src_mode=AddrMode(src_mode),
            frame_pending=bool(word & (1 << 4)),
        )


@dataclass
class MacFrame:
    fc: FrameControl
    seq: int
    dest_pan: int
    dest: Address
    src_pan: int | None  # None when fc.pan_id_compression
    src: Address
    payload: bytes = b""
    # Filled in by decode_frame; never part of frame equality.
    fcs: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if not 0 <= self.seq <= 0xFF:
            raise ValueError(f"sequence number out of range: {self.seq}")
        for pan in (self.dest_pan, self.src_pan):
            if pan is not None and not 0 <= pan <= 0xFFFF:
                raise ValueError(f"PAN id out of range: {pan:#x}")
        self.payload = bytes(self.payload)


def make_data_frame(dest: Address, src: Address, pan_id: int, seq: int,
                    payload: bytes, ack_request: bool = False,
                    pan_id_compression: bool = False) -> MacFrame:
    """Build a data frame with the FCF derived from the addresses."""
    fc = FrameControl(
        frame_type=FrameType.DATA,
        ack_request=ack_request,
        pan_id_compression=pan_id_compression,
        dest_mode=dest.mode,
        src_mode=src.mode,
    )
    return MacFrame(fc=fc, seq=seq, dest_pan=pan_id,
                    dest=dest, src_pan=None if pan_id_compression else pan_id,
                    src=src, payload=payload)


def _crc_table():
    table = []
    for i in range(256):
        reg = i
        for _ in range(8):
            reg = (reg >> 1) ^ 0x8408 if reg & 1 else reg >> 1
        table.append(reg)
    return table


_CRC_TABLE = _crc_table()


def crc16(data: bytes) -> int:
    """FCS over `data`: table-driven reflected CRC-16, zero init."""
    crc = 0x0000
    for octet in data:
        crc = (crc >> 8) ^ _CRC_TABLE[(crc ^ octet) & 0xFF]
    return crc


def header_length(fc: FrameControl) -> int:
    """Exact MAC header size implied by the frame control field."""
    n = 2 + 1 + 2  # FCF + seq + dest PAN
    n += 2 if fc.dest_mode == AddrMode.SHORT16 else 8
    if not fc.pan_id_compression:
        n += 2
    n += 2 if fc.src_mode == AddrMode.SHORT16 else 8
    return n


def max_payload_for(fc: FrameControl) -> int:
    return PHY_MAX_FRAME - header_length(fc) - FCS_LEN


def encode_frame(frame: MacFrame) -> bytes:
    """Serialize to the on-air octet string, appending the computed FCS."""
    fc = frame.fc
    if fc.frame_type != FrameType.DATA:
        raise UnsupportedFrameType(f"cannot encode {fc.frame_type.name} frames")
    if fc.dest_mode != frame.dest.mode or fc.src_mode != frame.src.mode:
        raise InconsistentAddressing(
            "frame control addressing modes disagree with the addresses")
    if fc.pan_id_compression != (frame.src_pan is None):
        raise InconsistentAddressing(
            "source PAN id must be omitted exactly when PAN ids are compressed")
    if len(frame.payload) > max_payload_for(fc):
        raise PayloadTooLarge(
            f"{len(frame.payload)} bytes exceeds PHY budget {max_payload_for(fc)}")

    out = bytearray()
    out += fc.to_int().to_bytes(2, "little")
    out.append(frame.seq)
    out += frame.dest_pan.to_bytes(2, "little")
    out += frame.dest.value.to_bytes(frame.dest.nbytes, "little")
    if frame.src_pan is not None:
        out += frame.src_pan.to_bytes(2, "little")
    out += frame.src.value.to_bytes(frame.src.nbytes, "little")
    out += frame.payload
    out += crc16(out).to_bytes(2, "little")
    return bytes(out)


def decode_frame(data: bytes) -> MacFrame:
    """Parse and verify an on-air octet string.

    The FCS is checked before any structural parsing so that every
    corrupted frame surfaces as BadFcs rather than a parse error.
    """
    if len(data) < 2 + 1 + FCS_LEN:
        raise TruncatedFrame(f"{len(data)} octets is below the minimum frame size")
    fcs = int.from_bytes(data[-2:], "little")
    computed = crc16(data[:-2])
    if fcs != computed:
        raise BadFcs(f"FCS {fcs:#06x} != computed {computed:#06x}")

    fc = FrameControl.from_int(int.from_bytes(data[0:2], "little"))
    hlen = header_length(fc)
    if len(data) < hlen + FCS_LEN:
        raise TruncatedFrame(f"header needs {hlen} octets, frame has {len(data) - FCS_LEN}")

    pos = 2
    seq = data[pos]; pos += 1
    dest_pan = int.from_bytes(data[pos:pos + 2], "little"); pos += 2
    dlen = 2 if fc.dest_mode == AddrMode.SHORT16 else 8
    dest = Address(fc.dest_mode, int.from_bytes(data[pos:pos + dlen], "little"))
    pos += dlen
    if fc.pan_id_compression:
        src_pan = None
    else:
        src_pan = int.from_bytes(data[pos:pos + 2], "little"); pos += 2
    slen = 2 if fc.src_mode == AddrMode.SHORT16 else 8
    src = Address(fc.src_mode, int.from_bytes(data[pos:pos + slen], "little"))
    pos += slen
    payload = bytes(data[pos:-2])
    return MacFrame(fc=fc, seq=seq, dest_pan=dest_pan, dest=dest,
                    src_pan=src_pan, src=src, payload=payload, fcs=fcs)


@dataclass(frozen=True)
class DispatchPrefix:
    """The two constant bytes prefixed to every payload.

    Any fixed pair works as long as all nodes agree; the default marks the
    packet as neither fragmented nor mesh-routed so receiving network
    layers (LowPAN in particular) hand it straight to the application.
    """

    byte0: int = 0x41
    byte1: int = 0x00

    def __post_init__(self):
        for b in (self.byte0, self.byte1):
            if not 0 <= b <= 0xFF:
                raise ValueError(f"dispatch byte out of range: {b}")

    @property
    def as_bytes(self) -> bytes:
        return bytes((self.byte0, self.byte1))


DEFAULT_DISPATCH = DispatchPrefix()


def add_dispatch(payload: bytes, prefix: DispatchPrefix = DEFAULT_DISPATCH,
                 max_payload: int | None = None) -> bytes:
    """Prefix `payload` with the dispatch bytes.

    `max_payload` is the destination platform's MAC payload budget; the
    prefixed payload must fit it.
    """
    out = prefix.as_bytes + bytes(payload)
    if max_payload is not None and len(out) > max_payload:
        raise PayloadTooLarge(
            f"{len(out)} bytes (incl. dispatch) exceeds platform limit {max_payload}")
    return out


def strip_dispatch(payload: bytes, prefix: DispatchPrefix = DEFAULT_DISPATCH) -> bytes:
    """Verify and remove the two dispatch bytes.

    A mismatch signals a fragmented/meshed or foreign packet, which this
    stack does not handle.
    """
    if len(payload) < 2:
        raise DispatchMismatch("payload too short to carry the dispatch prefix")
    if payload[:2] != prefix.as_bytes:
        raise DispatchMismatch(
            f"leading bytes {payload[:2].hex()} != dispatch {prefix.as_bytes.hex()}")
    return bytes(payload[2:])
