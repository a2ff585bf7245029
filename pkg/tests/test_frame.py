"""MAC frame codec: round trips, wire sizes, FCS detection, dispatch."""

import random

import pytest

from hetnet154 import errors
from hetnet154.frame import (AddrMode, Address, DispatchPrefix, FrameControl,
                             FrameType, MacFrame, add_dispatch, crc16,
                             decode_frame, encode_frame, extended64,
                             header_length, make_data_frame, short16,
                             strip_dispatch)


def random_frame(rng, dest_mode=None, src_mode=None, compress=None):
    dest_mode = dest_mode or rng.choice(list(AddrMode))
    src_mode = src_mode or rng.choice(list(AddrMode))
    compress = rng.random() < 0.5 if compress is None else compress
    dest = Address(dest_mode, rng.randrange(1 << (16 if dest_mode == AddrMode.SHORT16 else 64)))
    src = Address(src_mode, rng.randrange(1 << (16 if src_mode == AddrMode.SHORT16 else 64)))
    fc = FrameControl(ack_request=rng.random() < 0.5,
                      pan_id_compression=compress,
                      dest_mode=dest_mode, src_mode=src_mode)
    return MacFrame(fc=fc, seq=rng.randrange(256),
                    dest_pan=rng.randrange(1 << 16), dest=dest,
                    src_pan=None if compress else rng.randrange(1 << 16),
                    src=src, payload=rng.randbytes(rng.randrange(0, 90)))


def test_wire_size_short_addressing():
    # FCF(2) + seq(1) + dest pan(2) + dest(2) + src pan(2) + src(2)
    # + payload(6) + FCS(2) = 19 octets
    f = make_data_frame(short16(0x0001), short16(0x0002), pan_id=0x1234,
                        seq=1, payload=b"\x00" * 6)
    assert len(encode_frame(f)) == 19


def test_wire_size_extended_addressing_empty_payload():
    # 2 + 1 + 2 + 8 + 2 + 8 + 0 + 2 = 25 octets
    f = make_data_frame(extended64(2 ** 60), extended64(5), pan_id=0x1234,
                        seq=9, payload=b"")
    assert len(encode_frame(f)) == 25


def test_header_length_exact_for_all_mode_combinations():
    for dm in AddrMode:
        for sm in AddrMode:
            for compress in (False, True):
                fc = FrameControl(dest_mode=dm, src_mode=sm,
                                  pan_id_compression=compress)
                want = 5 + (2 if dm == AddrMode.SHORT16 else 8) \
                    + (0 if compress else 2) \
                    + (2 if sm == AddrMode.SHORT16 else 8)
                assert header_length(fc) == want
                f = MacFrame(fc=fc, seq=0, dest_pan=0,
                             dest=Address(dm, 1),
                             src_pan=None if compress else 0,
                             src=Address(sm, 2), payload=b"xy")
                assert len(encode_frame(f)) == want + 2 + 2


def test_round_trip_randomized_frames():
    rng = random.Random(0xF00)
    for _ in range(500):
        f = random_frame(rng)
        assert decode_frame(encode_frame(f)) == f


def test_single_bit_flips_always_raise_bad_fcs():
    rng = random.Random(3)
    for _ in range(5):
        wire = bytearray(encode_frame(random_frame(rng)))
        for byte_i in range(len(wire)):
            for bit in range(8):
                mutated = bytearray(wire)
                mutated[byte_i] ^= 1 << bit
                with pytest.raises(errors.BadFcs):
                    decode_frame(bytes(mutated))


def test_truncated_input():
    with pytest.raises(errors.TruncatedFrame):
        decode_frame(b"\x01\x02\x03")


def test_security_bit_rejected():
    f = make_data_frame(short16(1), short16(2), pan_id=1, seq=0, payload=b"")
    wire = bytearray(encode_frame(f))
    wire[0] |= 1 << 3  # security flag; re-seal the FCS so parsing proceeds
    wire[-2:] = crc16(bytes(wire[:-2])).to_bytes(2, "little")
    with pytest.raises(errors.UnsupportedFrameType):
        decode_frame(bytes(wire))


def test_non_data_frame_types_rejected():
    fc = FrameControl(frame_type=FrameType.ACK)
    f = MacFrame(fc=fc, seq=0, dest_pan=0, dest=short16(1),
                 src_pan=0, src=short16(2))
    with pytest.raises(errors.UnsupportedFrameType):
        encode_frame(f)


def test_addressing_mode_mismatch():
    fc = FrameControl(dest_mode=AddrMode.EXTENDED64)
    f = MacFrame(fc=fc, seq=0, dest_pan=0, dest=short16(1),
                 src_pan=0, src=short16(2))
    with pytest.raises(errors.InconsistentAddressing):
        encode_frame(f)


def test_src_pan_presence_must_match_compression():
    fc = FrameControl(pan_id_compression=True)
    f = MacFrame(fc=fc, seq=0, dest_pan=0, dest=short16(1),
                 src_pan=0x22, src=short16(2))
    with pytest.raises(errors.InconsistentAddressing):
        encode_frame(f)


def test_payload_over_phy_budget():
    f = make_data_frame(short16(1), short16(2), pan_id=1, seq=0,
                        payload=bytes(115))  # budget is 127 - 11 - 2 = 114
    with pytest.raises(errors.PayloadTooLarge):
        encode_frame(f)
    assert len(encode_frame(make_data_frame(
        short16(1), short16(2), pan_id=1, seq=0, payload=bytes(114)))) == 127


# --- dispatch prefix ---

def test_add_dispatch_prefix_bytes():
    assert add_dispatch(b"", DispatchPrefix(0x41, 0x00)) == b"\x41\x00"


def test_add_dispatch_respects_platform_budget():
    assert len(add_dispatch(bytes(96), max_payload=100)) == 98
    with pytest.raises(errors.PayloadTooLarge):
        add_dispatch(bytes(99), max_payload=100)


def test_strip_dispatch_round_trip():
    rng = random.Random(11)
    prefix = DispatchPrefix(0x41, 0x00)
    for _ in range(200):
        payload = rng.randbytes(rng.randrange(0, 96))
        assert strip_dispatch(add_dispatch(payload, prefix), prefix) == payload


def test_strip_dispatch_mismatch():
    with pytest.raises(errors.DispatchMismatch):
        strip_dispatch(b"\xc0\x00payload", DispatchPrefix(0x41, 0x00))


def test_strip_dispatch_too_short():
    with pytest.raises(errors.DispatchMismatch):
        strip_dispatch(b"\x41", DispatchPrefix(0x41, 0x00))
