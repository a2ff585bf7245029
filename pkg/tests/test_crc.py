"""CRC against the independent bit-serial oracle (frozen vectors first)."""

import random

from hetnet154.frame import crc16
from reference_crc import crc16_bitwise

# Computed with crc16_bitwise before the table implementation existed.
FROZEN_VECTORS = [
    (b"", 0x0000),
    (b"123456789", 0x2189),
    (b"\x00", 0x0000),
    (b"\x01\x02\x03", 0x5BF7),
    (bytes(range(32)), 0x9E94),
]


def test_oracle_frozen_vectors():
    for data, want in FROZEN_VECTORS:
        assert crc16_bitwise(data) == want


def test_crc16_frozen_vectors():
    for data, want in FROZEN_VECTORS:
        assert crc16(data) == want


def test_crc16_matches_oracle_on_random_inputs():
    rng = random.Random(0x154)
    for _ in range(10_000):
        data = rng.randbytes(rng.randrange(0, 64))
        assert crc16(data) == crc16_bitwise(data)


def test_crc16_detects_single_byte_change():
    rng = random.Random(7)
    data = bytearray(rng.randbytes(40))
    base = crc16(bytes(data))
    for i in range(len(data)):
        for flip in (0x01, 0x80):
            mutated = bytearray(data)
            mutated[i] ^= flip
            assert crc16(bytes(mutated)) != base
