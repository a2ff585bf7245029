"""Independent bit-serial CRC oracle.

Feeds each data bit, least significant first, through a right-shifting
16-bit register implementing x^16 + x^12 + x^5 + 1 (reflected form
0x8408), zero initial value, no final xor.  Deliberately table-free so
it shares no code path with the table-driven implementation it checks.
"""


def crc16_bitwise(data: bytes) -> int:
    reg = 0x0000
    for byte in data:
        for bit in range(8):
            feedback = (reg ^ (byte >> bit)) & 1
            reg >>= 1
            if feedback:
                reg ^= 0x8408
    return reg
