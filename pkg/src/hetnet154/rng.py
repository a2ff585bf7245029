"""Deterministic lane-keyed random streams.

Every (transmitter, receiver, distance, payload, repetition) lane owns
an independent splitmix64 stream derived from the scenario seed, so
lanes can run in any order (or in parallel) and still produce identical
results.  The generator is intentionally tiny: the exact same integer
arithmetic is reimplemented in the compiled kernel, and both sides must
produce bit-identical draws.
"""

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 output mixing function."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def lane_seed(seed: int, *components: int) -> int:
    """Fold integer lane components into a stream seed.

    Order-sensitive by construction: each component is mixed into the
    running state before the next, so permuted lanes get unrelated
    streams.
    """
    state = mix64(seed ^ 0xA0761D6478BD642F)
    for c in components:
        state = mix64((state + _GOLDEN + (c & _MASK)) & _MASK)
    return state


def distance_key(distance_m: float) -> int:
    """Stable integer key for a distance (micrometre grid)."""
    return int(round(distance_m * 1e6))


class Stream:
    """splitmix64 stream: 64-bit outputs and uniform doubles in [0, 1)."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return mix64(self.state)

    def next_f64(self) -> float:
        # 53 mantissa bits; [0, 1).
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)
