"""Counter-based pseudo random numbers (SplitMix64).

Every draw is a pure function of (seed, position), so any stochastic routine
can report its seed and be replayed exactly, and independent streams can be
derived for parallel chains without coordination. The compiled kernel in
``_chain_ext`` implements the same mixing function with identical constants;
its output is bit-for-bit equal to this module's.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)


def mix64(x: int) -> int:
    """SplitMix64 finalizer."""
    x &= MASK64
    x ^= x >> 30
    x = (x * _MIX_A) & MASK64
    x ^= x >> 27
    x = (x * _MIX_B) & MASK64
    x ^= x >> 31
    return x


def derive_seed(seed: int, index: int) -> int:
    """Seed for sub-stream `index` (per-chain and per-estimate streams)."""
    return mix64((seed ^ mix64(((index + 1) * GOLDEN) & MASK64)) & MASK64)


class Rng:
    """A SplitMix64 stream positioned `pos` draws past its seed."""

    __slots__ = ("seed", "pos")

    def __init__(self, seed: int, pos: int = 0):
        self.seed = seed & MASK64
        self.pos = pos

    def next_u64(self) -> int:
        self.pos += 1
        return mix64((self.seed + self.pos * GOLDEN) & MASK64)

    def next_double(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53
