"""SplitMix64 and a Fisher-Yates permutation keyed by (seed, context).

The generator is Steele, Lea & Flood's SplitMix64: a 64-bit counter advanced by
the golden-ratio increment 0x9E3779B97F4A7C15 and passed through the
variant-13 finalizer.  Keys are folded in by re-mixing, so a child stream for
(seed, k1, k2, ...) is a pure function of its key tuple.  All arithmetic is
modulo 2**64 on Python ints, which makes outputs bit-identical everywhere.

Fisher-Yates walks i = n-1 .. 1 and swaps slot i with slot ``next() % (i + 1)``
(modulo bias below 2**-58 for any realistic n).
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for a key path; distinct paths give independent-looking streams."""
    h = mix64(seed & MASK64)
    for k in keys:
        h = mix64(h ^ mix64((k + GOLDEN) & MASK64))
    return h


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, bound: int) -> int:
        return self.next_u64() % bound


def permutation(n: int, seed: int, *keys: int) -> list[int]:
    """Seeded permutation of range(n); result[i] is the source index for slot i."""
    perm = list(range(n))
    rng = SplitMix64(derive_seed(seed, n, *keys))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm
