"""Deterministic 64-bit PRNG used everywhere randomness is needed.

The generator is splitmix64, chosen because it is fully specified by two
update equations and therefore reproducible in any language:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z <- ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output <- z XOR (z >> 31)

Reference vector: seed 0 produces 0xE220A8397B1DCDAF first.

Bounded draws use modulo reduction (``next_u64() % bound``).  The modulo
bias for the tiny bounds used here (< 2^6) is below 2^-58 and irrelevant;
in exchange every draw consumes exactly one generator step, which keeps
hand-tracing and cross-language replay trivial.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class Splitmix64:
    """splitmix64 stream seeded with a 64-bit unsigned integer."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform draw in [0, bound), one generator step."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound


def stable_hash64(text: str) -> int:
    """First 8 bytes of SHA-256, big-endian.  Stable across processes,
    unlike builtin hash()."""
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def mix_seed(seed: int, *labels: str) -> int:
    """Derive a substream seed from a base seed and string labels."""
    acc = seed & _MASK64
    for label in labels:
        acc = Splitmix64(acc ^ stable_hash64(label)).next_u64()
    return acc
