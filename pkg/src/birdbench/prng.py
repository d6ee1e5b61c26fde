"""Minimal portable PRNG for agent decisions.

MINSTD (Park-Miller) over 32-bit-safe integer arithmetic, chosen so
clients in any language can reproduce the exact draw sequence; the wire
protocol docs specify this generator for seeded cross-implementation
parity runs.
"""

from __future__ import annotations

_MODULUS = 2147483647  # 2**31 - 1
_MULTIPLIER = 16807


class Minstd:
    def __init__(self, seed: int):
        self.state = (int(seed) % (_MODULUS - 1)) + 1

    def next_int(self) -> int:
        self.state = (self.state * _MULTIPLIER) % _MODULUS
        return self.state

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange needs a positive bound")
        return self.next_int() % n

    def random(self) -> float:
        return (self.next_int() - 1) / (_MODULUS - 2)
