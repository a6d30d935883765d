"""Seeded instance generation.

The pseudorandom source is splitmix64, fixed so that reimplementations
in other languages reproduce instances bit for bit: state advances by
0x9E3779B97F4A7C15 and the output mix is the standard two-round
xor-multiply finalizer.  Leaf indices are drawn as next() mod 2**depth,
which is bias-free because the modulus is a power of two.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import MAX_DEPTH
from .clopen import ClopenTree
from .dyadic import Dyadic, ONE
from .errors import DepthExceeded

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, bound_power: int) -> int:
        return self.next() & ((1 << bound_power) - 1)


@dataclass(frozen=True)
class GenSpec:
    depth: int
    target: Dyadic
    seed: int

    def __post_init__(self) -> None:
        if not 0 <= self.depth <= MAX_DEPTH:
            raise DepthExceeded(f"depth {self.depth} outside [0, {MAX_DEPTH}]")
        if not (Dyadic(0) < self.target <= ONE):
            raise ValueError("target measure must lie in (0, 1]")


def gen_random_positive_tree(spec: GenSpec) -> ClopenTree:
    """Start full, remove uniformly drawn leaves while the measure can
    spare another 2**-depth above the target.  Deterministic per seed;
    the result's measure is always at least the target."""
    rng = SplitMix64(spec.seed)
    n = 1 << spec.depth
    alive = bytearray([1]) * n
    count = n
    while Dyadic(count - 1, spec.depth) >= spec.target:
        i = rng.below(spec.depth)
        while not alive[i]:
            i = rng.below(spec.depth)
        alive[i] = 0
        count -= 1
    bits = "".join("1" if alive[i] else "0" for i in range(n - 1, -1, -1))
    return ClopenTree(spec.depth, int(bits, 2))
