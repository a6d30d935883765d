"""Finite-resolution trees in Cantor space.

A clopen tree of depth ``d`` is determined by its set of depth-``d``
leaves, stored as a bitset: bit ``i`` is set exactly when the string
whose MSB-first binary encoding of ``i``, zero-padded to length ``d``,
is a leaf.  The induced node set is prefix-closed and has no dead
branches, and every measure is an exact dyadic rational.

A string longer than the depth counts as a node exactly when its
length-``d`` prefix is a leaf (the cylinder semantics beyond the
resolution).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .bits import MAX_DEPTH, check_bits, index_of, string_of
from .dyadic import Dyadic
from .errors import DepthExceeded, MalformedInput, NoSuchLevel, UnknownVersion

TREE_FORMAT = "clopen-tree/v1"


@dataclass(frozen=True)
class ClopenTree:
    depth: int
    leaves: int

    def __post_init__(self) -> None:
        if not 0 <= self.depth <= MAX_DEPTH:
            raise DepthExceeded(f"depth {self.depth} outside [0, {MAX_DEPTH}]")
        if self.leaves < 0 or self.leaves.bit_length() > (1 << self.depth):
            raise ValueError("leaf bitset out of range for depth")

    @classmethod
    def full(cls, depth: int) -> "ClopenTree":
        return cls(depth, (1 << (1 << depth)) - 1)

    @classmethod
    def empty(cls, depth: int) -> "ClopenTree":
        return cls(depth, 0)

    @classmethod
    def from_leaf_strings(cls, depth: int, leaves: Iterable[str]) -> "ClopenTree":
        bitset = 0
        for s in leaves:
            check_bits(s)
            if len(s) != depth:
                raise ValueError(f"leaf {s!r} does not have length {depth}")
            bitset |= 1 << index_of(s)
        return cls(depth, bitset)

    # -- basic queries -------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self.leaves == 0

    def leaf_count(self) -> int:
        return self.leaves.bit_count()

    def measure(self) -> Dyadic:
        return Dyadic(self.leaf_count(), self.depth)

    def leaf_strings(self) -> Iterator[str]:
        bitset, i = self.leaves, 0
        while bitset:
            low = bitset & -bitset
            i = low.bit_length() - 1
            yield string_of(i, self.depth)
            bitset ^= low

    def _range(self, sigma: str) -> tuple[int, int]:
        """Leaf-index range [lo, hi) of the cylinder under sigma."""
        v = index_of(sigma)
        span = self.depth - len(sigma)
        return v << span, (v + 1) << span

    def _cylinder_count(self, sigma: str) -> int:
        lo, hi = self._range(sigma)
        return ((self.leaves >> lo) & ((1 << (hi - lo)) - 1)).bit_count()

    def __contains__(self, sigma: str) -> bool:
        """Node membership, defined for every finite string."""
        check_bits(sigma)
        if len(sigma) > self.depth:
            return (self.leaves >> index_of(sigma[: self.depth])) & 1 == 1
        return self._cylinder_count(sigma) > 0

    def cylinder_measure(self, sigma: str) -> Dyadic:
        """Measure of [sigma] intersected with the tree, any length."""
        check_bits(sigma)
        if len(sigma) <= self.depth:
            return Dyadic(self._cylinder_count(sigma), self.depth)
        if sigma in self:
            return Dyadic(1, len(sigma))
        return Dyadic(0)

    # -- operations ----------------------------------------------------

    def restrict(self, sigma: str) -> "ClopenTree":
        """Keep exactly the leaves comparable with sigma."""
        check_bits(sigma)
        if len(sigma) > self.depth:
            raise DepthExceeded(f"|{sigma}| > depth {self.depth}")
        lo, hi = self._range(sigma)
        mask = ((1 << (hi - lo)) - 1) << lo
        return ClopenTree(self.depth, self.leaves & mask)

    def at_depth(self, depth: int) -> "ClopenTree":
        """Refine to a larger depth; measure is unchanged."""
        if depth < self.depth:
            raise ValueError("cannot coarsen a clopen tree")
        if depth > MAX_DEPTH:
            raise DepthExceeded(f"depth {depth} exceeds {MAX_DEPTH}")
        span = depth - self.depth
        if span == 0:
            return self
        block = (1 << (1 << span)) - 1
        bitset, out = self.leaves, 0
        while bitset:
            low = bitset & -bitset
            i = low.bit_length() - 1
            out |= block << (i << span)
            bitset ^= low
        return ClopenTree(depth, out)

    def intersect(self, other: "ClopenTree") -> "ClopenTree":
        d = max(self.depth, other.depth)
        return ClopenTree(d, self.at_depth(d).leaves & other.at_depth(d).leaves)

    def is_subset(self, other: "ClopenTree") -> bool:
        d = max(self.depth, other.depth)
        a, b = self.at_depth(d).leaves, other.at_depth(d).leaves
        return a & ~b == 0

    def level_count(self, level: int) -> int:
        """Number of tree nodes of the given length."""
        if not 0 <= level <= self.depth:
            raise DepthExceeded(f"level {level} outside [0, {self.depth}]")
        span = self.depth - level
        return len({i >> span for i in self._leaf_indices()})

    def _leaf_indices(self) -> Iterator[int]:
        bitset = self.leaves
        while bitset:
            low = bitset & -bitset
            yield low.bit_length() - 1
            bitset ^= low

    def level_nodes(self, level: int) -> list[str]:
        span = self.depth - level
        return [string_of(i, level) for i in sorted({i >> span for i in self._leaf_indices()})]

    def level_count_arrays(self) -> list[list[int]]:
        """counts[l][j] = number of leaves below the j-th length-l node."""
        base = [0] * (1 << self.depth)
        for i in self._leaf_indices():
            base[i] = 1
        arrays = [base]
        for _ in range(self.depth):
            prev = arrays[-1]
            arrays.append([prev[2 * j] + prev[2 * j + 1] for j in range(len(prev) // 2)])
        arrays.reverse()
        return arrays

    def growth_rate(self, k: int) -> int:
        """Least level holding at least 2**k nodes."""
        if k < 0:
            raise ValueError("k must be non-negative")
        want = 1 << k
        if self.leaf_count() < want:
            raise NoSuchLevel(f"no level of this tree holds {want} nodes")
        for m in range(self.depth + 1):
            if self.level_count(m) >= want:
                return m
        raise NoSuchLevel(f"no level of this tree holds {want} nodes")

    # -- serialization -------------------------------------------------

    def to_text(self) -> str:
        nbytes = ((1 << self.depth) + 7) // 8
        hexleaves = self.leaves.to_bytes(nbytes, "little").hex()
        return f"format = {TREE_FORMAT}\ndepth = {self.depth}\nleaves = {hexleaves}\n"

    @classmethod
    def from_text(cls, text: str) -> "ClopenTree":
        fields = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if "=" not in line:
                raise MalformedInput(f"bad tree line: {line!r}")
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
        if fields.get("format") != TREE_FORMAT:
            raise UnknownVersion(f"unsupported tree format: {fields.get('format')!r}")
        try:
            depth = int(fields["depth"])
            leaves = int.from_bytes(bytes.fromhex(fields["leaves"]), "little")
        except (KeyError, ValueError) as exc:
            raise MalformedInput(f"bad tree record: {exc}") from exc
        return cls(depth, leaves)

    def __repr__(self) -> str:
        return f"ClopenTree(depth={self.depth}, leaves={self.leaf_count()})"
