"""Sparse-path trees coding a halting table.

A finite table assigns each program index a halt time or divergence.
Its modulus bounds all finite halt times below a given index, and the
coded class keeps exactly the sequences whose n-th one sits at or beyond
the modulus at n.  Any member with enough ones recovers the table
exactly: comparing the table's halt time against the position of the
(e+2)-th one simulates running program e for that many steps.

The class is null in general; do not feed these trees into the pruning
pipeline expecting survivors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .bits import check_bits
from .clopen import ClopenTree
from .errors import InsufficientOnes, MalformedInput, NotInC, OutOfTable, UnknownVersion

TABLE_FORMAT = "halting-table/v1"

DIVERGENT = None


@dataclass(frozen=True)
class HaltingTable:
    """Halt times for program indices 0..size-1; None marks divergence."""

    size: int
    times: tuple[int | None, ...]

    def __post_init__(self) -> None:
        if self.size != len(self.times):
            raise ValueError("size does not match number of entries")
        if any(t is not None and t < 0 for t in self.times):
            raise ValueError("halt times must be non-negative")

    @classmethod
    def from_mapping(cls, entries: Mapping[int, int | None]) -> "HaltingTable":
        size = len(entries)
        if set(entries) != set(range(size)):
            raise ValueError("entries must cover exactly 0..size-1")
        return cls(size, tuple(entries[e] for e in range(size)))

    def halt_time(self, e: int) -> int | None:
        if not 0 <= e < self.size:
            raise OutOfTable(f"index {e} outside table of size {self.size}")
        return self.times[e]

    def restricted(self, count: int) -> "HaltingTable":
        if count > self.size:
            raise OutOfTable(f"cannot restrict size-{self.size} table to {count}")
        return HaltingTable(count, self.times[:count])

    def to_record(self) -> dict:
        entries = [
            {"e": e, "halt_time": "divergent" if t is None else t}
            for e, t in enumerate(self.times)
        ]
        return {"format": TABLE_FORMAT, "size": self.size, "entries": entries}

    @classmethod
    def from_record(cls, record: dict) -> "HaltingTable":
        if record.get("format") != TABLE_FORMAT:
            raise UnknownVersion(f"unsupported table format: {record.get('format')!r}")
        try:
            times: dict[int, int | None] = {}
            for item in record["entries"]:
                t = item["halt_time"]
                times[int(item["e"])] = None if t == "divergent" else int(t)
            if len(times) != int(record["size"]):
                raise ValueError("entry count does not match size")
            return cls.from_mapping(times)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad halting table: {exc}") from exc


def modulus(table: HaltingTable, x: int) -> int:
    """Least s bounding every finite halt time below x; monotone in x."""
    if not 0 <= x <= table.size:
        raise OutOfTable(f"modulus index {x} outside [0, {table.size}]")
    finite = [t for t in table.times[:x] if t is not None]
    return max(finite, default=0)


def one_positions(sigma: str) -> list[int]:
    """Indices of ones, strictly increasing; entry n is the n-th one."""
    check_bits(sigma)
    return [i for i, c in enumerate(sigma) if c == "1"]


def in_sparse_class(table: HaltingTable, sigma: str) -> bool:
    """True when every n-th one (n up to the table size) sits at or
    beyond the modulus at n."""
    ones = one_positions(sigma)
    return all(
        ones[n] >= modulus(table, n)
        for n in range(min(len(ones), table.size + 1))
    )


def adversarial_tree(table: HaltingTable, depth: int) -> ClopenTree:
    """Depth-d truncation of the coded class; contains it, shrinking in d."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    bitset = 0
    mods = [modulus(table, n) for n in range(table.size + 1)]
    for i in range(1 << depth):
        sigma = format(i, f"0{depth}b")
        ones = [p for p, c in enumerate(sigma) if c == "1"]
        if all(ones[n] >= mods[n] for n in range(min(len(ones), len(mods)))):
            bitset |= 1 << i
    return ClopenTree(depth, bitset)


def decode_halting(sigma: str, count: int, table: HaltingTable) -> HaltingTable:
    """Recover the table's first ``count`` entries from a class member.

    For each e < count, reports a halt exactly when the table's halt time
    is at most the position of the (e+2)-th one of sigma.  Sound because
    membership puts that position at or beyond the modulus at e+1, which
    already bounds e's halt time; the output therefore equals the
    table's restriction, which the caller can check exactly.
    """
    if count > table.size:
        raise OutOfTable(f"cannot decode {count} entries from size-{table.size} table")
    if not in_sparse_class(table, sigma):
        raise NotInC(f"{sigma!r} violates the sparseness constraint")
    ones = one_positions(sigma)
    if len(ones) <= count:
        raise InsufficientOnes(f"need more than {count} ones, found {len(ones)}")
    decoded: dict[int, int | None] = {}
    for e in range(count):
        t = table.halt_time(e)
        budget = ones[e + 1]
        decoded[e] = t if t is not None and t <= budget else None
    return HaltingTable.from_mapping(decoded)
