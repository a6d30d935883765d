"""Explicit finite trees: prefix-closed sets of binary strings.

These carry the combinatorial side of the constructions: the finite
stages F, E, D and the level witnesses.  The norm of a tree is
``max(len(node) + 1)``, 0 for the empty tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .bits import check_bits, lcp, lenlex_key
from .clopen import ClopenTree


@dataclass(frozen=True)
class FiniteTree:
    nodes: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        nodes = frozenset(self.nodes)
        for s in nodes:
            check_bits(s)
            if s and s[:-1] not in nodes:
                raise ValueError(f"not prefix-closed: {s!r} present without parent")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def from_strings(cls, nodes: Iterable[str]) -> "FiniteTree":
        return cls(frozenset(nodes))

    @classmethod
    def closure(cls, strings: Iterable[str]) -> "FiniteTree":
        """Downward closure: all prefixes of the given strings."""
        nodes = set()
        for s in strings:
            check_bits(s)
            for i in range(len(s) + 1):
                nodes.add(s[:i])
        return cls(frozenset(nodes))

    @property
    def is_empty(self) -> bool:
        return not self.nodes

    def __contains__(self, sigma: str) -> bool:
        return sigma in self.nodes

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.nodes, key=lenlex_key))

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def norm(self) -> int:
        """max(len(node) + 1), 0 when empty."""
        if not self.nodes:
            return 0
        return max(len(s) for s in self.nodes) + 1

    def leaves(self) -> list[str]:
        """Maximal nodes, in length-lex order."""
        out = [s for s in self.nodes if s + "0" not in self.nodes and s + "1" not in self.nodes]
        out.sort(key=lenlex_key)
        return out

    def level(self, n: int) -> list[str]:
        return sorted((s for s in self.nodes if len(s) == n))

    def restricted_to(self, max_length: int) -> "FiniteTree":
        return FiniteTree(frozenset(s for s in self.nodes if len(s) <= max_length))

    def end_extends(self, other: "FiniteTree") -> bool:
        """True when ``other`` is an initial segment of this tree."""
        if not other.nodes <= self.nodes:
            return False
        leaves = other.leaves()
        return all(
            s in other.nodes or any(s.startswith(leaf) for leaf in leaves)
            for s in self.nodes
        )

    def union(self, other: "FiniteTree") -> "FiniteTree":
        return FiniteTree(self.nodes | other.nodes)

    def as_sorted_list(self) -> list[str]:
        return sorted(self.nodes, key=lenlex_key)


FiniteTree.ROOT_ONLY = FiniteTree(frozenset({""}))


def is_end_extension(bigger: FiniteTree, smaller: FiniteTree) -> bool:
    return bigger.end_extends(smaller)


def trim(tree: FiniteTree, ambient: ClopenTree) -> FiniteTree:
    """Drop every node whose cylinder carries no measure in ``ambient``.

    Idempotent; what survives is prefix-closed because cylinder measure
    is monotone under extension.
    """
    return FiniteTree(frozenset(s for s in tree.nodes if ambient.cylinder_measure(s).is_positive))


def shape_depth(tree: FiniteTree) -> int | None:
    """Depth n when the tree's branching skeleton is the complete binary
    tree with 2**(n-1) leaves, rooted at the empty string; None otherwise.

    The skeleton is the meet closure of the leaf set.  Chains between
    branching points are contracted, but the root itself must be a
    skeleton node: either a leaf or a genuine branching point.
    """
    if tree.is_empty:
        return None
    leaves = tree.leaves()

    def rec(group: list[str], base: str) -> int | None:
        if len(group) == 1:
            return 1
        meet = group[0]
        for s in group[1:]:
            meet = lcp(meet, s)
        cut = len(meet)
        left = [s for s in group if s[cut] == "0"]
        right = [s for s in group if s[cut] == "1"]
        if not left or not right:
            return None  # cannot happen: meet is longest common prefix
        a = rec(left, meet + "0")
        b = rec(right, meet + "1")
        if a is None or b is None or a != b:
            return None
        return a + 1

    if len(leaves) == 1:
        return 1 if leaves[0] == "" else None
    meet = leaves[0]
    for s in leaves[1:]:
        meet = lcp(meet, s)
    if meet != "":
        return None
    return rec(leaves, "")
