"""Perfect embeddings: order- and incomparability-preserving copies of
the complete binary tree 2^{<k} inside a node predicate over 2^{<=d}.

The search is exact: a capacity table (max embeddable arity below each
node) makes the leftmost greedy construction complete, so no
backtracking is needed.  Images are minimized in breadth-first node
order, each one length-lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .bits import comparable, is_prefix, lenlex_key, lenlex_range, strings_of_length


@dataclass(frozen=True)
class PerfectEmbedding:
    """Map from the nodes of 2^{<arity} to binary strings."""

    arity: int
    images: tuple[tuple[str, str], ...]

    @classmethod
    def from_mapping(cls, arity: int, mapping: dict[str, str]) -> "PerfectEmbedding":
        items = tuple(sorted(mapping.items(), key=lambda kv: lenlex_key(kv[0])))
        return cls(arity, items)

    def mapping(self) -> dict[str, str]:
        return dict(self.images)

    def image_nodes(self) -> list[str]:
        return [img for _, img in self.images]

    def is_valid(self) -> bool:
        """Structural check: domain is all of 2^{<arity}, prefixes map to
        prefixes, and sibling images are incomparable proper extensions."""
        m = self.mapping()
        domain = {s for n in range(self.arity) for s in strings_of_length(n)}
        if set(m) != domain:
            return False
        for sigma in m:
            for b in "01":
                child = sigma + b
                if child in m:
                    if not is_prefix(m[sigma], m[child]) or m[child] == m[sigma]:
                        return False
            if sigma + "0" in m and sigma + "1" in m:
                if comparable(m[sigma + "0"], m[sigma + "1"]):
                    return False
        return True


class _Capacity:
    """B(s): max arity of an embedding whose root image is exactly s.
    A(s): max of B over extensions of s.  Both are 0 off the predicate."""

    def __init__(self, member: Callable[[str], bool], depth: int):
        self.member = member
        self.depth = depth
        self._a: dict[str, int] = {}
        self._b: dict[str, int] = {}
        self._pair: dict[str, int] = {}

    def a(self, s: str) -> int:
        v = self._a.get(s)
        if v is None:
            v = max(self.b(s), self.a(s + "0"), self.a(s + "1")) if len(s) < self.depth else self.b(s)
            self._a[s] = v
        return v

    def b(self, s: str) -> int:
        v = self._b.get(s)
        if v is None:
            v = 1 + self.pair(s) if self.member(s) else 0
            self._b[s] = v
        return v

    def pair(self, s: str) -> int:
        """Best min(A(r0), A(r1)) over branch points r extending s."""
        v = self._pair.get(s)
        if v is None:
            if len(s) >= self.depth:
                v = 0
            else:
                v = max(
                    min(self.a(s + "0"), self.a(s + "1")),
                    self.pair(s + "0"),
                    self.pair(s + "1"),
                )
            self._pair[s] = v
        return v


def find_embedding(member: Callable[[str], bool], depth: int, arity: int) -> PerfectEmbedding | None:
    """Leftmost embedding of 2^{<arity} into the predicate, or None.

    Needs arity >= 1 and arity - 1 <= depth for the copy to fit at all.
    """
    if arity < 1:
        raise ValueError("arity must be at least 1")
    if arity - 1 > depth:
        return None
    cap = _Capacity(member, depth)

    def completable(s: str, remaining: int) -> bool:
        return cap.b(s) >= remaining

    def has_partner(root: str, a: str, remaining: int) -> bool:
        # some branch point on the path root..a opens a cone, disjoint
        # from a's, holding an image of capacity >= remaining
        for cut in range(len(root), len(a)):
            other = a[:cut] + ("1" if a[cut] == "0" else "0")
            if cap.a(other) >= remaining:
                return True
        return False

    root = next((s for s in lenlex_range("", depth) if completable(s, arity)), None)
    if root is None:
        return None
    images = {"": root}
    pending = [""]
    while pending:
        sigma = pending.pop(0)
        level = len(sigma)
        if level + 1 >= arity:
            continue
        m = arity - level - 1  # arity each child subtree must realize
        base = images[sigma]
        first = None
        for a in lenlex_range(base, depth):
            if a == base or not completable(a, m):
                continue
            if has_partner(base, a, m):
                first = a
                break
        second = next(
            (
                b
                for b in lenlex_range(base, depth)
                if b != base and not comparable(b, first) and completable(b, m)
            ),
            None,
        )
        if first is None or second is None:
            return None  # unreachable: capacity guaranteed completion
        images[sigma + "0"] = first
        images[sigma + "1"] = second
        pending.extend([sigma + "0", sigma + "1"])
    return PerfectEmbedding.from_mapping(arity, images)


def max_embeddable_arity(member: Callable[[str], bool], depth: int) -> int:
    return _Capacity(member, depth).a("")
