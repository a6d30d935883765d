"""Measure pruning: remove thin cylinders on a summable threshold schedule.

The threshold at a string of length ``l`` is ``eps * 2**(-2l - 1)``.
Summed over all strings of length at most ``d`` this is
``eps * (1 - 2**-(d+1)) < eps``, so the pruned tree always keeps more
than ``measure - eps``, and every surviving cylinder carries mass
strictly above its threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bits import string_of
from .clopen import ClopenTree
from .dyadic import Dyadic
from .errors import EmptyAfterPruning, InvalidEpsilon


def prune_threshold(eps: Dyadic, sigma: str) -> Dyadic:
    """Threshold eps * 2**(-2|sigma| - 1); positive, with total sum eps."""
    return threshold_at(eps, len(sigma))


def threshold_at(eps: Dyadic, length: int) -> Dyadic:
    if not eps.is_positive:
        raise InvalidEpsilon(f"epsilon must be positive, got {eps}")
    return eps.shift_down(2 * length + 1)


@dataclass(frozen=True)
class PruneReport:
    input_measure: Dyadic
    output_measure: Dyadic
    pruned: tuple[str, ...]
    epsilon: Dyadic
    # Every removal in scan order, including ones later subsumed by an
    # ancestor; `pruned` keeps only the maximal (pairwise incomparable)
    # cylinders.
    events: tuple[str, ...] = field(default=())

    def removed_measure(self) -> Dyadic:
        return self.input_measure - self.output_measure


def prune(tree: ClopenTree, eps: Dyadic) -> tuple[ClopenTree, PruneReport]:
    """Remove every cylinder whose mass is at or below its threshold.

    Scans strings by increasing length, lexicographic within a length,
    and iterates to a fixpoint (a removal can push an ancestor below its
    own threshold).  Raises EmptyAfterPruning, carrying the report, when
    nothing survives.
    """
    if not eps.is_positive:
        raise InvalidEpsilon(f"epsilon must be positive, got {eps}")
    d = tree.depth
    counts = tree.level_count_arrays()
    events: list[str] = []
    # mass > threshold  <=>  count << (eps.exp + 2l + 1)  >  eps.num << d
    rhs = eps.num << d

    changed = True
    while changed:
        changed = False
        for l in range(d + 1):
            shift = eps.exp + 2 * l + 1
            row = counts[l]
            for j in range(len(row)):
                c = row[j]
                if c == 0 or (c << shift) > rhs:
                    continue
                events.append(string_of(j, l))
                changed = True
                # clear the subtree
                for l2 in range(l, d + 1):
                    width = 1 << (l2 - l)
                    start = j << (l2 - l)
                    counts[l2][start : start + width] = [0] * width
                # propagate the loss upward
                for l2 in range(l - 1, -1, -1):
                    counts[l2][j >> (l - l2)] -= c

    survivors = tree.leaves
    for sigma in events:
        v = int(sigma, 2) if sigma else 0
        span = d - len(sigma)
        lo = v << span
        survivors &= ~(((1 << (1 << span)) - 1) << lo)
    result = ClopenTree(d, survivors)

    maximal = [s for s in events if not any(t != s and s.startswith(t) for t in events)]
    report = PruneReport(
        input_measure=tree.measure(),
        output_measure=result.measure(),
        pruned=tuple(maximal),
        epsilon=eps,
        events=tuple(events),
    )
    if result.is_empty and not tree.is_empty:
        raise EmptyAfterPruning(report)
    return result, report


def has_threshold_property(tree: ClopenTree, eps: Dyadic) -> bool:
    """Full scan: every nonempty cylinder at length <= depth is strictly
    above its threshold."""
    return first_threshold_violation(tree, eps) is None


def first_threshold_violation(tree: ClopenTree, eps: Dyadic) -> str | None:
    if not eps.is_positive:
        raise InvalidEpsilon(f"epsilon must be positive, got {eps}")
    d = tree.depth
    counts = tree.level_count_arrays()
    rhs = eps.num << d
    for l in range(d + 1):
        shift = eps.exp + 2 * l + 1
        row = counts[l]
        for j in range(len(row)):
            c = row[j]
            if c != 0 and (c << shift) <= rhs:
                return string_of(j, l)
    return None
