"""Perfect-subtree extraction from a positive clopen tree.

Pipeline: prune away thin cylinders (budget eps/2), derive the splitting
schedule and the measure margin delta, then collect the witness tree of
all surviving cylinders up to the deepest schedule level.  The witness
satisfies the two family conditions (leaf density above delta at every
level, and a genuine split across every schedule interval), which is
re-verifiable by direct scan and recorded in a certificate.

Path selection note: the leftmost maximal family member is taken
deterministically; jump-control properties of the selected path are not
modeled here.

Also hosts the finite homogeneous-tree search: given a finite coloring
of 2^{<=d}, find a color and a monochromatic perfect embedding of
2^{<k}.  At finite depth this can legitimately fail.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .bits import string_of
from .clopen import ClopenTree
from .dyadic import Dyadic, half_power
from .embedding import PerfectEmbedding, find_embedding
from .errors import (
    MeasureTooSmall,
    NoHomogeneousTree,
    ScheduleExceedsDepth,
    ScheduleTooCoarse,
)
from .finite import FiniteTree
from .kucera import prune, threshold_at


@dataclass(frozen=True)
class GrowthSchedule:
    """Strictly increasing levels g(0)=0 < g(1) < ...; each step drops
    the cylinder measure 2**-g(n+1) below every threshold at lengths
    up to g(n)."""

    epsilon: Dyadic
    values: tuple[int, ...]
    truncated: bool
    dmax: int

    def __post_init__(self) -> None:
        if not self.values or self.values[0] != 0:
            raise ValueError("schedule must start at 0")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("schedule must be strictly increasing")

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def intervals(self) -> int:
        return len(self.values) - 1


def growth_schedule(eps: Dyadic, count: int, dmax: int) -> GrowthSchedule:
    """g(0)=0; g(n+1) = least l > g(n) with 2**-l < min threshold at
    lengths <= g(n).  Stops early, flagged, when the next level would
    exceed dmax."""
    if count < 1:
        raise ValueError("count must be at least 1")
    values = [0]
    truncated = False
    for _ in range(count):
        k = values[-1]
        r = threshold_at(eps, k)  # min over |sigma| <= k sits at length k
        l = k + 1
        while not half_power(l) < r:
            l += 1
        if l > dmax:
            truncated = True
            break
        values.append(l)
    return GrowthSchedule(epsilon=eps, values=tuple(values), truncated=truncated, dmax=dmax)


def choose_delta(mu_s: Dyadic, eps: Dyadic) -> Dyadic:
    """delta = mu_s - eps/4, sitting inside (mu_s - eps/2, mu_s)."""
    delta = mu_s - eps.shift_down(2)
    if not delta.is_positive:
        raise MeasureTooSmall(f"measure {mu_s} is at most eps/4 = {eps.shift_down(2)}")
    return delta


def in_family(U: FiniteTree, S: ClopenTree, delta: Dyadic, schedule: GrowthSchedule) -> bool:
    """Membership in the family of splitting-dense finite subtrees:
    U sits inside S, every level of U below its norm is larger than
    delta * 2**n, and across every completed schedule interval each node
    at the lower level has two distinct extensions at the upper level."""
    if U.is_empty:
        return False
    if any(s not in S for s in U.nodes):
        return False
    norm = U.norm
    levels = {n: U.level(n) for n in range(norm)}
    for n in range(norm):
        # |U ∩ 2^n| > delta * 2^n, exactly
        if not Dyadic(len(levels[n])) > delta * Dyadic(1 << n):
            return False
    for i in range(schedule.intervals):
        lo, hi = schedule[i], schedule[i + 1]
        if hi >= norm:
            continue
        upper = levels[hi]
        for sigma in levels[lo]:
            if sum(1 for tau in upper if tau.startswith(sigma)) < 2:
                return False
    return True


def build_witness(S: ClopenTree, eps: Dyadic, schedule: GrowthSchedule, n: int) -> FiniteTree:
    """All strings up to level g(n+1) whose cylinder in S is strictly
    above its pruning threshold.  When S carries the threshold property
    for eps and measure above delta, the result is in the family."""
    if n + 1 >= len(schedule):
        raise ScheduleExceedsDepth(f"schedule has no level g({n + 1})")
    top = schedule[n + 1]
    if top > S.depth:
        raise ScheduleExceedsDepth(f"g({n + 1}) = {top} exceeds depth {S.depth}")
    counts = S.level_count_arrays()
    rhs = eps.num << S.depth
    nodes = []
    for l in range(top + 1):
        shift = eps.exp + 2 * l + 1
        row = counts[l]
        nodes.extend(string_of(j, l) for j in range(len(row)) if (row[j] << shift) > rhs)
    return FiniteTree(frozenset(nodes))


@dataclass(frozen=True)
class ExtractionCertificate:
    epsilon: Dyadic
    delta: Dyadic
    schedule: GrowthSchedule
    input_measure: Dyadic
    pruned_measure: Dyadic
    witness_index: int
    checks: Mapping[str, bool]

    def all_passed(self) -> bool:
        return all(self.checks.values())


def extract_perfect(ambient: ClopenTree, eps: Dyadic) -> tuple[FiniteTree, ExtractionCertificate]:
    """Prune with eps/2, then return the deepest level witness that fits
    the resolution, certified against the family conditions.

    Requires measure(ambient) > eps.  The certificate's checks are all
    recomputable from (ambient, eps).
    """
    mu = ambient.measure()
    if not mu > eps:
        raise MeasureTooSmall(f"measure {mu} must exceed eps = {eps}")
    half = eps.shift_down(1)
    pruned, report = prune(ambient, half)
    schedule = growth_schedule(eps, count=ambient.depth, dmax=pruned.depth)
    if schedule.intervals == 0:
        raise ScheduleTooCoarse(f"first splitting level exceeds depth {pruned.depth}")
    delta = choose_delta(pruned.measure(), eps)
    n = schedule.intervals - 1
    witness = build_witness(pruned, half, schedule, n)

    top = schedule[n + 1]
    final_level = witness.level(top)
    checks = {
        "family_conditions": in_family(witness, pruned, delta, schedule),
        "witness_inside_pruned": all(s in pruned for s in witness.nodes),
        "final_level_count": Dyadic(len(final_level)) >= delta * Dyadic(1 << top),
        "measure_above_margin": pruned.measure() > ambient.measure() - eps,
    }
    cert = ExtractionCertificate(
        epsilon=eps,
        delta=delta,
        schedule=schedule,
        input_measure=mu,
        pruned_measure=report.output_measure,
        witness_index=n,
        checks=checks,
    )
    return witness, cert


# -- finite tree Ramsey step -------------------------------------------


@dataclass(frozen=True)
class Coloring:
    """Total coloring of 2^{<=depth} with colors 0..arity-1."""

    depth: int
    arity: int
    colors: Mapping[str, int]

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise ValueError("need at least one color")

    def __call__(self, sigma: str) -> int:
        return self.colors[sigma]

    @classmethod
    def from_function(cls, depth: int, arity: int, fn) -> "Coloring":
        from .bits import iter_lenlex

        return cls(depth, arity, {s: fn(s) for s in iter_lenlex(depth)})


def homogeneous_embedding(coloring: Coloring, k: int) -> tuple[int, PerfectEmbedding]:
    """Lowest color admitting a perfect embedding of 2^{<k} with every
    image in that color, together with the leftmost such embedding.

    Raises NoHomogeneousTree when no color works at this depth; the
    finite search has no guarantee of success.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k - 1 > coloring.depth:
        raise ValueError(f"2^<{k} does not fit in depth {coloring.depth}")
    for color in range(coloring.arity):
        emb = find_embedding(lambda s, c=color: coloring(s) == c, coloring.depth, k)
        if emb is not None:
            return color, emb
    raise NoHomogeneousTree(f"no color admits a 2^<{k} embedding at depth {coloring.depth}")
