"""Density-witness searches: find a cylinder in which the tree has
relative measure above 1 - eps.

Two routes, cross-validated: a direct greedy scan in length-lex order,
and the level-maximization argument (maximize the scaled complement
count over levels, then read the witness off a maximizing level).  Both
always succeed on a nonempty clopen tree because a fully contained leaf
cylinder has relative density one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import iter_lenlex, string_of
from .clopen import ClopenTree
from .dyadic import Dyadic, ONE, half_power
from .errors import EmptyTree, MeasureBelowDelta


def _passes(tree: ClopenTree, counts, sigma: str, eps: Dyadic) -> bool:
    # measure(T restricted to sigma) > (1 - eps) * 2**-|sigma|, exactly
    c = counts[len(sigma)][int(sigma, 2) if sigma else 0]
    return Dyadic(c, tree.depth) > (ONE - eps).shift_down(len(sigma))


def density_witness_greedy(tree: ClopenTree, eps: Dyadic) -> str:
    """Length-lex least sigma with relative density above 1 - eps."""
    if tree.is_empty:
        raise EmptyTree("density witness needs positive measure")
    if not (Dyadic(0) < eps < ONE):
        raise ValueError("eps must lie strictly between 0 and 1")
    counts = tree.level_count_arrays()
    for sigma in iter_lenlex(tree.depth):
        if counts[len(sigma)][int(sigma, 2) if sigma else 0] == 0:
            continue
        if _passes(tree, counts, sigma, eps):
            return sigma
    raise AssertionError("unreachable: some leaf cylinder has density 1")


@dataclass(frozen=True)
class DensityAnalysis:
    """Internals of the maximization route, for verification."""

    witness: str
    n: int
    k: int
    level: int
    level_capped: bool  # levels only range up to the resolution


def density_maximization_analysis(tree: ClopenTree, eps: Dyadic, delta: Dyadic) -> DensityAnalysis:
    """Witness via complement maximization.

    Picks the least n with 2**-n < eps * delta, the maximal j <= 2**n
    such that some level l has complement count at least j * 2**(l-n),
    and returns the least passing node on the least maximizing level.
    Requires measure(tree) > delta > 0.
    """
    if tree.is_empty:
        raise EmptyTree("density witness needs positive measure")
    if not delta.is_positive:
        raise ValueError("delta must be positive")
    if not tree.measure() > delta:
        raise MeasureBelowDelta(f"measure {tree.measure()} does not exceed delta = {delta}")
    if not (Dyadic(0) < eps < ONE):
        raise ValueError("eps must lie strictly between 0 and 1")

    target = eps * delta
    n = 0
    while not half_power(n) < target:
        n += 1

    counts = tree.level_count_arrays()
    level_counts = [sum(1 for c in row if c) for row in counts]

    def qualifies(j: int) -> int | None:
        # least level l with |2^l \ T| >= j * 2**(l-n), scaled by 2**n
        for l in range(tree.depth + 1):
            complement = (1 << l) - level_counts[l]
            if (complement << n) >= (j << l):
                return l
        return None

    k, level = 0, qualifies(0)
    for j in range(1 << n, 0, -1):
        l = qualifies(j)
        if l is not None:
            k, level = j, l
            break
    assert level is not None

    threshold = (ONE - eps).shift_down(level)
    for idx in range(1 << level):
        c = counts[level][idx]
        if c and Dyadic(c, tree.depth) > threshold:
            return DensityAnalysis(
                witness=string_of(idx, level),
                n=n,
                k=k,
                level=level,
                level_capped=True,
            )
    raise AssertionError("unreachable: maximality of k forces a witness at this level")


def density_witness_maximization(tree: ClopenTree, eps: Dyadic, delta: Dyadic) -> str:
    return density_maximization_analysis(tree, eps, delta).witness


def complement_fraction(tree: ClopenTree, level: int) -> Dyadic:
    """|2^level \\ T| / 2^level, used by the contradiction self-check."""
    return Dyadic((1 << level) - tree.level_count(level), level)
