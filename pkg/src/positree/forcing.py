"""Mathias-style forcing steps over clopen trees.

A condition is a finite stem F (branching skeleton a complete binary
tree, rooted at the empty string) together with a reservoir T, relative
to an ambient tree: every leaf of the stem must carry relative density
above 3/4 inside the intersection of reservoir and ambient.

Against a pluggable bounded tree-functional, one forcing step either
finds a finite extension of the stem on which the functional provably
differs from the target sequence (the split branch), or certifies by
bounded exhaustive search that the functional's outputs do not depend
on the extension at all (the constant branch).

The split search runs over stems whose leaves all sit at one string
length.  Since a functional with use bound u only reads the oracle
below length u, candidates are grouped by their truncation to lengths
below u (their "profile"); each profile is evaluated once and, when the
output disagrees with the target, checked for realizability as a valid
uniform extension inside the reservoir.  Realizability and the leftmost
materialization use exact capacity tables, so exhausting the profiles
exhausts the whole candidate space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .bits import comparable, lcp, lenlex_range, string_of
from .clopen import ClopenTree
from .dyadic import Dyadic, ONE
from .errors import DichotomyGap, EmptyCylinder, InvalidCondition, MalformedInput, UnknownVersion
from .finite import FiniteTree, shape_depth

FUNCTIONAL_FORMAT = "functional/v1"

# Leaf-density thresholds from the forcing construction: conditions keep
# density above 1 - 2^-2; the looser 1 - 2^-1 marks the intermediate
# bound available before re-extending.
DENSITY_STRICT = Dyadic(3, 2)
DENSITY_LOOSE = Dyadic(1, 1)


# -- tree functionals ---------------------------------------------------


@dataclass(frozen=True)
class TreeFunctional:
    """Deterministic oracle program with an explicit per-input use bound.

    ``table`` maps (window, x) to an output bit or None, where the
    window is the oracle tree's node set restricted to lengths below
    use(x).  Definedness additionally requires the tree's norm to reach
    the use bound, so agreement below the use bound implies agreement of
    outputs, including definedness.
    """

    name: str
    use: Callable[[int], int]
    table: Callable[[frozenset[str], int], int | None]

    def window(self, tree: FiniteTree, x: int) -> frozenset[str]:
        u = self.use(x)
        return frozenset(s for s in tree.nodes if len(s) < u)

    def apply(self, tree: FiniteTree, x: int) -> int | None:
        u = self.use(x)
        if u < 0:
            raise ValueError("use bound must be non-negative")
        if tree.norm < u:
            return None
        return self.table(self.window(tree, x), x)


def _probe(window: frozenset[str], x: int) -> int:
    return 1 if "0" * (x + 1) in window else 0


def _level_parity(window: frozenset[str], x: int) -> int:
    return sum(1 for s in window if len(s) == x) & 1


_MAJORITY_QUERIES = ("0", "10", "11")


def _majority(window: frozenset[str], x: int) -> int:
    return 1 if sum(1 for q in _MAJORITY_QUERIES if q in window) >= 2 else 0


BUILTIN_FUNCTIONALS: dict[str, TreeFunctional] = {
    phi.name: phi
    for phi in (
        TreeFunctional("const-0", use=lambda x: 0, table=lambda w, x: 0),
        TreeFunctional("const-1", use=lambda x: 0, table=lambda w, x: 1),
        TreeFunctional("never", use=lambda x: 0, table=lambda w, x: None),
        TreeFunctional("zeros-probe", use=lambda x: x + 2, table=_probe),
        TreeFunctional("level-parity", use=lambda x: x + 1, table=_level_parity),
        TreeFunctional("majority-low", use=lambda x: 3, table=_majority),
    )
}


def table_functional(record: dict) -> TreeFunctional:
    """Build a functional from an explicit decision table.

    Record shape: {"format": "functional/v1", "name": ..., "cases":
    [{"x": 0, "queries": [...], "outputs": {"01": 1, ...}}, ...]}.
    The use bound at x is one past the longest query; inputs without a
    case, and answer rows without an entry, are undefined.
    """
    if record.get("format") != FUNCTIONAL_FORMAT:
        raise UnknownVersion(f"unsupported functional format: {record.get('format')!r}")
    try:
        cases: dict[int, tuple[tuple[str, ...], dict[str, int | None]]] = {}
        for case in record["cases"]:
            queries = tuple(case["queries"])
            outputs = {
                k: (None if v is None else int(v)) for k, v in case["outputs"].items()
            }
            cases[int(case["x"])] = (queries, outputs)
        name = str(record["name"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad functional record: {exc}") from exc

    def use(x: int) -> int:
        if x not in cases:
            return 0
        queries, _ = cases[x]
        return max((len(q) + 1 for q in queries), default=0)

    def table(window: frozenset[str], x: int) -> int | None:
        if x not in cases:
            return None
        queries, outputs = cases[x]
        answers = "".join("1" if q in window else "0" for q in queries)
        return outputs.get(answers)

    return TreeFunctional(name, use=use, table=table)


# -- conditions ---------------------------------------------------------


@dataclass(frozen=True)
class Condition:
    stem: FiniteTree
    reservoir: ClopenTree
    ambient: ClopenTree

    def working_tree(self) -> ClopenTree:
        return self.reservoir.intersect(self.ambient)


def is_condition(
    stem: FiniteTree,
    reservoir: ClopenTree,
    ambient: ClopenTree,
    threshold: Dyadic = DENSITY_STRICT,
) -> bool:
    """Shape plus the leaf-density invariant on reservoir ∩ ambient."""
    if shape_depth(stem) is None:
        return False
    work = reservoir.intersect(ambient)
    return all(
        work.cylinder_measure(leaf) > threshold.shift_down(len(leaf))
        for leaf in stem.leaves()
    )


def condition_is_valid(cond: Condition, threshold: Dyadic = DENSITY_STRICT) -> bool:
    return is_condition(cond.stem, cond.reservoir, cond.ambient, threshold)


def density_extend(tree: ClopenTree, sigma: str, threshold: Dyadic) -> str:
    """Length-lex least extension of sigma whose relative density in the
    tree exceeds the threshold.  Exists for every positive cylinder at
    any threshold below one: a fully contained leaf cylinder has
    relative density one."""
    if not threshold < ONE:
        raise ValueError("threshold must be below 1")
    if not tree.cylinder_measure(sigma).is_positive:
        raise EmptyCylinder(f"no measure under {sigma!r}")
    for tau in lenlex_range(sigma, tree.depth):
        if tree.cylinder_measure(tau) > threshold.shift_down(len(tau)):
            return tau
    raise AssertionError("unreachable: a contained leaf cylinder has density 1")


def _extend_leaves(base: FiniteTree, work: ClopenTree, threshold: Dyadic) -> FiniteTree:
    """End-extend every leaf to a density witness; skeleton unchanged."""
    targets = [density_extend(work, leaf, threshold) for leaf in base.leaves()]
    return base.union(FiniteTree.closure(targets))


def splitting_extend(cond: Condition, threshold: Dyadic = DENSITY_STRICT) -> Condition:
    """Grow the stem's skeleton by one level inside the same reservoir.

    For each stem leaf, takes the leftmost passing pair of incomparable
    extensions: the first passing child (one always passes, since the
    two children average above the threshold), then the leftmost passing
    extension of the other child (the other child keeps positive
    measure, so a witness exists below it).
    """
    if not condition_is_valid(cond, threshold):
        raise InvalidCondition("splitting extension needs a valid condition")
    work = cond.working_tree()
    chosen: list[str] = []
    for leaf in cond.stem.leaves():
        first = None
        for child in (leaf + "0", leaf + "1"):
            if work.cylinder_measure(child) > threshold.shift_down(len(child)):
                first = child
                break
        if first is None:
            raise InvalidCondition(f"no child of {leaf!r} passes the density bound")
        other = leaf + ("1" if first.endswith("0") else "0")
        second = None
        for tau in lenlex_range(other, work.depth):
            if work.cylinder_measure(tau) > threshold.shift_down(len(tau)):
                second = tau
                break
        if second is None:
            raise InvalidCondition(f"no witness under {other!r}")
        chosen.extend((first, second))
    new_stem = cond.stem.union(FiniteTree.closure(chosen))
    out = Condition(new_stem, cond.reservoir, cond.ambient)
    if not condition_is_valid(out, threshold):
        raise AssertionError("unreachable: split extension broke the invariant")
    return out


# -- step results -------------------------------------------------------


@dataclass(frozen=True)
class Split:
    """Diagonalization achieved: the functional differs from the target
    at input_index on every tree end-extending the new stem."""

    extension: FiniteTree
    input_index: int


@dataclass(frozen=True)
class Constant:
    """No pair of bounded extensions disagrees: outputs are oracle
    independent up to the recorded proof depth."""

    stable_tree: ClopenTree
    proof_depth: int


StepResult = Split | Constant


# -- bounded agreement check --------------------------------------------


def _bounded_subtrees(S: ClopenTree, stem: FiniteTree, lmax: int) -> Iterator[frozenset[str]]:
    """All finite trees inside S end-extending the stem with norm <= lmax."""
    if stem.norm > lmax or stem.is_empty:
        return
    maxlen = lmax - 1
    stem_leaves = stem.leaves()

    def eligible(s: str) -> bool:
        return s in stem.nodes or any(s.startswith(leaf) for leaf in stem_leaves)

    def rec(sigma: str) -> Iterator[frozenset[str]]:
        if len(sigma) == maxlen:
            yield frozenset({sigma})
            return
        options: list[list[frozenset[str] | None]] = []
        for b in "01":
            child = sigma + b
            if child in S and len(child) <= maxlen and eligible(child):
                sub = list(rec(child))
                options.append(sub if child in stem.nodes else sub + [None])
            else:
                if child in stem.nodes:
                    return  # stem cannot be covered here
                options.append([None])
        for left in options[0]:
            for right in options[1]:
                out = {sigma}
                if left is not None:
                    out |= left
                if right is not None:
                    out |= right
                yield frozenset(out)

    yield from rec("")


def outputs_agree(
    S: ClopenTree,
    stem: FiniteTree,
    phi: TreeFunctional,
    lmax: int,
    inputs: int,
) -> bool:
    """True when no two norm-bounded extensions of the stem inside S get
    defined, unequal outputs at any x < inputs.  Exhaustive within the
    bound; vacuously true when the stem itself exceeds it."""
    trees = [FiniteTree(nodes) for nodes in _bounded_subtrees(S, stem, lmax)]
    for x in range(inputs):
        seen: set[int] = set()
        for tree in trees:
            out = phi.apply(tree, x)
            if out is not None:
                seen.add(out)
                if len(seen) > 1:
                    return False
    return True


# -- split search -------------------------------------------------------


def _profiles(S: ClopenTree, stem: FiniteTree, use: int) -> Iterator[frozenset[str]]:
    """Candidate truncations below the use bound: trees inside S whose
    leaves all sit at length use-1, containing every stem node below the
    bound and covering the prefix of every deeper stem node, with all
    nodes inside the stem or extending one of its leaves.

    Enumeration order: depth first, at each node preferring both
    children, then only the left, then only the right.
    """
    stem_leaves = stem.leaves()

    def eligible(s: str) -> bool:
        return s in stem.nodes or any(s.startswith(leaf) for leaf in stem_leaves)

    def required(s: str) -> bool:
        # some stem node extends s (or is s): its chain must survive
        return any(t.startswith(s) for t in stem.nodes)

    def rec(sigma: str) -> Iterator[frozenset[str]]:
        if len(sigma) == use - 1:
            yield frozenset({sigma})
            return
        kids = []
        for b in "01":
            child = sigma + b
            if child in S and eligible(child):
                kids.append(child)
            elif required(sigma + b):
                return  # a stem node is unreachable: no profile here
        musts = [c for c in kids if required(c)]
        choices: list[list[str]] = []
        if len(kids) == 2:
            choices.append(kids)
        for c in kids:
            if all(m == c for m in musts):
                choices.append([c])
        for choice in choices:
            if len(choice) == 1:
                for sub in rec(choice[0]):
                    yield frozenset({sigma}) | sub
            else:
                for left in rec(choice[0]):
                    for right in rec(choice[1]):
                        yield frozenset({sigma}) | left | right

    if "" in S:
        yield from rec("")


def _skeleton_leaf_depths(leaves: list[str]) -> tuple[dict[str, int], bool]:
    """Depth of each leaf in the meet closure, and whether the closure
    is rooted at the empty string."""
    depths: dict[str, int] = {}

    def rec(group: list[str], depth: int) -> None:
        if len(group) == 1:
            depths[group[0]] = depth
            return
        meet = group[0]
        for s in group[1:]:
            meet = lcp(meet, s)
        cut = len(meet)
        rec([s for s in group if s[cut] == "0"], depth + 1)
        rec([s for s in group if s[cut] == "1"], depth + 1)

    group = sorted(leaves)
    rec(group, 0)
    if len(group) == 1:
        rooted = group[0] == ""
    else:
        meet = group[0]
        for s in group[1:]:
            meet = lcp(meet, s)
        rooted = meet == ""
    return depths, rooted


class _UniformCapacity:
    """Skeleton-depth bounds for uniform-leaf completions below a node.

    Counts the max/min depth of a complete branching skeleton whose
    leaves all sit at string length L inside S, covering every stem node
    in the cone.  Interpolation holds: every depth between min and max
    is realizable.
    """

    def __init__(self, S: ClopenTree, stem: FiniteTree, L: int):
        self.S = S
        self.stem = stem
        self.L = L
        self._lo: dict[str, int | None] = {}
        self._hi: dict[str, int] = {}

    def _side_required(self, s: str) -> bool:
        return any(t.startswith(s) for t in self.stem.nodes)

    def hi(self, s: str) -> int:
        """Max depth, 0 when no completion exists."""
        v = self._hi.get(s)
        if v is not None:
            return v
        if s not in self.S:
            v = 0
        elif len(s) == self.L:
            v = 1
        else:
            h0, h1 = self.hi(s + "0"), self.hi(s + "1")
            r0, r1 = self._side_required(s + "0"), self._side_required(s + "1")
            branch = 1 + min(h0, h1) if h0 and h1 else 0
            if r0 and r1:
                v = branch
            elif r0:
                v = max(h0, branch)
            elif r1:
                v = max(h1, branch)
            else:
                v = max(h0, h1, branch)
        self._hi[s] = v
        return v

    def lo(self, s: str) -> int | None:
        """Min depth, None when no completion exists."""
        if s in self._lo:
            return self._lo[s]
        v: int | None
        if s not in self.S or self.hi(s) == 0:
            v = None
        elif len(s) == self.L:
            v = 1
        else:
            r0, r1 = self._side_required(s + "0"), self._side_required(s + "1")
            if r0 and r1:
                l0, l1 = self.lo(s + "0"), self.lo(s + "1")
                v = None if l0 is None or l1 is None else 1 + max(l0, l1)
            elif r0:
                v = self.lo(s + "0")
            elif r1:
                v = self.lo(s + "1")
            else:
                v = 1  # a single chain down to length L
        self._lo[s] = v
        return v

    def build(self, s: str, k: int) -> list[str]:
        """Leftmost leaf set of a depth-k completion below s.

        Canonical tie-break: a mandatory branch splits at s; otherwise
        contract into the required side when the depth fits, then into
        the left side, then branch, then into the right side.
        """
        if len(s) == self.L:
            return [s]
        r0, r1 = self._side_required(s + "0"), self._side_required(s + "1")
        if k == 1:
            cur = s
            while len(cur) < self.L:
                need0 = self._side_required(cur + "0")
                need1 = self._side_required(cur + "1")
                if need0 and need1:
                    raise AssertionError("depth-1 completion cannot cover a branch")
                if need0:
                    cur += "0"
                elif need1:
                    cur += "1"
                else:
                    cur += "0" if cur + "0" in self.S else "1"
            return [cur]
        if r0 and r1:
            return self.build(s + "0", k - 1) + self.build(s + "1", k - 1)

        def fits(side: str) -> bool:
            lo = self.lo(side)
            return lo is not None and lo <= k <= self.hi(side)

        if r0:
            order = ["c0", "branch"]
        elif r1:
            order = ["c1", "branch"]
        else:
            order = ["c0", "branch", "c1"]
        for option in order:
            if option == "c0" and fits(s + "0"):
                return self.build(s + "0", k)
            if option == "c1" and fits(s + "1"):
                return self.build(s + "1", k)
            if option == "branch" and self.hi(s + "0") >= k - 1 and self.hi(s + "1") >= k - 1:
                lo0, lo1 = self.lo(s + "0"), self.lo(s + "1")
                if lo0 is not None and lo0 <= k - 1 and lo1 is not None and lo1 <= k - 1:
                    return self.build(s + "0", k - 1) + self.build(s + "1", k - 1)
        raise AssertionError(f"no depth-{k} completion below {s!r}")


def _close_over(leafset: list[str], stem: FiniteTree) -> FiniteTree:
    out = FiniteTree.closure(leafset)
    if not stem.nodes <= out.nodes:
        raise AssertionError("unreachable: materialized tree dropped a stem node")
    return out


def _realize_uniform(
    profile: frozenset[str],
    stem: FiniteTree,
    S: ClopenTree,
    lmax: int,
    use: int,
) -> FiniteTree | None:
    """Leftmost uniform-leaf tree D inside S with D end-extending the
    stem, skeleton a complete binary tree of depth <= lmax rooted at the
    empty string, and truncation below the use bound equal to the
    profile.  None when no such tree exists."""
    leaves = sorted(
        s for s in profile if s + "0" not in profile and s + "1" not in profile
    )
    depths, rooted = _skeleton_leaf_depths(leaves)

    pinned = leaves == [""]  # only at use <= 1: the skeleton must branch at the root
    if not rooted and not pinned:
        return None

    L_floor = max(use - 1, stem.norm - 1, 0)
    for L in range(L_floor, S.depth + 1):
        cap = _UniformCapacity(S, stem, L)
        if pinned:
            if L == 0:
                if stem.nodes <= {""}:
                    return FiniteTree(frozenset({""}))
                continue
            h0, h1 = cap.hi("0"), cap.hi("1")
            if not (h0 and h1):
                continue
            lo0, lo1 = cap.lo("0"), cap.lo("1")
            assert lo0 is not None and lo1 is not None
            low, high = 1 + max(lo0, lo1), 1 + min(h0, h1)
            if low > min(high, lmax):
                continue
            l = low
            leafset = cap.build("0", l - 1) + cap.build("1", l - 1)
            return _close_over(leafset, stem)
        low = 0
        high = lmax
        feasible = True
        for leaf in leaves:
            lo, hi = cap.lo(leaf), cap.hi(leaf)
            if lo is None or hi == 0:
                feasible = False
                break
            low = max(low, depths[leaf] + lo)
            high = min(high, depths[leaf] + hi)
        if not feasible or low > high:
            continue
        l = low
        leafset: list[str] = []
        for leaf in leaves:
            leafset.extend(cap.build(leaf, l - depths[leaf]))
        return _close_over(leafset, stem)
    return None


def split_search(
    cond: Condition,
    phi: TreeFunctional,
    target: str,
    lmax: int,
) -> tuple[FiniteTree, int] | None:
    """Search for a stem extension on which the functional provably
    differs from the target.

    Scans inputs in increasing order; for each, walks the candidate
    profiles in enumeration order, keeps those whose output is defined
    and wrong, and returns the first that is realizable, materialized
    leftmost and with every leaf extended to a 3/4-density witness.  The
    extension preserves the functional's computation because all added
    nodes sit at or beyond the use bound.  Returns None on exhaustion.
    """
    if not condition_is_valid(cond):
        raise InvalidCondition("split search needs a valid condition")
    if any(c not in "01" for c in target):
        raise ValueError("target must be a bit string")
    S = cond.working_tree()
    stem = cond.stem

    for n in range(len(target)):
        want = int(target[n])
        u = phi.use(n)
        if u < 0:
            raise ValueError("use bound must be non-negative")
        if max(u, stem.norm) - 1 > S.depth:
            continue  # no defined candidate fits the resolution

        if u == 0:
            out = phi.table(frozenset(), n)
            if out is None or out == want:
                continue
            witness = _realize_uniform(frozenset({""}), stem, S, lmax, use=1)
            if witness is None:
                continue
        else:
            witness = None
            cache: dict[frozenset[str], int | None] = {}
            for profile in _profiles(S, stem, u):
                out = cache.get(profile, -2)
                if out == -2:
                    out = phi.table(profile, n)
                    cache[profile] = out
                if out is None or out == want:
                    continue
                candidate = _realize_uniform(profile, stem, S, lmax, u)
                if candidate is not None:
                    witness = candidate
                    break
            if witness is None:
                continue

        extension = _extend_leaves(witness, S, DENSITY_STRICT)
        if phi.apply(extension, n) == want:
            raise AssertionError("unreachable: extension below the use bound changed")
        return extension, n
    return None


def forcing_step(
    cond: Condition,
    phi: TreeFunctional,
    target: str,
    lmax: int,
) -> StepResult:
    """Split if some bounded extension forces a wrong output; otherwise
    certify output stability by bounded exhaustive check.

    For the built-in functionals on valid conditions the two cases are
    exhaustive; a gap (no split, yet some bounded pair disagrees) raises
    instead of mislabeling the step.
    """
    found = split_search(cond, phi, target, lmax)
    if found is not None:
        extension, n = found
        return Split(extension, n)
    work = cond.working_tree()
    if not outputs_agree(work, cond.stem, phi, lmax, inputs=len(target)):
        raise DichotomyGap(
            f"{phi.name}: no uniform split witness, but bounded extensions disagree"
        )
    return Constant(work, lmax)
