import itertools

import pytest

from positree.bits import iter_lenlex, lenlex_range
from positree.clopen import ClopenTree
from positree.dyadic import Dyadic
from positree.errors import EmptyCylinder, InvalidCondition
from positree.finite import FiniteTree, shape_depth
from positree.forcing import (
    BUILTIN_FUNCTIONALS,
    Condition,
    Constant,
    Split,
    condition_is_valid,
    density_extend,
    forcing_step,
    is_condition,
    outputs_agree,
    split_search,
    splitting_extend,
    table_functional,
)
from positree.randomgen import GenSpec, SplitMix64, gen_random_positive_tree

ROOT = FiniteTree.closure([""])


def make_condition(depth, seed, splits=0, dent=Dyadic(31, 5)):
    rng = SplitMix64(seed)
    ambient = gen_random_positive_tree(GenSpec(depth, dent, rng.next()))
    reservoir = gen_random_positive_tree(GenSpec(depth, dent, rng.next()))
    cond = Condition(ROOT, reservoir, ambient)
    for _ in range(splits):
        cond = splitting_extend(cond)
    return cond


# -- naive enumeration oracle --------------------------------------------


def subleafsets(S, v, k, L):
    """All leaf tuples of complete depth-k skeletons below v, leaves at L."""
    if len(v) > L or v not in S:
        return []
    if k == 1:
        return [(w,) for w in lenlex_range(v, L) if len(w) == L and w in S]
    out = []
    for r in lenlex_range(v, L - 1):
        if r not in S:
            continue
        for a in subleafsets(S, r + "0", k - 1, L):
            for b in subleafsets(S, r + "1", k - 1, L):
                out.append(a + b)
    return out


def all_uniform_candidates(cond, lmax):
    """Every uniform-leaf shaped tree inside the working tree that
    end-extends the stem.  Naive product enumeration; small scales only."""
    S = cond.working_tree()
    stem = cond.stem
    n = shape_depth(stem)
    seen = set()
    out = []
    for L in range(max(stem.norm - 1, 0), S.depth + 1):
        for l in range(n, lmax + 1):
            k = l - n + 1
            per_leaf = [subleafsets(S, leaf, k, L) for leaf in stem.leaves()]
            if any(not opts for opts in per_leaf):
                continue
            for combo in itertools.product(*per_leaf):
                leaves = [w for tup in combo for w in tup]
                D = FiniteTree.closure(leaves)
                if not stem.nodes <= D.nodes:
                    continue
                if shape_depth(D) != l or not D.end_extends(stem):
                    continue
                if D.nodes in seen:
                    continue
                seen.add(D.nodes)
                out.append(D)
    return out


def split_oracle(cond, phi, target, lmax):
    """(least n admitting a witness, or None) by naive enumeration."""
    candidates = all_uniform_candidates(cond, lmax)
    for n in range(len(target)):
        for D in candidates:
            out = phi.apply(D, n)
            if out is not None and out != int(target[n]):
                return n
    return None


def all_bounded_subtrees(S, stem, lmax):
    if stem.norm > lmax:
        return []
    region = [s for s in iter_lenlex(lmax - 1) if s in S]
    stem_leaves = stem.leaves()
    out = []
    for mask in range(1 << len(region)):
        chosen = {region[i] for i in range(len(region)) if mask >> i & 1}
        if not chosen or not stem.nodes <= chosen:
            continue
        if any(s and s[:-1] not in chosen for s in chosen):
            continue
        if any(
            s not in stem.nodes and not any(s.startswith(l) for l in stem_leaves)
            for s in chosen
        ):
            continue
        out.append(FiniteTree(frozenset(chosen)))
    return out


# -- examples ------------------------------------------------------------


def test_is_condition_examples():
    full = ClopenTree.full(3)
    assert is_condition(ROOT, full, full)
    assert is_condition(FiniteTree.from_strings(["", "0", "1"]), full, full)
    assert not is_condition(FiniteTree.from_strings(["", "0"]), full, full)  # shape
    thin = ClopenTree.from_leaf_strings(3, ["000", "001"])
    assert not is_condition(ROOT, thin, full)  # 1/4 is not above 3/4


def test_density_extend_examples():
    full = ClopenTree.full(3)
    assert density_extend(full, "", Dyadic(3, 2)) == ""
    t = ClopenTree.from_leaf_strings(2, ["00", "01", "10"])
    assert density_extend(t, "", Dyadic(3, 2)) == "0"
    with pytest.raises(EmptyCylinder):
        density_extend(ClopenTree.from_leaf_strings(2, ["00"]), "1", Dyadic(1, 1))


def test_density_extend_minimality():
    rng = SplitMix64(5)
    for _ in range(20):
        tree = gen_random_positive_tree(GenSpec(6, Dyadic(1, 1), rng.next()))
        tau = density_extend(tree, "", Dyadic(3, 2))
        for s in lenlex_range("", tree.depth):
            if (len(s), s) >= (len(tau), tau):
                break
            assert not tree.cylinder_measure(s) > Dyadic(3, 2).shift_down(len(s))


def test_splitting_extend_full():
    full = ClopenTree.full(3)
    out = splitting_extend(Condition(ROOT, full, full))
    assert set(out.stem.nodes) == {"", "0", "1"}


def test_splitting_extend_missing_corner():
    t = ClopenTree.from_leaf_strings(3, [f"{i:03b}" for i in range(7)])
    out = splitting_extend(Condition(ROOT, t, ClopenTree.full(3)))
    assert out.stem.leaves() == ["0", "10"]
    assert condition_is_valid(out)


def test_splitting_extend_shape_error():
    full = ClopenTree.full(3)
    with pytest.raises(InvalidCondition):
        splitting_extend(Condition(FiniteTree.from_strings(["", "0"]), full, full))


def test_splitting_extend_seeded_closure():
    rng = SplitMix64(41)
    for _ in range(25):
        cond = make_condition(5 + rng.next() % 3, rng.next())
        n = shape_depth(cond.stem)
        out = splitting_extend(cond)
        assert condition_is_valid(out)
        assert shape_depth(out.stem) == n + 1
        assert out.stem.end_extends(cond.stem)
        assert out.reservoir == cond.reservoir


def test_functional_use_discipline():
    rng = SplitMix64(77)
    for phi in BUILTIN_FUNCTIONALS.values():
        for _ in range(30):
            x = rng.next() % 4
            u = phi.use(x)
            # random tree pair agreeing below u
            depth = u + rng.next() % 3
            leaves1 = [s for s in iter_lenlex(depth) if rng.next() % 2 and len(s) == depth]
            base = FiniteTree.closure(leaves1 or [("0" * depth)])
            grown = FiniteTree(
                frozenset(base.nodes | {leaf + "0" for leaf in base.leaves() if len(leaf) >= u})
            )
            assert phi.window(base, x) == phi.window(grown, x)
            assert phi.apply(base, x) == phi.apply(grown, x)


def test_outputs_agree_examples():
    full = ClopenTree.full(4)
    probe = BUILTIN_FUNCTIONALS["zeros-probe"]
    assert not outputs_agree(full, ROOT, probe, lmax=3, inputs=2)
    # the disagreeing pair from the construction, verified directly
    e0 = FiniteTree.closure(["00"])
    e1 = FiniteTree.closure(["01", "10", "11"])
    assert probe.apply(e0, 1) == 1 and probe.apply(e1, 1) == 0
    assert outputs_agree(full, ROOT, BUILTIN_FUNCTIONALS["const-0"], 3, inputs=4)
    # vacuous when the use bound exceeds lmax
    assert outputs_agree(full, ROOT, probe, lmax=1, inputs=2)


def test_outputs_agree_matches_pair_oracle():
    rng = SplitMix64(13)
    probe = BUILTIN_FUNCTIONALS["zeros-probe"]
    for _ in range(10):
        cond = make_condition(4, rng.next())
        S = cond.working_tree()
        got = outputs_agree(S, cond.stem, probe, 3, inputs=2)
        trees = all_bounded_subtrees(S, cond.stem, 3)
        expected = True
        for x in range(2):
            outs = {phi for phi in (probe.apply(t, x) for t in trees) if phi is not None}
            if len(outs) > 1:
                expected = False
        assert got == expected


def test_split_search_probe_root_condition():
    full = ClopenTree.full(4)
    cond = Condition(ROOT, full, full)
    probe = BUILTIN_FUNCTIONALS["zeros-probe"]
    found = split_search(cond, probe, "00", 3)
    assert found is not None
    ext, n = found
    # least input wins: every shaped candidate contains node 0
    assert n == 0
    assert set(ext.nodes) == {"", "0", "1"}
    assert probe.apply(ext, 0) == 1


def test_split_search_pruned_zero_block():
    # reservoir misses the 00 cylinder: probe can never see 00, and the
    # target makes input 0 unhelpful, so the search exhausts
    t = ClopenTree.from_leaf_strings(4, [f"{i:04b}" for i in range(4, 16)])
    cond = Condition(ROOT, t, ClopenTree.full(4))
    assert condition_is_valid(cond)
    probe = BUILTIN_FUNCTIONALS["zeros-probe"]
    assert split_search(cond, probe, "10", 3) is None
    assert split_search(cond, probe, "00", 3) is not None  # n=0 still splits


def test_split_search_never_exhausts():
    cond = make_condition(5, 3)
    assert split_search(cond, BUILTIN_FUNCTIONALS["never"], "0101", 4) is None


def test_split_search_constant_wrong():
    cond = make_condition(5, 4, splits=1)
    found = split_search(cond, BUILTIN_FUNCTIONALS["const-1"], "0", 4)
    assert found is not None
    ext, n = found
    assert n == 0
    assert ext.end_extends(cond.stem)
    assert is_condition(ext, cond.reservoir, cond.ambient)


def test_forcing_step_examples():
    full = ClopenTree.full(4)
    cond = Condition(ROOT, full, full)
    res = forcing_step(cond, BUILTIN_FUNCTIONALS["zeros-probe"], "00", 3)
    assert isinstance(res, Split)
    res = forcing_step(cond, BUILTIN_FUNCTIONALS["const-0"], "00", 3)
    assert isinstance(res, Constant) and res.proof_depth == 3
    with pytest.raises(InvalidCondition):
        forcing_step(
            Condition(FiniteTree.from_strings(["", "0"]), full, full),
            BUILTIN_FUNCTIONALS["const-0"],
            "00",
            3,
        )


@pytest.mark.parametrize("name", sorted(BUILTIN_FUNCTIONALS))
def test_dichotomy_against_naive_oracle(name):
    phi = BUILTIN_FUNCTIONALS[name]
    rng = SplitMix64(hash(name) & 0xFFFF)
    for trial in range(8):
        cond = make_condition(4, rng.next(), splits=trial % 2)
        target = format(rng.next() % 4, "02b")
        lmax = 3 + trial % 2
        expected = split_oracle(cond, phi, target, lmax)
        result = forcing_step(cond, phi, target, lmax)
        if expected is None:
            assert isinstance(result, Constant)
            # re-verify by full pair enumeration
            trees = all_bounded_subtrees(cond.working_tree(), cond.stem, lmax)
            cache = [
                tuple(phi.apply(t, x) for x in range(len(target))) for t in trees
            ]
            for i in range(len(cache)):
                for j in range(i + 1, len(cache)):
                    for a, b in zip(cache[i], cache[j]):
                        assert a is None or b is None or a == b
        else:
            assert isinstance(result, Split)
            assert result.input_index == expected
            out = phi.apply(result.extension, result.input_index)
            assert out is not None and out != int(target[result.input_index])
            assert is_condition(result.extension, cond.reservoir, cond.ambient)
            assert result.extension.end_extends(cond.stem)


def test_split_results_never_shrink_reservoir():
    cond = make_condition(5, 21)
    probe = BUILTIN_FUNCTIONALS["zeros-probe"]
    res = forcing_step(cond, probe, "00", 3)
    assert isinstance(res, Split)
    assert all(s in cond.working_tree() for s in res.extension.nodes)


def test_table_functional():
    record = {
        "format": "functional/v1",
        "name": "xor-two",
        "cases": [
            {"x": 0, "queries": ["0", "1"], "outputs": {"10": 1, "01": 1, "11": 0, "00": None}},
        ],
    }
    phi = table_functional(record)
    assert phi.use(0) == 2 and phi.use(5) == 0
    assert phi.apply(FiniteTree.closure(["0", "1"]), 0) == 0
    assert phi.apply(FiniteTree.closure(["00"]), 0) == 1
    assert phi.apply(ROOT, 0) is None  # norm below use
    assert phi.apply(FiniteTree.closure(["0", "1"]), 1) is None


def test_child_mass_arithmetic():
    # density above 3/4 at sigma forces positive measure in both children
    rng = SplitMix64(31)
    for _ in range(40):
        tree = gen_random_positive_tree(GenSpec(6, Dyadic(13, 4), rng.next()))
        for sigma in iter_lenlex(5):
            if tree.cylinder_measure(sigma) > Dyadic(3, 2).shift_down(len(sigma)):
                assert tree.cylinder_measure(sigma + "0").is_positive
                assert tree.cylinder_measure(sigma + "1").is_positive
