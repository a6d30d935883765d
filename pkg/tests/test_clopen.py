import pytest

from hypothesis import given, strategies as st

from positree.bits import strings_of_length
from positree.clopen import ClopenTree
from positree.dyadic import Dyadic
from positree.errors import DepthExceeded, NoSuchLevel


def leaf_oracle(tree):
    return set(tree.leaf_strings())


def trees(max_depth=6):
    return st.integers(0, max_depth).flatmap(
        lambda d: st.integers(0, (1 << (1 << d)) - 1).map(lambda bits: ClopenTree(d, bits))
    )


def test_measure_examples():
    assert ClopenTree.full(3).measure() == Dyadic(1)
    assert ClopenTree.from_leaf_strings(2, ["00", "01", "10"]).measure() == Dyadic(3, 2)
    assert ClopenTree.empty(4).measure() == Dyadic(0)


def test_restrict_examples():
    full2 = ClopenTree.full(2)
    r = full2.restrict("0")
    assert leaf_oracle(r) == {"00", "01"} and r.measure() == Dyadic(1, 1)
    t = ClopenTree.from_leaf_strings(2, ["00", "01", "10"])
    # oracle: enumerate leaves with the prefix
    assert leaf_oracle(t.restrict("1")) == {s for s in leaf_oracle(t) if s.startswith("1")} == {"10"}
    assert t.restrict("1").measure() == Dyadic(1, 2)
    assert ClopenTree.from_leaf_strings(2, ["00"]).restrict("1").is_empty
    with pytest.raises(DepthExceeded):
        t.restrict("010")


def test_membership_and_cylinders():
    t = ClopenTree.from_leaf_strings(2, ["00", "01", "10"])
    assert "" in t and "0" in t and "10" in t
    assert "11" not in t
    # beyond the resolution: length-d prefix must be a leaf
    assert "1011" in t and "110" not in t
    assert t.cylinder_measure("1011") == Dyadic(1, 4)
    assert t.cylinder_measure("110") == Dyadic(0)


@given(trees())
def test_additivity(tree):
    for sigma in ["", "0", "1"]:
        if len(sigma) >= tree.depth:
            continue
        parent = tree.restrict(sigma).measure()
        assert parent == tree.restrict(sigma + "0").measure() + tree.restrict(sigma + "1").measure()


@given(trees())
def test_level_sum_is_total_measure(tree):
    for n in range(tree.depth + 1):
        total = sum(
            (tree.restrict(s).measure() for s in strings_of_length(n)),
            Dyadic(0),
        )
        assert total == tree.measure()


@given(trees())
def test_level_counts_double_at_most(tree):
    counts = [tree.level_count(n) for n in range(tree.depth + 1)]
    assert all(b <= 2 * a for a, b in zip(counts, counts[1:]))
    assert tree.measure() == Dyadic(counts[-1], tree.depth)


def test_growth_rate_examples():
    assert ClopenTree.full(3).growth_rate(3) == 3
    t = ClopenTree.from_leaf_strings(2, ["00", "01", "10"])
    assert [t.level_count(m) for m in range(3)] == [1, 2, 3]
    assert t.growth_rate(1) == 1
    with pytest.raises(NoSuchLevel):
        ClopenTree.from_leaf_strings(2, ["00"]).growth_rate(1)
    with pytest.raises(NoSuchLevel):
        ClopenTree.empty(3).growth_rate(0)


def test_at_depth_and_intersect():
    t = ClopenTree.from_leaf_strings(2, ["00", "01", "10"])
    refined = t.at_depth(4)
    assert refined.measure() == t.measure()
    assert leaf_oracle(refined) == {l + pad for l in leaf_oracle(t) for pad in strings_of_length(2)}
    other = ClopenTree.from_leaf_strings(1, ["1"])
    meet = t.intersect(other)
    assert leaf_oracle(meet) == {"10"}
    assert meet.depth == 2
    assert meet.is_subset(t) and meet.is_subset(other)


def test_file_round_trip_bit_exact():
    t = ClopenTree.from_leaf_strings(3, ["000", "010", "101", "111"])
    text = t.to_text()
    again = ClopenTree.from_text(text)
    assert again == t
    assert again.to_text() == text


def test_level_count_arrays_match_oracle():
    t = ClopenTree.from_leaf_strings(3, ["000", "010", "011", "110"])
    counts = t.level_count_arrays()
    for l in range(4):
        for j, s in enumerate(strings_of_length(l)):
            assert counts[l][j] == sum(1 for leaf in leaf_oracle(t) if leaf.startswith(s))
