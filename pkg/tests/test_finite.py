import pytest

from positree.clopen import ClopenTree
from positree.dyadic import Dyadic
from positree.finite import FiniteTree, is_end_extension, shape_depth, trim


def test_prefix_closure_enforced():
    with pytest.raises(ValueError):
        FiniteTree(frozenset({"", "10"}))
    t = FiniteTree.closure(["10"])
    assert set(t.nodes) == {"", "1", "10"}


def test_norm_and_leaves():
    assert FiniteTree(frozenset()).norm == 0
    assert FiniteTree.closure([""]).norm == 1
    t = FiniteTree.closure(["00", "1"])
    assert t.norm == 3
    assert t.leaves() == ["1", "00"]


def test_end_extension_examples():
    U = FiniteTree.from_strings(["", "0", "1", "00"])
    F = FiniteTree.from_strings(["", "0", "1"])
    assert is_end_extension(U, F)
    assert not is_end_extension(FiniteTree.from_strings(["", "0"]), F)
    assert is_end_extension(FiniteTree.from_strings(["", "0", "1"]), FiniteTree.closure([""]))


def test_end_extension_rejects_side_growth():
    # node 01 is neither in F nor an extension of F's leaves {00, 1}
    F = FiniteTree.closure(["00", "1"])
    U = FiniteTree(frozenset(F.nodes | {"01"}))
    assert not is_end_extension(U, F)


def test_trim_examples():
    ambient = ClopenTree.from_leaf_strings(2, ["00"])
    U = FiniteTree.from_strings(["", "0", "1"])
    assert set(trim(U, ambient).nodes) == {"", "0"}
    full = ClopenTree.full(2)
    assert trim(U, full).nodes == U.nodes
    assert trim(FiniteTree(frozenset()), full).is_empty


def test_trim_idempotent_and_measure_preserving():
    ambient = ClopenTree.from_leaf_strings(3, ["000", "011", "101"])
    U = FiniteTree.closure(["000", "001", "11", "10"])
    once = trim(U, ambient)
    assert trim(once, ambient).nodes == once.nodes
    # induced clopen mass: leaves are incomparable, cylinders disjoint
    def induced(t):
        return sum((ambient.cylinder_measure(s) for s in t.leaves()), Dyadic(0))
    assert induced(once) == induced(U)


def test_shape_depth_examples():
    assert shape_depth(FiniteTree.closure([""])) == 1
    assert shape_depth(FiniteTree.from_strings(["", "0"])) is None
    assert shape_depth(FiniteTree.from_strings(["", "0", "1"])) == 2
    assert shape_depth(FiniteTree.from_strings(["", "0", "1", "10"])) == 2
    assert shape_depth(FiniteTree.closure(["00", "01", "1"])) is None  # uneven depths
    assert shape_depth(FiniteTree.closure(["00", "01", "10", "11"])) == 3
    assert shape_depth(FiniteTree.closure(["000", "001", "01", "1"])) is None
    assert shape_depth(FiniteTree.closure(["000", "001", "01", "10", "11"])) is None
    assert shape_depth(FiniteTree.closure(["000", "001", "01"])) is None  # root chain to 0
    assert shape_depth(FiniteTree.closure(["000", "001", "1"])) is None  # uneven after contraction
    assert shape_depth(FiniteTree.closure(["000", "001", "10", "11"])) == 3  # chains contract
    assert shape_depth(FiniteTree(frozenset())) is None
