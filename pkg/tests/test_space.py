"""Tests for finite spaces, measurable sets and enumerations."""

import pytest
from hypothesis import given, strategies as st

from core.measure.space import (
    FiniteSpace, MSet, complement, disjoint_union, embed_mask, enumerate_disjoint_tuples,
    enumerate_partitions, enumerate_subsets, intersection, pairwise_disjoint, project_mask,
    set_op, subspace_without, union
)
from core.security.input_validation import GuardError, ValidationError


@pytest.mark.unit
def test_space_rejects_duplicate_labels():
    """Test that atom labels must be distinct."""
    with pytest.raises(ValidationError):
        FiniteSpace(("a", "a"))


@pytest.mark.unit
def test_atom_labels_are_free_text():
    """Test that any printable label without commas is accepted."""
    space = FiniteSpace.from_dict({"atoms": ["α", "β γ", "x_1", "[0;1)"]})
    assert space.atoms == ("α", "β γ", "x_1", "[0;1)")
    for bad in ["a,b", " a", "a ", "", "tab\there"]:
        with pytest.raises(ValidationError):
            FiniteSpace.from_dict({"atoms": [bad]})


@pytest.mark.unit
def test_ingested_space_needs_atoms():
    """Test that an ingested space has between 1 and 16 atoms."""
    with pytest.raises(ValidationError):
        FiniteSpace.from_dict({"atoms": []})
    with pytest.raises(ValidationError):
        FiniteSpace.from_dict({"atoms": [f"x{i}" for i in range(17)]})
    assert FiniteSpace.from_dict({"atoms": ["a", "b"]}).k == 2


@pytest.mark.unit
def test_set_operations(abc):
    """Test union, intersection and complement examples."""
    assert union(abc.mset([0]), abc.mset([1])) == abc.mset([0, 1])
    assert intersection(abc.mset([0, 1]), abc.mset([1, 2])) == abc.mset([1])
    assert complement(abc.empty()) == abc.full()
    assert set_op("difference", abc.mset([0, 1]), abc.mset([1])) == abc.mset([0])


@pytest.mark.unit
def test_set_operations_reject_foreign_sets(abc):
    """Test that sets of different spaces do not combine."""
    other = FiniteSpace(("x", "y", "z"))
    with pytest.raises(ValidationError, match="space mismatch"):
        union(abc.mset([0]), other.mset([1]))


@pytest.mark.unit
def test_unknown_set_operation(abc):
    """Test that unknown operations are rejected."""
    with pytest.raises(ValidationError):
        set_op("xor", abc.empty(), abc.full())


@pytest.mark.unit
def test_mset_members_validated(abc):
    """Test that out-of-range or unsorted members are rejected."""
    with pytest.raises(ValidationError):
        MSet(abc, (3,))
    with pytest.raises(ValidationError):
        MSet(abc, (1, 0))


@pytest.mark.unit
def test_keys(abc):
    """Test canonical set keys."""
    assert abc.empty().key == ""
    assert abc.mset([2, 0]).key == "0,2"
    assert abc.from_key("0,2") == abc.mset([0, 2])
    assert abc.from_key("") == abc.empty()
    with pytest.raises(ValidationError):
        abc.from_key("2,0")
    with pytest.raises(ValidationError):
        abc.from_key("a")


@pytest.mark.unit
def test_labelled(abc):
    """Test building sets from atom labels."""
    assert abc.labelled(["c", "a"]) == abc.mset([0, 2])
    with pytest.raises(ValidationError):
        abc.labelled(["q"])


@pytest.mark.unit
@pytest.mark.parametrize("k, m, expected", [(1, 1, 2), (2, 2, 9), (3, 3, 64)])
def test_disjoint_tuple_counts(k, m, expected):
    """Test the worked counting examples."""
    space = FiniteSpace.of_size(k)
    assert len(list(enumerate_disjoint_tuples(space, m))) == expected


@pytest.mark.unit
def test_disjoint_tuples_all_disjoint_and_distinct():
    """Test (m+1)^k distinct disjoint tuples for every k <= 6, m <= 4."""
    for k in range(1, 7):
        space = FiniteSpace.of_size(k)
        for m in range(1, 5):
            tuples = list(enumerate_disjoint_tuples(space, m))
            assert len(tuples) == (m + 1) ** k
            assert all(pairwise_disjoint(t) for t in tuples)
            assert len({tuple(s.mask for s in t) for t in tuples}) == len(tuples)


@pytest.mark.unit
def test_enumeration_order_starts_lexicographically(abc):
    """Test that enumeration starts with the all-empty tuple and is lexicographic."""
    tuples = [tuple(s.mask for s in t) for t in enumerate_disjoint_tuples(abc, 2)]
    assert tuples[0] == (0, 0)
    assert tuples == sorted(tuples)


@pytest.mark.unit
def test_enumeration_guard(abc):
    """Test that oversized enumerations are refused."""
    with pytest.raises(GuardError, match="enumeration too large"):
        list(enumerate_disjoint_tuples(abc, 3, limit=10))


@pytest.mark.unit
def test_enumerate_subsets_order(abc):
    """Test that subsets come in ascending bitmask order."""
    assert [s.mask for s in enumerate_subsets(abc)] == list(range(8))


@pytest.mark.unit
@pytest.mark.parametrize("k, bell", [(1, 1), (2, 2), (3, 5), (4, 15)])
def test_partition_counts(k, bell):
    """Test that partitions are counted by Bell numbers and cover the space."""
    space = FiniteSpace.of_size(k)
    partitions = list(enumerate_partitions(space))
    assert len(partitions) == bell
    for blocks in partitions:
        assert pairwise_disjoint(blocks)
        assert sum(len(b) for b in blocks) == k
        assert all(not b.is_empty() for b in blocks)


@pytest.mark.unit
def test_subspace_round_trip(abc):
    """Test moving sets between X minus s and X."""
    subspace, positions = subspace_without(abc, abc.mset([1]))
    assert subspace.atoms == ("a", "c")
    assert positions == (0, 2)
    assert embed_mask(0b10, positions) == 0b100
    assert project_mask(0b101, positions) == 0b11


@pytest.mark.unit
def test_subspace_without_everything(abc):
    """Test that removing every atom leaves the zero-atom space."""
    subspace, positions = subspace_without(abc, abc.full())
    assert subspace.k == 0
    assert positions == ()


@pytest.mark.unit
def test_disjoint_union(abc):
    """Test tagged atoms and offsets of a disjoint union."""
    space, offsets = disjoint_union([abc, FiniteSpace(("x",))])
    assert space.atoms == ("0.a", "0.b", "0.c", "1.x")
    assert offsets == (0, 3)


@pytest.mark.unit
@given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15))
def test_boolean_algebra_laws(a, b, c):
    """Test De Morgan, absorption and distributivity on random sets."""
    space = FiniteSpace.of_size(4)
    x, y, z = space.from_mask(a), space.from_mask(b), space.from_mask(c)
    assert ~(x | y) == ~x & ~y
    assert ~(x & y) == ~x | ~y
    assert x | (x & y) == x
    assert x & (x | y) == x
    assert x & (y | z) == (x & y) | (x & z)
    assert x - y == x & ~y
