"""Tests for set functions, interference operators and grade classification."""

from fractions import Fraction

import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from core.io.random_gen import random_disjoint_tuple, random_set_function
from core.measure.interference import (
    SetFunction, alternating_union_sum, delta, first_interference, grade_of, interference,
    is_grade_additive, is_grounded, is_positive, recursion_residual, residual_at_masks
)
from core.measure.space import (
    FiniteSpace, MSet, disjoint_mask_tuples, enumerate_disjoint_tuples, project_mask, subspace_without
)
from core.security.input_validation import GuardError, ValidationError

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def set_functions(k):
    """Hypothesis strategy for arbitrary rational set functions on k atoms."""
    space = FiniteSpace.of_size(k)
    return st.lists(rationals, min_size=space.n_sets, max_size=space.n_sets).map(
        lambda values: SetFunction(space, tuple(values))
    )


def disjoint_tuples(k, m):
    """Hypothesis strategy: assign each of k atoms to one of m sets or to none."""
    space = FiniteSpace.of_size(k)

    def build(assignment):
        masks = [0] * m
        for atom, slot in enumerate(assignment):
            if slot < m:
                masks[slot] |= 1 << atom
        return tuple(space.from_mask(mask) for mask in masks)

    return st.lists(st.integers(0, m), min_size=k, max_size=k).map(build)


@pytest.mark.unit
def test_square_measure_interference(abc, square_measure):
    """Test the worked examples for mu(S) = |S|^2."""
    a, b, c = abc.mset([0]), abc.mset([1]), abc.mset([2])
    assert interference(square_measure, (a, b)) == -2
    assert interference(square_measure, (a, b, c)) == 0


@pytest.mark.unit
def test_additive_measure_has_no_first_interference(abc):
    """Test that a measure is grade-1 additive on a sample pair."""
    nu = SetFunction.from_atom_weights(abc, [Fraction(1, 2), 3, -2])
    assert interference(nu, (abc.mset([0, 2]), abc.mset([1]))) == 0


@pytest.mark.unit
def test_interference_rejects_overlap(abc, square_measure):
    """Test that overlapping arguments are refused."""
    with pytest.raises(ValidationError, match="arguments must be pairwise disjoint"):
        interference(square_measure, (abc.mset([0, 1]), abc.mset([1])))


@pytest.mark.unit
def test_interference_needs_two_arguments(abc, square_measure):
    """Test that d = 0 is refused."""
    with pytest.raises(ValidationError):
        interference(square_measure, (abc.mset([0]),))


@pytest.mark.unit
def test_first_interference_matches_general_formula(abc, cube_measure):
    """Test I_1 by two independent code paths on every disjoint pair."""
    for s0, s1 in enumerate_disjoint_tuples(abc, 2):
        assert first_interference(cube_measure, s0, s1) == interference(cube_measure, (s0, s1))


@pytest.mark.unit
def test_alternating_union_sum_single_mask():
    """Test that one mask contributes its own value."""
    assert alternating_union_sum(lambda m: Fraction(m), [5]) == 5


@pytest.mark.unit
def test_delta_examples(abc, square_measure):
    """Test the difference operator on worked examples."""
    reduced = delta(square_measure, abc.mset([0]))
    assert reduced.space.atoms == ("b", "c")
    assert reduced(reduced.space.mset([0])) == -3

    nu = SetFunction.from_atom_weights(abc, [1, 2, 5])
    s = abc.mset([0, 2])
    reduced = delta(nu, s)
    assert set(reduced.values) == {-nu(s)}


@pytest.mark.unit
def test_delta_of_empty_set_vanishes(abc, cube_measure):
    """Test that removing nothing gives nu(T) - nu(T) = 0 everywhere."""
    reduced = delta(cube_measure, abc.empty())
    assert reduced.space == abc
    assert set(reduced.values) == {0}


@pytest.mark.unit
def test_delta_of_full_set(abc, square_measure):
    """Test that the difference operator of the full set lives on the zero-atom space."""
    reduced = delta(square_measure, abc.full())
    assert reduced.space.k == 0
    assert reduced.values == (Fraction(-9),)


@pytest.mark.unit
def test_recursion_residual_example(abc, square_measure):
    """Test the recursion identity on the worked example."""
    a, b, c = abc.mset([0]), abc.mset([1]), abc.mset([2])
    assert recursion_residual(square_measure, a, (b, c)) == 0


@pytest.mark.unit
def test_recursion_residual_needs_grade_two(abc, square_measure):
    """Test that d < 2 is refused."""
    with pytest.raises(ValidationError):
        recursion_residual(square_measure, abc.mset([0]), (abc.mset([1]),))


@pytest.mark.unit
def test_recursion_residual_exhaustive_small():
    """Test the recursion identity on every disjoint tuple for k <= 3, d <= 3."""
    for k in range(1, 4):
        space = FiniteSpace.of_size(k)
        nu = SetFunction.from_callable(space, lambda s: Fraction(3 * s.mask ** 2 - 7, s.mask + 2))
        for d in (2, 3):
            for masks in disjoint_mask_tuples(space.full_mask, d + 1):
                sets = tuple(space.from_mask(m) for m in masks)
                assert recursion_residual(nu, sets[0], sets[1:]) == 0


def reduced_function_residual(nu, masks):
    """The residual with Delta_{s0} nu built as a set function on X minus s0."""
    s0 = nu.space.from_mask(masks[0])
    reduced = delta(nu, s0)
    _, positions = subspace_without(nu.space, s0)
    sub_sets = [MSet.from_mask(reduced.space, project_mask(m, positions)) for m in masks[1:]]
    sets = [nu.space.from_mask(m) for m in masks]
    return interference(reduced, sub_sets) - (interference(nu, sets) - nu(s0))


@pytest.mark.unit
def test_residual_agrees_with_reduced_function():
    """Test the lazy mask residual against the one built from delta, k <= 4."""
    for k in range(1, 5):
        space = FiniteSpace.of_size(k)
        nu = SetFunction.from_callable(space, lambda s: Fraction(s.mask ** 3 - 5 * s.mask + 1, 2 * s.mask + 3))
        for d in (2, 3):
            for masks in disjoint_mask_tuples(space.full_mask, d + 1):
                assert reduced_function_residual(nu, masks) == residual_at_masks(nu.values, masks) == 0


@pytest.mark.unit
def test_recursion_residual_random_six_atoms(rng):
    """Test the recursion identity on 1000 seeded cases per grade on six atoms."""
    space = FiniteSpace.of_size(6)
    for d in (2, 3):
        for _ in range(1000):
            nu = random_set_function(rng, space)
            sets = random_disjoint_tuple(rng, space, d + 1)
            assert recursion_residual(nu, sets[0], sets[1:]) == 0


@pytest.mark.unit
@hypothesis_settings(max_examples=200, deadline=None)
@given(set_functions(4), disjoint_tuples(4, 4))
def test_recursion_residual_random(nu, sets):
    """Test the recursion identity on arbitrary set functions."""
    assert recursion_residual(nu, sets[0], sets[1:]) == 0


@pytest.mark.unit
@hypothesis_settings(max_examples=100, deadline=None)
@given(set_functions(3), set_functions(3), rationals, rationals, disjoint_tuples(3, 3))
def test_interference_is_linear(mu, nu, alpha, beta, sets):
    """Test linearity of I_d in the set function."""
    combined = mu.scaled(alpha) + nu.scaled(beta)
    expected = alpha * interference(mu, sets) + beta * interference(nu, sets)
    assert interference(combined, sets) == expected


@pytest.mark.unit
def test_grade_additivity_of_square_measure(abc, square_measure):
    """Test the witness at grade 1 and additivity at grade 2."""
    report = is_grade_additive(square_measure, 1)
    assert not report.is_additive_at_grade
    assert report.witness == (abc.mset([0]), abc.mset([1]))
    assert report.value == -2
    assert interference(square_measure, report.witness) == report.value

    assert is_grade_additive(square_measure, 2).is_additive_at_grade
    assert grade_of(square_measure, 3) == 2


@pytest.mark.unit
def test_grade_report_to_dict(square_measure):
    """Test report serialization."""
    data = is_grade_additive(square_measure, 1).to_dict()
    assert data["grade_additive"] is False
    assert data["witness"] == ["0", "1"]
    assert data["interference"] == "-2"


@pytest.mark.unit
def test_measure_is_grade_one(abc):
    """Test that additive measures have grade 1."""
    nu = SetFunction.from_atom_weights(abc, [2, Fraction(-1, 3), 0])
    report = is_grade_additive(nu, 1)
    assert report.is_additive_at_grade
    assert report.witness is None
    assert report.tuples_checked == 27
    assert grade_of(nu, 2) == 1


@pytest.mark.unit
def test_ungrounded_function_has_no_grade(abc):
    """Test that mu(empty) != 0 fails at every grade with the all-empty witness."""
    mu = SetFunction.from_callable(abc, lambda s: 1 + len(s))
    assert not is_grounded(mu)
    for d in (1, 2, 3):
        report = is_grade_additive(mu, d)
        assert not report.is_additive_at_grade
        assert all(s.is_empty() for s in report.witness)
        assert report.value == 1
    assert grade_of(mu, 3) is None


@pytest.mark.unit
def test_grade_additivity_guard(square_measure):
    """Test that the enumeration guard is enforced."""
    with pytest.raises(GuardError):
        is_grade_additive(square_measure, 2, limit=26)


@pytest.mark.unit
@hypothesis_settings(max_examples=50, deadline=None)
@given(st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=6, max_size=6))
def test_hierarchy(weights, pairs):
    """Test grade-1 => grade-2 => grade-3 on measures and quadratic set functions."""
    space = FiniteSpace.of_size(3)
    nu = SetFunction.from_atom_weights(space, weights)
    assert is_grade_additive(nu, 1).is_additive_at_grade
    assert is_grade_additive(nu, 2).is_additive_at_grade

    a = [[pairs[0], pairs[1], pairs[2]], [pairs[1], pairs[3], pairs[4]], [pairs[2], pairs[4], pairs[5]]]
    quadratic = SetFunction.from_callable(space, lambda s: sum(a[i][j] for i in s for j in s))
    assert is_grade_additive(quadratic, 2).is_additive_at_grade
    assert is_grade_additive(quadratic, 3).is_additive_at_grade


@pytest.mark.unit
def test_is_positive(abc, square_measure):
    """Test positivity and its first negative witness."""
    assert is_positive(square_measure).holds
    mu = square_measure - SetFunction.from_atom_weights(abc, [2, 0, 0])
    report = is_positive(mu)
    assert not report.holds
    assert report.witness == abc.mset([0])
    assert report.value == -1


@pytest.mark.unit
def test_set_function_round_trip(square_measure):
    """Test dictionary conversion with canonical keys in bitmask order."""
    data = square_measure.to_dict()
    assert list(data["values"])[:4] == ["", "0", "1", "0,1"]
    assert data["values"]["0,1,2"] == "9"
    assert SetFunction.from_dict(data) == square_measure


@pytest.mark.unit
def test_partial_table_rejected(square_measure):
    """Test that a missing set is reported."""
    data = square_measure.to_dict()
    del data["values"]["0,2"]
    with pytest.raises(ValidationError, match="partial table"):
        SetFunction.from_dict(data)


@pytest.mark.unit
def test_set_function_space_mismatch(square_measure):
    """Test that sets of another space are refused."""
    other = FiniteSpace(("x", "y", "z"))
    with pytest.raises(ValidationError, match="space mismatch"):
        square_measure(other.mset([0]))
