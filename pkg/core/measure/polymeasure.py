"""Finite polymeasures on products of finite spaces.

A polymeasure is stored at atom level: a dense rank-d numpy object array of
Fractions, one axis per factor. The value on a cylinder A_1 x ... x A_d is
the sum of the entries over the atom tuples it contains, so separate
additivity in each slot holds by construction. Data that arrives as values
on cylinders goes through RawCylinderTable and is checked before it is
compressed to a tensor.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.measure.interference import SetFunction, SignReport
from core.measure.scalar import ZERO, format_scalar, parse_scalar
from core.measure.space import (
    FiniteSpace, MSet, disjoint_mask_tuples, disjoint_union,
    enumerate_partitions, mask_key, pairwise_disjoint
)
from core.monitoring.logging_config import StructuredLogger
from core.monitoring.metrics import (
    increment_counter, sign_patterns, tracked, tuples_enumerated, witnesses_found
)
from core.security.input_validation import (
    DEFAULT_ENUMERATION_LIMIT, DEFAULT_SEMIVARIATION_LIMIT, ValidationError,
    check_guard, validate_seed, validate_slot, validate_trials
)

logger = logging.getLogger(__name__)
events = StructuredLogger(__name__)

SEMIVARIATION_MODES = ("exact", "sampled")
PARTITION_LIMIT = 10 ** 5

_to_fraction = np.vectorize(Fraction, otypes=[object])


def fraction_array(data: Any) -> np.ndarray:
    """Object array of Fractions from nested lists or an array."""
    array = np.array(data, dtype=object)
    if array.size == 0:
        return array
    return _to_fraction(array)


@dataclass(frozen=True, eq=False)
class PolyMeasure:
    """A rank-d polymeasure: factor spaces and an atom-level tensor."""

    factors: Tuple[FiniteSpace, ...]
    tensor: np.ndarray

    def __post_init__(self):
        if not self.factors:
            raise ValidationError("A polymeasure needs at least one factor")
        tensor = fraction_array(self.tensor)
        expected = tuple(f.k for f in self.factors)
        if tensor.shape != expected:
            raise ValidationError(f"Tensor shape {tensor.shape} does not match factor sizes {expected}")
        tensor.flags.writeable = False
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "tensor", tensor)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def has_equal_factors(self) -> bool:
        return all(f == self.factors[0] for f in self.factors)

    def equals(self, other: "PolyMeasure") -> bool:
        """Same factors and the same entries, exactly."""
        return self.factors == other.factors and bool(np.array_equal(self.tensor, other.tensor))

    def __add__(self, other: "PolyMeasure") -> "PolyMeasure":
        if other.factors != self.factors:
            raise ValidationError("factor mismatch")
        return PolyMeasure(self.factors, self.tensor + other.tensor)

    def scaled(self, alpha: Any) -> "PolyMeasure":
        return PolyMeasure(self.factors, self.tensor * Fraction(alpha))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary; the outermost tensor axis is slot 0."""
        return {
            "factors": [f.to_dict() for f in self.factors],
            "tensor": np.vectorize(format_scalar, otypes=[object])(self.tensor).tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PolyMeasure":
        """
        Create from dictionary.

        Raises:
            ValidationError: On bad factors, ragged tensors or bad scalars
        """
        factors = data.get("factors")
        if not isinstance(factors, list) or not factors:
            raise ValidationError("'factors' must be a nonempty list of spaces")
        spaces = tuple(FiniteSpace.from_dict(f) for f in factors)
        try:
            raw = np.array(data.get("tensor"), dtype=object)
        except ValueError:
            raise ValidationError("Tensor must be a rectangular nested array")
        if raw.shape != tuple(s.k for s in spaces):
            raise ValidationError(
                f"Tensor shape {raw.shape} does not match factor sizes {tuple(s.k for s in spaces)}"
            )
        return cls(spaces, np.vectorize(parse_scalar, otypes=[object])(raw))

    @classmethod
    def zeros(cls, factors: Sequence[FiniteSpace]) -> "PolyMeasure":
        shape = tuple(f.k for f in factors)
        return cls(tuple(factors), np.full(shape, ZERO, dtype=object))


@dataclass(frozen=True)
class RawCylinderTable:
    """Values on cylinders, keyed by one bitmask per factor."""

    factors: Tuple[FiniteSpace, ...]
    entries: Mapping[Tuple[int, ...], Fraction]

    @property
    def n_cylinders(self) -> int:
        return math.prod(f.n_sets for f in self.factors)

    def is_total(self) -> bool:
        return len(self.entries) == self.n_cylinders and all(
            masks in self.entries
            for masks in itertools.product(*(range(f.n_sets) for f in self.factors))
        )

    def with_value(self, sets: Sequence[MSet], value: Any) -> "RawCylinderTable":
        """Copy with one entry replaced."""
        entries = dict(self.entries)
        entries[tuple(s.mask for s in sets)] = Fraction(value)
        return RawCylinderTable(self.factors, entries)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "factors": [f.to_dict() for f in self.factors],
            "entries": [
                {"sets": [mask_key(m) for m in masks], "value": format_scalar(v)}
                for masks, v in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RawCylinderTable":
        factors = data.get("factors")
        if not isinstance(factors, list) or not factors:
            raise ValidationError("'factors' must be a nonempty list of spaces")
        spaces = tuple(FiniteSpace.from_dict(f) for f in factors)
        entries: Dict[Tuple[int, ...], Fraction] = {}
        for entry in data.get("entries", []):
            keys = entry.get("sets")
            if not isinstance(keys, list) or len(keys) != len(spaces):
                raise ValidationError("Each entry needs one set key per factor")
            masks = tuple(MSet.from_key(space, key).mask for space, key in zip(spaces, keys))
            if masks in entries:
                raise ValidationError(f"Duplicate cylinder: {keys}")
            entries[masks] = parse_scalar(entry.get("value"))
        return cls(spaces, entries)

    @classmethod
    def from_polymeasure(cls, lam: PolyMeasure) -> "RawCylinderTable":
        """Tabulate a polymeasure on every cylinder."""
        entries = {}
        for masks in itertools.product(*(range(f.n_sets) for f in lam.factors)):
            sets = [MSet.from_mask(f, m) for f, m in zip(lam.factors, masks)]
            entries[masks] = evaluate(lam, sets)
        return cls(lam.factors, entries)


@dataclass(frozen=True)
class AdditivityReport:
    """Outcome of a separate-additivity check; the violation is value(B+C) != value(B) + value(C)."""

    holds: bool
    slot: Optional[int] = None
    cylinder: Optional[Tuple[MSet, ...]] = None
    parts: Optional[Tuple[MSet, MSet]] = None
    expected: Optional[Fraction] = None
    actual: Optional[Fraction] = None

    def to_dict(self) -> Dict[str, Any]:
        if self.holds:
            return {"separately_additive": True, "violation": None}
        return {
            "separately_additive": False,
            "violation": {
                "slot": self.slot,
                "cylinder": [s.key for s in self.cylinder],
                "parts": [s.key for s in self.parts],
                "sum_of_parts": format_scalar(self.expected),
                "value": format_scalar(self.actual),
            },
        }


@dataclass(frozen=True)
class SemivariationReport:
    """Semivariation value (exact) or certified lower bound (sampled), with maximizing signs."""

    value: Fraction
    exact: bool
    signs: Tuple[Tuple[int, ...], ...]
    patterns: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "semivariation": format_scalar(self.value),
            "mode": "exact" if self.exact else "sampled",
            "lower_bound_only": not self.exact,
            "signs": [list(s) for s in self.signs],
            "patterns": self.patterns,
        }


def _require_equal_factors(lam: PolyMeasure, message: str = "diagonal requires equal factors"):
    if not lam.has_equal_factors:
        raise ValidationError(message)


def _cylinder_sum(tensor: np.ndarray, members: Sequence[Sequence[int]]) -> Fraction:
    if any(len(m) == 0 for m in members):
        return ZERO
    return Fraction(tensor[np.ix_(*members)].sum())


def evaluate(lam: PolyMeasure, sets: Sequence[MSet]) -> Fraction:
    """
    Value of lam on the cylinder sets[0] x ... x sets[d-1].

    Raises:
        ValidationError: If sets[j] does not belong to factor j
    """
    if len(sets) != lam.rank:
        raise ValidationError(f"Expected {lam.rank} sets, got {len(sets)}")
    for j, (s, factor) in enumerate(zip(sets, lam.factors)):
        if s.space != factor:
            raise ValidationError(f"factor mismatch in slot {j}")
    return _cylinder_sum(lam.tensor, [s.members for s in sets])


def evaluate_union(lam: PolyMeasure, cylinders: Iterable[Sequence[MSet]]) -> Fraction:
    """
    Value of lam, extended additively, on a finite union of cylinders.

    Overlapping cylinders are fine: each atom tuple is counted once.
    """
    covered = np.zeros(lam.tensor.shape, dtype=bool)
    for sets in cylinders:
        if len(sets) != lam.rank:
            raise ValidationError(f"Expected {lam.rank} sets, got {len(sets)}")
        for j, (s, factor) in enumerate(zip(sets, lam.factors)):
            if s.space != factor:
                raise ValidationError(f"factor mismatch in slot {j}")
        if all(len(s) for s in sets):
            covered[np.ix_(*[s.members for s in sets])] = True
    if not covered.any():
        return ZERO
    return Fraction(lam.tensor[covered].sum())


@tracked("check_separate_additivity")
def check_separate_additivity(
    raw: RawCylinderTable,
    limit: int = DEFAULT_ENUMERATION_LIMIT
) -> AdditivityReport:
    """
    Check additivity of a cylinder table in each slot separately.

    For every slot j, every choice of the other slots and every disjoint pair
    (B, C) in slot j: value(.. B+C ..) = value(.. B ..) + value(.. C ..).

    Raises:
        ValidationError: If the table is not total ("partial table")
        GuardError: If the check exceeds the enumeration limit
    """
    if not raw.is_total():
        raise ValidationError("partial table")

    work = sum(3 ** f.k * raw.n_cylinders // f.n_sets for f in raw.factors)
    check_guard(work, limit, "enumeration too large")

    checked = 0
    for slot, factor in enumerate(raw.factors):
        others = [range(f.n_sets) if j != slot else (None,) for j, f in enumerate(raw.factors)]
        for fixed in itertools.product(*others):
            for b, c in disjoint_mask_tuples(factor.full_mask, 2):
                checked += 1

                def at(mask: int) -> Fraction:
                    return raw.entries[fixed[:slot] + (mask,) + fixed[slot + 1:]]

                expected = at(b) + at(c)
                actual = at(b | c)
                if expected != actual:
                    increment_counter(tuples_enumerated, {"check": "separate_additivity"}, checked)
                    increment_counter(witnesses_found, {"check": "separate_additivity"})
                    masks = fixed[:slot] + (b | c,) + fixed[slot + 1:]
                    cylinder = tuple(MSet.from_mask(f, m) for f, m in zip(raw.factors, masks))
                    events.info("Separate additivity fails", slot=slot, pairs_checked=checked)
                    return AdditivityReport(
                        False, slot, cylinder,
                        (MSet.from_mask(factor, b), MSet.from_mask(factor, c)),
                        expected, actual
                    )

    increment_counter(tuples_enumerated, {"check": "separate_additivity"}, checked)
    return AdditivityReport(True)


def compress(raw: RawCylinderTable, limit: int = DEFAULT_ENUMERATION_LIMIT) -> PolyMeasure:
    """
    Validate a cylinder table and compress it to its atom-level tensor.

    Raises:
        ValidationError: If the table is partial or not separately additive
    """
    report = check_separate_additivity(raw, limit)
    if not report.holds:
        raise ValidationError(
            f"table is not separately additive in slot {report.slot} at "
            f"{[s.key for s in report.cylinder]}"
        )
    tensor = np.empty(tuple(f.k for f in raw.factors), dtype=object)
    for index in np.ndindex(*tensor.shape):
        tensor[index] = raw.entries[tuple(1 << i for i in index)]
    return PolyMeasure(raw.factors, tensor)


@tracked("diagonal")
def diagonal(lam: PolyMeasure) -> SetFunction:
    """
    The diagonal A -> lam(A, ..., A).

    Raises:
        ValidationError: If the factors differ
    """
    _require_equal_factors(lam)
    space = lam.factors[0]
    values = []
    for mask in range(space.n_sets):
        members = MSet.from_mask(space, mask).members
        values.append(_cylinder_sum(lam.tensor, [members] * lam.rank))
    return SetFunction(space, tuple(values))


def fix_arguments(lam: PolyMeasure, assignment: Mapping[int, MSet]) -> PolyMeasure:
    """
    Fix between 1 and d-1 slots to given sets; the remaining slots keep their order.

    Raises:
        ValidationError: If no slot or every slot is fixed, or a set is in the wrong factor
    """
    if not 1 <= len(assignment) <= lam.rank - 1:
        raise ValidationError("fix between 1 and d-1 arguments")
    tensor = lam.tensor
    for slot in sorted(assignment, reverse=True):
        validate_slot(slot, lam.rank)
        s = assignment[slot]
        if s.space != lam.factors[slot]:
            raise ValidationError(f"factor mismatch in slot {slot}")
        tensor = tensor.take(list(s.members), axis=slot).sum(axis=slot)
    factors = tuple(f for j, f in enumerate(lam.factors) if j not in assignment)
    return PolyMeasure(factors, tensor)


def marginal(lam: PolyMeasure, slot: int) -> SetFunction:
    """
    The measure B -> lam(X_0, .., B, .., X_{d-1}) on factor `slot`.

    Raises:
        ValidationError: If the slot is invalid
    """
    slot = validate_slot(slot, lam.rank)
    if lam.rank == 1:
        weights = lam.tensor
    else:
        others = {j: f.full() for j, f in enumerate(lam.factors) if j != slot}
        weights = fix_arguments(lam, others).tensor
    return SetFunction.from_atom_weights(lam.factors[slot], list(weights))


def is_symmetric(lam: PolyMeasure) -> bool:
    """Every permutation of the slots leaves the tensor unchanged."""
    if not lam.has_equal_factors:
        return False
    return all(
        np.array_equal(lam.tensor, np.transpose(lam.tensor, perm))
        for perm in itertools.permutations(range(lam.rank))
    )


@tracked("symmetrize")
def symmetrize(lam: PolyMeasure) -> PolyMeasure:
    """
    Average of lam over all d! permutations of its slots.

    Raises:
        ValidationError: If the factors differ
    """
    _require_equal_factors(lam, "symmetrization requires equal factors")
    perms = list(itertools.permutations(range(lam.rank)))
    total = sum((np.transpose(lam.tensor, p) for p in perms[1:]), lam.tensor.copy())
    return PolyMeasure(lam.factors, total / len(perms))


def polarization_recover(mu: SetFunction, sets: Sequence[MSet], d: int) -> Fraction:
    """
    Sum over T in {1..d} of (-1)^(d-|T|) mu(union of sets in T).

    For mu the diagonal of a rank-d lam with equal factors this is
    the sum of lam over all permutations of the arguments, i.e. d! times the
    symmetrized value.

    Raises:
        ValidationError: If len(sets) != d or the sets overlap
    """
    if len(sets) != d or d < 1:
        raise ValidationError(f"Expected {d} sets, got {len(sets)}")
    for s in sets:
        if s.space != mu.space:
            raise ValidationError("space mismatch")
    if not pairwise_disjoint(sets):
        raise ValidationError("arguments must be pairwise disjoint")

    total = ZERO
    for t in range(1 << d):
        mask = 0
        for i in range(d):
            if t >> i & 1:
                mask |= sets[i].mask
        sign = 1 if (d - bin(t).count("1")) % 2 == 0 else -1
        total += sign * mu.at_mask(mask)
    return total


def permutation_sum(lam: PolyMeasure, sets: Sequence[MSet]) -> Fraction:
    """Sum of lam(A_s1, ..., A_sd) over all permutations s (brute force)."""
    return sum(
        (evaluate(lam, [sets[i] for i in perm]) for perm in itertools.permutations(range(len(sets)))),
        ZERO
    )


def is_diagonally_positive(lam: PolyMeasure) -> SignReport:
    """
    Whether the diagonal is non-negative on every set; witness is the first violating set.

    Raises:
        ValidationError: If the factors differ
    """
    mu = diagonal(lam)
    for s, value in mu.items():
        if value < 0:
            return SignReport(False, s, value)
    return SignReport(True)


def _scaled_integers(tensor: np.ndarray) -> Tuple[np.ndarray, int]:
    """Integer tensor and common denominator L with tensor = ints / L."""
    flat = list(tensor.flat)
    denominator = math.lcm(*(x.denominator for x in flat)) if flat else 1
    ints = np.array([x.numerator * (denominator // x.denominator) for x in flat], dtype=object)
    return ints.reshape(tensor.shape), denominator


def tensor_variation(tensor: np.ndarray) -> Fraction:
    """Sum of absolute entries."""
    ints, denominator = _scaled_integers(tensor)
    return Fraction(sum(abs(x) for x in ints.flat), denominator)


@tracked("variation")
def variation(lam: PolyMeasure) -> Fraction:
    """
    Supremum of the sum of |lam(cylinder)| over finite disjoint cylinder families.

    Refining a family never decreases the sum, so the atom-level partition
    attains the supremum: the result is the sum of absolute tensor entries.
    """
    return tensor_variation(lam.tensor)


def _bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def variation_over_partitions(lam: PolyMeasure, limit: int = PARTITION_LIMIT) -> Fraction:
    """
    Max over products of factor partitions of the sum of |lam(cylinder)|, by brute force.

    Raises:
        GuardError: If the number of partition products exceeds the limit
    """
    check_guard(math.prod(_bell(f.k) for f in lam.factors), limit, "enumeration too large")
    best = ZERO
    for partitions in itertools.product(*(list(enumerate_partitions(f)) for f in lam.factors)):
        total = sum((abs(evaluate(lam, cells)) for cells in itertools.product(*partitions)), ZERO)
        best = max(best, total)
    return best


def _contract(ints: np.ndarray, signs: Sequence[np.ndarray]) -> np.ndarray:
    """Contract the leading axes of ints with the given sign vectors."""
    t = ints
    for eps in signs:
        t = (t * eps.reshape((-1,) + (1,) * (t.ndim - 1))).sum(axis=0)
    return t


def _sign_vectors(k: int, fix_first: bool) -> List[np.ndarray]:
    vectors = []
    for bits in itertools.product((1, -1), repeat=k):
        if fix_first and k and bits[0] == -1:
            continue
        vectors.append(np.array(bits, dtype=object))
    return vectors


def tensor_semivariation(
    tensor: np.ndarray,
    mode: str = "exact",
    seed: int = 0,
    trials: int = 64,
    limit: int = DEFAULT_SEMIVARIATION_LIMIT
) -> SemivariationReport:
    """
    Max over +-1 sign vectors per slot of |sum eps_i1 ... eta_id t[i1, ..., id]|.

    The last slot is optimized in closed form (eta = sign of the contraction),
    and in exact mode slot 0 keeps its first sign at +1, since flipping every
    sign of one slot only changes the sign of the sum.

    Sampled mode draws the other slots' signs from numpy generators seeded by
    (seed, trial), so the result is a reproducible, attained lower bound.

    Raises:
        ValidationError: On unknown mode or bad trial counts
        GuardError: If exact mode needs more than `limit` sign patterns
    """
    if mode not in SEMIVARIATION_MODES:
        raise ValidationError(f"Unknown semivariation mode: {mode}")
    ints, denominator = _scaled_integers(tensor)
    sizes = ints.shape
    leading = sizes[:-1]

    def score(signs: Sequence[np.ndarray]) -> Tuple[int, Tuple[Tuple[int, ...], ...]]:
        c = _contract(ints, signs)
        eta = tuple(1 if x >= 0 else -1 for x in c)
        return sum(abs(x) for x in c), tuple(tuple(int(e) for e in s) for s in signs) + (eta,)

    best_value = -1
    best_signs: Tuple[Tuple[int, ...], ...] = ()
    patterns = 0

    if mode == "exact":
        check_guard(
            2 ** sum(sizes), limit,
            "semivariation sign patterns exceed the exact limit; use sampled mode"
        )
        choices = [_sign_vectors(k, fix_first=(j == 0)) for j, k in enumerate(leading)]
        for signs in itertools.product(*choices):
            patterns += 1
            value, used = score(signs)
            if value > best_value:
                best_value, best_signs = value, used
    else:
        trials = validate_trials(trials)
        seed = validate_seed(seed)
        for trial in range(trials):
            rng = np.random.default_rng([seed, trial])
            signs = [np.array(rng.choice((-1, 1), size=k).tolist(), dtype=object) for k in leading]
            patterns += 1
            value, used = score(signs)
            if value > best_value:
                best_value, best_signs = value, used

    increment_counter(sign_patterns, {"mode": mode}, patterns)
    return SemivariationReport(Fraction(best_value, denominator), mode == "exact", best_signs, patterns)


@tracked("semivariation")
def semivariation(
    lam: PolyMeasure,
    mode: str = "exact",
    seed: int = 0,
    trials: int = 64,
    limit: int = DEFAULT_SEMIVARIATION_LIMIT
) -> SemivariationReport:
    """Semivariation of lam over real unit-modulus (+-1) coefficients per slot."""
    return tensor_semivariation(lam.tensor, mode, seed, trials, limit)


def embed_in_disjoint_union(lam: PolyMeasure) -> PolyMeasure:
    """
    Extend lam on Y_1 x ... x Y_d to X^d, X the disjoint union of the Y_j.

    The result agrees with lam on the block Y_1 x ... x Y_d and vanishes on
    every other block.
    """
    space, offsets = disjoint_union(lam.factors)
    tensor = np.full((space.k,) * lam.rank, ZERO, dtype=object)
    block = tuple(slice(o, o + f.k) for o, f in zip(offsets, lam.factors))
    tensor[block] = lam.tensor
    return PolyMeasure((space,) * lam.rank, tensor)


def lift_to_disjoint_union(lam: PolyMeasure, sets: Sequence[MSet]) -> Tuple[MSet, ...]:
    """Translate sets A_j of factor j into the disjoint union space of embed_in_disjoint_union."""
    space, offsets = disjoint_union(lam.factors)
    return tuple(
        space.mset([offset + i for i in s.members]) for s, offset in zip(sets, offsets)
    )
