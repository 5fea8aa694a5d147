"""Set functions, interference operators and grade-d additivity."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from core.measure.scalar import ZERO, format_scalar, parse_scalar
from core.measure.space import (
    FiniteSpace, MSet, check_enumeration, disjoint_mask_tuples, embed_mask,
    mask_key, pairwise_disjoint, subspace_without
)
from core.monitoring.logging_config import StructuredLogger
from core.monitoring.metrics import increment_counter, tracked, tuples_enumerated, witnesses_found
from core.security.input_validation import (
    DEFAULT_ENUMERATION_LIMIT, ValidationError, validate_grade
)

logger = logging.getLogger(__name__)
events = StructuredLogger(__name__)


@dataclass(frozen=True)
class SetFunction:
    """
    A rational-valued function on every measurable set of a space.

    `values[mask]` is the value at the set with that bitmask. Neither
    positivity nor mu(empty) = 0 is enforced here.
    """

    space: FiniteSpace
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != self.space.n_sets:
            raise ValidationError(
                f"Set function table must have {self.space.n_sets} entries, got {len(self.values)}"
            )
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    def __call__(self, s: MSet) -> Fraction:
        if s.space != self.space:
            raise ValidationError("space mismatch")
        return self.values[s.mask]

    def at_mask(self, mask: int) -> Fraction:
        return self.values[mask]

    def items(self) -> Iterator[Tuple[MSet, Fraction]]:
        for mask, value in enumerate(self.values):
            yield MSet.from_mask(self.space, mask), value

    def __add__(self, other: "SetFunction") -> "SetFunction":
        if other.space != self.space:
            raise ValidationError("space mismatch")
        return SetFunction(self.space, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "SetFunction") -> "SetFunction":
        return self + other.scaled(-1)

    def scaled(self, alpha: Any) -> "SetFunction":
        alpha = Fraction(alpha)
        return SetFunction(self.space, tuple(alpha * v for v in self.values))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary with canonical set keys in bitmask order."""
        return {
            "space": self.space.to_dict(),
            "values": {mask_key(mask): format_scalar(v) for mask, v in enumerate(self.values)},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SetFunction":
        """
        Create from dictionary; the table must be total.

        Raises:
            ValidationError: On malformed keys, bad scalars or a partial table
        """
        space = FiniteSpace.from_dict(data.get("space"))
        raw = data.get("values")
        if not isinstance(raw, dict):
            raise ValidationError("'values' must be an object keyed by set keys")
        table: List[Optional[Fraction]] = [None] * space.n_sets
        for key, value in raw.items():
            mask = MSet.from_key(space, key).mask
            if table[mask] is not None:
                raise ValidationError(f"Duplicate set key: {key!r}")
            table[mask] = parse_scalar(value)
        missing = [mask_key(m) for m, v in enumerate(table) if v is None]
        if missing:
            raise ValidationError(f"partial table: missing {len(missing)} sets, first {missing[0]!r}")
        return cls(space, tuple(table))

    @classmethod
    def from_callable(cls, space: FiniteSpace, f: Callable[[MSet], Any]) -> "SetFunction":
        return cls(space, tuple(Fraction(f(MSet.from_mask(space, m))) for m in range(space.n_sets)))

    @classmethod
    def from_atom_weights(cls, space: FiniteSpace, weights: Sequence[Any]) -> "SetFunction":
        """The additive measure with the given atom weights."""
        if len(weights) != space.k:
            raise ValidationError("One weight per atom required")
        weights = [Fraction(w) for w in weights]
        values = [ZERO] * space.n_sets
        for mask in range(1, space.n_sets):
            low = mask & -mask
            values[mask] = values[mask ^ low] + weights[low.bit_length() - 1]
        return cls(space, tuple(values))

    @classmethod
    def zero(cls, space: FiniteSpace) -> "SetFunction":
        return cls(space, (ZERO,) * space.n_sets)


@dataclass(frozen=True)
class GradeReport:
    """Outcome of an exhaustive grade-d additivity check."""

    grade: int
    is_additive_at_grade: bool
    witness: Optional[Tuple[MSet, ...]] = None
    value: Optional[Fraction] = None
    tuples_checked: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "grade": self.grade,
            "grade_additive": self.is_additive_at_grade,
            "witness": None if self.witness is None else [s.key for s in self.witness],
            "interference": None if self.value is None else format_scalar(self.value),
            "tuples_checked": self.tuples_checked,
        }


@dataclass(frozen=True)
class SignReport:
    """Outcome of a non-negativity check over all sets: first negative set, if any."""

    holds: bool
    witness: Optional[MSet] = None
    value: Optional[Fraction] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "holds": self.holds,
            "witness": None if self.witness is None else self.witness.key,
            "value": None if self.value is None else format_scalar(self.value),
        }


def alternating_union_sum(lookup: Callable[[int], Fraction], masks: Sequence[int]) -> Fraction:
    """
    Sum over nonempty index sets T of (-1)^(|T|-1) * lookup(union of masks in T).

    The masks must be pairwise disjoint; this is I_d for d = len(masks) - 1.
    """
    n = len(masks)
    unions = [0] * (1 << n)
    total = 0
    for t in range(1, 1 << n):
        low = t & -t
        unions[t] = unions[t ^ low] | masks[low.bit_length() - 1]
        if bin(t).count("1") % 2:
            total += lookup(unions[t])
        else:
            total -= lookup(unions[t])
    return total


def _check_disjoint_arguments(mu: SetFunction, sets: Sequence[MSet]):
    for s in sets:
        if s.space != mu.space:
            raise ValidationError("space mismatch")
    if not pairwise_disjoint(sets):
        raise ValidationError("arguments must be pairwise disjoint")


def interference(mu: SetFunction, sets: Sequence[MSet]) -> Fraction:
    """
    I_d mu(S_0, ..., S_d) for pairwise-disjoint sets, d = len(sets) - 1 >= 1.

    Sums (-1)^l mu(S_i0 + ... + S_il) over l = 0..d and i_0 < ... < i_l,
    so I_1 mu(S_0, S_1) = mu(S_0) + mu(S_1) - mu(S_0 + S_1).

    Raises:
        ValidationError: If fewer than two sets are given or they overlap
    """
    if len(sets) < 2:
        raise ValidationError("interference needs d+1 >= 2 arguments")
    validate_grade(len(sets) - 1)
    _check_disjoint_arguments(mu, sets)
    return alternating_union_sum(mu.at_mask, [s.mask for s in sets])


def first_interference(mu: SetFunction, s0: MSet, s1: MSet) -> Fraction:
    """I_1 straight from its definition."""
    _check_disjoint_arguments(mu, (s0, s1))
    return mu(s0) + mu(s1) - mu(s0 | s1)


def delta(nu: SetFunction, s: MSet) -> SetFunction:
    """
    Delta_s nu = nu - nu(s + .) as a set function on the subspace X minus s.

    The value at T (disjoint from s) is nu(T) - nu(s + T).
    """
    subspace, positions = subspace_without(nu.space, s)
    values = []
    for submask in range(subspace.n_sets):
        mask = embed_mask(submask, positions)
        values.append(nu.at_mask(mask) - nu.at_mask(mask | s.mask))
    return SetFunction(subspace, tuple(values))


def residual_at_masks(values: Sequence[Any], masks: Sequence[int]) -> Any:
    """
    Recursion residual of the table `values` on pairwise-disjoint bitmasks, s0 first.

    No validation. The left side evaluates Delta_{s0} lazily on ambient masks
    instead of building the reduced set function. Any exact number type works.
    """
    s0 = masks[0]
    left = alternating_union_sum(lambda m: values[m] - values[m | s0], masks[1:])
    right = alternating_union_sum(values.__getitem__, masks) - values[s0]
    return left - right


def recursion_residual(nu: SetFunction, s0: MSet, rest: Sequence[MSet]) -> Fraction:
    """
    I_{d-1}(Delta_{s0} nu)(S_1..S_d) - (I_d nu(s0, S_1..S_d) - nu(s0)).

    The identity says the result is 0 for every set function.

    Raises:
        ValidationError: If d < 2 or the sets overlap
    """
    if len(rest) < 2:
        raise ValidationError("recursion identity needs d >= 2")
    sets = (s0,) + tuple(rest)
    _check_disjoint_arguments(nu, sets)
    return residual_at_masks(nu.values, [s.mask for s in sets])


@tracked("is_grade_additive")
def is_grade_additive(
    mu: SetFunction,
    d: int,
    limit: int = DEFAULT_ENUMERATION_LIMIT
) -> GradeReport:
    """
    Check I_d mu = 0 on every pairwise-disjoint (d+1)-tuple, empty components included.

    The first nonzero tuple in enumeration order is reported as witness.

    Raises:
        GuardError: If (d+2)^k exceeds the enumeration limit
    """
    d = validate_grade(d)
    check_enumeration(mu.space, d + 1, limit)

    checked = 0
    for masks in disjoint_mask_tuples(mu.space.full_mask, d + 1):
        checked += 1
        value = alternating_union_sum(mu.at_mask, masks)
        if value != 0:
            increment_counter(tuples_enumerated, {"check": "grade"}, checked)
            increment_counter(witnesses_found, {"check": "grade"})
            witness = tuple(MSet.from_mask(mu.space, m) for m in masks)
            events.info(
                "Grade additivity fails",
                grade=d, atoms=mu.space.k, tuples_checked=checked,
                witness=[s.key for s in witness], value=format_scalar(value)
            )
            return GradeReport(d, False, witness, value, checked)

    increment_counter(tuples_enumerated, {"check": "grade"}, checked)
    logger.debug(f"Grade-{d} additivity holds after {checked} tuples")
    return GradeReport(d, True, None, None, checked)


def grade_of(mu: SetFunction, d_max: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> Optional[int]:
    """Smallest d <= d_max with mu grade-d additive, or None."""
    d_max = validate_grade(d_max)
    for d in range(1, d_max + 1):
        if is_grade_additive(mu, d, limit).is_additive_at_grade:
            return d
    return None


def is_grounded(mu: SetFunction) -> bool:
    """mu(empty) = 0."""
    return mu.at_mask(0) == 0


def is_positive(mu: SetFunction) -> SignReport:
    """Non-negativity on every set; the first negative set in bitmask order is the witness."""
    for mask, value in enumerate(mu.values):
        if value < 0:
            return SignReport(False, MSet.from_mask(mu.space, mask), value)
    return SignReport(True)
