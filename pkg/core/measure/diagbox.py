"""Diagonal length of finite unions of rational boxes in [0,1]^d.

A box [a_1,b_1] x ... x [a_d,b_d] meets the diagonal {(t,...,t)} in the
parameter interval [max a_j, min b_j]; the diagonal length of a union is the
Lebesgue length of the union of those traces. Intervals are closed; single
points carry no length, so open or half-open conventions give the same numbers.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from core.measure.scalar import ONE, ZERO, format_scalar, parse_scalar
from core.security.input_validation import ValidationError, validate_slot

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RInterval:
    """Closed interval [lo, hi] with 0 <= lo <= hi <= 1."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if not ZERO <= lo <= hi <= ONE:
            raise ValidationError(f"Interval [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, t: Fraction) -> bool:
        return self.lo <= t <= self.hi

    def to_list(self) -> List[str]:
        return [format_scalar(self.lo), format_scalar(self.hi)]

    @classmethod
    def from_list(cls, pair: Sequence[Any]) -> "RInterval":
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValidationError("An interval is a [lo, hi] pair")
        return cls(parse_scalar(pair[0]), parse_scalar(pair[1]))

    @classmethod
    def unit(cls) -> "RInterval":
        return cls(ZERO, ONE)


@dataclass(frozen=True)
class Box:
    """A product of d closed intervals."""

    sides: Tuple[RInterval, ...]

    def __post_init__(self):
        if len(self.sides) < 1:
            raise ValidationError("A box needs at least one side")
        object.__setattr__(self, "sides", tuple(self.sides))

    @property
    def dim(self) -> int:
        return len(self.sides)

    def diagonal_trace(self) -> Optional[RInterval]:
        """The parameter interval of the diagonal inside the box, or None."""
        lo = max(side.lo for side in self.sides)
        hi = min(side.hi for side in self.sides)
        if lo > hi:
            return None
        return RInterval(lo, hi)

    def contains_diagonal_point(self, t: Fraction) -> bool:
        return all(side.contains(t) for side in self.sides)

    def is_unit_cube(self) -> bool:
        return all(side == RInterval.unit() for side in self.sides)

    def to_dict(self) -> Dict[str, Any]:
        return {"sides": [side.to_list() for side in self.sides]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Box":
        return cls(tuple(RInterval.from_list(pair) for pair in data.get("sides", [])))

    @classmethod
    def unit_cube(cls, dim: int) -> "Box":
        return cls((RInterval.unit(),) * dim)


@dataclass(frozen=True)
class BoxUnion:
    """A finite union of boxes of one dimension; overlaps are allowed."""

    dim: int
    boxes: Tuple[Box, ...] = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("Dimension must be at least 1")
        for box in self.boxes:
            if box.dim != self.dim:
                raise ValidationError(f"Box of dimension {box.dim} in a union of dimension {self.dim}")
        object.__setattr__(self, "boxes", tuple(self.boxes))

    def with_box(self, box: Box) -> "BoxUnion":
        return BoxUnion(self.dim, self.boxes + (box,))

    def is_full_cube(self) -> bool:
        return any(box.is_unit_cube() for box in self.boxes)

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "boxes": [box.to_dict() for box in self.boxes]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoxUnion":
        dim = data.get("dim")
        if isinstance(dim, bool) or not isinstance(dim, int):
            raise ValidationError("'dim' must be an integer")
        return cls(dim, tuple(Box.from_dict(b) for b in data.get("boxes", [])))

    @classmethod
    def full_cube(cls, dim: int) -> "BoxUnion":
        return cls(dim, (Box.unit_cube(dim),))


def merge_intervals(intervals: Iterable[RInterval]) -> List[RInterval]:
    """Sort by left end and merge overlapping or touching intervals."""
    merged: List[RInterval] = []
    for interval in sorted(intervals, key=lambda iv: (iv.lo, iv.hi)):
        if merged and interval.lo <= merged[-1].hi:
            if interval.hi > merged[-1].hi:
                merged[-1] = RInterval(merged[-1].lo, interval.hi)
        else:
            merged.append(interval)
    return merged


def interval_union_length(intervals: Iterable[RInterval]) -> Fraction:
    """Lebesgue length of a finite union of intervals."""
    return sum((iv.length for iv in merge_intervals(intervals)), ZERO)


def diag_length(t: BoxUnion) -> Fraction:
    """Length of {t in [0,1] : (t, ..., t) in the union}."""
    traces = [trace for trace in (box.diagonal_trace() for box in t.boxes) if trace is not None]
    return interval_union_length(traces)


def diag_length_by_subdivision(t: BoxUnion) -> Fraction:
    """
    Diagonal length by cutting [0,1] at every box endpoint and testing cell midpoints.

    Each open cell lies entirely inside or entirely outside the diagonal trace.
    """
    cuts = {ZERO, ONE}
    for box in t.boxes:
        for side in box.sides:
            cuts.update((side.lo, side.hi))
    points = sorted(cuts)
    total = ZERO
    for left, right in zip(points, points[1:]):
        mid = (left + right) / 2
        if any(box.contains_diagonal_point(mid) for box in t.boxes):
            total += right - left
    return total


def marginal_slice_length(t: BoxUnion, slot: int, s: Sequence[RInterval]) -> Fraction:
    """
    Diagonal length of the slab with the intervals s in `slot` and [0,1] elsewhere.

    Only the full-mass model t = [0,1]^d is supported; there the marginal
    in every slot is Lebesgue measure.

    Raises:
        ValidationError: If t is not the full cube or the slot is invalid
    """
    if not t.is_full_cube():
        raise ValidationError("marginal defined for the full-mass model")
    slot = validate_slot(slot, t.dim)
    slab = BoxUnion(t.dim, tuple(
        Box(tuple(interval if j == slot else RInterval.unit() for j in range(t.dim)))
        for interval in s
    ))
    return diag_length(slab)
