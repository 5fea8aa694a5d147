"""Finite measurable spaces, measurable sets and their enumerations.

A finite sigma-algebra is generated by a partition into atoms, so a space is
just its ordered atom list and a measurable set is a set of atom indices.
Sets are kept as sorted index tuples; the equivalent bitmask (bit i set iff
atom i is a member) is what the set-function tables are indexed by.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from core.security.input_validation import (
    DEFAULT_ENUMERATION_LIMIT, MAX_ATOMS, MAX_GRADE,
    ValidationError, check_guard, validate_atoms, validate_set_key
)

logger = logging.getLogger(__name__)

SET_OPERATIONS = ("union", "intersection", "difference", "complement")


@dataclass(frozen=True)
class FiniteSpace:
    """A finite measurable space given by its ordered atoms."""

    atoms: Tuple[str, ...]

    def __post_init__(self):
        if len(self.atoms) > MAX_ATOMS:
            raise ValidationError(f"Too many atoms (max {MAX_ATOMS})")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValidationError("Atom labels must be pairwise distinct")

    @property
    def k(self) -> int:
        """Number of atoms."""
        return len(self.atoms)

    @property
    def full_mask(self) -> int:
        return (1 << self.k) - 1

    @property
    def n_sets(self) -> int:
        """Number of measurable sets, 2^k."""
        return 1 << self.k

    def empty(self) -> "MSet":
        return MSet(self, ())

    def full(self) -> "MSet":
        return MSet(self, tuple(range(self.k)))

    def mset(self, indices: Sequence[int]) -> "MSet":
        """Build a measurable set from atom indices in any order."""
        return MSet(self, tuple(sorted(set(indices))))

    def labelled(self, labels: Sequence[str]) -> "MSet":
        """Build a measurable set from atom labels."""
        lookup = {label: i for i, label in enumerate(self.atoms)}
        try:
            return self.mset([lookup[label] for label in labels])
        except KeyError as e:
            raise ValidationError(f"Unknown atom label: {e.args[0]!r}")

    def from_mask(self, mask: int) -> "MSet":
        return MSet.from_mask(self, mask)

    def from_key(self, key: str) -> "MSet":
        return MSet.from_key(self, key)

    def to_dict(self) -> Dict[str, List[str]]:
        """Convert to dictionary."""
        return {"atoms": list(self.atoms)}

    @classmethod
    def from_dict(cls, data: Dict) -> "FiniteSpace":
        """Create from dictionary; ingested spaces need 1..16 atoms."""
        if not isinstance(data, dict) or "atoms" not in data:
            raise ValidationError("Space must be an object with an 'atoms' list")
        return cls(validate_atoms(data["atoms"]))

    @classmethod
    def of_size(cls, k: int) -> "FiniteSpace":
        """Space with atoms labelled a, b, c, ..."""
        if not 1 <= k <= MAX_ATOMS:
            raise ValidationError(f"Atom count must be in 1..{MAX_ATOMS}")
        return cls(tuple(chr(ord("a") + i) for i in range(k)))


@dataclass(frozen=True)
class MSet:
    """A measurable set: sorted atom indices of one space."""

    space: FiniteSpace
    members: Tuple[int, ...]

    def __post_init__(self):
        previous = -1
        for i in self.members:
            if not isinstance(i, int) or i <= previous or i >= self.space.k:
                raise ValidationError(
                    f"Set members must be strictly increasing atom indices below {self.space.k}"
                )
            previous = i

    @property
    def mask(self) -> int:
        mask = 0
        for i in self.members:
            mask |= 1 << i
        return mask

    @property
    def key(self) -> str:
        """Canonical text key, "" for the empty set."""
        return ",".join(str(i) for i in self.members)

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(self.space.atoms[i] for i in self.members)

    def is_empty(self) -> bool:
        return not self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, index: object) -> bool:
        return index in self.members

    def __or__(self, other: "MSet") -> "MSet":
        return union(self, other)

    def __and__(self, other: "MSet") -> "MSet":
        return intersection(self, other)

    def __sub__(self, other: "MSet") -> "MSet":
        return difference(self, other)

    def __invert__(self) -> "MSet":
        return complement(self)

    def __repr__(self) -> str:
        return "{" + ",".join(self.labels) + "}"

    @classmethod
    def from_mask(cls, space: FiniteSpace, mask: int) -> "MSet":
        if mask < 0 or mask > space.full_mask:
            raise ValidationError(f"Mask {mask} out of range for {space.k} atoms")
        return cls(space, mask_members(mask))

    @classmethod
    def from_key(cls, space: FiniteSpace, key: str) -> "MSet":
        key = validate_set_key(key)
        if not key:
            return cls(space, ())
        return cls(space, tuple(int(part) for part in key.split(",")))


def mask_members(mask: int) -> Tuple[int, ...]:
    """Atom indices of a bitmask in increasing order."""
    members = []
    i = 0
    while mask:
        if mask & 1:
            members.append(i)
        mask >>= 1
        i += 1
    return tuple(members)


def mask_key(mask: int) -> str:
    return ",".join(str(i) for i in mask_members(mask))


def _check_same_space(a: MSet, b: MSet):
    if a.space != b.space:
        raise ValidationError("space mismatch")


def union(a: MSet, b: MSet) -> MSet:
    _check_same_space(a, b)
    return MSet.from_mask(a.space, a.mask | b.mask)


def intersection(a: MSet, b: MSet) -> MSet:
    _check_same_space(a, b)
    return MSet.from_mask(a.space, a.mask & b.mask)


def difference(a: MSet, b: MSet) -> MSet:
    _check_same_space(a, b)
    return MSet.from_mask(a.space, a.mask & ~b.mask)


def complement(a: MSet) -> MSet:
    return MSet.from_mask(a.space, a.space.full_mask & ~a.mask)


def set_op(operation: str, a: MSet, b: Optional[MSet] = None) -> MSet:
    """
    Apply a Boolean set operation by name.

    Args:
        operation: One of union, intersection, difference, complement
        a: First operand
        b: Second operand (ignored by complement)

    Raises:
        ValidationError: On unknown operation, missing operand or space mismatch
    """
    if operation == "complement":
        return complement(a)
    if operation not in SET_OPERATIONS:
        raise ValidationError(f"Unknown set operation: {operation}")
    if b is None:
        raise ValidationError(f"{operation} needs two operands")
    return {"union": union, "intersection": intersection, "difference": difference}[operation](a, b)


def pairwise_disjoint(sets: Sequence[MSet]) -> bool:
    """True iff the sets share a space and no atom lies in two of them."""
    seen = 0
    for s in sets:
        if s.space != sets[0].space:
            raise ValidationError("space mismatch")
        if seen & s.mask:
            return False
        seen |= s.mask
    return True


def enumerate_subsets(space: FiniteSpace) -> Iterator[MSet]:
    """Every measurable set in ascending bitmask order."""
    for mask in range(space.n_sets):
        yield MSet.from_mask(space, mask)


def submasks(mask: int) -> Iterator[int]:
    """Submasks of `mask` in increasing numeric order, starting with 0."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def disjoint_mask_tuples(available: int, m: int) -> Iterator[Tuple[int, ...]]:
    """
    All m-tuples of pairwise-disjoint submasks of `available`.

    Tuples come in lexicographic order of their masks, so the first tuple is
    all-empty and the stream can be sliced by index range.
    """
    if m == 0:
        yield ()
        return
    for first in submasks(available):
        for rest in disjoint_mask_tuples(available & ~first, m - 1):
            yield (first,) + rest


def disjoint_tuple_count(space: FiniteSpace, m: int) -> int:
    return (m + 1) ** space.k


def check_enumeration(space: FiniteSpace, m: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> int:
    """
    Validate an enumeration request and return its tuple count.

    Raises:
        ValidationError: If m is out of range
        GuardError: If (m+1)^k exceeds the limit
    """
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ValidationError("Tuple length must be at least 1")
    if m + 1 > MAX_GRADE + 2:
        raise ValidationError(f"Tuple length too high (max {MAX_GRADE + 1})")
    return check_guard(disjoint_tuple_count(space, m), limit, "enumeration too large")


def enumerate_disjoint_tuples(
    space: FiniteSpace,
    m: int,
    limit: int = DEFAULT_ENUMERATION_LIMIT
) -> Iterator[Tuple[MSet, ...]]:
    """
    Every m-tuple of pairwise-disjoint measurable sets, empty components included.

    Yields exactly (m+1)^k tuples: each atom goes to one of the m sets or to none.

    Raises:
        GuardError: If (m+1)^k exceeds the limit
    """
    count = check_enumeration(space, m, limit)
    logger.debug(f"Enumerating {count} disjoint {m}-tuples over {space.k} atoms")
    for masks in disjoint_mask_tuples(space.full_mask, m):
        yield tuple(MSet.from_mask(space, mask) for mask in masks)


def enumerate_partitions(space: FiniteSpace) -> Iterator[Tuple[MSet, ...]]:
    """Every partition of the atoms into nonempty blocks (restricted growth strings)."""
    k = space.k
    if k == 0:
        yield ()
        return

    def grow(i: int, labels: List[int], n_blocks: int):
        if i == k:
            masks = [0] * n_blocks
            for atom, block in enumerate(labels):
                masks[block] |= 1 << atom
            yield tuple(MSet.from_mask(space, mask) for mask in masks)
            return
        for block in range(n_blocks + 1):
            labels.append(block)
            yield from grow(i + 1, labels, max(n_blocks, block + 1))
            labels.pop()

    yield from grow(0, [], 0)


def subspace_without(space: FiniteSpace, s: MSet) -> Tuple[FiniteSpace, Tuple[int, ...]]:
    """
    The space X minus s, with positions[j] = original index of sub-atom j.

    Removing every atom gives the zero-atom space, which only arises here.
    """
    if s.space != space:
        raise ValidationError("space mismatch")
    positions = tuple(i for i in range(space.k) if i not in s.members)
    return FiniteSpace(tuple(space.atoms[i] for i in positions)), positions


def embed_mask(submask: int, positions: Sequence[int]) -> int:
    """Translate a subspace mask into the ambient space."""
    mask = 0
    for j in mask_members(submask):
        mask |= 1 << positions[j]
    return mask


def project_mask(mask: int, positions: Sequence[int]) -> int:
    """Translate an ambient mask, disjoint from the removed atoms, into the subspace."""
    submask = 0
    for j, i in enumerate(positions):
        if mask >> i & 1:
            submask |= 1 << j
    return submask


def disjoint_union(spaces: Sequence[FiniteSpace]) -> Tuple[FiniteSpace, Tuple[int, ...]]:
    """
    The disjoint union of spaces, atoms tagged "j.label", with per-factor offsets.

    Raises:
        ValidationError: If the union has more than 16 atoms
    """
    atoms: List[str] = []
    offsets: List[int] = []
    for j, space in enumerate(spaces):
        offsets.append(len(atoms))
        atoms.extend(f"{j}.{label}" for label in space.atoms)
    if len(atoms) > MAX_ATOMS:
        raise ValidationError(f"Disjoint union has too many atoms (max {MAX_ATOMS})")
    return FiniteSpace(tuple(atoms)), tuple(offsets)
