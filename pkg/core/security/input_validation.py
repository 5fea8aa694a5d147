"""Input validation and resource guards."""

import re
import logging
from typing import Any, Pattern, Sequence

logger = logging.getLogger(__name__)

# Constants
MAX_ATOMS = 16
MAX_ATOM_LABEL_LENGTH = 64
MAX_GRADE = 8
MAX_RANDOM_RANK = 4
DEFAULT_ENUMERATION_LIMIT = 10 ** 8
DEFAULT_SEMIVARIATION_LIMIT = 2 ** 24
DEFAULT_KERNEL_MAX_SIZE = 1024
MAX_TRIALS = 10 ** 6

# Regex patterns for validation
ATOM_LABEL_PATTERN: Pattern = re.compile(r'^[^,\s](?:[^,]*[^,\s])?$')
SET_KEY_PATTERN: Pattern = re.compile(r'^(\d+(,\d+)*)?$')


class ValidationError(ValueError):
    """Raised when an input violates a precondition."""
    pass


class GuardError(ValidationError):
    """Raised when a computation would exceed a resource guard."""
    pass


def validate_atom_label(label: str) -> str:
    """
    Validate a single atom label.

    Args:
        label: Atom label to validate

    Returns:
        Validated label

    Raises:
        ValidationError: If label is invalid
    """
    if not isinstance(label, str) or not label:
        raise ValidationError("Atom label cannot be empty")

    if len(label) > MAX_ATOM_LABEL_LENGTH:
        raise ValidationError(f"Atom label too long (max {MAX_ATOM_LABEL_LENGTH} characters)")

    if not label.isprintable() or not ATOM_LABEL_PATTERN.match(label):
        raise ValidationError(f"Atom label contains invalid characters: {label!r}")

    return label


def validate_atoms(atoms: Sequence[str]) -> tuple:
    """
    Validate the atom list of an ingested space.

    Args:
        atoms: Ordered atom labels

    Returns:
        Tuple of validated labels

    Raises:
        ValidationError: If the list is empty, too long or has duplicates
    """
    if not isinstance(atoms, (list, tuple)):
        raise ValidationError("Atoms must be a list")

    if len(atoms) < 1:
        raise ValidationError("A space needs at least one atom")

    if len(atoms) > MAX_ATOMS:
        raise ValidationError(f"Too many atoms (max {MAX_ATOMS})")

    labels = tuple(validate_atom_label(a) for a in atoms)
    if len(set(labels)) != len(labels):
        raise ValidationError("Atom labels must be pairwise distinct")

    return labels


def validate_set_key(key: str) -> str:
    """
    Validate a canonical set key such as "0,2,5" (empty string for the empty set).

    Raises:
        ValidationError: If the key is malformed
    """
    if not isinstance(key, str) or not SET_KEY_PATTERN.match(key):
        raise ValidationError(f"Malformed set key: {key!r}")
    return key


def validate_grade(d: Any, minimum: int = 1) -> int:
    """
    Validate an interference grade.

    Raises:
        ValidationError: If grade is not an integer in [minimum, MAX_GRADE]
    """
    if isinstance(d, bool) or not isinstance(d, int):
        raise ValidationError("Grade must be an integer")

    if d < minimum:
        raise ValidationError(f"Grade must be at least {minimum}")

    if d > MAX_GRADE:
        raise ValidationError(f"Grade too high (max {MAX_GRADE})")

    return d


def validate_slot(slot: Any, rank: int) -> int:
    """
    Validate a slot index of a rank-`rank` polymeasure.

    Raises:
        ValidationError: If slot is out of range
    """
    if isinstance(slot, bool) or not isinstance(slot, int):
        raise ValidationError("Slot must be an integer")

    if not 0 <= slot < rank:
        raise ValidationError(f"Invalid slot {slot} (rank {rank})")

    return slot


def validate_trials(trials: Any) -> int:
    """
    Validate a sampling trial count.

    Raises:
        ValidationError: If trials is not in [1, MAX_TRIALS]
    """
    if isinstance(trials, bool) or not isinstance(trials, int):
        raise ValidationError("Trials must be an integer")

    if trials < 1:
        raise ValidationError("Trials must be at least 1")

    if trials > MAX_TRIALS:
        raise ValidationError(f"Too many trials (max {MAX_TRIALS})")

    return trials


def validate_seed(seed: Any) -> int:
    """Validate a non-negative integer seed."""
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ValidationError("Seed must be a non-negative integer")
    return seed


def validate_bound(bound: Any) -> int:
    """Validate the numerator bound of random rationals."""
    if isinstance(bound, bool) or not isinstance(bound, int) or bound < 1:
        raise ValidationError("Bound must be a positive integer")
    return bound


def check_guard(size: int, limit: int, message: str) -> int:
    """
    Raise GuardError when `size` exceeds `limit`.

    Args:
        size: Projected work size
        limit: Configured limit
        message: Error message

    Returns:
        The checked size
    """
    if size > limit:
        logger.warning(f"Guard exceeded: {size} > {limit} ({message})")
        raise GuardError(message)
    return size
