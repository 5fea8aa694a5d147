"""Grade-2 measures and symmetric bimeasures.

The diagonal map is a linear isomorphism from symmetric bimeasures onto
grounded grade-2 measures; its inverse is the reconstruction formula

    lam(A, B) = (mu(A u B) + mu(A n B) - mu(A \\ B) - mu(B \\ A)) / 2.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict

import numpy as np

from core.measure.interference import SetFunction, is_positive
from core.measure.polymeasure import PolyMeasure, diagonal, is_diagonally_positive, is_symmetric
from core.measure.scalar import ZERO, format_scalar, rational_rank
from core.measure.space import FiniteSpace, MSet
from core.monitoring.metrics import tracked
from core.security.input_validation import MAX_ATOMS, ValidationError

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Grade2Report:
    """Round trip, positivity correspondence and sup bound of one set function."""

    roundtrip: bool
    positivity_correspondence: bool
    measure_positive: bool
    bimeasure_diagonally_positive: bool
    sup_bound: Fraction

    def to_dict(self) -> Dict[str, Any]:
        return {
            "roundtrip": self.roundtrip,
            "positivity_correspondence": self.positivity_correspondence,
            "measure_positive": self.measure_positive,
            "bimeasure_diagonally_positive": self.bimeasure_diagonally_positive,
            "sup_bound": format_scalar(self.sup_bound),
        }


def bimeasure_value(mu: SetFunction, a: MSet, b: MSet) -> Fraction:
    """The reconstruction formula on arbitrary sets A, B."""
    return HALF * (mu(a | b) + mu(a & b) - mu(a - b) - mu(b - a))


@tracked("reconstruct")
def reconstruct(mu: SetFunction) -> PolyMeasure:
    """
    The symmetric bimeasure whose atom entries come from the reconstruction formula.

    Defined for every set function; meaningful when mu is grade-2 additive.
    Off the diagonal the entry is (mu({a,b}) - mu({a}) - mu({b}) + mu(empty)) / 2,
    on it mu({a}) - mu(empty).
    """
    space = mu.space
    tensor = np.empty((space.k, space.k), dtype=object)
    for a in range(space.k):
        for b in range(a, space.k):
            value = bimeasure_value(mu, space.mset([a]), space.mset([b]))
            tensor[a, b] = tensor[b, a] = value
    return PolyMeasure((space, space), tensor)


def roundtrip_check(mu: SetFunction) -> bool:
    """diagonal(reconstruct(mu)) == mu on every set."""
    return diagonal(reconstruct(mu)).values == mu.values


def inverse_roundtrip_check(lam: PolyMeasure) -> bool:
    """
    reconstruct(diagonal(lam)) == lam entry for entry.

    Raises:
        ValidationError: If lam is not a symmetric rank-2 polymeasure
    """
    if lam.rank != 2 or not lam.has_equal_factors:
        raise ValidationError("inverse round trip needs a rank-2 polymeasure with equal factors")
    if not is_symmetric(lam):
        raise ValidationError("symmetrize first")
    return reconstruct(diagonal(lam)).equals(lam)


def positivity_correspondence(mu: SetFunction) -> bool:
    """
    Evaluate [mu >= 0 everywhere] <=> [reconstruct(mu) diagonally positive].

    Raises:
        ValidationError: If mu does not survive the round trip
    """
    if not roundtrip_check(mu):
        raise ValidationError("not a grade-2 measure")
    return is_positive(mu).holds == is_diagonally_positive(reconstruct(mu)).holds


def sup_bound(mu: SetFunction) -> Fraction:
    """max |mu(A)| over all sets."""
    return max((abs(v) for v in mu.values), default=ZERO)


def grade2_report(mu: SetFunction) -> Grade2Report:
    """Everything the CLI reports about a candidate grade-2 measure."""
    roundtrip = roundtrip_check(mu)
    positive = is_positive(mu).holds
    diag_positive = is_diagonally_positive(reconstruct(mu)).holds
    return Grade2Report(
        roundtrip=roundtrip,
        positivity_correspondence=roundtrip and positive == diag_positive,
        measure_positive=positive,
        bimeasure_diagonally_positive=diag_positive,
        sup_bound=sup_bound(mu),
    )


def grade2_dimension(k: int) -> int:
    """
    Rank of the diagonal map on the symmetric basis tensors (ones at (a, b) and (b, a), a <= b).

    Raises:
        ValidationError: If k is out of range
    """
    if not 1 <= k <= MAX_ATOMS:
        raise ValidationError(f"Atom count must be in 1..{MAX_ATOMS}")
    space = FiniteSpace.of_size(k)
    rows = []
    for a in range(k):
        for b in range(a, k):
            tensor = np.full((k, k), ZERO, dtype=object)
            tensor[a, b] = tensor[b, a] = Fraction(1)
            rows.append(diagonal(PolyMeasure((space, space), tensor)).values)
    rank = rational_rank(rows)
    logger.debug(f"Grade-2 space on {k} atoms has dimension {rank}")
    return rank
