"""Seeded random spaces, set functions, polymeasures and box unions.

Every generator takes a numpy Generator so callers control reproducibility;
gen_random builds one from a seed for the CLI.
"""

import logging
from fractions import Fraction
from typing import Any, Dict, Tuple

import numpy as np

from core.measure.diagbox import Box, BoxUnion, RInterval
from core.measure.interference import SetFunction
from core.measure.polymeasure import PolyMeasure, diagonal
from core.measure.space import FiniteSpace, MSet
from core.security.input_validation import (
    MAX_ATOMS, MAX_RANDOM_RANK, ValidationError, validate_bound, validate_seed
)

logger = logging.getLogger(__name__)

DENOMINATORS = (1, 2, 3, 4, 6)
RANDOM_KINDS = ("setfn", "polymeasure", "grade2-measure", "symmetric-bimeasure")


def random_scalar(rng: np.random.Generator, bound: int = 3) -> Fraction:
    """Numerator uniform in [-bound, bound], denominator from DENOMINATORS."""
    numerator = int(rng.integers(-bound, bound + 1))
    denominator = DENOMINATORS[int(rng.integers(len(DENOMINATORS)))]
    return Fraction(numerator, denominator)


def _random_tensor(rng: np.random.Generator, shape: Tuple[int, ...], bound: int) -> np.ndarray:
    tensor = np.empty(shape, dtype=object)
    for index in np.ndindex(*shape):
        tensor[index] = random_scalar(rng, bound)
    return tensor


def random_set_function(rng: np.random.Generator, space: FiniteSpace, bound: int = 3) -> SetFunction:
    return SetFunction(space, tuple(random_scalar(rng, bound) for _ in range(space.n_sets)))


def random_polymeasure(
    rng: np.random.Generator,
    space: FiniteSpace,
    d: int,
    bound: int = 3
) -> PolyMeasure:
    """Rank-d polymeasure with d copies of `space` as factors."""
    return PolyMeasure((space,) * d, _random_tensor(rng, (space.k,) * d, bound))


def random_symmetric_bimeasure(rng: np.random.Generator, space: FiniteSpace, bound: int = 3) -> PolyMeasure:
    """Symmetric rank-2 tensor: draw the upper triangle, mirror it."""
    tensor = np.empty((space.k, space.k), dtype=object)
    for a in range(space.k):
        for b in range(a, space.k):
            tensor[a, b] = tensor[b, a] = random_scalar(rng, bound)
    return PolyMeasure((space, space), tensor)


def random_grade2_measure(rng: np.random.Generator, space: FiniteSpace, bound: int = 3) -> SetFunction:
    """A grade-2 measure: the diagonal of a random symmetric bimeasure."""
    return diagonal(random_symmetric_bimeasure(rng, space, bound))


def random_disjoint_tuple(rng: np.random.Generator, space: FiniteSpace, m: int) -> Tuple[MSet, ...]:
    """Each atom goes to one of m sets or to none, uniformly."""
    masks = [0] * m
    for atom in range(space.k):
        slot = int(rng.integers(m + 1))
        if slot < m:
            masks[slot] |= 1 << atom
    return tuple(MSet.from_mask(space, mask) for mask in masks)


def random_interval(rng: np.random.Generator, grid: int = 12) -> RInterval:
    """Interval with endpoints on the grid {0, 1/grid, ..., 1}."""
    lo, hi = sorted(int(x) for x in rng.integers(0, grid + 1, size=2))
    return RInterval(Fraction(lo, grid), Fraction(hi, grid))


def random_box_union(
    rng: np.random.Generator,
    dim: int,
    max_boxes: int = 6,
    grid: int = 12
) -> BoxUnion:
    """Between 0 and max_boxes random boxes; overlaps allowed."""
    n_boxes = int(rng.integers(max_boxes + 1))
    boxes = tuple(
        Box(tuple(random_interval(rng, grid) for _ in range(dim))) for _ in range(n_boxes)
    )
    return BoxUnion(dim, boxes)


def gen_random(kind: str, k: int, d: int = 2, seed: int = 0, bound: int = 3) -> Dict[str, Any]:
    """
    Generate a random artifact as a JSON-ready dictionary.

    The generation parameters are recorded under "meta"; readers ignore it.

    Args:
        kind: setfn, polymeasure, grade2-measure or symmetric-bimeasure
        k: Atom count (1..16)
        d: Rank for polymeasure (1..4)
        seed: Generator seed
        bound: Numerator bound

    Raises:
        ValidationError: On unknown kinds or out-of-range parameters
    """
    if kind not in RANDOM_KINDS:
        raise ValidationError(f"Unknown random kind: {kind}")
    if isinstance(k, bool) or not isinstance(k, int) or not 1 <= k <= MAX_ATOMS:
        raise ValidationError(f"Atom count must be in 1..{MAX_ATOMS}")
    if isinstance(d, bool) or not isinstance(d, int) or not 1 <= d <= MAX_RANDOM_RANK:
        raise ValidationError(f"Rank must be in 1..{MAX_RANDOM_RANK}")
    seed = validate_seed(seed)
    bound = validate_bound(bound)

    rng = np.random.default_rng(seed)
    space = FiniteSpace.of_size(k)
    if kind == "setfn":
        artifact = random_set_function(rng, space, bound)
    elif kind == "polymeasure":
        artifact = random_polymeasure(rng, space, d, bound)
    elif kind == "symmetric-bimeasure":
        artifact = random_symmetric_bimeasure(rng, space, bound)
    else:
        artifact = random_grade2_measure(rng, space, bound)

    logger.debug(f"Generated {kind} with k={k}, d={d}, seed={seed}")
    result = artifact.to_dict()
    result["meta"] = {"kind": kind, "k": k, "d": d, "seed": seed, "bound": bound}
    return result
