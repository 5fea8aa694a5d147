"""Truncated discrete kernel bimeasures lam(S, T) = sum of a(s, t) over S x T.

walsh_block_kernel places the k-th Walsh-Hadamard block (order 2^k) on the
diagonal, scaled by 1/(2^k k). Block k contributes exactly 2^k/k to the
variation, so the variation of the truncations diverges like a harmonic-type
sum, while the rows of each block cancel against sign choices. The
semivariation figures reported here are computed values only.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Sequence

import numpy as np

from core.measure.polymeasure import PolyMeasure, fraction_array, tensor_semivariation, tensor_variation
from core.measure.scalar import ZERO, format_scalar, parse_scalar
from core.measure.space import FiniteSpace
from core.monitoring.logging_config import StructuredLogger
from core.monitoring.metrics import tracked
from core.security.input_validation import (
    DEFAULT_KERNEL_MAX_SIZE, DEFAULT_SEMIVARIATION_LIMIT, MAX_ATOMS,
    GuardError, ValidationError, check_guard, validate_seed, validate_trials
)

logger = logging.getLogger(__name__)
events = StructuredLogger("performance")


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """An n x n matrix of rationals a(s, t)."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        entries = fraction_array(self.entries)
        if entries.shape != (self.n, self.n):
            raise ValidationError(f"Kernel must be {self.n} x {self.n}, got shape {entries.shape}")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "entries": np.vectorize(format_scalar, otypes=[object])(self.entries).tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KernelMatrix":
        n = data.get("n")
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ValidationError("'n' must be a positive integer")
        try:
            raw = np.array(data.get("entries"), dtype=object)
        except ValueError:
            raise ValidationError("Kernel entries must be a square nested array")
        if raw.shape != (n, n):
            raise ValidationError(f"Kernel must be {n} x {n}, got shape {raw.shape}")
        return cls(n, np.vectorize(parse_scalar, otypes=[object])(raw))


@dataclass(frozen=True)
class KernelReportRow:
    """One truncation of the growth report."""

    blocks: int
    n: int
    variation: Fraction
    semivar_lb: Fraction
    closed_form: Fraction

    def to_dict(self) -> Dict[str, Any]:
        return {
            "K": self.blocks,
            "n": self.n,
            "variation": format_scalar(self.variation),
            "semivar_lb": format_scalar(self.semivar_lb),
            "closed_form": format_scalar(self.closed_form),
        }


def kernel_space(n: int) -> FiniteSpace:
    """The space {0, ..., n-1} with atoms labelled by their index."""
    return FiniteSpace(tuple(str(i) for i in range(n)))


def kernel_to_bimeasure(kernel: KernelMatrix) -> PolyMeasure:
    """
    The bimeasure with atom entries a(s, t) on two copies of {0..n-1}.

    Raises:
        GuardError: If n exceeds the materializable space size
    """
    if kernel.n > MAX_ATOMS:
        raise GuardError(
            f"kernel of size {kernel.n} is too large to materialize (max {MAX_ATOMS}); "
            "use the streaming variation and semivariation"
        )
    space = kernel_space(kernel.n)
    return PolyMeasure((space, space), kernel.entries)


def walsh_matrix(order: int) -> np.ndarray:
    """
    Sylvester's +-1 Walsh-Hadamard matrix of the given power-of-two order.

    Raises:
        ValidationError: If order is not a power of two
    """
    if order < 1 or order & (order - 1):
        raise ValidationError(f"Walsh order must be a power of two, got {order}")
    h = np.ones((1, 1), dtype=np.int64)
    while h.shape[0] < order:
        h = np.block([[h, h], [h, -h]])
    return h


def block_kernel_size(blocks: int) -> int:
    """2 + 4 + ... + 2^K."""
    return 2 ** (blocks + 1) - 2


def walsh_block_kernel(blocks: int, max_size: int = DEFAULT_KERNEL_MAX_SIZE) -> KernelMatrix:
    """
    Block-diagonal kernel whose k-th block is W_{2^k} / (2^k k), k = 1..K.

    Raises:
        ValidationError: If blocks < 1
        GuardError: If the total size exceeds max_size
    """
    if isinstance(blocks, bool) or not isinstance(blocks, int) or blocks < 1:
        raise ValidationError("Block count must be a positive integer")
    n = check_guard(block_kernel_size(blocks), max_size, f"kernel with {blocks} blocks is too large")

    entries = np.full((n, n), ZERO, dtype=object)
    offset = 0
    for k in range(1, blocks + 1):
        size = 2 ** k
        scale = Fraction(1, size * k)
        block = walsh_matrix(size)
        for i in range(size):
            for j in range(size):
                entries[offset + i, offset + j] = int(block[i, j]) * scale
        offset += size
    return KernelMatrix(n, entries)


def block_variation_closed_form(k: int) -> Fraction:
    """Variation contributed by the k-th block: 2^(2k) entries of modulus 1/(2^k k)."""
    return Fraction(2 ** k, k)


def cumulative_variation_closed_form(blocks: int) -> Fraction:
    return sum((block_variation_closed_form(k) for k in range(1, blocks + 1)), ZERO)


def kernel_variation(kernel: KernelMatrix) -> Fraction:
    """Exact variation straight from the matrix (no subsets materialized)."""
    return tensor_variation(kernel.entries)


def kernel_semivariation_lower_bound(kernel: KernelMatrix, trials: int, seed: int) -> Fraction:
    """Sampled semivariation lower bound straight from the matrix."""
    return tensor_semivariation(kernel.entries, "sampled", seed=seed, trials=trials).value


def walsh_rows_orthogonal(order: int) -> bool:
    """Distinct rows of the Walsh matrix have zero dot product."""
    h = walsh_matrix(order)
    gram = h @ h.T
    return bool(np.array_equal(gram, order * np.eye(order, dtype=np.int64)))


def block_semivariation(k: int, limit: int = DEFAULT_SEMIVARIATION_LIMIT) -> Fraction:
    """
    Exact semivariation of the k-th block alone.

    Every row sign vector with first sign +1 is tried against the integer
    Walsh matrix; the column signs are optimal in closed form.

    Raises:
        GuardError: If 2^(2^k - 1) row sign vectors exceed the limit
    """
    if k < 1:
        raise ValidationError("Block index must be at least 1")
    size = 2 ** k
    check_guard(2 ** (size - 1), limit, f"exact semivariation of block {k} is too large")
    w = walsh_matrix(size)
    codes = np.arange(2 ** (size - 1), dtype=np.int64)
    bits = (codes[:, None] >> np.arange(size - 1, dtype=np.int64)) & 1
    signs = np.hstack([np.ones((codes.size, 1), dtype=np.int64), 1 - 2 * bits])
    best = int(np.abs(signs @ w).sum(axis=1).max())
    return Fraction(best, size * k)


@tracked("variation_growth_report")
def variation_growth_report(
    k_max: int,
    trials: int,
    seed: int,
    max_size: int = DEFAULT_KERNEL_MAX_SIZE
) -> List[KernelReportRow]:
    """
    Exact variation and a sampled semivariation lower bound for K = 1..k_max.

    Raises:
        GuardError: If the largest truncation exceeds max_size
    """
    trials = validate_trials(trials)
    seed = validate_seed(seed)
    if isinstance(k_max, bool) or not isinstance(k_max, int) or k_max < 1:
        raise ValidationError("K_max must be a positive integer")
    check_guard(block_kernel_size(k_max), max_size, f"kernel with {k_max} blocks is too large")

    rows = []
    for blocks in range(1, k_max + 1):
        kernel = walsh_block_kernel(blocks, max_size)
        row = KernelReportRow(
            blocks=blocks,
            n=kernel.n,
            variation=kernel_variation(kernel),
            semivar_lb=kernel_semivariation_lower_bound(kernel, trials, seed),
            closed_form=cumulative_variation_closed_form(blocks),
        )
        events.info("Kernel truncation evaluated", **row.to_dict())
        rows.append(row)
    return rows


def format_report_table(rows: Sequence[KernelReportRow]) -> str:
    """Aligned text table of a growth report."""
    header = ("K", "n", "variation", "semivar_lb", "closed_form")
    body = [
        (str(r.blocks), str(r.n), format_scalar(r.variation), format_scalar(r.semivar_lb),
         format_scalar(r.closed_form))
        for r in rows
    ]
    widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(line, widths)) for line in [header] + body]
    return "\n".join(lines)
