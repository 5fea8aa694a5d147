"""Exact rational scalars: parsing, formatting and elimination."""

from fractions import Fraction
from typing import Any, List, Sequence

from core.security.input_validation import ValidationError

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_scalar(value: Any) -> Fraction:
    """
    Parse an exact rational from "p/q", a decimal string or an integer.

    Floats are rejected: they are not exact.

    Raises:
        ValidationError: If the value cannot be parsed exactly
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"Not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"Not an exact rational: {value!r}")
    raise ValidationError(f"Scalars must be strings or integers, got {type(value).__name__}")


def format_scalar(value: Fraction) -> str:
    """Render a scalar as "p/q", or "p" when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def rational_rank(rows: Sequence[Sequence[Any]]) -> int:
    """
    Rank over the rationals by fraction-exact Gaussian elimination.

    Args:
        rows: Matrix rows (entries convertible to Fraction)

    Returns:
        Rank of the matrix
    """
    matrix: List[List[Fraction]] = [[Fraction(x) for x in row] for row in rows]
    if not matrix:
        return 0

    n_cols = len(matrix[0])
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, len(matrix)) if matrix[r][col] != 0), None)
        if pivot is None:
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        pivot_row = matrix[rank]
        for r in range(rank + 1, len(matrix)):
            factor = matrix[r][col] / pivot_row[col]
            if factor:
                matrix[r] = [x - factor * p for x, p in zip(matrix[r], pivot_row)]
        rank += 1
        if rank == len(matrix):
            break
    return rank
