"""Tests for Walsh block kernels and their variation growth."""

from fractions import Fraction

import numpy as np
import pytest

from core.measure.kernel import (
    KernelMatrix, block_kernel_size, block_semivariation, block_variation_closed_form,
    cumulative_variation_closed_form, format_report_table, kernel_semivariation_lower_bound,
    kernel_to_bimeasure, kernel_variation, variation_growth_report, walsh_block_kernel,
    walsh_matrix, walsh_rows_orthogonal
)
from core.measure.polymeasure import semivariation, variation
from core.security.input_validation import GuardError, ValidationError


@pytest.mark.unit
def test_walsh_matrix():
    """Test Sylvester's construction and row orthogonality."""
    assert walsh_matrix(2).tolist() == [[1, 1], [1, -1]]
    for order in (1, 2, 4, 8, 16):
        assert walsh_rows_orthogonal(order)
    with pytest.raises(ValidationError):
        walsh_matrix(6)


@pytest.mark.unit
def test_block_kernel_layout():
    """Test sizes, scaling and the block-diagonal structure."""
    kernel = walsh_block_kernel(2)
    assert kernel.n == block_kernel_size(2) == 6
    assert kernel.entries[0, 0] == Fraction(1, 2)
    assert kernel.entries[1, 1] == Fraction(-1, 2)
    assert kernel.entries[2, 2] == Fraction(1, 8)
    assert kernel.entries[0, 2] == 0
    assert kernel.entries[5, 5] == Fraction(1, 8)


@pytest.mark.unit
def test_variation_closed_form():
    """Test exact variation against the closed form for K <= 8, strictly increasing."""
    previous = Fraction(-1)
    for blocks in range(1, 9):
        value = kernel_variation(walsh_block_kernel(blocks))
        assert value == sum(Fraction(2 ** k, k) for k in range(1, blocks + 1))
        assert value == cumulative_variation_closed_form(blocks)
        assert value > previous
        previous = value


@pytest.mark.unit
def test_block_variation():
    """Test the per-block contribution 2^k/k."""
    assert block_variation_closed_form(1) == 2
    assert block_variation_closed_form(3) == Fraction(8, 3)


@pytest.mark.unit
def test_small_kernel_as_bimeasure():
    """Test that materialized kernels agree with the streaming forms."""
    kernel = walsh_block_kernel(2)
    lam = kernel_to_bimeasure(kernel)
    assert variation(lam) == kernel_variation(kernel)
    exact = semivariation(lam).value
    assert kernel_semivariation_lower_bound(kernel, trials=32, seed=1) <= exact <= variation(lam)


@pytest.mark.unit
def test_large_kernel_not_materialized():
    """Test that kernels beyond 16 atoms stay in streaming mode."""
    with pytest.raises(GuardError, match="streaming"):
        kernel_to_bimeasure(walsh_block_kernel(4))


@pytest.mark.unit
def test_kernel_size_guard():
    """Test the kernel size guard."""
    with pytest.raises(GuardError):
        walsh_block_kernel(4, max_size=16)
    with pytest.raises(ValidationError):
        walsh_block_kernel(0)


@pytest.mark.unit
@pytest.mark.parametrize("k", [1, 2, 3])
def test_block_semivariation(k):
    """Test exact block semivariation against the generic exact search and the variation."""
    size = 2 ** k
    kernel = KernelMatrix(size, walsh_matrix(size).astype(object) * Fraction(1, size * k))
    lam = kernel_to_bimeasure(kernel)
    value = block_semivariation(k)
    assert value == semivariation(lam).value
    assert value <= block_variation_closed_form(k)
    assert value ** 2 <= Fraction(2 ** k, k * k)


@pytest.mark.unit
def test_block_semivariation_guard():
    """Test that large blocks are refused in exact mode."""
    with pytest.raises(GuardError):
        block_semivariation(5)


@pytest.mark.unit
def test_growth_report():
    """Test report rows: exact variation, sampled bound below it, closed form."""
    rows = variation_growth_report(4, trials=8, seed=3)
    assert [row.blocks for row in rows] == [1, 2, 3, 4]
    assert [row.n for row in rows] == [2, 6, 14, 30]
    for row in rows:
        assert row.variation == row.closed_form
        assert 0 <= row.semivar_lb <= row.variation
    assert rows == variation_growth_report(4, trials=8, seed=3)
    assert rows[0].to_dict() == {
        "K": 1, "n": 2, "variation": "2", "semivar_lb": rows[0].to_dict()["semivar_lb"], "closed_form": "2"
    }


@pytest.mark.unit
def test_report_table():
    """Test the aligned text table."""
    table = format_report_table(variation_growth_report(2, trials=4, seed=0))
    lines = table.splitlines()
    assert len(lines) == 3
    assert lines[0].split() == ["K", "n", "variation", "semivar_lb", "closed_form"]
    assert len({len(line) for line in lines}) == 1


@pytest.mark.unit
def test_kernel_round_trip():
    """Test dictionary conversion of kernels."""
    kernel = walsh_block_kernel(1)
    data = kernel.to_dict()
    assert data == {"n": 2, "entries": [["1/2", "1/2"], ["1/2", "-1/2"]]}
    again = KernelMatrix.from_dict(data)
    assert again.n == 2
    assert np.array_equal(again.entries, kernel.entries)


@pytest.mark.unit
def test_kernel_shape_checked():
    """Test that non-square entries are refused."""
    with pytest.raises(ValidationError):
        KernelMatrix.from_dict({"n": 2, "entries": [["1", "0"]]})
