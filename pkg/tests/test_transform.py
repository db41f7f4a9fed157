import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logavgcov.transform import (
    BinPartition,
    DegenerateBinError,
    SpectralComponents,
    dct1_matrix,
    log_average_periodogram,
    spectral_components,
)


def direct_cosine_transform(y):
    """Componentwise evaluation of the transform's defining sum.

    Independent oracle for the matrix implementation: for each output index
    i (0-based), sum the interior cosine terms plus the half-weighted
    endpoint term (y_0 + (-1)^i y_{p-1}) / sqrt(2), normalize by
    sqrt(2 / (p - 1)) to make the map orthogonal, and halve the weight
    again at the two boundary outputs.
    """
    p = len(y)
    out = np.empty(p)
    for i in range(p):
        acc = (y[0] + (-1) ** i * y[p - 1]) / math.sqrt(2.0)
        for j in range(1, p - 1):
            acc += y[j] * math.cos(math.pi * j * i / (p - 1))
        acc *= math.sqrt(2.0 / (p - 1))
        if i in (0, p - 1):
            acc /= math.sqrt(2.0)
        out[i] = acc
    return out


class TestBinPartition:
    def test_basic(self):
        part = BinPartition(p=60, m=5)
        assert part.T == 12
        assert part.bin_slice(0) == slice(0, 5)
        assert part.bin_slice(11) == slice(55, 60)

    def test_oversized_last_bin(self):
        part = BinPartition(p=7, m=2)
        assert part.T == 3
        assert part.bin_slice(2) == slice(4, 7)
        assert part.bin_size(2) == 3

    def test_validation(self):
        with pytest.raises(ValueError):
            BinPartition(p=4, m=5)
        with pytest.raises(ValueError):
            BinPartition(p=4, m=0)

    def test_bin_centers(self):
        part = BinPartition(p=4, m=2)
        grid = np.pi * np.arange(4) / 3
        centers = part.bin_centers()
        assert centers == pytest.approx([grid[:2].mean(), grid[2:].mean()])


class TestDct1Matrix:
    def test_p2(self):
        expected = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
        np.testing.assert_allclose(dct1_matrix(2), expected, atol=1e-15)

    def test_p3(self):
        s = 1.0 / math.sqrt(2.0)
        expected = np.array([[0.5, s, 0.5], [s, 0.0, -s], [0.5, -s, 0.5]])
        np.testing.assert_allclose(dct1_matrix(3), expected, atol=1e-15)

    @pytest.mark.parametrize("p", [2, 3, 16, 60, 257, 512])
    def test_orthogonal(self, p):
        D = dct1_matrix(p)
        dev = np.linalg.norm(D @ D.T - np.eye(p))
        assert dev <= 1e-12 * p

    @pytest.mark.parametrize("p", [2, 5, 33, 128])
    def test_symmetric_exactly(self, p):
        D = dct1_matrix(p)
        assert np.array_equal(D, D.T)

    def test_domain(self):
        with pytest.raises(ValueError):
            dct1_matrix(1)


class TestSpectralComponents:
    def test_basis_vector(self):
        y = np.array([1.0, 0.0, 0.0])
        comps = spectral_components(y)
        np.testing.assert_allclose(
            comps.values, [0.5, 1.0 / math.sqrt(2.0), 0.5], atol=1e-15
        )

    def test_zero_input(self):
        comps = spectral_components(np.zeros(8))
        assert np.all(comps.values == 0.0)

    @pytest.mark.parametrize("p", [4, 9, 16])
    def test_matches_direct_summation(self, p):
        rng = np.random.default_rng(p)
        y = rng.standard_normal(p)
        comps = spectral_components(y)
        np.testing.assert_allclose(comps.values, direct_cosine_transform(y), atol=1e-10)

    @pytest.mark.parametrize("p", [2, 3, 16, 64, 257, 512])
    def test_norm_preserved(self, p):
        rng = np.random.default_rng(1000 + p)
        y = rng.standard_normal(p)
        comps = spectral_components(y)
        assert np.linalg.norm(comps.values) == pytest.approx(
            np.linalg.norm(y), rel=1e-10
        )

    def test_mismatched_values_rejected(self):
        with pytest.raises(ValueError):
            SpectralComponents(values=np.zeros(3), partition=BinPartition(p=4, m=2))


class TestLogAveragePeriodogram:
    def test_unit_values(self):
        comps = SpectralComponents(np.ones(4), BinPartition(p=4, m=2))
        np.testing.assert_allclose(log_average_periodogram(comps), [0.0, 0.0])

    def test_zero_bin_rejected(self):
        comps = SpectralComponents(np.array([2.0, 0.0]), BinPartition(p=2, m=1))
        with pytest.raises(DegenerateBinError):
            log_average_periodogram(comps)

    def test_arithmetic(self):
        comps = SpectralComponents(
            np.array([1.0, 3.0, 1.0, 1.0, 1.0, 1.0]), BinPartition(p=6, m=3)
        )
        out = log_average_periodogram(comps)
        assert out == pytest.approx([math.log(11.0 / 3.0), 0.0])

    def test_m1_is_log_square(self):
        rng = np.random.default_rng(5)
        vals = rng.standard_normal(9) + 2.0
        comps = SpectralComponents(vals, BinPartition(p=9, m=1))
        np.testing.assert_array_equal(log_average_periodogram(comps), np.log(vals**2))

    def test_remainder_divisor_switch(self):
        vals = np.array([1.0, 1.0, 2.0, 2.0, 2.0])
        comps = SpectralComponents(vals, BinPartition(p=5, m=2))
        by_count = log_average_periodogram(comps, divisor="count")
        by_nominal = log_average_periodogram(comps, divisor="nominal")
        assert by_count[-1] == pytest.approx(math.log(4.0))  # 12 / 3 members
        assert by_nominal[-1] == pytest.approx(math.log(6.0))  # 12 / nominal m=2
        np.testing.assert_allclose(by_count[:-1], by_nominal[:-1])

    @given(
        st.floats(min_value=-50, max_value=50, allow_nan=False).filter(
            lambda c: abs(c) > 1e-6
        )
    )
    @settings(max_examples=60)
    def test_scaling_equivariance(self, c):
        rng = np.random.default_rng(7)
        vals = rng.standard_normal(8) + 3.0
        part = BinPartition(p=8, m=2)
        base = log_average_periodogram(SpectralComponents(vals, part))
        scaled = log_average_periodogram(SpectralComponents(c * vals, part))
        np.testing.assert_allclose(scaled, base + 2.0 * math.log(abs(c)), atol=1e-9)
