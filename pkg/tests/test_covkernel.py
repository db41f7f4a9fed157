import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from logavgcov.covkernel import (
    SpectralCovariance,
    correlation_trace,
    logavg_covariance,
    noncentral_chisq_moment,
    spectral_covariance,
)
from logavgcov.models import (
    arma_autocovariance,
    reference_polynomial,
    toeplitz_covariance,
)
from logavgcov.specfun import logavg_cov_kernel, trigamma
from logavgcov.transform import BinPartition

STUDY_AR = (0.7, -0.6)
STUDY_MA = (-0.2, 0.2)
STUDY_VAR = 1.44


def build_sc(sigma, m):
    cov = toeplitz_covariance(sigma)
    return spectral_covariance(cov, BinPartition(p=cov.p, m=m))


class TestSpectralCovariance:
    def test_identity_scaled(self):
        sc = build_sc([2.5, 0.0, 0.0, 0.0], m=2)
        np.testing.assert_allclose(sc.omega, 2.5 * np.eye(4), atol=1e-14)

    def test_trace_invariance(self):
        sigma = arma_autocovariance(STUDY_AR, STUDY_MA, STUDY_VAR, 59)
        sc = build_sc(sigma, m=5)
        assert np.trace(sc.omega) == pytest.approx(60 * sigma[0], rel=1e-9)

    def test_symmetry(self):
        sigma = arma_autocovariance(STUDY_AR, STUDY_MA, STUDY_VAR, 29)
        sc = build_sc(sigma, m=3)
        np.testing.assert_array_equal(sc.omega, sc.omega.T)

    def test_diagonal_tracks_density(self):
        # diag(omega) approximates the spectral density on the grid
        model = reference_polynomial()
        sigma = model.autocovariance(59)
        sc = build_sc(sigma, m=5)
        grid = np.pi * np.arange(60) / 59
        f = np.full(60, sigma[0])
        lag_sigma = model.autocovariance(100_000)
        for tau in range(1, len(lag_sigma)):
            if abs(lag_sigma[tau]) < 1e-12:
                break
            f += 2.0 * lag_sigma[tau] * np.cos(tau * grid)
        assert np.max(np.abs(np.diag(sc.omega) - f)) <= 0.15

    def test_dimension_mismatch(self):
        cov = toeplitz_covariance([1.0, 0.0])
        with pytest.raises(ValueError):
            spectral_covariance(cov, BinPartition(p=4, m=2))


class TestCorrelationTrace:
    def test_white_noise_zero(self):
        sc = build_sc([1.0] + [0.0] * 7, m=2)
        for j in range(4):
            for jp in range(4):
                expected = 1.0 if j == jp else 0.0
                assert correlation_trace(sc, j, jp).tau == expected

    def test_diagonal_is_one(self):
        sigma = arma_autocovariance(STUDY_AR, STUDY_MA, STUDY_VAR, 19)
        sc = build_sc(sigma, m=4)
        assert correlation_trace(sc, 2, 2).tau == 1.0

    def test_matches_explicit_inverse(self):
        sc = build_sc([1.0, 0.5, 0.25, 0.125], m=2)
        got = correlation_trace(sc, 0, 1).tau
        b00 = sc.omega[:2, :2]
        b11 = sc.omega[2:, 2:]
        b01 = sc.omega[:2, 2:]
        b10 = sc.omega[2:, :2]
        explicit = np.trace(np.linalg.inv(b00) @ b10 @ b01 @ np.linalg.inv(b11)) / 2
        assert got == pytest.approx(explicit, abs=1e-12)

    def test_symmetric_in_bin_order(self):
        sigma = arma_autocovariance(STUDY_AR, STUDY_MA, STUDY_VAR, 29)
        sc = build_sc(sigma, m=3)
        for j, jp in [(0, 1), (2, 7), (4, 9)]:
            assert correlation_trace(sc, j, jp).tau == pytest.approx(
                correlation_trace(sc, jp, j).tau, abs=1e-12
            )

    def test_out_of_range_rejected(self):
        # handcrafted non-positive-semidefinite cross structure: tau > 1
        omega = np.array([[1.0, 1.1], [1.1, 1.0]])
        sc = SpectralCovariance(omega=omega, partition=BinPartition(p=2, m=1))
        with pytest.raises(ValueError, match="exceeds 1"):
            correlation_trace(sc, 0, 1)

    def test_boundary_clamp(self):
        eps = 4e-13
        omega = np.array([[1.0, 1.0 + eps], [1.0 + eps, 1.0]])
        sc = SpectralCovariance(omega=omega, partition=BinPartition(p=2, m=1))
        assert correlation_trace(sc, 0, 1).tau == 1.0


class TestLogavgCovariance:
    def test_white_noise_diagonal(self):
        for m in (1, 2, 5):
            sc = build_sc([2.0] + [0.0] * 19, m=m)
            result = logavg_covariance(sc)
            T = 20 // m
            np.testing.assert_array_equal(
                result.matrix, trigamma(m / 2.0) * np.eye(T)
            )

    def test_m1_matches_squared_correlation_series(self):
        sigma = arma_autocovariance(STUDY_AR, STUDY_MA, STUDY_VAR, 11)
        sc = build_sc(sigma, m=1)
        result = logavg_covariance(sc)
        d = np.sqrt(np.diag(sc.omega))
        for j in range(12):
            for jp in range(12):
                rho2 = (sc.omega[j, jp] / (d[j] * d[jp])) ** 2
                expected = (
                    trigamma(0.5) if j == jp else logavg_cov_kernel(rho2, 1)
                )
                assert result.matrix[j, jp] == pytest.approx(expected, rel=1e-10)

    def test_study_model_structure(self):
        sigma = arma_autocovariance(STUDY_AR, STUDY_MA, STUDY_VAR, 59)
        sc = build_sc(sigma, m=5)
        result = logavg_covariance(sc)
        M = result.matrix
        assert M.shape == (12, 12)
        np.testing.assert_array_equal(M, M.T)
        assert np.all(np.diag(M) == trigamma(2.5))
        off = M - np.diag(np.diag(M))
        assert np.all(off >= 0.0)
        # dependence decays away from the diagonal
        adjacent = max(M[j, j + 1] for j in range(11))
        distant = max(M[j, jp] for j in range(12) for jp in range(12) if jp - j >= 2)
        assert distant < adjacent

    def test_remainder_truncation(self):
        sigma = arma_autocovariance(STUDY_AR, STUDY_MA, STUDY_VAR, 62)
        sc = build_sc(sigma, m=5)  # p=63 -> trailing 3 frequencies dropped
        result = logavg_covariance(sc)
        assert result.matrix.shape == (12, 12)
        assert result.partition.p == 60
        # dropping components marginalizes the joint law: equal to running on
        # the retained upper-left corner of the spectral covariance
        manual = SpectralCovariance(
            omega=sc.omega[:60, :60], partition=BinPartition(p=60, m=5)
        )
        np.testing.assert_array_equal(result.matrix, logavg_covariance(manual).matrix)

    def test_remainder_error_mode(self):
        sigma = arma_autocovariance(STUDY_AR, STUDY_MA, STUDY_VAR, 62)
        sc = build_sc(sigma, m=5)
        with pytest.raises(ValueError, match="divisible"):
            logavg_covariance(sc, remainder="error")

    def test_csv_serialization(self):
        sc = build_sc([1.0] + [0.0] * 3, m=2)
        result = logavg_covariance(sc)
        text = result.to_csv()
        lines = text.strip().split("\n")
        assert len(lines) == 2
        parsed = np.array([[float(v) for v in line.split(",")] for line in lines])
        np.testing.assert_array_equal(parsed, result.matrix)
        # 17 significant digits round-trip exactly
        assert float(lines[0].split(",")[0]) == trigamma(1.0)

    def test_json_serialization(self):
        sc = build_sc([1.0] + [0.0] * 3, m=2)
        payload = json.loads(logavg_covariance(sc).to_json())
        assert payload["p"] == 4 and payload["m"] == 2 and payload["T"] == 2
        np.testing.assert_array_equal(payload["matrix"], logavg_covariance(sc).matrix)


def quadrature_moment(mu, m, noncentrality, scale):
    """Oracle: integrate x^mu against the scaled non-central chi-squared density.

    For moderate noncentrality evaluates the 0F1 form of the density
    directly; otherwise uses the library log-density (robust against
    Bessel overflow).  Both routes are independent of the closed-form
    implementation under test.
    """
    nc = noncentrality / scale
    if nc < 20.0:

        def log_density(x):
            return (
                -nc / 2.0
                - x / 2.0
                + (m / 2.0 - 1.0) * math.log(x)
                - (m / 2.0) * math.log(2.0)
                - math.lgamma(m / 2.0)
                + math.log(special.hyp0f1(m / 2.0, nc * x / 4.0))
            )

    else:
        dist = stats.ncx2(df=m, nc=nc)
        log_density = dist.logpdf

    def integrand(x):
        if x <= 0.0:
            return 0.0
        return math.exp(mu * math.log(scale * x) + log_density(x))

    mid = max(m + nc, 1.0)
    v1, _ = integrate.quad(integrand, 0.0, mid, epsabs=0.0, epsrel=1e-11, limit=400)
    v2, _ = integrate.quad(integrand, mid, np.inf, epsabs=0.0, epsrel=1e-11, limit=400)
    return v1 + v2


class TestNoncentralChisqMoment:
    def test_zeroth_moment(self):
        assert noncentral_chisq_moment(0.0, 3, 2.5, 1.3) == 1.0

    def test_mean(self):
        assert noncentral_chisq_moment(1.0, 4, 2.0, 1.0) == pytest.approx(6.0, abs=1e-12)
        # general scale: E[z'z] = m * scale + noncentrality
        assert noncentral_chisq_moment(1.0, 3, 2.5, 1.3) == pytest.approx(
            3 * 1.3 + 2.5, rel=1e-12
        )

    def test_inverse_moment(self):
        assert noncentral_chisq_moment(-1.0, 4, 0.0, 1.0) == pytest.approx(0.5, abs=1e-12)

    def test_frozen_quadrature_example(self):
        assert noncentral_chisq_moment(0.7, 3, 2.5, 1.3) == pytest.approx(
            3.459629807406481, rel=1e-8
        )

    def test_domain(self):
        with pytest.raises(ValueError):
            noncentral_chisq_moment(-2.0, 4, 0.0, 1.0)
        with pytest.raises(ValueError):
            noncentral_chisq_moment(1.0, 0, 0.0, 1.0)
        with pytest.raises(ValueError):
            noncentral_chisq_moment(1.0, 4, -1.0, 1.0)
        with pytest.raises(ValueError):
            noncentral_chisq_moment(1.0, 4, 1.0, 0.0)

    @given(
        st.integers(min_value=1, max_value=20),
        st.floats(min_value=0.0, max_value=10.0, allow_nan=False),
    )
    @settings(max_examples=100)
    def test_integer_moments_match_recursion(self, m, nc):
        # classical raw moments of the non-central chi-squared
        mu1 = m + nc
        mu2 = mu1**2 + 2 * (m + 2 * nc)
        mu3 = mu1**3 + 6 * mu1 * (m + 2 * nc) + 8 * (m + 3 * nc)
        for order, expected in ((1, mu1), (2, mu2), (3, mu3)):
            got = noncentral_chisq_moment(float(order), m, nc, 1.0)
            assert got == pytest.approx(expected, rel=1e-10)

    @given(
        st.floats(min_value=-0.4, max_value=4.0, allow_nan=False),
        st.integers(min_value=1, max_value=12),
        st.floats(min_value=0.0, max_value=8.0, allow_nan=False),
        st.floats(min_value=0.1, max_value=5.0, allow_nan=False),
    )
    @settings(max_examples=100)
    def test_scale_law(self, mu, m, nc, scale):
        lhs = noncentral_chisq_moment(mu, m, nc, scale)
        rhs = scale**mu * noncentral_chisq_moment(mu, m, nc / scale, 1.0)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_against_quadrature_sample(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            m = int(rng.integers(1, 10))
            mu = float(rng.uniform(-m / 2 + 0.1, 5.0))
            nc = float(rng.uniform(0.0, 8.0))
            scale = float(rng.uniform(0.2, 3.0))
            closed = noncentral_chisq_moment(mu, m, nc, scale)
            assert closed == pytest.approx(
                quadrature_moment(mu, m, nc, scale), rel=1e-7
            )
