"""Covariance matrix of the log-average periodogram.

Transforms a Toeplitz process covariance into the spectral domain,
partitions it into bins, summarizes each bin pair by a correlation trace
in [0, 1], and maps the traces through the series kernel to the T x T
covariance matrix.  Also provides the closed-form non-integer moment of a
scaled non-central chi-squared variable, which underlies that kernel.
"""

import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .models import NotPositiveDefiniteError, ToeplitzCovariance
from .specfun import hyp1f1, log_gamma, logavg_cov_kernel, trigamma
from .transform import BinPartition, dct1_matrix

__all__ = [
    "SpectralCovariance",
    "CorrelationTrace",
    "LogAvgCovariance",
    "spectral_covariance",
    "correlation_trace",
    "logavg_covariance",
    "noncentral_chisq_moment",
]

# Traces may poke past [0, 1] by roundoff; anything inside this window of a
# boundary is clamped, anything further out signals a violated assumption.
TAU_CLAMP = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralCovariance:
    """Covariance of the spectral components: omega = D Sigma D, binned."""

    omega: np.ndarray
    partition: BinPartition

    def block(self, j, j_prime):
        """Covariance block between bins j and j_prime (0-based)."""
        return self.omega[self.partition.bin_slice(j), self.partition.bin_slice(j_prime)]


@dataclass(frozen=True)
class CorrelationTrace:
    """Scalar dependence summary of a bin pair; tau lies in [0, 1]."""

    j: int
    j_prime: int
    tau: float


@dataclass(frozen=True, eq=False)
class LogAvgCovariance:
    """Approximate T x T covariance matrix of the log-average periodogram."""

    matrix: np.ndarray
    partition: BinPartition

    def to_csv(self):
        """Row-major CSV with 17 significant digits."""
        buf = io.StringIO()
        for row in self.matrix:
            buf.write(",".join(f"{v:.17g}" for v in row))
            buf.write("\n")
        return buf.getvalue()

    def to_json(self):
        payload = {
            "p": self.partition.p,
            "m": self.partition.m,
            "T": self.partition.T,
            "matrix": [[float(v) for v in row] for row in self.matrix],
        }
        return json.dumps(payload, sort_keys=True)


def spectral_covariance(cov, partition):
    """Covariance of the spectral components of a process.

    Parameters
    ----------
    cov : ToeplitzCovariance
    partition : BinPartition with partition.p == cov.p

    Returns
    -------
    SpectralCovariance with omega = D Sigma D, symmetrized through
    (omega + omega^T) / 2 to remove roundoff asymmetry.
    """
    if not isinstance(cov, ToeplitzCovariance):
        raise TypeError("cov must be a ToeplitzCovariance")
    if partition.p != cov.p:
        raise ValueError(
            f"partition p={partition.p} does not match covariance dimension {cov.p}"
        )
    D = dct1_matrix(cov.p)
    omega = D @ cov.matrix @ D
    omega = 0.5 * (omega + omega.T)
    return SpectralCovariance(omega=omega, partition=partition)


def _block_cholesky(sc, j):
    block = sc.block(j, j)
    try:
        return np.linalg.cholesky(block)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"diagonal block {j} is singular") from exc


def correlation_trace(sc, j, j_prime):
    """Correlation trace of a bin pair, computed without explicit inverses.

    With C the cross block and L_j, L_j' the Cholesky factors of the two
    diagonal blocks, the trace equals ||L_j^{-1} C L_j'^{-T}||_F^2 / m,
    obtained by two triangular solves.  Requires the equal-bin regime
    (square blocks).
    """
    part = sc.partition
    if j == j_prime:
        if not 0 <= j < part.T:
            raise ValueError(f"bin index {j} out of range")
        return CorrelationTrace(j=j, j_prime=j_prime, tau=1.0)
    C = sc.block(j, j_prime)
    if C.shape[0] != C.shape[1]:
        raise ValueError(
            "correlation_trace requires equal-size bins; truncate the remainder first"
        )
    m = part.m
    Lj = _block_cholesky(sc, j)
    Lp = _block_cholesky(sc, j_prime)
    G = linalg.solve_triangular(Lj, C, lower=True)
    G = linalg.solve_triangular(Lp, G.T, lower=True)
    tau = float(np.sum(G * G)) / m
    if tau > 1.0 + TAU_CLAMP:
        raise ValueError(
            f"correlation trace {tau} exceeds 1 for bins ({j}, {j_prime}); "
            "the spectral covariance violates its positive-definiteness assumption"
        )
    # roundoff noise at either boundary snaps onto it (Frobenius form keeps
    # tau >= 0, so only the upper overshoot can occur, but guard both)
    if abs(tau - 1.0) <= TAU_CLAMP:
        tau = 1.0
    elif abs(tau) <= TAU_CLAMP:
        tau = 0.0
    return CorrelationTrace(j=j, j_prime=j_prime, tau=tau)


def logavg_covariance(sc, ctrl=None, remainder="truncate"):
    """Assemble the T x T covariance matrix of the log-average periodogram.

    Each entry is the series kernel evaluated at the pair's correlation
    trace; the diagonal is trigamma(m/2) exactly.  Entries are computed
    once per unordered pair, so the matrix is symmetric by construction.

    When m does not divide p the trailing p - T*m frequencies are dropped
    (their removal leaves the joint law of the remaining components
    untouched) so that every block is square; pass remainder="error" to
    reject such inputs instead.
    """
    if remainder not in ("truncate", "error"):
        raise ValueError(f"remainder must be 'truncate' or 'error', got {remainder!r}")
    part = sc.partition
    if part.p % part.m != 0:
        if remainder == "error":
            raise ValueError(
                f"p={part.p} is not divisible by m={part.m} and remainder='error'"
            )
        keep = part.T * part.m
        sc = SpectralCovariance(
            omega=sc.omega[:keep, :keep], partition=BinPartition(p=keep, m=part.m)
        )
        part = sc.partition
    T, m = part.T, part.m
    out = np.empty((T, T))
    diag = trigamma(m / 2.0)
    for j in range(T):
        out[j, j] = diag
        for jp in range(j + 1, T):
            tau = correlation_trace(sc, j, jp).tau
            val = logavg_cov_kernel(tau, m, ctrl)
            out[j, jp] = val
            out[jp, j] = val
    return LogAvgCovariance(matrix=out, partition=part)


def noncentral_chisq_moment(mu, m, noncentrality, scale=1.0):
    """Moment E[(z'z)^mu] for z ~ N(kappa, scale * I_m), |kappa|^2 = noncentrality.

    Equivalently the mu-th moment of scale times a non-central chi-squared
    variable with m degrees of freedom and noncentrality
    ``noncentrality / scale``.  Valid for any real ``mu > -m/2``, including
    non-integer and negative orders:

        2^mu scale^mu Gamma(mu + m/2) / Gamma(m/2)
            * 1F1(-mu, m/2; -noncentrality / (2 scale))

    The gamma prefactor is evaluated in log space.
    """
    if m < 1 or m != int(m):
        raise ValueError(f"m must be a positive integer, got {m}")
    if noncentrality < 0:
        raise ValueError(f"noncentrality must be nonnegative, got {noncentrality}")
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    if mu <= -m / 2.0:
        raise ValueError(f"mu must exceed -m/2 = {-m / 2.0}, got {mu}")
    log_pref = mu * math.log(2.0 * scale) + log_gamma(mu + m / 2.0) - log_gamma(m / 2.0)
    return math.exp(log_pref) * hyp1f1(-mu, m / 2.0, -noncentrality / (2.0 * scale))
