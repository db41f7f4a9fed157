"""Stationary zero-mean Gaussian process models.

Autocovariance functions (ARMA via the moving-average expansion,
polynomial decay, white noise, or a user-supplied sequence), their
Toeplitz covariance matrices, and exact reproducible sampling.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

__all__ = [
    "NonStationaryError",
    "NotPositiveDefiniteError",
    "AutocovModel",
    "ToeplitzCovariance",
    "arma_autocovariance",
    "polynomial_autocovariance",
    "toeplitz_covariance",
    "sample_gaussian",
    "reference_arma",
    "reference_polynomial",
]

PSI_REL_TOL = 1e-14
PSI_MAX_TERMS = 100_000


class NonStationaryError(ValueError):
    """The autoregressive polynomial has a root on or inside the unit circle."""


class NotPositiveDefiniteError(ValueError):
    """A covariance matrix failed its Cholesky factorization."""


def _check_stationary(ar):
    if len(ar) == 0:
        return
    # roots of 1 - phi_1 z - ... - phi_k z^k must lie outside the unit circle
    coeffs = np.concatenate(([1.0], -np.asarray(ar, dtype=float)))[::-1]
    roots = np.roots(coeffs)
    if len(roots) and np.min(np.abs(roots)) <= 1.0 + 1e-12:
        raise NonStationaryError(
            f"AR polynomial has a root with modulus {np.min(np.abs(roots)):.6f} <= 1"
        )


def _psi_weights(ar, ma):
    """Moving-average expansion weights of a stationary ARMA recursion.

    psi_0 = 1 and psi_k = theta_k + sum_i phi_i psi_{k-i}; the expansion is
    truncated once the last few weights drop below PSI_REL_TOL of the
    largest weight seen.
    """
    ar = tuple(float(a) for a in ar)
    ma = tuple(float(b) for b in ma)
    q = len(ma)
    psi = [1.0]
    largest = 1.0
    k = 1
    settle = max(len(ar), q) + 10
    while k < PSI_MAX_TERMS:
        val = ma[k - 1] if k <= q else 0.0
        for i, phi in enumerate(ar, start=1):
            if k - i >= 0:
                val += phi * psi[k - i]
        psi.append(val)
        largest = max(largest, abs(val))
        if k > settle and all(abs(v) < PSI_REL_TOL * largest for v in psi[-5:]):
            break
        k += 1
    return np.asarray(psi)


def arma_autocovariance(ar, ma, innov_var, max_lag):
    """Autocovariance sigma(0..max_lag) of a stationary ARMA process.

    The model is ``X_t = phi_1 X_{t-1} + ... + eps_t + theta_1 eps_{t-1} + ...``
    with ``ar = (phi_1, ...)``, ``ma = (theta_1, ...)`` and innovation
    variance ``innov_var``.  Computed from the moving-average expansion:
    sigma(tau) = innov_var * sum_k psi_k psi_{k+tau}.
    """
    if innov_var <= 0:
        raise ValueError(f"innov_var must be positive, got {innov_var}")
    if max_lag < 0:
        raise ValueError(f"max_lag must be nonnegative, got {max_lag}")
    _check_stationary(ar)
    psi = _psi_weights(ar, ma)
    n = len(psi)
    out = np.zeros(max_lag + 1)
    for tau in range(min(max_lag, n - 1) + 1):
        out[tau] = innov_var * float(np.dot(psi[: n - tau], psi[tau:]))
    return out


def polynomial_autocovariance(max_lag):
    """Polynomially decaying autocovariance 1.44 * (1 + 2 tau)^(-2.5)."""
    if max_lag < 0:
        raise ValueError(f"max_lag must be nonnegative, got {max_lag}")
    tau = np.arange(max_lag + 1, dtype=float)
    return 1.44 * (1.0 + 2.0 * tau) ** -2.5


@dataclass(frozen=True)
class AutocovModel:
    """A stationary autocovariance function, one of four kinds.

    kind "arma" uses (ar, ma, innov_var); "polynomial" is the fixed decay
    of :func:`polynomial_autocovariance`; "white" uses variance; "custom"
    wraps an explicit sigma(0..L) sequence and returns zeros past L.
    """

    kind: str
    ar: tuple = ()
    ma: tuple = ()
    innov_var: float = 1.0
    variance: float = 1.0
    sigma: tuple = ()

    _KINDS = ("arma", "polynomial", "white", "custom")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {self._KINDS}")
        if self.kind == "arma":
            _check_stationary(self.ar)
            if self.innov_var <= 0:
                raise ValueError("innov_var must be positive")
        if self.kind == "white" and self.variance <= 0:
            raise ValueError("variance must be positive")
        if self.kind == "custom":
            if len(self.sigma) == 0 or self.sigma[0] <= 0:
                raise ValueError("custom sigma needs sigma[0] > 0")
            if any(abs(s) > self.sigma[0] for s in self.sigma):
                raise ValueError("|sigma(tau)| must not exceed sigma(0)")

    @classmethod
    def arma(cls, ar, ma, innov_var):
        return cls(kind="arma", ar=tuple(ar), ma=tuple(ma), innov_var=float(innov_var))

    @classmethod
    def polynomial(cls):
        return cls(kind="polynomial")

    @classmethod
    def white(cls, variance=1.0):
        return cls(kind="white", variance=float(variance))

    @classmethod
    def custom(cls, sigma):
        return cls(kind="custom", sigma=tuple(float(s) for s in sigma))

    def autocovariance(self, max_lag):
        """sigma(0..max_lag) as an ndarray."""
        if self.kind == "arma":
            return arma_autocovariance(self.ar, self.ma, self.innov_var, max_lag)
        if self.kind == "polynomial":
            return polynomial_autocovariance(max_lag)
        if self.kind == "white":
            out = np.zeros(max_lag + 1)
            out[0] = self.variance
            return out
        out = np.zeros(max_lag + 1)
        upto = min(max_lag + 1, len(self.sigma))
        out[:upto] = self.sigma[:upto]
        return out

    @property
    def sigma0(self):
        return float(self.autocovariance(0)[0])


def reference_arma():
    """The ARMA(2,2) model of the simulation study: AR (0.7, -0.6),
    MA (-0.2, 0.2), innovation variance 1.44."""
    return AutocovModel.arma((0.7, -0.6), (-0.2, 0.2), 1.44)


def reference_polynomial():
    """The polynomial-decay model of the simulation study."""
    return AutocovModel.polynomial()


@dataclass(frozen=True, eq=False)
class ToeplitzCovariance:
    """A symmetric positive-definite Toeplitz covariance matrix.

    Built by :func:`toeplitz_covariance`, which validates positive
    definiteness by Cholesky; the lower factor is kept for sampling.
    """

    sigma: np.ndarray
    matrix: np.ndarray
    chol_lower: np.ndarray = field(repr=False)

    @property
    def p(self):
        return len(self.sigma)


def toeplitz_covariance(sigma):
    """Materialize sigma(0..p-1) as a validated Toeplitz covariance."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 1 or len(sigma) < 1:
        raise ValueError("sigma must be a nonempty 1-d vector")
    matrix = linalg.toeplitz(sigma)
    try:
        chol = np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"Toeplitz matrix of order {len(sigma)} is not positive definite"
        ) from exc
    return ToeplitzCovariance(sigma=sigma, matrix=matrix, chol_lower=chol)


def _replication_normals(seed, start, stop, p):
    """Standard normal draws for replications [start, stop).

    Replication r is a pure function of (seed, r): its stream is keyed by
    SeedSequence(seed, spawn_key=(r,)), so chunking and worker count never
    change the draws.
    """
    out = np.empty((stop - start, p))
    for r in range(start, stop):
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(r,))
        out[r - start] = np.random.default_rng(ss).standard_normal(p)
    return out


def sample_gaussian(cov, n_reps, seed, start=0):
    """Draw ``n_reps`` independent series with covariance ``cov``.

    Each replication is ``L z`` with ``L`` the lower Cholesky factor and z
    standard normal.  ``start`` offsets the replication index, enabling
    chunked generation: concatenating chunks reproduces a single call
    bitwise.  The matrix-vector product is applied one replication at a
    time so the floating-point result never depends on the chunk shape.

    Returns an array of shape (n_reps, p).
    """
    if n_reps < 0:
        raise ValueError(f"n_reps must be nonnegative, got {n_reps}")
    p = cov.p
    if n_reps == 0:
        return np.empty((0, p))
    z = _replication_normals(seed, start, start + n_reps, p)
    out = np.empty_like(z)
    for k in range(n_reps):
        out[k] = cov.chol_lower @ z[k]
    return out
