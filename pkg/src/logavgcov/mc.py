"""Monte Carlo verification of the covariance formula.

Simulates many independent series, computes each replication's
log-average periodogram, and compares the resulting sample covariance
with the closed-form matrix.  Replications are chunked into the batches
that also provide batch-means standard errors; every batch is a pure
function of (seed, batch index), and batch results are reduced in index
order, so the output is bitwise identical for any worker count.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import models
from .covkernel import LogAvgCovariance, logavg_covariance, spectral_covariance
from .transform import dct1_matrix

__all__ = ["McReport", "empirical_logavg_cov"]

N_BATCHES = 50
MIN_REPS = 100


@dataclass(frozen=True, eq=False)
class McReport:
    """Empirical vs formula covariance of the log-average periodogram."""

    empirical_cov: np.ndarray
    std_err: np.ndarray
    formula_cov: LogAvgCovariance
    max_abs_dev: float
    max_dev_in_se_units: float
    n_reps: int
    seed: int

    def to_json(self):
        payload = {
            "n_reps": self.n_reps,
            "seed": self.seed,
            "p": self.formula_cov.partition.p,
            "m": self.formula_cov.partition.m,
            "T": self.formula_cov.partition.T,
            "empirical_cov": self.empirical_cov.tolist(),
            "std_err": self.std_err.tolist(),
            "formula_cov": self.formula_cov.matrix.tolist(),
            "max_abs_dev": self.max_abs_dev,
            "max_dev_in_se_units": self.max_dev_in_se_units,
        }
        return json.dumps(payload, sort_keys=True)

    def to_rows(self):
        """Long-format rows (j, j_prime, empirical, std_err, formula, deviation)."""
        T = self.formula_cov.partition.T
        rows = []
        for j in range(T):
            for jp in range(T):
                rows.append(
                    (
                        j,
                        jp,
                        float(self.empirical_cov[j, jp]),
                        float(self.std_err[j, jp]),
                        float(self.formula_cov.matrix[j, jp]),
                        float(self.empirical_cov[j, jp] - self.formula_cov.matrix[j, jp]),
                    )
                )
        return rows

    def summary(self):
        lines = [
            f"replications      : {self.n_reps} (seed {self.seed})",
            f"bins              : T={self.formula_cov.partition.T}, "
            f"m={self.formula_cov.partition.m}, p={self.formula_cov.partition.p}",
            f"max |emp - formula|: {self.max_abs_dev:.6g}",
            f"max dev / SE       : {self.max_dev_in_se_units:.3f}",
        ]
        return "\n".join(lines)


def _batch_stats(args):
    """First and second moment sums plus the batch covariance for one batch."""
    cov, dct, m, T, seed, start, stop = args
    n = stop - start
    x = models.sample_gaussian(cov, n, seed, start=start)
    y = x @ dct
    ystar = np.log((y * y).reshape(n, T, m).mean(axis=2))
    s1 = ystar.sum(axis=0)
    s2 = ystar.T @ ystar
    batch_cov = (s2 - np.outer(s1, s1) / n) / (n - 1)
    return s1, s2, batch_cov


def empirical_logavg_cov(model, partition, n_reps, seed, workers=1):
    """Estimate Cov(Y*_j, Y*_j') by simulation and compare with the formula.

    Parameters
    ----------
    model : AutocovModel
    partition : BinPartition; p must be divisible by m so that the formula
        and the simulated bins describe the same quantity.
    n_reps : int, at least 100.
    seed : int; together with the replication index it fully determines
        every draw.
    workers : int, process-pool size (1 = in-process).

    Returns
    -------
    McReport with the unbiased sample covariance, batch-means standard
    errors over 50 batches, the formula matrix, and deviation summaries.
    """
    if n_reps < MIN_REPS:
        raise ValueError(f"n_reps must be at least {MIN_REPS}, got {n_reps}")
    if partition.p % partition.m != 0:
        raise ValueError(
            "empirical_logavg_cov requires p divisible by m; "
            f"got p={partition.p}, m={partition.m}"
        )
    p, m, T = partition.p, partition.m, partition.T
    cov = models.toeplitz_covariance(model.autocovariance(p - 1))
    formula = logavg_covariance(spectral_covariance(cov, partition))
    dct = dct1_matrix(p)

    edges = [n_reps * b // N_BATCHES for b in range(N_BATCHES + 1)]
    tasks = [
        (cov, dct, m, T, seed, edges[b], edges[b + 1]) for b in range(N_BATCHES)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_batch_stats, tasks))
    else:
        results = [_batch_stats(t) for t in tasks]

    S1 = np.zeros(T)
    S2 = np.zeros((T, T))
    batch_covs = []
    for s1, s2, bc in results:  # fixed batch order keeps the reduction bitwise stable
        S1 += s1
        S2 += s2
        batch_covs.append(bc)
    emp = (S2 - np.outer(S1, S1) / n_reps) / (n_reps - 1)
    se = np.asarray(batch_covs).std(axis=0, ddof=1) / math.sqrt(N_BATCHES)

    dev = np.abs(emp - formula.matrix)
    return McReport(
        empirical_cov=emp,
        std_err=se,
        formula_cov=formula,
        max_abs_dev=float(dev.max()),
        max_dev_in_se_units=float((dev / se).max()),
        n_reps=n_reps,
        seed=seed,
    )
