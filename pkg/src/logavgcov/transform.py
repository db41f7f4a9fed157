"""Orthogonal cosine-transform machinery and the log-average periodogram.

The transform is the symmetric orthogonal DCT-I with half-weighted
endpoints; its coefficients are the spectral components whose squared
values, averaged in bins of ``m`` consecutive frequencies and logged,
form the log-average periodogram.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BinPartition",
    "SpectralComponents",
    "DegenerateBinError",
    "dct1_matrix",
    "spectral_components",
    "log_average_periodogram",
]


class DegenerateBinError(ValueError):
    """A frequency bin averaged to zero power, so its log is undefined."""


@dataclass(frozen=True)
class BinPartition:
    """Grouping of ``p`` frequencies into ``T = p // m`` bins of size ``m``.

    Bins are indexed 0-based.  Every bin except the last holds exactly
    ``m`` consecutive frequencies; the final bin absorbs the remainder and
    holds ``p - (T-1)*m`` of them when ``m`` does not divide ``p``.
    """

    p: int
    m: int

    def __post_init__(self):
        if self.p < 1 or self.p != int(self.p):
            raise ValueError(f"p must be a positive integer, got {self.p}")
        if not 1 <= self.m <= self.p or self.m != int(self.m):
            raise ValueError(f"m must satisfy 1 <= m <= p, got m={self.m}, p={self.p}")

    @property
    def T(self):
        return self.p // self.m

    def bin_slice(self, j):
        """Index slice of bin ``j`` (0-based); the last bin may be oversized."""
        if not 0 <= j < self.T:
            raise ValueError(f"bin index {j} out of range [0, {self.T})")
        if j == self.T - 1:
            return slice(j * self.m, self.p)
        return slice(j * self.m, (j + 1) * self.m)

    def bin_size(self, j):
        s = self.bin_slice(j)
        return s.stop - s.start

    def frequencies(self):
        """The frequency grid pi * i / (p - 1) for i = 0 .. p-1."""
        if self.p < 2:
            raise ValueError("the frequency grid needs p >= 2")
        return np.pi * np.arange(self.p) / (self.p - 1)

    def bin_centers(self):
        """Mean member frequency of each bin."""
        grid = self.frequencies()
        return np.array([grid[self.bin_slice(j)].mean() for j in range(self.T)])


@dataclass(frozen=True, eq=False)
class SpectralComponents:
    """Cosine-transform coefficients of a series plus their bin partition."""

    values: np.ndarray
    partition: BinPartition

    def __post_init__(self):
        if len(self.values) != self.partition.p:
            raise ValueError(
                f"values length {len(self.values)} does not match partition p={self.partition.p}"
            )


def dct1_matrix(p):
    """Symmetric orthogonal DCT-I matrix of order ``p``.

    Entry (i, j) is ``sqrt(2/(p-1)) * cos(pi*i*j/(p-1))``, divided by
    sqrt(2) whenever the row index is 0 or p-1 and again whenever the
    column index is.  The result D satisfies D = D^T and D D^T = I.
    """
    if p < 2 or p != int(p):
        raise ValueError(f"p must be an integer >= 2, got {p}")
    i = np.arange(p)
    D = math.sqrt(2.0 / (p - 1)) * np.cos(np.pi * np.outer(i, i) / (p - 1))
    edge = 1.0 / math.sqrt(2.0)
    D[0, :] *= edge
    D[p - 1, :] *= edge
    D[:, 0] *= edge
    D[:, p - 1] *= edge
    return D


def spectral_components(y, m=1):
    """Transform a series into its spectral components.

    Parameters
    ----------
    y : array_like, length p >= 2
        The observed series.
    m : int
        Frequencies per bin for the attached partition (defaults to 1,
        i.e. every frequency its own bin).
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or len(y) < 2:
        raise ValueError("y must be a 1-d vector of length >= 2")
    p = len(y)
    values = dct1_matrix(p) @ y
    return SpectralComponents(values=values, partition=BinPartition(p=p, m=m))


def log_average_periodogram(components, divisor="count"):
    """Log of the within-bin average squared spectral component, per bin.

    Parameters
    ----------
    components : SpectralComponents
    divisor : {"count", "nominal"}
        Average the last (possibly oversized) bin over its true member
        count, or always over the nominal bin size ``m``.

    Returns
    -------
    ndarray of length T.
    """
    if divisor not in ("count", "nominal"):
        raise ValueError(f"divisor must be 'count' or 'nominal', got {divisor!r}")
    part = components.partition
    sq = np.asarray(components.values, dtype=float) ** 2
    out = np.empty(part.T)
    for j in range(part.T):
        block = sq[part.bin_slice(j)]
        denom = len(block) if divisor == "count" else part.m
        avg = block.sum() / denom
        if avg <= 0.0:
            raise DegenerateBinError(f"bin {j} has zero average power")
        out[j] = math.log(avg)
    return out
