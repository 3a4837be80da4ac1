"""Sparse test signals, Gaussian measurement ensembles, and the RSNR metric."""

import math
from dataclasses import dataclass

import numpy as np

# Aggregated RSNR is capped here so perfect-reconstruction cells stay finite.
RSNR_CAP_DB = 200.0


@dataclass(frozen=True)
class SparseSignal:
    """Dense length-n vector with exactly k nonzero entries.

    Attributes
    ----------
    values : ndarray
        The full vector, zeros included.
    support : ndarray
        Sorted indices of the nonzero entries.
    """

    values: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        support = np.sort(np.asarray(self.support, dtype=np.int64))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "support", support)
        if support.size and np.unique(support).size != support.size:
            raise ValueError("support indices must be distinct")
        if not np.array_equal(np.flatnonzero(values), support):
            raise ValueError("support must list exactly the nonzero positions")
        if support.size and not np.isfinite(values[support]).all():
            raise ValueError("nonzero entries must be finite")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def k(self) -> int:
        return self.support.size


@dataclass(frozen=True)
class MeasurementEnsemble:
    """M x N sensing matrix with i.i.d. N(0, 1/M) entries."""

    matrix: np.ndarray
    m: int
    n: int

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", matrix)
        if matrix.shape != (self.m, self.n):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match declared ({self.m}, {self.n})"
            )


@dataclass
class RsnrAccumulator:
    """Running sums of signal and reconstruction-error energies.

    The aggregate RSNR is the ratio of the summed energies (a ratio of
    expectations), not the mean of per-trial ratios.
    """

    sum_signal_energy: float = 0.0
    sum_error_energy: float = 0.0
    trials: int = 0

    def add(self, signal_energy: float, error_energy: float) -> None:
        if signal_energy < 0.0 or error_energy < 0.0:
            raise ValueError("energies must be nonnegative")
        self.sum_signal_energy += signal_energy
        self.sum_error_energy += error_energy
        self.trials += 1

    def merge(self, other: "RsnrAccumulator") -> "RsnrAccumulator":
        """Associative combine of two accumulators (returns a new one)."""
        return RsnrAccumulator(
            self.sum_signal_energy + other.sum_signal_energy,
            self.sum_error_energy + other.sum_error_energy,
            self.trials + other.trials,
        )

    @property
    def saturated(self) -> bool:
        """True when the capped RSNR value hides a larger (or infinite) ratio."""
        if self.trials < 1:
            return False
        if self.sum_error_energy == 0.0:
            return True
        if self.sum_signal_energy == 0.0:
            return False
        ratio = self.sum_signal_energy / self.sum_error_energy
        return 10.0 * math.log10(ratio) >= RSNR_CAP_DB


def generate_sparse_signal(n: int, k: int, rng: np.random.Generator) -> SparseSignal:
    """Draw a k-sparse signal of length n.

    Support positions are uniform over all k-subsets (partial Fisher-Yates
    swap of an index pool, exact uniformity); nonzero amplitudes are standard
    normal.
    """
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    pool = np.arange(n)
    for i in range(k):
        j = i + int(rng.integers(n - i))
        pool[i], pool[j] = pool[j], pool[i]
    support = np.sort(pool[:k])
    values = np.zeros(n)
    values[support] = rng.standard_normal(k)
    return SparseSignal(values=values, support=support)


def generate_measurement_matrix(n_rows: int, n_cols: int, rng: np.random.Generator) -> MeasurementEnsemble:
    """Gaussian sensing matrix: independent N(0, 1/n_rows) entries."""
    if n_rows < 1 or n_cols < 1:
        raise ValueError(f"matrix dimensions must be positive, got {n_rows}x{n_cols}")
    matrix = rng.normal(0.0, 1.0 / math.sqrt(n_rows), size=(n_rows, n_cols))
    return MeasurementEnsemble(matrix=matrix, m=n_rows, n=n_cols)


def rsnr_db(acc: RsnrAccumulator) -> float:
    """Aggregate RSNR in dB, capped at RSNR_CAP_DB.

    Raises ValueError if nothing was accumulated. A zero error sum returns
    the cap; acc.saturated tells the two cases apart.
    """
    if acc.trials < 1:
        raise ValueError("no trials accumulated")
    if acc.sum_error_energy == 0.0:
        return RSNR_CAP_DB
    if acc.sum_signal_energy == 0.0:
        return -math.inf
    value = 10.0 * math.log10(acc.sum_signal_energy / acc.sum_error_energy)
    return min(value, RSNR_CAP_DB)
