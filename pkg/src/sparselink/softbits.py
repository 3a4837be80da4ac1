"""Soft-in/soft-out wrapper around the 1-bit reconstruction.

Takes per-bit posterior probabilities from the channel decoder, turns them
into hard signs plus a flip budget, reconstructs the sparse signal, and maps
the re-measured values back into [-1, 1] soft bits. Entries re-measured with
the wrong sign come back negative, actively contradicting the hard decision.
"""

import math
from dataclasses import dataclass

import numpy as np

from .onebit import (
    MeasurementEnsemble,
    ReconstructionResult,
    SolverParams,
    aop_f_reconstruct,
    measure,
    sign_pm,
)


@dataclass(frozen=True)
class SisoOutput:
    """Everything observable from one soft-in/soft-out pass.

    soft_out is always recomputable as map_soft(psi, gamma) * hard with
    psi = hard * remeasured.
    """

    estimate: np.ndarray
    soft_out: np.ndarray
    gamma: float
    l_bar: int
    remeasured: np.ndarray
    alpha_flip: np.ndarray
    hard: np.ndarray
    reconstruction: ReconstructionResult


def _check_probs(alpha) -> np.ndarray:
    arr = np.asarray(alpha, dtype=float)
    if arr.size and (not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("posterior probabilities must lie in [0, 1]")
    return arr


def soft_from_posterior(alpha_prime) -> np.ndarray:
    """Expected bit values 2*alpha' - 1 from posteriors P(bit = +1)."""
    return 2.0 * _check_probs(alpha_prime) - 1.0


def harden(b_soft_prime) -> np.ndarray:
    """Hard decisions: entrywise sign with sign(0) = +1."""
    return sign_pm(b_soft_prime)


def flip_probabilities(alpha_prime) -> np.ndarray:
    """Per-bit probability that the hard decision is wrong.

    1 - alpha' where alpha' >= 0.5, else alpha'; always in [0, 0.5].
    """
    arr = _check_probs(alpha_prime)
    return np.where(arr >= 0.5, 1.0 - arr, arr)


def estimate_flip_count(alpha_flip) -> int:
    """Rounded sum of flip probabilities, halves away from zero.

    numpy's round would send 0.5 to 0 (banker's rounding), so the rounding is
    spelled out. The sum is nonnegative, making away-from-zero the same as up.
    """
    arr = np.asarray(alpha_flip, dtype=float)
    if arr.size and (arr.min() < 0.0 or arr.max() > 0.5):
        raise ValueError("flip probabilities must lie in [0, 0.5]")
    return int(math.floor(float(np.sum(arr)) + 0.5))


def compute_gamma(b_soft_prime) -> float:
    """Normalized distance between soft bits and their signs, in [0, 1]."""
    soft = np.asarray(b_soft_prime, dtype=float)
    if soft.size == 0:
        return 0.0
    return float(np.linalg.norm(soft - sign_pm(soft)) / math.sqrt(soft.size))


def map_soft(psi, gamma: float) -> np.ndarray:
    """Rescale re-measured values into [-1, 1].

    Nonnegative entries are scaled by gamma * max(psi) and clipped at 1;
    negative entries are scaled by |min(psi)|, so the worst violation maps to
    exactly -1. A nonpositive scale (gamma = 0, or no positive entries) sends
    every nonnegative entry to 1, matching the certainty limit.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    arr = np.asarray(psi, dtype=float)
    out = np.empty_like(arr)
    neg = arr < 0.0
    pos_scale = gamma * (arr.max() if arr.size else 0.0)
    if pos_scale > 0.0:
        out[~neg] = np.minimum(1.0, arr[~neg] / pos_scale)
    else:
        out[~neg] = 1.0
    if neg.any():
        out[neg] = arr[neg] / abs(arr.min())
    return out


def siso_decode(
    alpha_prime,
    phi: MeasurementEnsemble,
    k: int,
    solver: SolverParams | None = None,
) -> SisoOutput:
    """Full soft-in/soft-out pass.

    Pipeline: soft bits from posteriors -> hard signs + flip budget ->
    sparse reconstruction with that budget -> re-measure -> rescale into
    soft bits whose signs flag the measurements the estimate disbelieves.
    """
    alpha = _check_probs(alpha_prime)
    if alpha.ndim != 1 or alpha.size != phi.m:
        raise ValueError(f"posterior length {alpha.size} does not match matrix rows {phi.m}")
    b_soft_prime = soft_from_posterior(alpha)
    hard = harden(b_soft_prime)
    alpha_flip = flip_probabilities(alpha)
    l_bar = estimate_flip_count(alpha_flip)
    rec = aop_f_reconstruct(phi, hard, k, l_bar, solver)
    remeasured = measure(phi, rec.estimate)
    psi = hard * remeasured
    gamma = compute_gamma(b_soft_prime)
    soft_out = map_soft(psi, gamma) * hard
    return SisoOutput(
        estimate=rec.estimate,
        soft_out=soft_out,
        gamma=gamma,
        l_bar=l_bar,
        remeasured=remeasured,
        alpha_flip=alpha_flip,
        hard=hard,
        reconstruction=rec,
    )
