"""Convolutional coding, interleaving, the AWGN channel, and APP decoding.

The trellis layer is generic over feedforward generator sets, though only
G[5,7] (memory 2) is exercised end to end. Bits travel as antipodal +/-1
floats; codewords use the map {0 -> -1, 1 -> +1}.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._kernels import forward_backward_llr

# Prior log-ratio clamp: |soft| = 1 would otherwise give infinite priors.
PRIOR_LLR_CLAMP = 30.0
# Exactly noiseless observations are recorded with this sigma so that
# likelihood ratios stay finite; posteriors still saturate to exact {0, 1}.
SIGMA_FLOOR = 1e-6


@dataclass(frozen=True)
class TrellisSpec:
    """Feedforward convolutional code with precomputed transition tables.

    next_state[s, u] is the state after input bit u in state s; outputs_pm[s,
    u] is the corresponding antipodal output block. State convention: bit
    (memory-1) of s is the newest input still in the register.
    """

    generators: tuple
    memory: int
    next_state: np.ndarray
    outputs_pm: np.ndarray

    @property
    def num_states(self) -> int:
        return 2 ** self.memory

    @property
    def n_out(self) -> int:
        return len(self.generators)

    @property
    def rate(self) -> float:
        return 1.0 / len(self.generators)


def make_trellis(generators=(5, 7), memory: int = 2) -> TrellisSpec:
    """Build transition and output tables for a feedforward code.

    Generators are given as integers whose binary digits are the taps, the
    usual octal reading (5 = 101b taps the current and oldest bits).
    """
    gens = tuple(int(g) for g in generators)
    if memory < 1:
        raise ValueError("memory must be at least 1")
    if not gens:
        raise ValueError("need at least one generator")
    for g in gens:
        if not 0 < g < 2 ** (memory + 1):
            raise ValueError(f"generator {g} does not fit memory {memory}")
    num_states = 2 ** memory
    next_state = np.zeros((num_states, 2), dtype=np.int64)
    outputs = np.zeros((num_states, 2, len(gens)))
    for s in range(num_states):
        for u in (0, 1):
            word = (u << memory) | s
            next_state[s, u] = (u << (memory - 1)) | (s >> 1)
            for gi, g in enumerate(gens):
                bit = bin(word & g).count("1") & 1
                outputs[s, u, gi] = 1.0 if bit else -1.0
    return TrellisSpec(generators=gens, memory=memory, next_state=next_state, outputs_pm=outputs)


@functools.lru_cache(maxsize=None)
def default_trellis() -> TrellisSpec:
    """The G[5,7] rate-1/2, memory-2 code used throughout."""
    return make_trellis((5, 7), 2)


def conv_encode(bits, trellis: TrellisSpec) -> np.ndarray:
    """Encode antipodal bits, appending `memory` zero flush bits.

    Starts from the zero state and, thanks to the flush bits, ends there too.
    Output length is n_out * (len(bits) + memory).
    """
    arr = np.asarray(bits, dtype=float)
    u_seq = (arr > 0).astype(np.int64)
    n_out = trellis.n_out
    total = u_seq.size + trellis.memory
    out = np.empty(total * n_out)
    state = 0
    pos = 0
    for u in u_seq:
        out[pos : pos + n_out] = trellis.outputs_pm[state, u]
        state = int(trellis.next_state[state, u])
        pos += n_out
    for _ in range(trellis.memory):
        out[pos : pos + n_out] = trellis.outputs_pm[state, 0]
        state = int(trellis.next_state[state, 0])
        pos += n_out
    return out


@dataclass(frozen=True)
class Interleaver:
    """A fixed permutation known to both ends of the link."""

    permutation: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.permutation, dtype=np.int64)
        object.__setattr__(self, "permutation", perm)
        if not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValueError("permutation must be a bijection on [0, size)")

    @property
    def size(self) -> int:
        return self.permutation.size


def make_interleaver(size: int, rng: np.random.Generator) -> Interleaver:
    return Interleaver(rng.permutation(size))


def interleave(v, pi: Interleaver) -> np.ndarray:
    arr = np.asarray(v)
    if arr.size != pi.size:
        raise ValueError(f"vector length {arr.size} does not match interleaver size {pi.size}")
    return arr[pi.permutation]


def deinterleave(v, pi: Interleaver) -> np.ndarray:
    arr = np.asarray(v)
    if arr.size != pi.size:
        raise ValueError(f"vector length {arr.size} does not match interleaver size {pi.size}")
    out = np.empty_like(arr)
    out[pi.permutation] = arr
    return out


@dataclass(frozen=True)
class ChannelObservation:
    """Received samples plus the noise level they were produced with."""

    samples: np.ndarray
    noise_sigma: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if not np.isfinite(samples).all():
            raise ValueError("samples must be finite")
        if not self.noise_sigma > 0.0:
            raise ValueError("noise_sigma must be positive")


def sigma_from_ebn0(ebn0_db: float, rate: float) -> float:
    """Noise standard deviation for a given Eb/N0: sigma^2 = 1/(2 R Eb/N0)."""
    if rate <= 0.0:
        raise ValueError("rate must be positive")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


def awgn(d, sigma: float, rng: np.random.Generator) -> ChannelObservation:
    """Add white Gaussian noise of standard deviation sigma.

    sigma = 0 passes the input through bit-exactly; the observation then
    records SIGMA_FLOOR so downstream likelihoods stay finite.
    """
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    arr = np.asarray(d, dtype=float)
    samples = arr + sigma * rng.standard_normal(arr.size)
    return ChannelObservation(samples=samples, noise_sigma=max(sigma, SIGMA_FLOOR))


def prior_llr(soft_bits) -> np.ndarray:
    """Per-bit prior log-ratios ln((1+s)/(1-s)), clamped to +/-PRIOR_LLR_CLAMP."""
    soft = np.asarray(soft_bits, dtype=float)
    if soft.size and (soft.min() < -1.0 or soft.max() > 1.0):
        raise ValueError("soft bits must lie in [-1, 1]")
    with np.errstate(divide="ignore"):
        la = np.log1p(soft) - np.log1p(-soft)
    return np.clip(la, -PRIOR_LLR_CLAMP, PRIOR_LLR_CLAMP)


def app_decode(
    obs: ChannelObservation,
    trellis: TrellisSpec,
    a_priori,
    extrinsic: bool = False,
) -> np.ndarray:
    """Per-bit posteriors P(bit = +1 | observation, priors) by exact BCJR.

    Log-domain forward/backward with exact log-sum-exp. The Gaussian branch
    metric reduces to z.c/sigma^2 per symbol (constants cancel); priors enter
    as clamped log-ratios. The `memory` tail steps are forced to zero inputs,
    carry no prior, and produce no posterior. With extrinsic=True the prior
    log-ratio is subtracted from the posterior before mapping back to a
    probability (off by default: the receiver exchanges full posteriors).
    """
    z = np.asarray(obs.samples, dtype=float)
    prior = np.asarray(a_priori, dtype=float)
    n_out = trellis.n_out
    if z.size % n_out != 0:
        raise ValueError(f"observation length {z.size} is not a multiple of {n_out}")
    total = z.size // n_out
    m_info = total - trellis.memory
    if m_info < 1:
        raise ValueError("observation shorter than the tail")
    if prior.size != m_info:
        raise ValueError(f"prior length {prior.size} does not match info length {m_info}")

    la = prior_llr(prior)
    inv_var = 1.0 / (obs.noise_sigma ** 2)
    zr = z.reshape(total, n_out)
    bm = np.einsum("tj,suj->tsu", zr, trellis.outputs_pm) * inv_var
    bm[:m_info, :, 1] += 0.5 * la[:, None]
    bm[:m_info, :, 0] -= 0.5 * la[:, None]
    bm[m_info:, :, 1] = -np.inf

    llr = forward_backward_llr(bm, trellis.next_state)[:m_info]
    if extrinsic:
        llr = llr - la
    return expit(llr)
