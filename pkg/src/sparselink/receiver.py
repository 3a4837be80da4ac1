"""End-to-end transmit chain and the iterative receiver.

Coded mode: sparse signal -> 1-bit measurements -> interleave -> rate-1/2
convolutional code -> AWGN. The receiver alternates APP decoding (channel
domain) with the soft-in/soft-out sparse decoder (source domain), feeding
each side's soft bits back to the other. Uncoded mode transmits the
measurement signs directly and reconstructs from the hardened observation.
"""

from dataclasses import dataclass, field

import numpy as np

from . import channel, onebit, signals, softbits

EARLY_EXIT_TOL = 1e-6

_MODES = ("coded", "uncoded")


@dataclass(frozen=True)
class TrialConfig:
    """One Monte Carlo trial, fully determined by its seed."""

    n: int = 1000
    k: int = 10
    m: int = 500
    ebn0_db: float = 1.0
    iterations: int = 6
    mode: str = "coded"
    seed: int = 0
    solver: onebit.SolverParams = field(default_factory=onebit.SolverParams)
    phi_seed: int | None = None
    early_exit: bool = False
    extrinsic: bool = False

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if self.m < 1:
            raise ValueError("m must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")


@dataclass
class IterationTrace:
    """Per-iteration record of one trial.

    soft_in holds the a-priori soft bits entering the APP decoder (channel
    domain); soft_out the sparse decoder's output (source domain). Both are
    empty in uncoded mode, which has no soft interfaces.
    """

    signal_unit: np.ndarray
    estimates: list
    gammas: list
    l_bars: list
    soft_in: list
    soft_out: list
    converged_early: bool = False

    @property
    def iterations(self) -> int:
        return len(self.estimates)


def _trial_rngs(cfg: TrialConfig):
    root = np.random.SeedSequence(cfg.seed)
    sig_ss, phi_ss, pi_ss, noise_ss = root.spawn(4)
    if cfg.phi_seed is not None:
        phi_ss = np.random.SeedSequence(cfg.phi_seed)
    return tuple(np.random.default_rng(s) for s in (sig_ss, phi_ss, pi_ss, noise_ss))


def _unit(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    return v / norm if norm > 0.0 else np.zeros_like(v)


def run_trial_coded(cfg: TrialConfig) -> IterationTrace:
    """Transmit once, then iterate the APP <-> sparse-decoder loop."""
    if cfg.mode != "coded":
        raise ValueError("config mode is not 'coded'")
    rng_sig, rng_phi, rng_pi, rng_noise = _trial_rngs(cfg)
    trellis = channel.default_trellis()

    x = signals.generate_sparse_signal(cfg.n, cfg.k, rng_sig)
    phi = signals.generate_measurement_matrix(cfg.m, cfg.n, rng_phi)
    pi = channel.make_interleaver(cfg.m, rng_pi)
    b = onebit.binarize(onebit.measure(phi, x))
    d = channel.conv_encode(channel.interleave(b, pi), trellis)
    sigma = channel.sigma_from_ebn0(cfg.ebn0_db, trellis.rate)
    obs = channel.awgn(d, sigma, rng_noise)

    trace = IterationTrace(
        signal_unit=_unit(x.values),
        estimates=[], gammas=[], l_bars=[], soft_in=[], soft_out=[],
    )
    prior = np.zeros(cfg.m)
    previous = None
    for _ in range(cfg.iterations):
        trace.soft_in.append(prior)
        alpha = channel.app_decode(obs, trellis, prior, extrinsic=cfg.extrinsic)
        out = softbits.siso_decode(channel.deinterleave(alpha, pi), phi, cfg.k, cfg.solver)
        trace.estimates.append(out.estimate)
        trace.gammas.append(out.gamma)
        trace.l_bars.append(out.l_bar)
        trace.soft_out.append(out.soft_out)
        prior = channel.interleave(out.soft_out, pi)
        if (
            cfg.early_exit
            and previous is not None
            and float(np.linalg.norm(out.estimate - previous)) < EARLY_EXIT_TOL
        ):
            trace.converged_early = True
            break
        previous = out.estimate
    return trace


def run_trial_uncoded(cfg: TrialConfig) -> IterationTrace:
    """Baseline: measurement signs over AWGN at rate 1, hardened, no flip budget."""
    if cfg.mode != "uncoded":
        raise ValueError("config mode is not 'uncoded'")
    rng_sig, rng_phi, _, rng_noise = _trial_rngs(cfg)

    x = signals.generate_sparse_signal(cfg.n, cfg.k, rng_sig)
    phi = signals.generate_measurement_matrix(cfg.m, cfg.n, rng_phi)
    b = onebit.binarize(onebit.measure(phi, x))
    sigma = channel.sigma_from_ebn0(cfg.ebn0_db, 1.0)
    obs = channel.awgn(b, sigma, rng_noise)

    b_hat = onebit.binarize(obs.samples)
    rec = onebit.aop_f_reconstruct(phi, b_hat, cfg.k, 0, cfg.solver)
    return IterationTrace(
        signal_unit=_unit(x.values),
        estimates=[rec.estimate],
        gammas=[0.0],
        l_bars=[0],
        soft_in=[],
        soft_out=[],
    )


def run_trial(cfg: TrialConfig) -> IterationTrace:
    if cfg.mode == "coded":
        return run_trial_coded(cfg)
    return run_trial_uncoded(cfg)
