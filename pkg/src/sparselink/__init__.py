"""1-bit compressive sensing over a convolutional-coded AWGN link.

A sparse source is measured, sign-quantized, interleaved and protected by a
rate-1/2 G[5,7] convolutional code. The receiver alternates exact APP
decoding with a soft-in/soft-out sparse reconstruction that feeds back which
measurement signs it disbelieves. The sweep harness reproduces the
RSNR-vs-Eb/N0 behavior of the link, including the uncoded baseline.
"""

from .channel import (
    PRIOR_LLR_CLAMP,
    SIGMA_FLOOR,
    ChannelObservation,
    Interleaver,
    TrellisSpec,
    app_decode,
    awgn,
    conv_encode,
    default_trellis,
    deinterleave,
    interleave,
    make_interleaver,
    make_trellis,
    prior_llr,
    sigma_from_ebn0,
)
from .onebit import (
    FlipMask,
    ReconstructionResult,
    SolverParams,
    aop_f_reconstruct,
    binarize,
    is_hard_bits,
    measure,
    one_sided_objective,
    sign_pm,
)
from .receiver import (
    IterationTrace,
    TrialConfig,
    run_trial,
    run_trial_coded,
    run_trial_uncoded,
)
from .signals import (
    RSNR_CAP_DB,
    MeasurementEnsemble,
    RsnrAccumulator,
    SparseSignal,
    generate_measurement_matrix,
    generate_sparse_signal,
    rsnr_db,
)
from .softbits import (
    SisoOutput,
    compute_gamma,
    estimate_flip_count,
    flip_probabilities,
    harden,
    map_soft,
    siso_decode,
    soft_from_posterior,
)
from .sweep import (
    SweepConfig,
    SweepResult,
    SweepRow,
    emit_csv,
    emit_plot,
    run_sweep,
    trial_seed,
)

__version__ = "0.1.0"

__all__ = [
    "PRIOR_LLR_CLAMP",
    "RSNR_CAP_DB",
    "SIGMA_FLOOR",
    "ChannelObservation",
    "FlipMask",
    "Interleaver",
    "IterationTrace",
    "MeasurementEnsemble",
    "ReconstructionResult",
    "RsnrAccumulator",
    "SisoOutput",
    "SolverParams",
    "SparseSignal",
    "SweepConfig",
    "SweepResult",
    "SweepRow",
    "TrellisSpec",
    "TrialConfig",
    "aop_f_reconstruct",
    "app_decode",
    "awgn",
    "binarize",
    "compute_gamma",
    "conv_encode",
    "default_trellis",
    "deinterleave",
    "emit_csv",
    "emit_plot",
    "estimate_flip_count",
    "flip_probabilities",
    "generate_measurement_matrix",
    "generate_sparse_signal",
    "harden",
    "interleave",
    "is_hard_bits",
    "make_interleaver",
    "make_trellis",
    "map_soft",
    "measure",
    "one_sided_objective",
    "prior_llr",
    "rsnr_db",
    "run_sweep",
    "run_trial",
    "run_trial_coded",
    "run_trial_uncoded",
    "sigma_from_ebn0",
    "sign_pm",
    "siso_decode",
    "soft_from_posterior",
    "trial_seed",
]
