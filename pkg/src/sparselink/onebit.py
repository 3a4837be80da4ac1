"""1-bit measurement and sparse recovery under a sign-flip budget.

The encoder keeps only the signs of a random projection. The decoder jointly
searches for a K-sparse unit vector and a set of at most L measurement signs
to disbelieve, minimizing the one-sided l1 consistency objective
sum_i max(0, -(b_i * omega_i * [Phi x]_i)).
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import biht_inner
from .signals import MeasurementEnsemble, SparseSignal


def sign_pm(v) -> np.ndarray:
    """Entrywise sign with sign(0) = +1, as +/-1.0 floats."""
    return np.where(np.asarray(v, dtype=float) >= 0.0, 1.0, -1.0)


def is_hard_bits(b) -> bool:
    """True when every entry is exactly -1 or +1."""
    arr = np.asarray(b, dtype=float)
    return bool(np.isin(arr, (-1.0, 1.0)).all())


@dataclass(frozen=True)
class FlipMask:
    """Entries set to -1 mark measurements treated as flipped; at most `budget` of them."""

    omega: np.ndarray
    budget: int

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        object.__setattr__(self, "omega", omega)
        if not is_hard_bits(omega):
            raise ValueError("omega entries must be -1 or +1")
        if int(np.sum(omega < 0)) > self.budget:
            raise ValueError("more flips than the budget allows")

    @property
    def flips(self) -> int:
        return int(np.sum(self.omega < 0))


@dataclass(frozen=True)
class SolverParams:
    """Knobs for the alternating reconstruction.

    tau is the gradient step (1.0 suits variance-1/M sensing rows).
    stall_rounds stops the outer alternation after that many consecutive
    rounds without improving the best objective; 0 disables the stall exit.
    restarts adds up to that many extra descent runs from deterministic
    alternative starting points when the first run ends short of a zero
    objective. 0 (the default) keeps the single matched-filter run. Useful
    on small problems where plain descent can lock onto a wrong support.
    """

    tau: float = 1.0
    max_inner: int = 100
    max_outer: int = 20
    stall_rounds: int = 2
    restarts: int = 0

    def __post_init__(self):
        if self.tau <= 0 or self.max_inner < 1 or self.max_outer < 1 or self.stall_rounds < 0:
            raise ValueError("invalid solver parameters")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")


@dataclass(frozen=True)
class ReconstructionResult:
    """Solver output: unit-norm estimate plus the flip mask it settled on.

    consistent means sign(Phi @ estimate) reproduces every kept measurement
    sign exactly (entries the mask flipped are excluded). degenerate flags
    the zero-estimate fallback, the only case where the norm is not 1.
    """

    estimate: np.ndarray
    flip_mask: FlipMask
    outer_iterations_used: int
    consistent: bool
    objective: float
    degenerate: bool = False


def measure(phi: MeasurementEnsemble, x) -> np.ndarray:
    """Linear measurements Phi @ x. Accepts a SparseSignal or a plain vector."""
    vec = x.values if isinstance(x, SparseSignal) else np.asarray(x, dtype=float)
    if vec.ndim != 1 or vec.size != phi.n:
        raise ValueError(f"signal length {vec.size} does not match matrix columns {phi.n}")
    return phi.matrix @ vec


def binarize(y) -> np.ndarray:
    """Keep only measurement signs (the 1-bit quantizer), sign(0) = +1."""
    return sign_pm(y)


def one_sided_objective(phi: MeasurementEnsemble, b_tilde, omega, x) -> float:
    """sum_i max(0, -(b_i * omega_i * [Phi x]_i)): mass of violated signs."""
    v = np.asarray(b_tilde, float) * np.asarray(omega, float) * measure(phi, x)
    return float(np.sum(np.maximum(0.0, -v)))


def _objective_of(v) -> float:
    return float(np.sum(np.maximum(0.0, -v)))


def _hard_threshold(v: np.ndarray, k: int) -> np.ndarray:
    """Keep the k largest-magnitude entries (ties to the lowest index), zero the rest."""
    order = np.argsort(-np.abs(v), kind="stable")[:k]
    out = np.zeros_like(v)
    out[order] = v[order]
    return out


def _sparse_measure(matrix: np.ndarray, x: np.ndarray) -> np.ndarray:
    supp = np.flatnonzero(x)
    if supp.size == 0:
        return np.zeros(matrix.shape[0])
    return matrix[:, supp] @ x[supp]


def _best_flip_mask(v: np.ndarray, l_budget: int) -> np.ndarray:
    """Flip the at most l_budget most-negative strict violations of v = b * Phi x.

    Ties break toward the lowest index. This is the exact minimizer of the
    objective over masks within budget, for the given x.
    """
    omega = np.ones(v.size)
    if l_budget > 0:
        order = np.argsort(v, kind="stable")
        chosen = order[v[order] < 0.0][:l_budget]
        omega[chosen] = -1.0
    return omega


def _descend(mat, mat_t, b, k, l_budget, params, x_start):
    """One alternating run from a unit-norm start.

    Tracks the best (estimate, mask) pair by the objective at unit norm,
    seeding it with the flip-optimal mask for the start point so the returned
    mask is always optimal for the returned estimate. The running mask starts
    with every sign trusted; flips only enter after a full inner run has been
    scored. Returns (best_x, best_omega, best_obj, rounds_used).
    """
    x_unit = x_start
    y = _sparse_measure(mat, x_unit)
    omega0 = _best_flip_mask(b * y, l_budget)
    best_obj = _objective_of(b * omega0 * y)
    best_x, best_omega = x_unit, omega0

    omega = np.ones(mat.shape[0])
    x_run = x_unit.copy()
    rounds = 0
    stall = 0
    for _ in range(params.max_outer):
        if best_obj == 0.0:
            break
        rounds += 1
        biht_inner(mat, mat_t, b * omega, x_run, k, params.tau, params.max_inner)
        norm = float(np.linalg.norm(x_run))
        if norm == 0.0:
            break
        x_unit = x_run / norm
        y = _sparse_measure(mat, x_unit)
        omega = _best_flip_mask(b * y, l_budget)
        obj = _objective_of(b * omega * y)
        if obj < best_obj:
            best_obj, best_x, best_omega = obj, x_unit, omega
            stall = 0
        else:
            stall += 1
            if params.stall_rounds and stall >= params.stall_rounds:
                break
    return best_x, best_omega, best_obj, rounds


def _restart_starts(mf, mat_t, b, k):
    """Deterministic alternative unit-norm starts for escaping a bad basin.

    Every start is an odd function of b, so negating the measurements negates
    the whole start family and descent trajectories mirror exactly. Ordered
    roughly by how often each family rescues a stuck run: anchor-plus-partner
    supports, single spikes, rank-masked matched filters, then matched filters
    on measurement subsets.
    """
    n = mf.size
    m = b.size
    rank = np.argsort(-np.abs(mf), kind="stable")
    starts = []

    if k >= 2:
        # keep the top k-1 matched-filter coords, sweep every other index in
        # as the remaining support member
        anchors = rank[: k - 1]
        base = np.zeros(n)
        base[anchors] = mf[anchors]
        anchor_set = set(int(a) for a in anchors)
        for j in rank:
            if int(j) in anchor_set or mf[j] == 0.0:
                continue
            x = base.copy()
            x[j] = mf[j]
            norm = float(np.linalg.norm(x))
            if norm > 0.0:
                starts.append(x / norm)

    for j in rank:
        if mf[j] == 0.0:
            continue
        x = np.zeros(n)
        x[j] = 1.0 if mf[j] > 0 else -1.0
        starts.append(x)

    for r in range(1, min(n - k, 8) + 1):
        masked = mf.copy()
        masked[rank[:r]] = 0.0
        x = _hard_threshold(masked, k)
        norm = float(np.linalg.norm(x))
        if norm > 0.0:
            starts.append(x / norm)

    if m >= 8:
        for blk in range(4):
            keep = np.flatnonzero(np.arange(m) % 4 != blk)
            x = _hard_threshold(mat_t[:, keep] @ b[keep], k)
            norm = float(np.linalg.norm(x))
            if norm > 0.0:
                starts.append(x / norm)

    return starts


def aop_f_reconstruct(
    phi: MeasurementEnsemble,
    b_tilde,
    k: int,
    l_budget: int,
    params: SolverParams | None = None,
) -> ReconstructionResult:
    """Recover a K-sparse unit vector from possibly-corrupted measurement signs.

    Alternates two blocks, starting from the matched-filter estimate
    hard_threshold_k(Phi^T b) (normalized) with no flips assumed:

    1. inner: up to max_inner one-sided BIHT steps with the flip mask fixed;
    2. mask: re-rank violations of the current estimate and flip the at most
       l_budget most negative ones.

    Returns the best (estimate, mask) pair seen, judged by the objective at
    unit norm; stops early on a zero objective or when stall_rounds outer
    rounds pass without improvement. With params.restarts > 0 and a nonzero
    objective after the first run, retries from up to that many deterministic
    alternative starts and keeps the overall best.
    """
    if params is None:
        params = SolverParams()
    b = np.asarray(b_tilde, dtype=float)
    if b.ndim != 1 or b.size != phi.m:
        raise ValueError(f"measurement length {b.size} does not match matrix rows {phi.m}")
    if not is_hard_bits(b):
        raise ValueError("b_tilde entries must be -1 or +1")
    if k < 1 or k > phi.n:
        raise ValueError(f"need 1 <= k <= {phi.n}, got {k}")
    if l_budget < 0 or l_budget > phi.m:
        raise ValueError(f"need 0 <= l_budget <= {phi.m}, got {l_budget}")

    mat = np.ascontiguousarray(phi.matrix)
    mat_t = np.ascontiguousarray(phi.matrix.T)

    mf = mat_t @ b
    x0 = _hard_threshold(mf, k)
    norm0 = float(np.linalg.norm(x0))
    if norm0 == 0.0:
        # matched filter vanished; nothing to normalize
        omega = np.ones(phi.m)
        return ReconstructionResult(
            estimate=np.zeros(phi.n),
            flip_mask=FlipMask(omega, l_budget),
            outer_iterations_used=0,
            consistent=bool(np.all(b > 0)),
            objective=0.0,
            degenerate=True,
        )

    best_x, best_omega, best_obj, rounds = _descend(
        mat, mat_t, b, k, l_budget, params, x0 / norm0
    )
    outer_used = rounds

    if params.restarts > 0 and best_obj > 0.0:
        for x_start in _restart_starts(mf, mat_t, b, k)[: params.restarts]:
            x, om, obj, rounds = _descend(mat, mat_t, b, k, l_budget, params, x_start)
            outer_used += rounds
            if obj < best_obj:
                best_x, best_omega, best_obj = x, om, obj
            if best_obj == 0.0:
                break

    y_best = _sparse_measure(mat, best_x)
    kept = b * best_omega
    violated = ((kept > 0) & (y_best < 0)) | ((kept < 0) & (y_best >= 0))
    return ReconstructionResult(
        estimate=best_x,
        flip_mask=FlipMask(best_omega, l_budget),
        outer_iterations_used=outer_used,
        consistent=not bool(violated.any()),
        objective=best_obj,
    )
