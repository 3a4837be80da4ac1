"""Posterior-to-soft-bit conversions and the soft-in/soft-out sparse decoder."""

import math

import numpy as np
import pytest
from numpy.random import default_rng

from sparselink.onebit import SolverParams, binarize, measure, sign_pm
from sparselink.signals import generate_measurement_matrix, generate_sparse_signal
from sparselink.softbits import (
    compute_gamma,
    estimate_flip_count,
    flip_probabilities,
    harden,
    map_soft,
    siso_decode,
    soft_from_posterior,
)


def test_soft_from_posterior_endpoints():
    assert soft_from_posterior([1.0]) == pytest.approx([1.0])
    assert soft_from_posterior([0.0]) == pytest.approx([-1.0])
    assert soft_from_posterior([0.5]) == pytest.approx([0.0])


def test_soft_from_posterior_hand_values():
    assert np.allclose(soft_from_posterior([0.9, 0.25]), [0.8, -0.5], atol=1e-15)


def test_soft_from_posterior_rejects_bad_probabilities():
    with pytest.raises(ValueError):
        soft_from_posterior([1.2])
    with pytest.raises(ValueError):
        soft_from_posterior([-0.1])
    with pytest.raises(ValueError):
        soft_from_posterior([np.nan])


def test_harden_values():
    assert np.array_equal(harden([0.8, -0.5]), [1.0, -1.0])
    assert np.array_equal(harden(np.zeros(5)), np.ones(5))


def test_harden_flips_exactly_below_half():
    grid = np.linspace(0.0, 1.0, 201)
    hard = harden(soft_from_posterior(grid))
    assert np.array_equal(hard, np.where(grid < 0.5, -1.0, 1.0))


def test_flip_probabilities_branches():
    assert flip_probabilities([1.0]) == pytest.approx([0.0])
    assert flip_probabilities([0.5]) == pytest.approx([0.5])
    assert np.allclose(flip_probabilities([0.9, 0.2]), [0.1, 0.2], atol=1e-15)
    rng = default_rng(1)
    alpha = rng.uniform(0.0, 1.0, 500)
    flips = flip_probabilities(alpha)
    assert flips.min() >= 0.0 and flips.max() <= 0.5
    assert np.allclose(flips, np.minimum(alpha, 1.0 - alpha), atol=1e-15)


def test_flip_count_rounding():
    assert estimate_flip_count([]) == 0
    assert estimate_flip_count(np.zeros(7)) == 0
    assert estimate_flip_count([0.4, 0.4]) == 1
    # exact half must round up, not to even
    assert estimate_flip_count([0.25, 0.25]) == 1
    assert estimate_flip_count([0.5, 0.5, 0.25, 0.25]) == 2


def test_flip_count_rejects_out_of_range():
    with pytest.raises(ValueError):
        estimate_flip_count([0.6])
    with pytest.raises(ValueError):
        estimate_flip_count([-0.01])


def test_gamma_values():
    assert compute_gamma(np.array([1.0, -1.0, 1.0, 1.0])) == 0.0
    assert compute_gamma(np.zeros(6)) == pytest.approx(1.0)
    want = math.sqrt(0.8) / 2.0
    assert compute_gamma([1.0, 0.6, -0.2, -1.0]) == pytest.approx(want, abs=1e-15)


def test_gamma_of_hardened_vector_is_zero():
    rng = default_rng(2)
    for _ in range(20):
        v = rng.uniform(-1.0, 1.0, int(rng.integers(1, 40)))
        assert compute_gamma(harden(v)) == 0.0


def test_map_soft_certainty_limit():
    out = map_soft(np.array([3.0, 0.5, 0.0]), 0.0)
    assert np.array_equal(out, np.ones(3))


def test_map_soft_worst_violation_is_minus_one():
    out = map_soft(np.array([2.0, -3.0, -1.0]), 0.4)
    assert out[1] == -1.0
    assert -1.0 < out[2] < 0.0


def test_map_soft_hand_example():
    out = map_soft(np.array([4.0, 1.0, -2.0, -0.5]), 0.5)
    assert np.allclose(out, [1.0, 0.5, -1.0, -0.25], atol=1e-15)


def test_map_soft_rejects_bad_gamma():
    with pytest.raises(ValueError):
        map_soft(np.array([1.0]), -0.1)
    with pytest.raises(ValueError):
        map_soft(np.array([1.0]), 1.5)


def test_map_soft_stays_in_range():
    rng = default_rng(3)
    for _ in range(50):
        psi = rng.standard_normal(int(rng.integers(1, 60))) * 10.0 ** rng.integers(-3, 4)
        gamma = float(rng.uniform(0.0, 1.0))
        out = map_soft(psi, gamma)
        assert out.min() >= -1.0 and out.max() <= 1.0


def test_map_soft_monotone_in_each_entry():
    # raising one interior entry never lowers its mapped value while the
    # vector max and min stay where they are
    rng = default_rng(4)
    for _ in range(30):
        psi = np.sort(rng.standard_normal(8))
        gamma = float(rng.uniform(0.05, 1.0))
        base = map_soft(psi, gamma)
        for idx in range(1, 7):
            bumped = psi.copy()
            top = psi[7] if idx < 7 else np.inf
            bumped[idx] = min(psi[idx] + 0.1 * abs(psi[idx]) + 1e-6, 0.5 * (psi[idx] + top))
            out = map_soft(bumped, gamma)
            assert out[idx] >= base[idx] - 1e-12


def _consistent_posteriors(seed, n=64, k=3, m=32):
    rng = default_rng(seed)
    sig = generate_sparse_signal(n, k, rng)
    phi = generate_measurement_matrix(m, n, rng)
    b = binarize(measure(phi, sig))
    return phi, b, np.where(b > 0, 1.0, 0.0)


def test_siso_certain_consistent_posteriors_pass_through():
    # binary posteriors that agree with an actual sparse signal: no flip
    # budget, gamma 0, and the output reproduces the input soft bits exactly
    phi, b, alpha = _consistent_posteriors(10)
    out = siso_decode(alpha, phi, 3)
    assert out.l_bar == 0
    assert out.gamma == 0.0
    assert out.reconstruction.consistent
    assert np.all(out.hard * out.remeasured >= 0.0)
    assert np.array_equal(out.soft_out, soft_from_posterior(alpha))
    assert np.array_equal(out.soft_out, b)


def test_siso_fixed_point_for_binary_inputs():
    for seed in (11, 12, 13):
        phi, b, alpha = _consistent_posteriors(seed)
        out = siso_decode(alpha, phi, 3)
        if out.reconstruction.consistent:
            assert np.array_equal(out.soft_out, soft_from_posterior(alpha))


def test_siso_maximal_uncertainty():
    phi, b, _ = _consistent_posteriors(14)
    out = siso_decode(np.full(phi.m, 0.5), phi, 3)
    assert out.l_bar == 16
    assert out.gamma == pytest.approx(1.0)


def test_siso_flags_injected_sign_errors():
    """Hand-built posteriors with two wrong high-confidence claims.

    The two most deeply negative measurements claim +1 at confidence 0.8;
    the remaining thirty carry 0.95 confidence in the correct sign. The flip
    probabilities then sum to 30*0.05 + 2*0.2 = 1.9, so the estimated budget
    is 2, matching the number of injected errors. With that budget the solver
    rejects the two bad constraints and the re-measurement contradicts them,
    driving the output soft bits at exactly those positions negative.
    """
    rng = default_rng(7106)
    sig = generate_sparse_signal(64, 3, rng)
    phi = generate_measurement_matrix(32, 64, rng)
    y = measure(phi, sig)
    b = binarize(y)
    injected = np.argsort(y)[:2]
    assert np.array_equal(np.sort(injected), [7, 20])
    alpha = np.where(b > 0, 0.95, 0.05)
    alpha[injected] = 0.8

    out = siso_decode(alpha, phi, 3)
    assert out.l_bar == estimate_flip_count(flip_probabilities(alpha)) == 2
    assert out.gamma == pytest.approx(math.sqrt(0.62 / 32.0), abs=1e-12)
    assert np.all(out.hard[injected] == 1.0)
    assert np.all(out.soft_out[injected] < 0.0)


def test_siso_output_is_internally_recomputable():
    rng = default_rng(15)
    phi = generate_measurement_matrix(24, 48, rng)
    alpha = rng.uniform(0.0, 1.0, 24)
    out = siso_decode(alpha, phi, 4)
    psi = out.hard * out.remeasured
    again = map_soft(psi, out.gamma) * out.hard
    assert np.array_equal(out.soft_out, again)
    assert 0.0 <= out.gamma <= 1.0
    assert 0 <= out.l_bar <= 24
    assert out.soft_out.min() >= -1.0 and out.soft_out.max() <= 1.0


def test_siso_contradicts_disbelieved_measurements():
    # wherever the re-measured value opposes the hard decision, the output
    # soft bit must carry the opposite sign of that hard decision
    rng = default_rng(16)
    hits = 0
    for _ in range(10):
        phi = generate_measurement_matrix(20, 40, rng)
        alpha = rng.uniform(0.05, 0.95, 20)
        out = siso_decode(alpha, phi, 3)
        psi = out.hard * out.remeasured
        wrong = psi < 0.0
        hits += int(np.sum(wrong))
        assert np.all(out.soft_out[wrong] * out.hard[wrong] < 0.0)
    assert hits > 0


def test_siso_rejects_mismatched_lengths():
    phi = generate_measurement_matrix(10, 20, default_rng(17))
    with pytest.raises(ValueError):
        siso_decode(np.full(9, 0.5), phi, 2)
    with pytest.raises(ValueError):
        siso_decode(np.full(10, 1.5), phi, 2)


def test_siso_propagates_solver_errors():
    phi = generate_measurement_matrix(10, 20, default_rng(18))
    with pytest.raises(ValueError):
        siso_decode(np.full(10, 0.5), phi, 0)
