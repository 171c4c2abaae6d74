import math

import numpy as np
import pytest
from scipy.stats import chisquare, poisson

from rtnkit.analytic import (
    cos_expectation_symmetric,
    char_fn_general,
    conditional_char_fn_symmetric,
    conditional_moment,
    density_eval,
    variance_symmetric,
)
from rtnkit.model import EvaluationPoint, PulseSchedule, Segment, TelegraphSource, waiting_schedule
from rtnkit.montecarlo import (
    InfeasibleConditionError,
    estimate_char_fn,
    estimate_conditional,
    estimate_schedule,
    estimate_variance,
    sample_path,
    simulate_batch,
    worker_stream,
)

SYM = TelegraphSource.symmetric(1.0, 1.0)


class TestSamplePath:
    def test_zero_amplitude_gives_zero_theta(self):
        rng = worker_stream(1, 0)
        for _ in range(50):
            path = sample_path(TelegraphSource.symmetric(0.0, 1.0), 2.0, rng)
            assert path.theta_final == 0.0

    def test_path_structure(self):
        rng = worker_stream(2, 0)
        for _ in range(200):
            path = sample_path(SYM, 3.0, rng)
            assert path.flip_count == len(path.flip_times)
            assert all(0.0 < a < 3.0 for a in path.flip_times)
            assert all(a < b for a, b in zip(path.flip_times, path.flip_times[1:]))
            expected_end = path.start_state * (-1) ** path.flip_count
            assert path.end_state == expected_end
            assert abs(path.theta_final) <= 3.0 * (1 + 1e-12)

    def test_forced_start_state(self):
        rng = worker_stream(3, 0)
        src = TelegraphSource(1.0, 1.0, 1.0, p_plus=1.0)
        assert all(sample_path(src, 1.0, rng).start_state == 1 for _ in range(20))

    def test_zero_duration(self):
        rng = worker_stream(4, 0)
        path = sample_path(SYM, 0.0, rng)
        assert path.theta_final == 0.0 and path.flip_count == 0


class TestSimulateBatch:
    def test_flip_counts_are_poisson(self):
        lam = 2.0
        n = 1_000_000
        _, flips, _, _ = simulate_batch(SYM, lam, n, seed=10, workers=4)
        # bins 0..8 plus a folded >= 9 tail; every expected count >> 5
        obs = np.array([np.sum(flips == k) for k in range(9)] + [np.sum(flips >= 9)], float)
        pk = poisson.pmf(np.arange(9), lam)
        exp = np.append(pk, 1.0 - pk.sum()) * n
        stat, p = chisquare(obs, exp)
        assert p > 0.001

    def test_no_flip_probability_positive_start(self):
        src = TelegraphSource(1.0, 0.5, 2.0, p_plus=1.0)
        t = 1.0
        _, flips, _, _ = simulate_batch(src, t, 1_000_000, seed=11, workers=4)
        p_hat = float(np.mean(flips == 0))
        p_true = math.exp(-t / src.tau_plus)
        se = math.sqrt(p_true * (1 - p_true) / flips.size)
        assert abs(p_hat - p_true) <= 4 * se

    def test_theta_bound_holds(self):
        theta, _, _, _ = simulate_batch(SYM, 2.5, 100_000, seed=12, workers=2)
        assert np.all(np.abs(theta) <= 2.5 * (1 + 1e-12))

    def test_end_state_parity(self):
        _, flips, starts, ends = simulate_batch(SYM, 1.5, 10_000, seed=13)
        assert np.all(ends == starts * (-1) ** (flips % 2))

    def test_histogram_matches_density(self):
        src = TelegraphSource(1.0, 0.5, 2.0, p_plus=1.0)
        t = 1.0
        n = 2_000_000
        theta, flips, _, _ = simulate_batch(src, t, n, seed=14, workers=4)
        interior = theta[flips >= 1]
        edges = np.linspace(-1.0, 1.0, 41)
        counts, _ = np.histogram(interior, bins=edges)
        width = edges[1] - edges[0]
        for k in range(len(counts)):
            mid = 0.5 * (edges[k] + edges[k + 1])
            # grid-average the density across the bin
            xs = np.linspace(edges[k] + width / 6, edges[k + 1] - width / 6, 3)
            dens = np.mean([density_eval(src, t, float(x))["continuous_part"] for x in xs])
            p_bin = dens * width
            se = math.sqrt(max(p_bin * (1 - p_bin), 1e-12) / n)
            assert abs(counts[k] / n - p_bin) <= 4 * se + 2e-5, f"bin {k} at {mid}"

    def test_density_at_origin_against_fine_histogram(self):
        # narrow center bin (width 0.01 theta_c) at 1e7 paths
        src = TelegraphSource(1.0, 0.5, 2.0, p_plus=1.0)
        t, n, half = 1.0, 10_000_000, 0.005
        theta, flips, _, _ = simulate_batch(src, t, n, seed=15, workers=8)
        count = int(np.sum((np.abs(theta) < half) & (flips >= 1)))
        p_hat = count / n
        dens = density_eval(src, t, 0.0)["continuous_part"]
        p_true = dens * 2 * half
        se = math.sqrt(p_true * (1 - p_true) / n)
        assert abs(p_hat - p_true) <= 4 * se


class TestEstimateCharFn:
    def test_m_zero_exact(self):
        est = estimate_char_fn(SYM, EvaluationPoint(0.0, 1.0), "mixed", 1000, seed=1)
        assert est.mean == 1.0 + 0.0j
        assert est.std_error == 0.0 + 0.0j

    def test_reproducible_bitwise(self):
        a = estimate_char_fn(SYM, EvaluationPoint(1.0, 1.0), "mixed", 50_000, seed=5, workers=3)
        b = estimate_char_fn(SYM, EvaluationPoint(1.0, 1.0), "mixed", 50_000, seed=5, workers=3)
        assert a == b

    def test_worker_partition_changes_stream(self):
        a = estimate_char_fn(SYM, EvaluationPoint(1.0, 1.0), "mixed", 50_000, seed=5, workers=1)
        b = estimate_char_fn(SYM, EvaluationPoint(1.0, 1.0), "mixed", 50_000, seed=5, workers=5)
        assert a.mean != b.mean  # different partitions, both valid estimates

    def test_symmetric_mixed_imaginary_is_noise(self):
        est = estimate_char_fn(SYM, EvaluationPoint(1.3, 1.0), "mixed", 200_000, seed=6, workers=4)
        assert abs(est.mean.imag) <= 4 * est.std_error.imag

    def test_agrees_with_closed_form(self):
        for seed, (lam, m) in enumerate([(0.3, 0.5), (1.0, 1.0), (5.0, 2.0)]):
            src = TelegraphSource.symmetric(1.0, 1.0)
            point = EvaluationPoint(m, lam)
            est = estimate_char_fn(src, point, "mixed", 400_000, seed=20 + seed, workers=4)
            exact = cos_expectation_symmetric(src, point)
            assert abs(exact - est.mean.real) <= 4 * est.std_error.real

    def test_asymmetric_positive_start(self):
        src = TelegraphSource(1.0, 2.0, 0.5, p_plus=1.0)
        point = EvaluationPoint(1.0, 1.0)
        est = estimate_char_fn(src, point, "positive", 400_000, seed=30, workers=4)
        exact = char_fn_general(src, point, "positive")
        assert abs(exact.real - est.mean.real) <= 4 * est.std_error.real
        assert abs(exact.imag - est.mean.imag) <= 4 * est.std_error.imag

    def test_rejects_tiny_samples(self):
        with pytest.raises(ValueError):
            estimate_char_fn(SYM, EvaluationPoint(1.0, 1.0), "mixed", 1, seed=0)


class TestEstimateConditional:
    def test_zero_flips_exact_cos(self):
        point = EvaluationPoint(2.0, 1.0)
        est = estimate_conditional(SYM, point, 0, 5_000, seed=40)
        assert est.mean.real == pytest.approx(math.cos(2.0), abs=1e-13)
        assert est.std_error.real < 1e-15

    def test_second_moment_one_flip(self):
        point = EvaluationPoint(1.0, 1.0)
        est = estimate_conditional(SYM, point, 1, 100_000, seed=41, workers=4, func=lambda th: th**2)
        ref = conditional_moment(1.0, 2, 1)
        assert abs(est.mean - ref) <= 4 * est.std_error

    def test_char_fn_three_flips(self):
        point = EvaluationPoint(2.0, 1.0)
        est = estimate_conditional(SYM, point, 3, 100_000, seed=42, workers=4)
        ref = conditional_char_fn_symmetric(1.0, 2.0, 3)
        assert abs(est.mean.real - ref) <= 4 * est.std_error.real

    def test_infeasible_rejection_raises(self):
        point = EvaluationPoint(1.0, 1.0)  # lam = 1, P(40 flips) ~ 1e-42
        with pytest.raises(InfeasibleConditionError):
            estimate_conditional(SYM, point, 40, 1000, seed=43)


class TestEstimateSchedule:
    def test_single_drive_equals_char_fn_estimate(self):
        sched = PulseSchedule((Segment(1.0),))
        a = estimate_schedule(sched, SYM, 1.0, 50_000, seed=50, workers=2)
        point = EvaluationPoint(1.0, 1.0)
        exact = cos_expectation_symmetric(SYM, point)
        assert abs(a.mean.real - exact) <= 4 * a.std_error.real

    def test_long_wait_factorizes(self):
        # two drives separated by a wait >> tau behave as independent halves
        sched = waiting_schedule(1.0, 2, wait=60.0)
        est = estimate_schedule(sched, SYM, 1.0, 400_000, seed=51, workers=4)
        half = cos_expectation_symmetric(SYM, EvaluationPoint(1.0, 0.5))
        assert abs(est.mean.real - half * half) <= 4 * est.std_error.real
        assert abs(est.mean.imag) <= 4 * est.std_error.imag

    def test_zero_duration_segments_noop(self):
        sched = PulseSchedule((Segment(0.0), Segment(1.0), Segment(0.0, "wait")))
        est = estimate_schedule(sched, SYM, 1.0, 50_000, seed=52)
        ref = estimate_schedule(PulseSchedule((Segment(1.0),)), SYM, 1.0, 50_000, seed=52)
        assert est.mean == ref.mean

    def test_reproducible(self):
        sched = waiting_schedule(1.0, 3, wait=2.0)
        a = estimate_schedule(sched, SYM, 1.0, 30_000, seed=53, workers=3)
        b = estimate_schedule(sched, SYM, 1.0, 30_000, seed=53, workers=3)
        assert a == b


class TestEstimateVariance:
    def test_matches_closed_form_on_grid(self):
        grid = [(1.0, 1.0, 1.0), (1.0, 0.2, 1.0), (0.5, 3.0, 2.0), (2.0, 1.0, 0.3), (1.0, 0.05, 5.0)]
        for seed, (delta, tau, t) in enumerate(grid):
            src = TelegraphSource.symmetric(delta, tau)
            est = estimate_variance(src, t, 1_000_000, seed=60 + seed, workers=4)
            assert abs(est.mean - variance_symmetric(src, t)) <= 4 * est.std_error
