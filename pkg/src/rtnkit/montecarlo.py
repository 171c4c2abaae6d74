"""Exact-in-distribution telegraph path sampling and statistical estimators.

Paths are sampled event-by-event from exponential dwell times, so there is
no time-discretization bias and per-path cost is O(flips). Estimators
partition their samples into per-worker counter-based streams (numpy
Philox keyed by (seed, worker_index)) and merge worker moments in index
order, which makes every result bitwise reproducible for a fixed
(seed, n_samples, workers) triple regardless of scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import DRIVE, EvaluationPoint, PulseSchedule, TelegraphSource

_MASK64 = (1 << 64) - 1

# rejection sampling is refused below this conditional-probability floor
MIN_CONDITION_PROBABILITY = 1e-6


class InfeasibleConditionError(RuntimeError):
    """Rejection sampling would accept too rarely; use quadrature instead."""


def worker_stream(seed: int, worker: int) -> np.random.Generator:
    """Counter-based generator for one worker's sample block."""
    key = np.array([seed & _MASK64, worker & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _partition(n: int, workers: int) -> list[int]:
    base, extra = divmod(n, workers)
    return [base + 1 if i < extra else base for i in range(workers)]


def _map_blocks(fn, workers: int) -> list:
    if workers == 1:
        return [fn(0)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(workers)))


def _check_sampling_args(n_samples: int, seed: int, workers: int, minimum: int = 1) -> None:
    if n_samples < minimum:
        raise ValueError(f"n_samples must be >= {minimum}, got {n_samples}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")


def _start_probability(source: TelegraphSource, start: str) -> float:
    if start == "positive":
        return 1.0
    if start == "negative":
        return 0.0
    if start == "mixed":
        return source.p_plus
    raise ValueError(f"start must be 'positive', 'negative' or 'mixed', got {start!r}")


# ---------------------------------------------------------------------------
# path-level sampling


@dataclass(frozen=True)
class PathSample:
    """One simulated trajectory."""

    flip_times: tuple[float, ...]
    theta_final: float
    flip_count: int
    start_state: int
    end_state: int


def sample_path(source: TelegraphSource, t: float, rng: np.random.Generator) -> PathSample:
    """Draw one path: start state from p_plus, then exponential dwells,
    accumulating theta = delta * sum of signed dwell durations (the last
    one truncated at t)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    state = 1 if rng.random() < source.p_plus else -1
    start_state = state
    flip_times: list[float] = []
    elapsed = 0.0
    theta = 0.0
    while True:
        tau = source.tau_plus if state == 1 else source.tau_minus
        dwell = rng.exponential(tau)
        if elapsed + dwell >= t:
            theta += state * source.delta * (t - elapsed)
            break
        elapsed += dwell
        theta += state * source.delta * dwell
        flip_times.append(elapsed)
        state = -state
    bound = source.delta * t
    assert abs(theta) <= bound * (1.0 + 1e-9) + 1e-300
    return PathSample(
        flip_times=tuple(flip_times),
        theta_final=theta,
        flip_count=len(flip_times),
        start_state=start_state,
        end_state=state,
    )


def _evolve(rng, state, duration, tau_plus, tau_minus, theta=None, delta_eff=None, flips=None):
    """Advance all paths by `duration`, mutating state (and theta/flips)
    in place. tau/delta arguments may be scalars or per-path arrays."""
    n = state.shape[0]
    if duration <= 0.0 or n == 0:
        return
    taus_are_arrays = isinstance(tau_plus, np.ndarray)
    remaining = np.full(n, float(duration))
    active = np.arange(n)
    while active.size:
        s = state[active]
        if taus_are_arrays:
            scale = np.where(s == 1, tau_plus[active], tau_minus[active])
        else:
            scale = np.where(s == 1, tau_plus, tau_minus)
        dwell = rng.exponential(scale)
        rem = remaining[active]
        step = np.minimum(dwell, rem)
        if theta is not None:
            d = delta_eff[active] if isinstance(delta_eff, np.ndarray) else delta_eff
            theta[active] += d * s * step
        remaining[active] = rem - dwell
        cont = dwell < rem
        flipped = active[cont]
        if flips is not None:
            flips[flipped] += 1
        state[flipped] = -state[flipped]
        active = flipped


def _simulate_source_block(rng, n, source, t, p_start):
    state = np.where(rng.random(n) < p_start, 1, -1).astype(np.int8)
    start = state.copy()
    theta = np.zeros(n)
    flips = np.zeros(n, dtype=np.int64)
    _evolve(
        rng, state, t, source.tau_plus, source.tau_minus,
        theta=theta, delta_eff=source.delta, flips=flips,
    )
    return theta, flips, start, state


def simulate_batch(
    source: TelegraphSource,
    t: float,
    n_samples: int,
    seed: int = 0,
    workers: int = 1,
    start: str = "mixed",
):
    """Raw sampler: returns (theta, flips, start_states, end_states) arrays,
    concatenated in worker order. Memory is O(n_samples)."""
    _check_sampling_args(n_samples, seed, workers)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    p_start = _start_probability(source, start)
    counts = _partition(n_samples, workers)

    def run(w):
        return _simulate_source_block(worker_stream(seed, w), counts[w], source, t, p_start)

    parts = _map_blocks(run, workers)
    theta = np.concatenate([p[0] for p in parts])
    flips = np.concatenate([p[1] for p in parts])
    starts = np.concatenate([p[2] for p in parts])
    ends = np.concatenate([p[3] for p in parts])
    bound = source.delta * t
    assert np.all(np.abs(theta) <= bound * (1.0 + 1e-9) + 1e-300)
    return theta, flips, starts, ends


# ---------------------------------------------------------------------------
# moment pooling


class _Moments:
    """Streaming mean and sum of squared deviations with order-fixed merging."""

    __slots__ = ("n", "mean", "m2")

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add_array(self, x: np.ndarray) -> None:
        nb = x.size
        if nb == 0:
            return
        mb = float(x.mean())
        m2b = float(np.sum((x - mb) ** 2))
        self.merge_raw(nb, mb, m2b)

    def merge_raw(self, nb: int, mb: float, m2b: float) -> None:
        if self.n == 0:
            self.n, self.mean, self.m2 = nb, mb, m2b
            return
        n = self.n + nb
        d = mb - self.mean
        self.mean += d * nb / n
        self.m2 += m2b + d * d * self.n * nb / n
        self.n = n

    def merge(self, other: "_Moments") -> None:
        self.merge_raw(other.n, other.mean, other.m2)

    def std_error(self) -> float:
        if self.n < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


@dataclass(frozen=True)
class EstimatorResult:
    """Sample mean with a standard error (component-wise for complex)."""

    mean: float | complex
    std_error: float | complex
    n_samples: int
    seed: int
    workers: int = 1


def _pooled_complex_result(parts, n_samples, seed, workers) -> EstimatorResult:
    re, im = _Moments(), _Moments()
    for pre, pim in parts:
        re.merge(pre)
        im.merge(pim)
    return EstimatorResult(
        mean=complex(re.mean, im.mean),
        std_error=complex(re.std_error(), im.std_error()),
        n_samples=n_samples,
        seed=seed,
        workers=workers,
    )


# ---------------------------------------------------------------------------
# estimators


def estimate_char_fn(
    source: TelegraphSource,
    point: EvaluationPoint,
    start: str = "mixed",
    n_samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> EstimatorResult:
    """Sample mean of e^{i m theta} with per-component standard errors."""
    _check_sampling_args(n_samples, seed, workers, minimum=2)
    p_start = _start_probability(source, start)
    counts = _partition(n_samples, workers)

    def run(w):
        rng = worker_stream(seed, w)
        theta, _, _, _ = _simulate_source_block(rng, counts[w], source, point.t, p_start)
        re, im = _Moments(), _Moments()
        re.add_array(np.cos(point.m * theta))
        im.add_array(np.sin(point.m * theta))
        return re, im

    parts = _map_blocks(run, workers)
    return _pooled_complex_result(parts, n_samples, seed, workers)


def estimate_conditional(
    source: TelegraphSource,
    point: EvaluationPoint,
    f: int,
    n_samples: int = 10_000,
    seed: int = 0,
    workers: int = 1,
    func=None,
) -> EstimatorResult:
    """Mean of a statistic over paths with exactly f flips (rejection on
    flip count). func maps a theta array to sample values; the default is
    e^{i m theta}. Raises InfeasibleConditionError when the flip count is
    too improbable for rejection to be viable."""
    _check_sampling_args(n_samples, seed, workers, minimum=2)
    if f < 0:
        raise ValueError(f"flip count must be >= 0, got {f}")
    lam = 0.5 * (point.t / source.tau_plus + point.t / source.tau_minus)
    log_pf = -lam + f * math.log(lam) - math.lgamma(f + 1) if lam > 0 else (0.0 if f == 0 else -math.inf)
    p_f = math.exp(log_pf)
    if p_f < MIN_CONDITION_PROBABILITY:
        raise InfeasibleConditionError(
            f"P(flips = {f}) ~ {p_f:.2e} is below {MIN_CONDITION_PROBABILITY:.0e}; "
            "rejection sampling is impractical, integrate the flip-conditioned "
            "density instead"
        )
    p_start = _start_probability(source, "mixed")
    counts = _partition(n_samples, workers)
    complex_output = func is None

    def run(w):
        rng = worker_stream(seed, w)
        needed = counts[w]
        re, im = _Moments(), _Moments()
        drawn = 0
        budget = int(needed / p_f * 50) + 1_000_000
        while needed > 0:
            block = min(max(int(needed / p_f * 1.2) + 64, 1024), 1 << 20)
            theta, flips, _, _ = _simulate_source_block(rng, block, source, point.t, p_start)
            drawn += block
            kept = theta[flips == f][:needed]
            if kept.size:
                if complex_output:
                    re.add_array(np.cos(point.m * kept))
                    im.add_array(np.sin(point.m * kept))
                else:
                    re.add_array(np.asarray(func(kept), dtype=float))
                needed -= kept.size
            if drawn > budget:
                raise InfeasibleConditionError(
                    f"rejection acceptance for flips = {f} fell far below the "
                    "estimated rate; aborting"
                )
        return re, im

    parts = _map_blocks(run, workers)
    if complex_output:
        return _pooled_complex_result(parts, n_samples, seed, workers)
    re = _Moments()
    for pre, _ in parts:
        re.merge(pre)
    return EstimatorResult(
        mean=re.mean, std_error=re.std_error(),
        n_samples=n_samples, seed=seed, workers=workers,
    )


def estimate_schedule(
    schedule: PulseSchedule,
    source: TelegraphSource,
    m: float,
    n_samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> EstimatorResult:
    """Mean of e^{i m theta_total} over a drive/wait schedule.

    theta_total sums sign_k * integral of Y over each drive segment; the
    telegraph state evolves continuously through every segment (waits
    contribute no theta but do evolve the state), so cross-segment
    correlations are fully retained.
    """
    _check_sampling_args(n_samples, seed, workers, minimum=2)
    counts = _partition(n_samples, workers)

    def run(w):
        rng = worker_stream(seed, w)
        n = counts[w]
        state = np.where(rng.random(n) < source.p_plus, 1, -1).astype(np.int8)
        theta = np.zeros(n)
        for seg in schedule.segments:
            if seg.kind == DRIVE:
                _evolve(
                    rng, state, seg.duration, source.tau_plus, source.tau_minus,
                    theta=theta, delta_eff=seg.sign * source.delta,
                )
            else:
                _evolve(rng, state, seg.duration, source.tau_plus, source.tau_minus)
        re, im = _Moments(), _Moments()
        re.add_array(np.cos(m * theta))
        im.add_array(np.sin(m * theta))
        return re, im

    parts = _map_blocks(run, workers)
    return _pooled_complex_result(parts, n_samples, seed, workers)


def estimate_variance(
    source: TelegraphSource,
    t: float,
    n_samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> EstimatorResult:
    """Sample variance of theta with an approximate standard error
    sqrt((m4 - v^2)/n)."""
    _check_sampling_args(n_samples, seed, workers, minimum=2)
    theta, _, _, _ = simulate_batch(source, t, n_samples, seed=seed, workers=workers)
    return _variance_result(theta, n_samples, seed, workers)


def _variance_result(values: np.ndarray, n_samples, seed, workers) -> EstimatorResult:
    v = float(values.var(ddof=1))
    centered = values - values.mean()
    m4 = float(np.mean(centered**4))
    se = math.sqrt(max(m4 - v * v, 0.0) / values.size)
    return EstimatorResult(mean=v, std_error=se, n_samples=n_samples, seed=seed, workers=workers)


def sample_ensemble_theta(
    ensemble, t: float, n_realizations: int, seed: int = 0, workers: int = 1
) -> np.ndarray:
    """theta of the summed ensemble signal, one value per realization.

    Each realization draws r dwell times (log-uniform on the band, or
    power-law when alpha is set) and r amplitudes Normal(delta_mean,
    delta_sd), then runs r independent symmetric sources.
    """
    _check_sampling_args(n_realizations, seed, workers)
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")
    r = ensemble.r
    counts = _partition(n_realizations, workers)

    def run(w):
        rng = worker_stream(seed, w)
        n = counts[w] * r
        if n == 0:
            return np.zeros(0)
        if ensemble.alpha is not None:
            taus = ensemble.tau_b * rng.random(n) ** (1.0 / (ensemble.alpha - 1.0))
        elif ensemble.tau_a == ensemble.tau_b:
            taus = np.full(n, ensemble.tau_b)
        else:
            log_ratio = math.log(ensemble.tau_a / ensemble.tau_b)
            taus = ensemble.tau_b * np.exp(rng.random(n) * log_ratio)
        deltas = rng.normal(ensemble.delta_mean, ensemble.delta_sd, size=n)
        state = np.where(rng.random(n) < 0.5, 1, -1).astype(np.int8)
        theta = np.zeros(n)
        _evolve(rng, state, t, taus, taus, theta=theta, delta_eff=deltas)
        return theta.reshape(counts[w], r).sum(axis=1)

    return np.concatenate(_map_blocks(run, workers))


def estimate_ensemble_variance(
    ensemble, t: float, n_realizations: int, seed: int = 0, workers: int = 1
) -> EstimatorResult:
    """Sample variance of the summed ensemble theta across realizations."""
    _check_sampling_args(n_realizations, seed, workers, minimum=2)
    theta = sample_ensemble_theta(ensemble, t, n_realizations, seed=seed, workers=workers)
    return _variance_result(theta, n_realizations, seed, workers)
