"""Analytic evaluation of the two pulse-based error-suppression strategies.

Waiting method: split the drive into n segments separated by waits much
longer than the correlation time, so each segment sees an independent,
equilibrated telegraph; the leading error rate drops like 1/n.

Suppression method: split the drive into n contiguous segments with the
effective noise sign reversed between neighbours (conjugation by a gate
that anti-commutes with the noise generator); the leading error rate
drops like 2 lam / n^2.

Two compositions are provided for the suppression method: paper_approx
multiplies start-conditioned per-segment expectations as if segments were
independent, while exact_transfer propagates a two-component
state-resolved expectation vector through the segments and keeps the
cross-segment correlation the product form drops.
"""

from __future__ import annotations

import math

import numpy as np

from .analytic import _char_fn_positive, _exp_scaled_pair, cos_expectation_symmetric
from .model import DRIVE, EvaluationPoint, PulseSchedule, TelegraphSource, suppression_schedule

WAITING_MODES = ("exact", "leading_order")
SUPPRESSION_MODES = ("exact_transfer", "paper_approx")


def waiting_method_expectation(
    source: TelegraphSource, m: float, t: float, n: int, mode: str = "exact"
) -> float:
    """E[cos(m theta_total)] for n equal drive segments with randomizing
    waits in between: the n-th power of the single-segment closed form.
    E[sin] = 0 by symmetry. leading_order gives 1 - m^2 delta^2 t^2 / (2n).
    """
    if not source.is_symmetric:
        raise ValueError("the waiting method assumes a symmetric source")
    if n < 1:
        raise ValueError(f"segment count must be >= 1, got {n}")
    if mode not in WAITING_MODES:
        raise ValueError(f"mode must be one of {WAITING_MODES}, got {mode!r}")
    if mode == "leading_order":
        return 1.0 - (m * source.delta * t) ** 2 / (2.0 * n)
    segment = cos_expectation_symmetric(source, EvaluationPoint(m=m, t=t / n))
    return segment**n


def transfer_matrix(source: TelegraphSource, m: float, d: float) -> np.ndarray:
    """State-resolved segment expectations: entry [a, b] is
    E[e^{i m theta_seg} indicator(end state b) | start state a], with index
    0 = positive, 1 = negative. Rows sum to the start-conditioned
    characteristic function; m = 0 gives the plain transition matrix.
    """
    if d < 0:
        raise ValueError(f"segment duration must be >= 0, got {d}")
    lam_p = d / source.tau_plus
    lam_m = d / source.tau_minus
    z = m * source.delta * d
    cosh_term, sinch_term = _exp_scaled_pair(lam_m, lam_p, z)
    zc = complex(0.5 * (lam_m - lam_p), z)
    return np.array(
        [
            [cosh_term + zc * sinch_term, lam_p * sinch_term],
            [lam_m * sinch_term, cosh_term - zc * sinch_term],
        ]
    )


def schedule_expectation_transfer(
    schedule: PulseSchedule, source: TelegraphSource, m: float
) -> complex:
    """E[e^{i m theta_total}] over an arbitrary schedule by transfer-matrix
    composition; waits use the m = 0 matrix. Start weights come from
    source.p_plus."""
    w = np.array([source.p_plus, 1.0 - source.p_plus], dtype=complex)
    for seg in schedule.segments:
        mu = m * seg.sign if seg.kind == DRIVE else 0.0
        w = w @ transfer_matrix(source, mu, seg.duration)
    return complex(w.sum())


def suppression_method_expectation(
    source: TelegraphSource, m: float, t: float, n: int, mode: str = "exact_transfer"
) -> complex:
    """E[e^{i m theta_total}] for n sign-alternating contiguous segments.

    paper_approx multiplies the positive-start segment value by its
    reversed-sign partner, per pair, ignoring the state carried across
    segment boundaries; exact_transfer keeps it.
    """
    if not source.is_symmetric:
        raise ValueError("the suppression method assumes a symmetric source")
    if n < 2 or n % 2 != 0:
        raise ValueError(f"segment count must be even and >= 2, got {n}")
    if mode not in SUPPRESSION_MODES:
        raise ValueError(f"mode must be one of {SUPPRESSION_MODES}, got {mode!r}")
    if mode == "paper_approx":
        forward = _char_fn_positive(source, m, t / n)
        reversed_ = _char_fn_positive(source, -m, t / n)
        return (forward * reversed_) ** (n // 2)
    return schedule_expectation_transfer(suppression_schedule(t, n), source, m)


def sin_expectation_positive_start(source: TelegraphSource, m: float, t: float) -> float:
    """E[sin(m theta)] for a symmetric source known to start positive:
    e^{-lam} z sinh(w)/w at w^2 = lam^2 - z^2, z = m delta t."""
    if not source.is_symmetric:
        raise ValueError("sin_expectation_positive_start assumes a symmetric source")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    lam = t / source.tau_plus
    z = m * source.delta * t
    x2 = (lam - z) * (lam + z)
    if abs(x2) < 1e-4:
        from .special import kernel_sinch_even

        return math.exp(-lam) * z * kernel_sinch_even(x2)
    if x2 < 0.0:
        w = math.sqrt(-x2)
        return math.exp(-lam) * z * math.sin(w) / w
    w = math.sqrt(x2)
    ep = math.exp(-z * z / (w + lam))  # e^{w - lam}
    em = math.exp(-w - lam)
    return z * (ep - em) / (2.0 * w)
