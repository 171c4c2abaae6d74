"""Side-by-side comparison of closed forms against the path-sampling oracle.

Every comparison is phrased as |analytic - estimate| <= 4 standard errors,
component-wise, so the tolerance scales with the sample count. The default
grids cover the symmetric theorem (expected flip count lambda and
m delta tau spanning the few-flip, boundary and oscillatory regimes) and
the general asymmetric theorem with positive and mixed starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import char_fn_general, conditional_char_fn_symmetric, cos_expectation_symmetric
from .model import EvaluationPoint, TelegraphSource
from .montecarlo import InfeasibleConditionError, estimate_char_fn, estimate_conditional

SE_MULTIPLE = 4.0

# (lambda, m delta tau) pairs: corners plus center of the 3x3 grid over
# {0.1, 1, 10} x {0.1, 1, 3}, with delta = tau = 1 so t = lambda, m as given
SYMMETRIC_GRID = (
    (0.1, 0.1),
    (0.1, 3.0),
    (1.0, 1.0),
    (10.0, 0.1),
    (10.0, 3.0),
)

# dwell-time ratios tau_minus/tau_plus in {0.25, 4}, positive and mixed starts
GENERAL_GRID = (
    {"tau_plus": 2.0, "tau_minus": 0.5, "p_plus": 1.0, "start": "positive", "m": 1.0, "t": 1.0},
    {"tau_plus": 0.5, "tau_minus": 2.0, "p_plus": 1.0, "start": "positive", "m": 1.0, "t": 1.0},
    {"tau_plus": 0.5, "tau_minus": 2.0, "p_plus": 0.3, "start": "mixed", "m": 2.0, "t": 0.7},
    {"tau_plus": 2.0, "tau_minus": 0.5, "p_plus": 0.5, "start": "mixed", "m": 0.5, "t": 2.0},
    {"tau_plus": 1.0, "tau_minus": 4.0, "p_plus": 0.7, "start": "mixed", "m": 1.5, "t": 1.2},
)

CONDITIONAL_GRID = (0, 1, 2, 3, 4, 5)


@dataclass(frozen=True)
class VerificationSummary:
    all_pass: bool
    worst_ratio: float
    n_rows: int
    n_failed: int
    n_skipped: int = 0


def _component_ratio(diff: float, se: float) -> float:
    # degenerate statistics (deterministic samples) can have se at rounding
    # level; differences below double-precision noise count as exact
    if abs(diff) < 1e-13:
        return 0.0
    if se == 0.0:
        return math.inf
    return abs(diff) / se


def verify_symmetric(
    samples: int = 1_000_000, seed: int = 101, workers: int = 4
) -> tuple[list[dict], VerificationSummary]:
    """Symmetric closed form vs sampled E[e^{i m theta}] on the default grid."""
    rows = []
    worst = 0.0
    failed = 0
    for k, (lam, m) in enumerate(SYMMETRIC_GRID):
        source = TelegraphSource.symmetric(delta=1.0, tau=1.0)
        point = EvaluationPoint(m=m, t=lam)
        exact = cos_expectation_symmetric(source, point)
        est = estimate_char_fn(source, point, "mixed", samples, seed + k, workers)
        r_re = _component_ratio(exact - est.mean.real, est.std_error.real)
        r_im = _component_ratio(0.0 - est.mean.imag, est.std_error.imag)
        ratio = max(r_re, r_im)
        ok = ratio <= SE_MULTIPLE
        worst = max(worst, ratio)
        failed += 0 if ok else 1
        rows.append(
            {
                "lambda": lam, "m": m, "t": lam,
                "analytic_re": exact, "analytic_im": 0.0,
                "mc_re": est.mean.real, "mc_im": est.mean.imag,
                "se_re": est.std_error.real, "se_im": est.std_error.imag,
                "abs_diff_over_se": ratio, "pass": ok,
            }
        )
    return rows, VerificationSummary(failed == 0, worst, len(rows), failed)


def verify_general(
    samples: int = 1_000_000, seed: int = 202, workers: int = 4
) -> tuple[list[dict], VerificationSummary]:
    """Asymmetric closed form vs sampled E[e^{i m theta}], both components."""
    rows = []
    worst = 0.0
    failed = 0
    for k, spec in enumerate(GENERAL_GRID):
        source = TelegraphSource(
            delta=1.0, tau_plus=spec["tau_plus"], tau_minus=spec["tau_minus"],
            p_plus=spec["p_plus"],
        )
        point = EvaluationPoint(m=spec["m"], t=spec["t"])
        exact = char_fn_general(source, point, start=spec["start"])
        est = estimate_char_fn(source, point, spec["start"], samples, seed + k, workers)
        r_re = _component_ratio(exact.real - est.mean.real, est.std_error.real)
        r_im = _component_ratio(exact.imag - est.mean.imag, est.std_error.imag)
        ratio = max(r_re, r_im)
        ok = ratio <= SE_MULTIPLE
        worst = max(worst, ratio)
        failed += 0 if ok else 1
        rows.append(
            {
                "tau_plus": spec["tau_plus"], "tau_minus": spec["tau_minus"],
                "p_plus": spec["p_plus"], "start": spec["start"],
                "m": spec["m"], "t": spec["t"],
                "analytic_re": exact.real, "analytic_im": exact.imag,
                "mc_re": est.mean.real, "mc_im": est.mean.imag,
                "se_re": est.std_error.real, "se_im": est.std_error.imag,
                "abs_diff_over_se": ratio, "pass": ok,
            }
        )
    return rows, VerificationSummary(failed == 0, worst, len(rows), failed)


def verify_conditional(
    samples: int = 100_000, seed: int = 303, workers: int = 4
) -> tuple[list[dict], VerificationSummary]:
    """Flip-conditioned characteristic values vs rejection-sampled means.

    Infeasible flip counts (rejection rate below the guard) are reported
    per row with status 'infeasible' and do not fail the run.
    """
    source = TelegraphSource.symmetric(delta=1.0, tau=0.5)
    point = EvaluationPoint(m=2.0, t=1.0)
    theta_c = source.theta_c(point.t)
    rows = []
    worst = 0.0
    failed = 0
    skipped = 0
    for k, f in enumerate(CONDITIONAL_GRID):
        exact = conditional_char_fn_symmetric(theta_c, point.m, f)
        row = {"flips": f, "m": point.m, "t": point.t, "analytic": exact}
        try:
            est = estimate_conditional(source, point, f, samples, seed + k, workers)
        except InfeasibleConditionError:
            skipped += 1
            row.update(status="infeasible", mc_re="", se_re="", abs_diff_over_se="", **{"pass": 1})
            rows.append(row)
            continue
        r_re = _component_ratio(exact - est.mean.real, est.std_error.real)
        r_im = _component_ratio(0.0 - est.mean.imag, est.std_error.imag)
        ratio = max(r_re, r_im)
        ok = ratio <= SE_MULTIPLE
        worst = max(worst, ratio)
        failed += 0 if ok else 1
        row.update(
            status="ok", mc_re=est.mean.real, se_re=est.std_error.real,
            abs_diff_over_se=ratio, **{"pass": ok},
        )
        rows.append(row)
    return rows, VerificationSummary(failed == 0, worst, len(rows), failed, skipped)
