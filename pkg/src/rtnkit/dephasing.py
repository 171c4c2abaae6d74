"""Two-qubit Pauli-Z error probabilities for the dephasing channel
e^{i theta (Z x I + I x Z)}.

The channel is diagonal in the Pauli basis, so only three probabilities
matter: no Z error, a Z error on exactly one given qubit, and Z errors on
both. They are linear in (1, E[cos 2 theta], E[cos 4 theta]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import EvaluationPoint, TelegraphSource, cos_expectation_symmetric
from .control import suppression_method_expectation, waiting_method_expectation

_RANGE_TOL = 1e-9
_COMPLETENESS_TOL = 1e-12


@dataclass(frozen=True)
class PauliZErrorProbs:
    """(n0, n1, n2) with completeness n0 + 2 n1 + n2 = 1; the two
    single-qubit error patterns each carry n1."""

    n0: float
    n1: float
    n2: float

    def __post_init__(self):
        for name, v in (("n0", self.n0), ("n1", self.n1), ("n2", self.n2)):
            if not -_RANGE_TOL <= v <= 1.0 + _RANGE_TOL:
                raise ValueError(f"{name} = {v} lies outside [0, 1]")
        total = self.n0 + 2.0 * self.n1 + self.n2
        if abs(total - 1.0) > _COMPLETENESS_TOL:
            raise ValueError(f"completeness violated: n0 + 2 n1 + n2 = {total}")


def probs_from_fourier(e1: float, e_cos2: float, e_cos4: float) -> PauliZErrorProbs:
    """Map (E[1], E[cos 2 theta], E[cos 4 theta]) to error probabilities:

        n0 = 3/8 e1 + 1/2 e2 + 1/8 e4
        n1 = 1/8 e1          - 1/8 e4
        n2 = 3/8 e1 - 1/2 e2 + 1/8 e4

    Column sums make completeness automatic.
    """
    if abs(e1 - 1.0) > _COMPLETENESS_TOL:
        raise ValueError(f"E[1] must equal 1, got {e1}")
    for name, v in (("e_cos2", e_cos2), ("e_cos4", e_cos4)):
        if abs(v) > 1.0 + _COMPLETENESS_TOL:
            raise ValueError(f"{name} = {v} lies outside [-1, 1]")
    n0 = 0.375 * e1 + 0.5 * e_cos2 + 0.125 * e_cos4
    n1 = 0.125 * e1 - 0.125 * e_cos4
    n2 = 0.375 * e1 - 0.5 * e_cos2 + 0.125 * e_cos4
    return PauliZErrorProbs(n0=n0, n1=n1, n2=n2)


def probs_rtn(source: TelegraphSource, t: float) -> PauliZErrorProbs:
    """Error probabilities under symmetric telegraph noise of duration t."""
    e2 = cos_expectation_symmetric(source, EvaluationPoint(m=2.0, t=t))
    e4 = cos_expectation_symmetric(source, EvaluationPoint(m=4.0, t=t))
    return probs_from_fourier(1.0, e2, e4)


def probs_gaussian(sigma: float, quartic: bool = False) -> PauliZErrorProbs:
    """Error probabilities for Gaussian theta with standard deviation sigma.

    Exact in r = e^{-2 sigma^2}:
        n0 = 3/8 + r/2 + r^4/8,  n1 = 1/8 - r^4/8,  n2 = 3/8 - r/2 + r^4/8.
    With quartic=True, returns the small-sigma expansions
    (1 - 2 s^2 + 5 s^4, s^2 - 4 s^4, 3 s^4) instead; these respect
    completeness exactly but leave [0, 1] for sigma beyond ~0.5.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if quartic:
        s2 = sigma * sigma
        return PauliZErrorProbs(
            n0=1.0 - 2.0 * s2 + 5.0 * s2 * s2,
            n1=s2 - 4.0 * s2 * s2,
            n2=3.0 * s2 * s2,
        )
    r = math.exp(-2.0 * sigma * sigma)
    r4 = r**4
    return PauliZErrorProbs(
        n0=0.375 + 0.5 * r + 0.125 * r4,
        n1=0.125 - 0.125 * r4,
        n2=0.375 - 0.5 * r + 0.125 * r4,
    )


def probs_rtn_controlled(
    source: TelegraphSource,
    t: float,
    n: int,
    method: str = "suppression",
    mode: str | None = None,
) -> PauliZErrorProbs:
    """Error probabilities with a control sequence applied during the drive:
    the pulse-method expectations at m = 2 and m = 4 feed the Fourier map."""
    if method == "suppression":
        mode = mode or "exact_transfer"
        e2 = suppression_method_expectation(source, 2.0, t, n, mode=mode).real
        e4 = suppression_method_expectation(source, 4.0, t, n, mode=mode).real
    elif method == "waiting":
        mode = mode or "exact"
        e2 = waiting_method_expectation(source, 2.0, t, n, mode=mode)
        e4 = waiting_method_expectation(source, 4.0, t, n, mode=mode)
    else:
        raise ValueError(f"method must be 'suppression' or 'waiting', got {method!r}")
    return probs_from_fourier(1.0, e2, e4)
