"""Expectations of time-integrated two-level telegraph noise.

Closed forms for E[e^{i m theta}] under symmetric and state-dependent
dwell times, flip-conditioned densities and moments, Gaussian and 1/f
ensemble limits, pulse-based error suppression, two-qubit dephasing
error probabilities, and an exact-in-distribution Monte Carlo oracle
validating all of it.
"""

from .analytic import (
    FlipConditionedDensity,
    OneOverFEnsemble,
    approx_cos_expectation,
    char_fn_general,
    conditional_char_fn_symmetric,
    conditional_moment,
    cos_expectation_symmetric,
    density_eval,
    gaussian_cos_expectation,
    gaussian_moment,
    multi_source_char_fn,
    poisson_truncation,
    tau_mean_power_law,
    variance_one_over_f,
    variance_symmetric,
)
from .control import (
    schedule_expectation_transfer,
    sin_expectation_positive_start,
    suppression_method_expectation,
    transfer_matrix,
    waiting_method_expectation,
)
from .dephasing import (
    PauliZErrorProbs,
    probs_from_fourier,
    probs_gaussian,
    probs_rtn,
    probs_rtn_controlled,
)
from .model import (
    EvaluationPoint,
    PulseSchedule,
    Segment,
    TelegraphSource,
    suppression_schedule,
    waiting_schedule,
)
from .montecarlo import (
    EstimatorResult,
    InfeasibleConditionError,
    PathSample,
    estimate_char_fn,
    estimate_conditional,
    estimate_ensemble_variance,
    estimate_schedule,
    estimate_variance,
    sample_ensemble_theta,
    sample_path,
    simulate_batch,
    worker_stream,
)
from .special import (
    carlitz_bessel_p,
    kernel_cosh_even,
    kernel_sinch_even,
    spherical_bessel_j,
)

__version__ = "0.1.0"
