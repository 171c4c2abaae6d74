"""Closed-form expectations of functions of time-integrated telegraph noise.

Everything here is exact in the model: a two-state signal with exponential
dwell times, integrated over a duration t. The characteristic function
E[exp(i m theta)] has a closed form in both the symmetric and the general
(state-dependent dwell) case; moments, densities, Gaussian limits and 1/f
ensembles follow from it.

Numerical policy: every formula is routed through even kernels of the
squared argument, so the oscillatory and hyperbolic regimes share one code
path, and large expected flip counts are handled with exponent-shifted
terms (never e^{-lam} * cosh(lam v), which overflows near lam ~ 1e6).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from scipy.integrate import quad

from .model import EvaluationPoint, TelegraphSource, _require_finite
from .special import (
    KERNEL_SERIES_THRESHOLD,
    kernel_cosh_even,
    kernel_cosh_even_c,
    kernel_sinch_even,
    kernel_sinch_even_c,
)

START_POLICIES = ("positive", "negative", "mixed")


def poisson_truncation(lam: float) -> int:
    """Flip-count cutoff with Poisson tail mass below 1e-12."""
    return max(10, math.ceil(lam + 12.0 * math.sqrt(max(lam, 0.0)) + 30.0))


# ---------------------------------------------------------------------------
# shared stable cores


def _exp_scaled_pair(lam_minus: float, lam_plus: float, z: float) -> tuple[complex, complex]:
    """(e^{-A} cosh u, e^{-A} sinh(u)/u) for the general-case argument
    u^2 = A^2 - z^2 + i (lam_minus - lam_plus) z, A = (lam_minus + lam_plus)/2.

    Re(u) <= A holds for all admissible inputs, so the exponent-shifted
    form never overflows; the kernel series covers u ~ 0.
    """
    a = 0.5 * (lam_minus + lam_plus)
    w2 = complex(-z * z, (lam_minus - lam_plus) * z)  # u^2 - A^2, no cancellation
    u2 = a * a + w2
    if abs(u2) < KERNEL_SERIES_THRESHOLD:
        e = math.exp(-a)
        return e * kernel_cosh_even_c(u2), e * kernel_sinch_even_c(u2)
    u = cmath.sqrt(u2)
    ep = cmath.exp(w2 / (u + a))  # e^{u - A}, difference formed stably
    em = cmath.exp(-u - a)
    return 0.5 * (ep + em), 0.5 * (ep - em) / u


def _sym_cos_core(lam: float, z: float) -> float:
    """e^{-lam} (cosh w + lam sinh(w)/w) at w^2 = lam^2 - z^2, real path."""
    x2 = (lam - z) * (lam + z)
    if abs(x2) < KERNEL_SERIES_THRESHOLD:
        return math.exp(-lam) * (kernel_cosh_even(x2) + lam * kernel_sinch_even(x2))
    if x2 < 0.0:
        w = math.sqrt(-x2)
        return math.exp(-lam) * (math.cos(w) + lam * math.sin(w) / w)
    w = math.sqrt(x2)
    ep = math.exp(-z * z / (w + lam))  # e^{w - lam}
    em = math.exp(-w - lam)
    return 0.5 * (1.0 + lam / w) * ep + 0.5 * (1.0 - lam / w) * em


def _char_fn_positive(source: TelegraphSource, m: float, t: float) -> complex:
    lam_p = source.lam_plus(t)
    lam_m = source.lam_minus(t)
    z = m * source.delta * t
    cosh_term, sinch_term = _exp_scaled_pair(lam_m, lam_p, z)
    coef = complex(0.5 * (lam_m + lam_p), z)
    return cosh_term + coef * sinch_term


# ---------------------------------------------------------------------------
# characteristic functions


def cos_expectation_symmetric(source: TelegraphSource, point: EvaluationPoint) -> float:
    """E[cos(m theta)] for equal dwell times and an equiprobable start.

    Equals e^{-lam} (cosh(lam v) + v^{-1} sinh(lam v)) with
    v = sqrt(1 - (m delta tau)^2), evaluated branch-free through the even
    kernels. E[sin(m theta)] vanishes by symmetry.
    """
    if not source.is_symmetric:
        raise ValueError(
            "cos_expectation_symmetric requires tau_plus == tau_minus; "
            "use char_fn_general for asymmetric sources"
        )
    lam = point.t / source.tau_plus
    z = point.m * source.delta * point.t
    return _sym_cos_core(lam, z)


def char_fn_general(
    source: TelegraphSource, point: EvaluationPoint, start: str = "mixed"
) -> complex:
    """E[e^{i m theta}] for state-dependent dwell times.

    start selects the initial telegraph state: 'positive', 'negative', or
    'mixed' (weighted by source.p_plus). The negative start is the mirror
    of a positive start with the states exchanged and m negated.
    """
    if start not in START_POLICIES:
        raise ValueError(f"start must be one of {START_POLICIES}, got {start!r}")
    if point.t == 0.0:
        return complex(1.0, 0.0)
    if start == "positive":
        return _char_fn_positive(source, point.m, point.t)
    if start == "negative":
        return _char_fn_positive(source.flipped(), -point.m, point.t)
    p = source.p_plus
    value = 0.0 + 0.0j
    if p > 0.0:
        value += p * _char_fn_positive(source, point.m, point.t)
    if p < 1.0:
        value += (1.0 - p) * _char_fn_positive(source.flipped(), -point.m, point.t)
    return value


def multi_source_char_fn(sources, point: EvaluationPoint) -> complex:
    """Product of per-source characteristic functions (independent sources).

    Empty input gives the empty product 1. Each source is evaluated under
    its own start weighting (its p_plus).
    """
    value = complex(1.0, 0.0)
    for source in sources:
        value *= char_fn_general(source, point, start="mixed")
    return value


# ---------------------------------------------------------------------------
# flip-conditioned quantities


def conditional_char_fn_symmetric(theta_c: float, m: float, f: int) -> float:
    """E[e^{i m theta} | f flips] for the symmetric equiprobable-start case.

    Real for every f: the conditional density is even for f >= 1, and the
    zero-flip case averages the two endpoint atoms to cos(m theta_c).
    Odd f evaluates (2k+1)!! j_k(z) / z^k with k = (f-1)/2 and z = m theta_c;
    even f > 0 shares the value at f - 1.
    """
    if theta_c <= 0:
        raise ValueError(f"theta_c must be > 0, got {theta_c}")
    if f < 0:
        raise ValueError(f"flip count must be >= 0, got {f}")
    z = m * theta_c
    if f == 0:
        return math.cos(z)
    if f % 2 == 0:
        f -= 1
    k = (f - 1) // 2
    z2 = z * z
    if z2 <= 2 * k + 3:
        # prefactor-normalized series: leading term exactly 1, terms decay
        term = 1.0
        total = 1.0
        s = 0
        while True:
            term *= -z2 * (s + k + 1) / ((s + 1) * (2 * s + 2 * k + 2) * (2 * s + 2 * k + 3))
            new_total = total + term
            s += 1
            if new_total == total or s > 500:
                return new_total
            total = new_total
    az = abs(z)
    if k > 120:
        # log-space prefactor; in this regime j_k(az) is oscillatory, not tiny
        from .special import spherical_bessel_j

        jk = spherical_bessel_j(k, az)
        if jk == 0.0:
            return 0.0
        log_pref = (
            math.lgamma(2 * k + 2)
            - math.lgamma(k + 1)
            - k * math.log(2.0)
            - k * math.log(az)
        )
        return math.copysign(math.exp(log_pref + math.log(abs(jk))), jk)
    from .special import spherical_bessel_j

    dfact = 1.0
    for j in range(3, 2 * k + 2, 2):
        dfact *= j
    return dfact * spherical_bessel_j(k, az) / az**k


def conditional_moment(theta_c: float, m_exp: int, f: int) -> float:
    """E[theta^m | f flips] for even m; odd moments vanish by symmetry.

    Closed form theta_c^m (m-1)!! / ((f+2)(f+4)...(f+m)) for odd f; even
    f > 0 maps to f - 1; f = 0 pins theta at +-theta_c.
    """
    if m_exp < 0 or f < 0:
        raise ValueError("m_exp and f must be >= 0")
    if m_exp % 2 == 1:
        return 0.0
    if m_exp == 0:
        return 1.0
    if f == 0:
        return theta_c**m_exp
    if f % 2 == 0:
        f -= 1
    value = theta_c**m_exp
    for j in range(1, m_exp, 2):
        value *= j
    for j in range(f + 2, f + m_exp + 1, 2):
        value /= j
    return value


@dataclass(frozen=True)
class FlipConditionedDensity:
    """Continuous density of theta restricted to paths with a given flip count.

    With lam_minus/lam_plus unset this is the symmetric conditional density
    (integrates to 1 for flips >= 1). When both are given it is the
    positive-start slice of the general decomposition, which integrates to
    the probability mass carried by that flip count. flips = 0 is atomic
    (endpoint point masses), so the continuous part is identically zero.
    """

    theta_c: float
    flips: int
    lam_minus: float | None = None
    lam_plus: float | None = None

    def __post_init__(self):
        if self.theta_c <= 0:
            raise ValueError(f"theta_c must be > 0, got {self.theta_c}")
        if self.flips < 0:
            raise ValueError(f"flip count must be >= 0, got {self.flips}")
        if (self.lam_minus is None) != (self.lam_plus is None):
            raise ValueError("lam_minus and lam_plus must be given together")

    def __call__(self, theta: float) -> float:
        if abs(theta) > self.theta_c:
            return 0.0
        f = self.flips
        if f == 0:
            return 0.0
        tc = self.theta_c
        if self.lam_minus is None:
            if f % 2 == 0:
                f -= 1
            k = (f - 1) // 2
            # f! / (k!)^2 * (tc^2 - th^2)^k / (2 tc)^f with f = 2k+1; the
            # constant is built as prod_j (2j)(2j+1)/j^2 = (2k+1)!/(k!)^2
            value = 1.0 / (2.0 * tc)
            for j in range(1, k + 1):
                value *= (tc * tc - theta * theta) * (2 * j) * (2 * j + 1) / (j * j * 4.0 * tc * tc)
            return value
        lam0, lam1 = self.lam_minus, self.lam_plus
        h = math.exp(lam0 * (theta - tc) / (2 * tc) - lam1 * (theta + tc) / (2 * tc))
        core = tc * tc - theta * theta
        if f % 2 == 1:
            k = (f - 1) // 2
            value = lam1 / (2.0 * tc)
            for j in range(1, k + 1):
                value *= lam0 * lam1 * core / (4.0 * tc * tc * j * j)
            return h * value
        n = f // 2
        value = (tc + theta) * lam0 * lam1 / (4.0 * tc * tc)
        for j in range(2, n + 1):
            value *= lam0 * lam1 * core / (4.0 * tc * tc * j * (j - 1))
        return h * value


def _density_continuous_positive(
    lam_minus: float, lam_plus: float, theta_c: float, theta: float, max_flips: int
) -> float:
    """Sum of the positive-start flip slices at theta, truncated at max_flips."""
    h = math.exp(
        lam_minus * (theta - theta_c) / (2 * theta_c)
        - lam_plus * (theta + theta_c) / (2 * theta_c)
    )
    rho = lam_minus * lam_plus * (theta_c * theta_c - theta * theta) / (4 * theta_c * theta_c)
    # odd flips: lam_plus/(2 tc) * rho^k / (k!)^2
    total = 0.0
    term = lam_plus / (2.0 * theta_c)
    k = 0
    while 2 * k + 1 <= max_flips:
        total += term
        k += 1
        term *= rho / (k * k)
        if term < 1e-18 * total:
            break
    # even flips > 0: (tc + th) lam0 lam1 / (4 tc^2) * rho^{n-1} / (n! (n-1)!)
    term = (theta_c + theta) * lam_minus * lam_plus / (4.0 * theta_c * theta_c)
    n = 1
    while 2 * n <= max_flips:
        total += term
        n += 1
        term *= rho / (n * (n - 1))
        if term < 1e-18 * total:
            break
    return h * total


def density_eval(
    source: TelegraphSource, t: float, theta: float, max_flips: int | None = None
) -> dict:
    """Distribution of theta at time t: continuous density plus endpoint atoms.

    Returns {'continuous_part', 'atom_plus', 'atom_minus'}. The atoms carry
    the no-flip mass: p_plus e^{-lam_plus} at +theta_c and
    (1 - p_plus) e^{-lam_minus} at -theta_c. max_flips defaults to a cutoff
    whose neglected tail is below 1e-12 (flip counts are stochastically
    dominated by a Poisson at rate 1/min(tau)).
    """
    if t <= 0 or source.delta <= 0:
        raise ValueError("density requires t > 0 and delta > 0")
    theta_c = source.theta_c(t)
    if abs(theta) > theta_c:
        raise ValueError(f"theta must lie in [-theta_c, theta_c] = [-{theta_c}, {theta_c}]")
    lam_p = source.lam_plus(t)
    lam_m = source.lam_minus(t)
    if max_flips is None:
        max_flips = poisson_truncation(max(lam_p, lam_m))
    p = source.p_plus
    cont = 0.0
    if p > 0.0:
        cont += p * _density_continuous_positive(lam_m, lam_p, theta_c, theta, max_flips)
    if p < 1.0:
        cont += (1.0 - p) * _density_continuous_positive(lam_p, lam_m, theta_c, -theta, max_flips)
    return {
        "continuous_part": cont,
        "atom_plus": p * math.exp(-lam_p),
        "atom_minus": (1.0 - p) * math.exp(-lam_m),
    }


# ---------------------------------------------------------------------------
# variance and limits


def _variance_bracket(lam: float) -> float:
    # sigma^2 / theta_c^2 = 1/lam + (e^{-2 lam} - 1)/(2 lam^2); series below
    # 1e-4 avoids the cancellation between the two diverging pieces
    if lam < 1e-4:
        return 1.0 + lam * (-2.0 / 3.0 + lam * (1.0 / 3.0 + lam * (-2.0 / 15.0 + lam * 2.0 / 45.0)))
    return (math.expm1(-2.0 * lam) + 2.0 * lam) / (2.0 * lam * lam)


def variance_symmetric(source: TelegraphSource, t: float) -> float:
    """Var[theta] = theta_c^2 (1/lam + (e^{-2 lam} - 1)/(2 lam^2)).

    Limits: delta^2 t^2 for t << tau, delta^2 (t tau - tau^2/2) for t >> tau.
    """
    if not source.is_symmetric:
        raise ValueError("variance_symmetric requires tau_plus == tau_minus")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    theta_c = source.theta_c(t)
    return theta_c * theta_c * _variance_bracket(t / source.tau_plus)


# ---------------------------------------------------------------------------
# Gaussian model


def gaussian_cos_expectation(m: float, sigma: float) -> float:
    """E[cos(m x)] = e^{-m^2 sigma^2 / 2} for x ~ Normal(0, sigma^2)."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    return math.exp(-0.5 * m * m * sigma * sigma)


def gaussian_moment(n: int, sigma: float) -> float:
    """E[x^n] for x ~ Normal(0, sigma^2): sigma^n (n-1)!! for even n, else 0."""
    if n < 0:
        raise ValueError(f"moment order must be >= 0, got {n}")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if n % 2 == 1:
        return 0.0
    value = sigma**n
    for j in range(1, n, 2):
        value *= j
    return value


APPROX_REGIMES = ("gaussian_limit", "first_order_lambda", "no_flip")


def approx_cos_expectation(
    source: TelegraphSource, point: EvaluationPoint, regime: str
) -> float:
    """Named approximations to the symmetric E[cos(m theta)].

    gaussian_limit      e^{-t m^2 delta^2 tau / 2}   (delta tau small)
    first_order_lambda  cos z + lam (sinc z - cos z) (few expected flips)
    no_flip             cos(m theta_c)               (m delta tau large)
    """
    if not source.is_symmetric:
        raise ValueError("approx_cos_expectation requires a symmetric source")
    if regime not in APPROX_REGIMES:
        raise ValueError(f"regime must be one of {APPROX_REGIMES}, got {regime!r}")
    m, t = point.m, point.t
    z = m * source.delta * t
    if regime == "gaussian_limit":
        return math.exp(-0.5 * t * m * m * source.delta**2 * source.tau_plus)
    if regime == "no_flip":
        return math.cos(z)
    lam = t / source.tau_plus
    sinc_z = kernel_sinch_even(-z * z)
    return math.cos(z) + lam * (sinc_z - math.cos(z))


# ---------------------------------------------------------------------------
# 1/f ensembles


@dataclass(frozen=True)
class OneOverFEnsemble:
    """Population of symmetric telegraph sources giving 1/f-like noise.

    r sources; dwell times log-uniform on the band [tau_b, tau_a] unless a
    power-law exponent alpha > 1 is given, in which case the dwell-time
    density is (alpha-1) tau^{alpha-2} / tau_b^{alpha-1} on [0, tau_b].
    Amplitudes have mean delta_mean and standard deviation delta_sd.
    """

    r: int
    tau_a: float
    tau_b: float
    delta_mean: float
    delta_sd: float = 0.0
    alpha: float | None = None

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"ensemble needs r >= 1 sources, got {self.r}")
        if self.tau_b <= 0 or self.tau_a < self.tau_b:
            raise ValueError(
                f"band must satisfy tau_a >= tau_b > 0, got tau_a={self.tau_a}, tau_b={self.tau_b}"
            )
        if self.delta_sd < 0:
            raise ValueError(f"delta_sd must be >= 0, got {self.delta_sd}")
        if self.alpha is not None and self.alpha <= 1:
            raise ValueError(f"alpha must be > 1, got {self.alpha}")
        for name in ("tau_a", "tau_b", "delta_mean", "delta_sd"):
            _require_finite(name, getattr(self, name))

    @property
    def mean_square_delta(self) -> float:
        return self.delta_mean**2 + self.delta_sd**2


def tau_mean_power_law(alpha: float, tau_b: float) -> float:
    """Mean dwell time under the power-law density on [0, tau_b]:
    (alpha - 1)/alpha * tau_b."""
    if alpha <= 1:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    if tau_b <= 0:
        raise ValueError(f"tau_b must be > 0, got {tau_b}")
    return (alpha - 1.0) / alpha * tau_b


def _band_mean_tau(tau_a: float, tau_b: float) -> float:
    # (tau_a - tau_b) / log(tau_a / tau_b); continuous at tau_a == tau_b
    w = tau_a / tau_b
    if abs(w - 1.0) < 1e-8:
        return tau_b * (1.0 + 0.5 * (w - 1.0))
    return (tau_a - tau_b) / math.log(w)


VARIANCE_MODES = ("approx", "quadrature")


def variance_one_over_f(ensemble: OneOverFEnsemble, t: float, mode: str = "quadrature") -> float:
    """Variance of the summed ensemble signal after time t.

    approx uses the leading 1/lam behaviour, valid deep in the many-flip
    regime (a warning is issued when the smallest expected flip count is
    below 10); quadrature integrates the exact single-source variance over
    the dwell-time density. Both scale by r E[delta^2].
    """
    if mode not in VARIANCE_MODES:
        raise ValueError(f"mode must be one of {VARIANCE_MODES}, got {mode!r}")
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")
    scale = ensemble.r * ensemble.mean_square_delta
    if ensemble.alpha is not None:
        if mode == "approx":
            if t / ensemble.tau_b < 10.0:
                warnings.warn(
                    "approx 1/f variance assumes expected flip counts >> 1; "
                    f"smallest is {t / ensemble.tau_b:.3g}",
                    stacklevel=2,
                )
            return scale * t * tau_mean_power_law(ensemble.alpha, ensemble.tau_b)
        a = ensemble.alpha

        def integrand_pl(y):
            tau = ensemble.tau_b * y ** (1.0 / (a - 1.0)) if y > 0 else 0.0
            if tau == 0.0:
                return 0.0
            return t * t * _variance_bracket(t / tau)

        value, _ = quad(integrand_pl, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=200)
        return scale * value
    if mode == "approx":
        lam_small = t / ensemble.tau_a
        if lam_small < 10.0:
            warnings.warn(
                "approx 1/f variance assumes expected flip counts >> 1; "
                f"smallest is {lam_small:.3g}",
                stacklevel=2,
            )
        return scale * t * _band_mean_tau(ensemble.tau_a, ensemble.tau_b)
    if ensemble.tau_a == ensemble.tau_b:
        return scale * t * t * _variance_bracket(t / ensemble.tau_b)
    lo, hi = math.log(ensemble.tau_b), math.log(ensemble.tau_a)

    def integrand(y):
        return t * t * _variance_bracket(t / math.exp(y))

    value, _ = quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200)
    return scale * value / (hi - lo)
