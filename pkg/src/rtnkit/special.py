"""Numerically stable special-function kernels.

The closed forms downstream all reduce to combinations of
cosh(sqrt(x))/cos(sqrt(-x)) and sinh(sqrt(x))/sqrt(x), evaluated on the
*squared* argument so the real/oscillatory regimes share one code path,
plus spherical Bessel functions and the Bessel polynomial family with
generating function exp(x (1 - sqrt(1 - 2 t))).
"""

from __future__ import annotations

import cmath
import math

# Below this squared-argument magnitude the direct forms lose digits to
# cancellation; a 4-term Taylor series keeps relative error < 1e-15.
KERNEL_SERIES_THRESHOLD = 1e-4

# Largest polynomial order kept in the exact coefficient table.
CARLITZ_ORDER_LIMIT = 64


def kernel_cosh_even(x2: float) -> float:
    """cosh(sqrt(x2)) for x2 >= 0, cos(sqrt(-x2)) for x2 < 0.

    Even-analytic in sqrt(x2), hence continuous through 0.
    """
    if abs(x2) < KERNEL_SERIES_THRESHOLD:
        return 1.0 + x2 * (0.5 + x2 * (1.0 / 24.0 + x2 / 720.0))
    if x2 >= 0.0:
        r = math.sqrt(x2)
        return math.cosh(r) if r < 710.0 else math.inf
    return math.cos(math.sqrt(-x2))


def kernel_sinch_even(x2: float) -> float:
    """sinh(sqrt(x2))/sqrt(x2) for x2 > 0, sin(sqrt(-x2))/sqrt(-x2) for
    x2 < 0, and 1 at the removable singularity x2 = 0."""
    if abs(x2) < KERNEL_SERIES_THRESHOLD:
        return 1.0 + x2 * (1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 / 5040.0))
    if x2 > 0.0:
        r = math.sqrt(x2)
        return math.sinh(r) / r if r < 710.0 else math.inf
    r = math.sqrt(-x2)
    return math.sin(r) / r


def kernel_cosh_even_c(x2: complex) -> complex:
    """Complex-argument variant of kernel_cosh_even (even in sqrt(x2))."""
    if abs(x2) < KERNEL_SERIES_THRESHOLD:
        return 1.0 + x2 * (0.5 + x2 * (1.0 / 24.0 + x2 / 720.0))
    return cmath.cosh(cmath.sqrt(x2))


def kernel_sinch_even_c(x2: complex) -> complex:
    """Complex-argument variant of kernel_sinch_even."""
    if abs(x2) < KERNEL_SERIES_THRESHOLD:
        return 1.0 + x2 * (1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 / 5040.0))
    r = cmath.sqrt(x2)
    return cmath.sinh(r) / r


def _j_series_prefactor(n: int) -> float:
    # 2^n n! / (2n+1)! built as a running product so no factorial overflows
    pref = 1.0 / (2 * n + 1)
    for j in range(n + 1, 2 * n + 1):
        pref *= 2.0 / j
    return pref


def _spherical_j_series(n: int, x: float) -> float:
    # 2^n x^n sum_s (-1)^s (s+n)! / (s! (2s+2n+1)!) x^{2s}; terms decrease
    # from s = 0 whenever x^2 < 2(2n+3), so no cancellation in this regime.
    term = x**n * _j_series_prefactor(n)
    total = term
    x2 = x * x
    s = 0
    while True:
        s += 1
        term *= -x2 * (s + n) / (s * (2 * s + 2 * n) * (2 * s + 2 * n + 1))
        new_total = total + term
        if new_total == total:
            return total
        total = new_total
        if s > 500:
            return total


def spherical_bessel_j(n: int, x: float) -> float:
    """Spherical Bessel function of the first kind, j_n(x).

    Series for small |x|, upward recurrence for |x| >= n (stable there),
    otherwise downward recurrence normalized against j0 or j1.
    """
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    ax = abs(x)
    sign = -1.0 if (x < 0 and n % 2 == 1) else 1.0

    if ax < 1.5:
        return sign * _spherical_j_series(n, ax)

    j0 = math.sin(ax) / ax
    if n == 0:
        return sign * j0
    j1 = j0 / ax - math.cos(ax) / ax

    if ax >= n:
        jm, jc = j0, j1
        for k in range(1, n):
            jm, jc = jc, (2 * k + 1) / ax * jc - jm
        return sign * jc

    # Downward (Miller) recurrence from well above n; only ratios matter
    # until the final normalization, so rescale when values grow large.
    start = n + int(math.sqrt(40.0 * n)) + 12
    jp = 0.0
    jc = 1e-30
    jn_trial = 0.0
    j1_trial = 0.0
    j0_trial = 0.0
    for k in range(start, 0, -1):
        jm = (2 * k + 1) / ax * jc - jp
        jp, jc = jc, jm
        if k - 1 == n:
            jn_trial = jc
        if k - 1 == 1:
            j1_trial = jc
        if abs(jc) > 1e250:
            jp *= 1e-250
            jc *= 1e-250
            jn_trial *= 1e-250
            j1_trial *= 1e-250
    j0_trial = jc
    # j0 and j1 have no common zeros; normalize against whichever of the
    # two is safely away from a zero of its own.
    if abs(math.sin(ax)) >= 0.1:
        scale = j0 / j0_trial
    else:
        scale = j1 / j1_trial
    return sign * jn_trial * scale


def spherical_bessel_j_ratio(n: int, x: float) -> float:
    """j_n(x) / x^n, finite at x = 0 (equals 2^n n!/(2n+1)! there).

    Evaluated by the series when x^2 <= 2n+3 so small-x large-n cases do
    not underflow, otherwise from j_n directly.
    """
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    x2 = x * x
    if x2 <= 2 * n + 3:
        # series for j_n(x)/x^n; strictly decreasing terms in this regime
        term = _j_series_prefactor(n)
        total = term
        s = 0
        while True:
            s += 1
            term *= -x2 * (s + n) / (s * (2 * s + 2 * n) * (2 * s + 2 * n + 1))
            new_total = total + term
            if new_total == total:
                return total
            total = new_total
            if s > 500:
                return total
    return spherical_bessel_j(n, abs(x)) / abs(x) ** n


_carlitz_coeffs: list[list[int]] = [[1], [0, 1]]


def _carlitz_table(n: int) -> list[int]:
    # p_{k+2}(x) = (2k+1) p_{k+1}(x) + x^2 p_k(x), exact in integers.
    while len(_carlitz_coeffs) <= n:
        k = len(_carlitz_coeffs) - 2
        prev, last = _carlitz_coeffs[k], _carlitz_coeffs[k + 1]
        new = [0] * (k + 3)
        for j, c in enumerate(last):
            new[j] += (2 * k + 1) * c
        for j, c in enumerate(prev):
            new[j + 2] += c
        _carlitz_coeffs.append(new)
    return _carlitz_coeffs[n]


def carlitz_bessel_p(n: int, x):
    """Bessel polynomial p_n evaluated at real or complex x.

    The family satisfies sum_k p_k(x) t^k / k! = exp(x (1 - sqrt(1 - 2t)))
    with p_0 = 1, p_1(x) = x. Coefficients are exact integers, generated
    once and cached up to CARLITZ_ORDER_LIMIT.
    """
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    if n > CARLITZ_ORDER_LIMIT:
        raise ValueError(
            f"order {n} exceeds the table limit {CARLITZ_ORDER_LIMIT}; "
            "raise rtnkit.special.CARLITZ_ORDER_LIMIT if deeper orders are needed"
        )
    coeffs = _carlitz_table(n)
    acc = 0.0j if isinstance(x, complex) else 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
