"""Domain types shared across the package.

A telegraph source is a two-state signal Y(t) in {+delta, -delta} with
exponentially distributed dwell times; the quantity of interest everywhere
is the time integral theta = int_0^t Y dt, bounded by theta_c = delta * t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class TelegraphSource:
    """One two-state noise source.

    delta      amplitude of the telegraph signal (noise units per unit time)
    tau_plus   mean dwell time in the positive state
    tau_minus  mean dwell time in the negative state
    p_plus     probability of starting in the positive state
    """

    delta: float
    tau_plus: float
    tau_minus: float
    p_plus: float = 0.5

    def __post_init__(self):
        for name in ("delta", "tau_plus", "tau_minus", "p_plus"):
            _require_finite(name, getattr(self, name))
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.tau_plus <= 0 or self.tau_minus <= 0:
            raise ValueError(
                f"dwell times must be > 0, got tau_plus={self.tau_plus}, "
                f"tau_minus={self.tau_minus}"
            )
        if not 0.0 <= self.p_plus <= 1.0:
            raise ValueError(f"p_plus must lie in [0, 1], got {self.p_plus}")

    @classmethod
    def symmetric(cls, delta: float, tau: float, p_plus: float = 0.5) -> "TelegraphSource":
        """Source with equal dwell times in both states."""
        return cls(delta=delta, tau_plus=tau, tau_minus=tau, p_plus=p_plus)

    @property
    def is_symmetric(self) -> bool:
        return self.tau_plus == self.tau_minus

    def flipped(self) -> "TelegraphSource":
        """Mirror source: states exchanged (used by negative-start reductions)."""
        return TelegraphSource(
            delta=self.delta,
            tau_plus=self.tau_minus,
            tau_minus=self.tau_plus,
            p_plus=1.0 - self.p_plus,
        )

    def lam_plus(self, t: float) -> float:
        """Expected flip count out of the positive state over duration t."""
        return t / self.tau_plus

    def lam_minus(self, t: float) -> float:
        """Expected flip count out of the negative state over duration t."""
        return t / self.tau_minus

    def theta_c(self, t: float) -> float:
        """Maximum excursion of the integrated signal over duration t."""
        return self.delta * t


@dataclass(frozen=True)
class EvaluationPoint:
    """Fourier multiplier m and duration t at which an expectation is taken."""

    m: float
    t: float

    def __post_init__(self):
        _require_finite("m", self.m)
        _require_finite("t", self.t)
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t}")


DRIVE = "drive"
WAIT = "wait"


@dataclass(frozen=True)
class Segment:
    """One schedule segment. Drive segments accumulate sign * theta; waits
    only evolve the telegraph state."""

    duration: float
    kind: str = DRIVE
    sign: int = 1

    def __post_init__(self):
        _require_finite("duration", self.duration)
        if self.duration < 0:
            raise ValueError(f"segment duration must be >= 0, got {self.duration}")
        if self.kind not in (DRIVE, WAIT):
            raise ValueError(f"segment kind must be 'drive' or 'wait', got {self.kind!r}")
        if self.kind == DRIVE and self.sign not in (1, -1):
            raise ValueError(f"drive sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered drive/wait segments with per-drive noise-sign conjugation flags."""

    segments: tuple[Segment, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def total_drive_time(self) -> float:
        return sum(s.duration for s in self.segments if s.kind == DRIVE)

    @property
    def n_drive_segments(self) -> int:
        return sum(1 for s in self.segments if s.kind == DRIVE)


def suppression_schedule(t: float, n: int) -> PulseSchedule:
    """n contiguous drive segments of length t/n with alternating sign,
    starting positive. n must be even so the signed integrals telescope
    back to the intended total drive."""
    if n < 2 or n % 2 != 0:
        raise ValueError(f"suppression schedules need an even n >= 2, got {n}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    segs = [Segment(t / n, DRIVE, 1 if k % 2 == 0 else -1) for k in range(n)]
    return PulseSchedule(tuple(segs))


def waiting_schedule(t: float, n: int, wait: float) -> PulseSchedule:
    """n equal drive segments separated by waits of the given length."""
    if n < 1:
        raise ValueError(f"waiting schedules need n >= 1, got {n}")
    if t < 0 or wait < 0:
        raise ValueError("t and wait must be >= 0")
    segs: list[Segment] = []
    for k in range(n):
        if k > 0:
            segs.append(Segment(wait, WAIT))
        segs.append(Segment(t / n, DRIVE, 1))
    return PulseSchedule(tuple(segs))
