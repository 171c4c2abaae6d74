import math

import pytest

from rtnkit.model import (
    EvaluationPoint,
    PulseSchedule,
    Segment,
    TelegraphSource,
    suppression_schedule,
    waiting_schedule,
)


class TestTelegraphSource:
    def test_valid_construction(self):
        s = TelegraphSource(delta=1.0, tau_plus=2.0, tau_minus=0.5, p_plus=0.3)
        assert not s.is_symmetric
        assert s.lam_plus(1.0) == 0.5
        assert s.lam_minus(1.0) == 2.0
        assert s.theta_c(3.0) == 3.0

    def test_symmetric_constructor(self):
        s = TelegraphSource.symmetric(0.5, 2.0)
        assert s.is_symmetric and s.p_plus == 0.5

    def test_flipped_mirrors_everything(self):
        s = TelegraphSource(1.0, 2.0, 0.5, p_plus=0.3)
        f = s.flipped()
        assert (f.tau_plus, f.tau_minus, f.p_plus) == (0.5, 2.0, 0.7)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(delta=-1.0, tau_plus=1.0, tau_minus=1.0),
            dict(delta=1.0, tau_plus=0.0, tau_minus=1.0),
            dict(delta=1.0, tau_plus=1.0, tau_minus=-2.0),
            dict(delta=1.0, tau_plus=1.0, tau_minus=1.0, p_plus=1.5),
            dict(delta=math.nan, tau_plus=1.0, tau_minus=1.0),
            dict(delta=1.0, tau_plus=math.inf, tau_minus=1.0),
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            TelegraphSource(**kwargs)


class TestEvaluationPoint:
    def test_negative_m_allowed(self):
        assert EvaluationPoint(m=-2.0, t=0.0).m == -2.0

    def test_negative_t_rejected(self):
        with pytest.raises(ValueError):
            EvaluationPoint(m=1.0, t=-0.1)


class TestSchedules:
    def test_suppression_schedule_alternates(self):
        sched = suppression_schedule(1.0, 4)
        signs = [s.sign for s in sched.segments]
        assert signs == [1, -1, 1, -1]
        assert sched.total_drive_time == pytest.approx(1.0)
        assert sched.n_drive_segments == 4

    def test_suppression_rejects_odd(self):
        with pytest.raises(ValueError):
            suppression_schedule(1.0, 3)

    def test_waiting_schedule_interleaves(self):
        sched = waiting_schedule(1.0, 3, wait=5.0)
        kinds = [s.kind for s in sched.segments]
        assert kinds == ["drive", "wait", "drive", "wait", "drive"]
        assert sched.total_drive_time == pytest.approx(1.0)

    def test_segment_validation(self):
        with pytest.raises(ValueError):
            Segment(-1.0)
        with pytest.raises(ValueError):
            Segment(1.0, kind="pause")
        with pytest.raises(ValueError):
            Segment(1.0, sign=2)

    def test_schedule_is_frozen_tuple(self):
        sched = PulseSchedule([Segment(1.0)])
        assert isinstance(sched.segments, tuple)
