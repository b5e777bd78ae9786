import math

import numpy as np
import pytest

from qftlab.lti import freq_eval, tf
from qftlab.specs import (
    DEFAULT_FREQUENCY_GRID,
    DisturbanceSpec,
    SpecConflictError,
    TrackingSpec,
    frequency_grid,
    step_metrics,
    step_response,
    synthesize_envelopes,
)


@pytest.fixture(scope="module")
def envelopes():
    return synthesize_envelopes(TrackingSpec())


class TestSpecTypes:
    def test_delta_db_consistency(self):
        spec = TrackingSpec(w_st=1.2)
        assert abs(spec.delta_db - 20.0 * math.log10(1.2)) < 1e-12
        assert spec.delta_db == pytest.approx(1.584, abs=1e-3)

    def test_invalid_caps_rejected(self):
        with pytest.raises(ValueError):
            TrackingSpec(w_st=0.0)
        with pytest.raises(ValueError):
            DisturbanceSpec(w_sd=-0.4)

    def test_frequency_grid_validation(self):
        assert frequency_grid([1, 2, 5]) == (1.0, 2.0, 5.0)
        with pytest.raises(ValueError):
            frequency_grid([1, 1, 2])
        with pytest.raises(ValueError):
            frequency_grid([0.0, 1.0])
        with pytest.raises(ValueError):
            frequency_grid([])

    def test_default_grid_spans_wheel_hop(self):
        assert DEFAULT_FREQUENCY_GRID[0] == 0.1
        assert DEFAULT_FREQUENCY_GRID[-1] == 100.0
        assert len(DEFAULT_FREQUENCY_GRID) == 10


class TestStepMetrics:
    def test_first_order_rise(self):
        m = step_metrics(tf([1], [1, 1]))
        assert m.rise_10_90_s == pytest.approx(math.log(9.0), abs=5e-3)
        assert m.overshoot_pct == 0.0

    def test_first_order_settle(self):
        m = step_metrics(tf([1], [1, 1]))
        assert m.settle_2pct_s == pytest.approx(math.log(50.0), abs=1e-2)

    def test_unstable_rejected(self):
        with pytest.raises(ValueError):
            step_metrics(tf([1], [1, -1]))

    def test_refinement_invariance(self):
        coarse = step_metrics(tf([4], [1, 2.4, 4]), dt=2e-3)
        fine = step_metrics(tf([4], [1, 2.4, 4]), dt=1e-3)
        assert fine.rise_10_90_s == pytest.approx(coarse.rise_10_90_s, rel=0.01)
        assert fine.settle_2pct_s == pytest.approx(coarse.settle_2pct_s, rel=0.01)
        assert fine.overshoot_pct == pytest.approx(coarse.overshoot_pct, abs=0.25)


class TestEnvelopes:
    def test_damping_from_overshoot(self, envelopes):
        assert envelopes.zeta == pytest.approx(0.690, abs=1e-3)

    def test_natural_frequency_from_settling(self, envelopes):
        assert envelopes.omega_n == pytest.approx(1.932, abs=1e-3)

    def test_unity_dc_gains(self, envelopes):
        assert freq_eval(envelopes.upper, 0.0) == pytest.approx(1.0, abs=1e-12)
        assert freq_eval(envelopes.lower, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_upper_metrics(self, envelopes):
        m = step_metrics(envelopes.upper)
        assert m.overshoot_pct == pytest.approx(5.0, abs=0.5)
        assert m.settle_2pct_s == pytest.approx(3.0, rel=0.10)

    def test_lower_metrics(self, envelopes):
        m = step_metrics(envelopes.lower)
        assert m.rise_10_90_s >= 1.7
        assert m.settle_2pct_s <= 3.5

    def test_ordering(self, envelopes):
        _, up = step_response(envelopes.upper, 1e-3, 10.0)
        _, lo = step_response(envelopes.lower, 1e-3, 10.0)
        assert np.min(up - lo) >= -1e-9

    def test_infeasible_spec_raises(self):
        # sub-second settling cannot coexist with a 1.7 s rise floor
        with pytest.raises(SpecConflictError):
            synthesize_envelopes(TrackingSpec(settle_time_s=0.5))
