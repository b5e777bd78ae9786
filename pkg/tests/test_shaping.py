import itertools
import math

import pytest

from qftlab.bounds import compute_template, feasible_oracle
from qftlab.lti import freq_eval, poly_roots, tf, tf_allclose
from qftlab.shaping import (
    ComplexPolePair,
    ControllerDesign,
    Gain,
    Integrator,
    RealPole,
    RealZero,
    compose_controller,
    design_from_json,
    design_to_json,
    load_design,
    reference_controller,
    save_design,
    validate_design,
)
from qftlab.specs import DisturbanceSpec, TrackingSpec

PRINTED_NUM = (3673.0, 7.729e4, 6.233e4)
PRINTED_DEN = (1.0, 632.9, 2.003e5, 2.662e6, 7.791e6)


class TestCompose:
    def test_empty_design_is_unity(self):
        out = compose_controller(ControllerDesign())
        assert tf_allclose(out, tf([1], [1]))

    def test_gain_and_pole(self):
        out = compose_controller(ControllerDesign((Gain(1.0), RealPole(1.0))))
        assert tf_allclose(out, tf([1], [1, 1]))

    def test_integrator(self):
        out = compose_controller(ControllerDesign((Integrator(2),)))
        assert tf_allclose(out, tf([1], [1, 0, 0]))

    def test_reference_matches_printed_coefficients(self):
        gc = compose_controller(reference_controller())
        for got, ref in zip(gc.num.coeffs, PRINTED_NUM):
            assert abs(got - ref) <= 1e-3 * abs(ref)
        for got, ref in zip(gc.den.coeffs, PRINTED_DEN):
            assert abs(got - ref) <= 1e-3 * abs(ref)

    def test_order_invariance(self):
        elements = reference_controller().elements
        gc = compose_controller(ControllerDesign(elements))
        for perm in itertools.islice(itertools.permutations(elements), 0, 24, 5):
            alt = compose_controller(ControllerDesign(perm))
            for a, b in zip(gc.num.coeffs, alt.num.coeffs):
                assert a == pytest.approx(b, rel=1e-12)
            for a, b in zip(gc.den.coeffs, alt.den.coeffs):
                assert a == pytest.approx(b, rel=1e-12)

    def test_negative_corners_stored_as_magnitude(self):
        assert RealPole(-9.45).a == 9.45
        assert ComplexPolePair(-309.6, 309.7).re == 309.6

    def test_zero_corner_rejected(self):
        with pytest.raises(ValueError):
            RealPole(0.0)


class TestReferenceController:
    def test_dc_gain(self):
        gc = compose_controller(reference_controller())
        dc = freq_eval(gc, 0.0)
        assert dc.real == pytest.approx(6.233e4 / 7.791e6, rel=2e-3)

    def test_relative_degree(self):
        gc = compose_controller(reference_controller())
        assert gc.relative_degree == 2

    def test_all_poles_stable(self):
        gc = compose_controller(reference_controller())
        assert max(poly_roots(gc.den).real) < 0


class TestDesignSerialization:
    def test_round_trip(self, tmp_path):
        d = reference_controller()
        path = tmp_path / "design.json"
        save_design(d, path)
        assert load_design(path) == d

    def test_json_shape(self):
        doc = design_to_json(reference_controller())
        assert doc[0] == {"kind": "gain", "params": {"k": 3673.0}}
        assert design_from_json(doc) == reference_controller()

    def test_bad_documents_rejected(self):
        with pytest.raises(ValueError):
            design_from_json({"kind": "gain"})
        with pytest.raises(ValueError):
            design_from_json([{"kind": "warp_drive", "params": {}}])
        with pytest.raises(ValueError):
            design_from_json([{"kind": "gain", "params": {"zz": 1}}])


@pytest.fixture(scope="module")
def report(grid_plants):
    return validate_design(reference_controller(), grid_plants,
                           TrackingSpec(), DisturbanceSpec(),
                           (1e-4, 0.1, 1.0, 2.0, 10.0))


class TestValidateDesign:

    def test_dc_magnitudes(self, report):
        v = report.per_frequency[0]
        assert v.worst_tracking <= 1.2
        assert v.worst_disturbance <= 0.4
        # nominal-only values are tighter; worst case stays near them at DC
        assert v.worst_tracking == pytest.approx(0.794, abs=0.05)
        assert v.worst_disturbance == pytest.approx(0.206, abs=0.08)

    def test_stability_flags(self, report, grid_plants):
        assert report.nominal_stable
        assert report.robust_stable
        assert report.unstable_plant_indices == ()

    def test_margins_finite(self, report):
        assert math.isfinite(report.gain_margin_db)
        assert math.isfinite(report.phase_margin_deg)
        assert report.gain_margin_db > 0
        assert report.phase_margin_deg > 0

    def test_zero_controller_fails_disturbance(self, grid_plants):
        rep = validate_design(ControllerDesign((Gain(0.0),)), grid_plants,
                              TrackingSpec(), DisturbanceSpec(), (1e-3, 0.1))
        assert not rep.per_frequency[0].disturbance_ok
        assert rep.per_frequency[0].worst_disturbance > 0.9  # |Gd(0)| = 1

    def test_improper_rejected(self, grid_plants):
        with pytest.raises(ValueError):
            validate_design(ControllerDesign((RealZero(1.0),)), grid_plants,
                            TrackingSpec(), DisturbanceSpec(), (1.0,))

    def test_verdicts_agree_with_oracle(self, grid_plants, report):
        gc = compose_controller(reference_controller())
        for v in report.per_frequency:
            t = compute_template(grid_plants, v.omega)
            g = freq_eval(gc, v.omega)
            mag, phase = abs(g), math.degrees(math.atan2(g.imag, g.real))
            # skip frequencies where the worst case sits on the cap boundary
            if abs(v.worst_tracking - 1.2) > 1e-3:
                assert feasible_oracle(t, "tracking", 1.2, phase, mag) \
                    == v.tracking_ok
            if abs(v.worst_disturbance - 0.4) > 1e-3:
                assert feasible_oracle(t, "disturbance", 0.4, phase, mag) \
                    == v.disturbance_ok

    def test_gain_scaling_shifts_loop_in_db(self, nominal):
        base = compose_controller(reference_controller())
        doubled = compose_controller(
            ControllerDesign((Gain(2.0),) + reference_controller().elements))
        for w in (0.1, 1.0, 10.0, 100.0):
            l0 = abs(freq_eval(nominal.Gu, w) * freq_eval(base, w))
            l1 = abs(freq_eval(nominal.Gu, w) * freq_eval(doubled, w))
            shift = 20 * math.log10(l1 / l0)
            assert shift == pytest.approx(20 * math.log10(2.0), abs=1e-9)
