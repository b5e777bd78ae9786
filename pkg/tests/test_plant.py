import numpy as np
import pytest

from qftlab.lti import freq_eval
from qftlab.plant import (
    NOMINAL_PARAMS,
    PlantParams,
    UncertaintySet,
    build_state_space,
    check_reference_intervals,
    coefficient_table,
    make_instance,
    sample_plants,
)


class TestBuildStateSpace:
    def test_fixed_entries(self):
        ss = build_state_space(NOMINAL_PARAMS)
        assert ss.A[1, 0] == -175.0          # chassis row, Q1
        assert ss.A[4, 4] == -2380.0         # air-mass decay, S2
        assert ss.B_u[4] == 51.0             # S3

    def test_damping_ratio_entry(self):
        ss = build_state_space(NOMINAL_PARAMS)
        assert ss.A[1, 1] == pytest.approx(-50.0 / 90.0, rel=1e-12)

    def test_wheel_stiffness_entry(self):
        ss = build_state_space(NOMINAL_PARAMS)
        assert ss.A[3, 2] == pytest.approx(-(1486.0 + 1e5 / 16.0), rel=1e-12)
        assert ss.A[3, 2] == -7736.0

    def test_road_input_scaling_exact(self):
        p = NOMINAL_PARAMS
        ss = build_state_space(p)
        assert ss.B_d[3] * p.m_t == p.k_t

    def test_bad_params_rejected(self):
        with pytest.raises(ValueError):
            PlantParams(m_a=-1.0, m_t=16.0, c_a=50.0, c_t=600.0, k_t=1e5)
        with pytest.raises(ValueError):
            PlantParams(m_a=90.0, m_t=16.0, c_a=-5.0, c_t=600.0, k_t=1e5)


class TestDerivedTransferFunctions:
    def test_b1_matches_trace(self, nominal):
        p = NOMINAL_PARAMS
        expected = p.c_a / p.m_a + (p.c_t + p.c_a) / p.m_t + p.s2
        table = coefficient_table(nominal)
        assert table["b1"] == pytest.approx(expected, rel=1e-12)
        assert 2414.0 <= table["b1"] <= 2428.0

    def test_b5_matches_determinant(self, nominal):
        table = coefficient_table(nominal)
        det = np.linalg.det(-np.array(nominal.ss.A))
        assert table["b5"] == pytest.approx(det, rel=1e-9)
        assert table["b5"] == pytest.approx(6.7587e6, rel=1e-3)

    def test_shared_denominator(self, nominal):
        assert nominal.Gu.den.coeffs == nominal.Gd.den.coeffs
        assert nominal.Gd.den.coeffs[0] == 1.0

    def test_static_road_following(self, grid_plants):
        for inst in grid_plants:
            assert abs(freq_eval(inst.Gd, 0.0) - 1.0) < 1e-9

    def test_control_dc_gain(self, nominal):
        assert abs(freq_eval(nominal.Gu, 0.0)) == pytest.approx(480.8, rel=2e-3)

    def test_b5_scales_with_kt_over_mt(self):
        base = make_instance(NOMINAL_PARAMS)
        doubled = make_instance(NOMINAL_PARAMS.replace(m_t=32.0))
        b5_base = coefficient_table(base)["b5"]
        b5_doubled = coefficient_table(doubled)["b5"]
        assert b5_doubled == pytest.approx(b5_base / 2.0, rel=1e-9)


class TestSampling:
    def test_levels_one_is_nominal_only(self, uncertainty):
        plants = sample_plants(uncertainty, 1)
        assert len(plants) == 1 and plants[0].is_nominal

    def test_levels_two_corners_plus_nominal(self, corner_plants):
        assert len(corner_plants) == 33
        assert sum(p.is_nominal for p in corner_plants) == 1
        assert corner_plants[-1].is_nominal  # appended when off-grid

    def test_levels_three_grid(self, grid_plants):
        assert len(grid_plants) == 243
        assert sum(p.is_nominal for p in grid_plants) == 1

    def test_nominal_consistent_across_levels(self, uncertainty):
        one = sample_plants(uncertainty, 1)[0]
        three = next(p for p in sample_plants(uncertainty, 3) if p.is_nominal)
        assert one.Gd.den.coeffs == three.Gd.den.coeffs
        assert one.Gd.num.coeffs == three.Gd.num.coeffs
        assert one.Gu.num.coeffs == three.Gu.num.coeffs

    def test_deterministic_ordering(self, uncertainty):
        a = sample_plants(uncertainty, 2)
        b = sample_plants(uncertainty, 2)
        assert all(x.params == y.params for x, y in zip(a, b))

    def test_invalid_levels(self, uncertainty):
        with pytest.raises(ValueError):
            sample_plants(uncertainty, 0)


class TestReferenceIntervals:
    def test_all_checks_pass_on_corners(self, corner_plants):
        report = check_reference_intervals(corner_plants)
        assert report.all_passed
        for c in report.checks:
            assert c.range_intersects, c.name
            assert c.nominal_inside, c.name

    def test_nominal_b1_inside(self, corner_plants):
        c = check_reference_intervals(corner_plants).by_name("b1")
        assert c.ref_lo < c.nominal < c.ref_hi
        assert c.nominal == pytest.approx(2421.2, abs=0.5)

    def test_structural_zero_passes_against_residue_interval(self, corner_plants):
        c = check_reference_intervals(corner_plants).by_name("a1")
        assert c.kind == "near_zero"
        assert c.nominal == 0.0
        assert c.passed

    def test_c3_within_fixed_tolerance(self, corner_plants):
        c = check_reference_intervals(corner_plants).by_name("c3")
        assert c.kind == "fixed"
        assert abs(c.nominal - 3.52e5) <= 0.015 * 3.52e5
        assert c.passed

    def test_b5_variation_flagged(self, corner_plants):
        c = check_reference_intervals(corner_plants).by_name("b5")
        assert "computed_range_varies_but_reference_is_fixed" in c.flags
        assert c.computed_max > c.computed_min  # varies with m_t

    def test_empty_plant_list_rejected(self):
        with pytest.raises(ValueError):
            check_reference_intervals([])


class TestUncertaintySet:
    def test_default_half_ranges(self, uncertainty):
        assert uncertainty.half_ranges["m_t"] == 5.0
        assert uncertainty.half_ranges["k_t"] == 10.0

    def test_invalid_range_rejected(self):
        with pytest.raises(ValueError):
            UncertaintySet(half_ranges={"m_t": 20.0})  # m_t would hit -4 kg

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ValueError):
            UncertaintySet(half_ranges={"bogus": 1.0})
