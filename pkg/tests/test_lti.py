import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qftlab.lti import (
    Polynomial,
    SingularityError,
    StateSpaceModel,
    closed_loop_disturbance,
    closed_loop_tracking,
    freq_eval,
    is_hurwitz,
    poly_add,
    poly_multiply,
    poly_roots,
    simulate_rk4,
    ss_to_tf,
    tf,
    tf_allclose,
    tf_to_ss,
    to_nichols,
)


def P(*coeffs):
    return Polynomial(coeffs)


class TestPolynomial:
    def test_multiply_hand_expansion(self):
        out = poly_multiply(P(1, 1), P(1, 2))
        assert out.coeffs == (1.0, 3.0, 2.0)

    def test_multiply_identity(self):
        p = P(3.5, -2, 1)
        assert poly_multiply(p, P(1)).coeffs == p.coeffs

    def test_multiply_matches_reference_controller_numerator(self):
        # 3673 (s+0.84)(s+20.2) against the published numerator
        out = poly_multiply(P(3673.0), poly_multiply(P(1, 0.84), P(1, 20.2)))
        for got, ref in zip(out.coeffs, (3673.0, 7.729e4, 6.233e4)):
            assert abs(got - ref) <= 1e-3 * abs(ref)

    def test_degree_sum(self):
        out = poly_multiply(P(1, 0, 2), P(2, 1))
        assert out.degree == 3

    def test_add(self):
        assert poly_add(P(1, 2), P(1, 0, 0)).coeffs == (1.0, 1.0, 2.0)

    def test_leading_zero_trim(self):
        assert Polynomial([0.0, 0.0, 1.0, 5.0]).coeffs == (1.0, 5.0)
        assert Polynomial([0.0]).is_zero


class TestRoots:
    def test_simple_real(self):
        roots = sorted(poly_roots(P(1, 3, 2)).real)
        assert roots == pytest.approx([-2.0, -1.0], abs=1e-12)

    def test_pure_imaginary(self):
        roots = sorted(poly_roots(P(1, 0, 1)), key=lambda z: z.imag)
        assert roots[0] == pytest.approx(-1j, abs=1e-12)
        assert roots[1] == pytest.approx(1j, abs=1e-12)

    def test_published_denominator_roots(self):
        # s^4 + 632.9 s^3 + 2.003e5 s^2 + 2.662e6 s + 7.791e6
        roots = poly_roots(P(1, 632.9, 2.003e5, 2.662e6, 7.791e6))
        expected = [-9.45, -4.3, complex(-309.6, 309.7), complex(-309.6, -309.7)]
        for e in expected:
            assert min(abs(r - e) for r in roots) <= 0.005 * abs(e)

    def test_residual_bound(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            coeffs = rng.normal(size=rng.integers(2, 9))
            if abs(coeffs[0]) < 1e-3:
                coeffs[0] = 1.0
            p = Polynomial(coeffs)
            bound = 1e-6 * max(abs(c) for c in p.coeffs)
            for r in poly_roots(p):
                assert abs(p(r)) <= bound * max(1.0, abs(r)) ** p.degree

    def test_zero_poly_rejected(self):
        with pytest.raises(ValueError):
            poly_roots(P(0))


class TestHurwitz:
    def test_stable(self):
        assert is_hurwitz(P(1, 1))

    def test_unstable(self):
        assert not is_hurwitz(P(1, -1))

    def test_published_denominator_stable(self):
        assert is_hurwitz(P(1, 632.9, 2.003e5, 2.662e6, 7.791e6))

    def test_agreement_with_roots_on_random_polynomials(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            coeffs = rng.normal(size=rng.integers(2, 8))
            if coeffs[0] == 0:
                coeffs[0] = 1.0
            p = Polynomial(coeffs)
            assert is_hurwitz(p) == (max(poly_roots(p).real) < 0)


class TestStateSpaceConversion:
    def test_first_order(self):
        out = ss_to_tf(StateSpaceModel([[-1.0]], [1.0], [0.0], [1.0]), "control")
        assert tf_allclose(out, tf([1], [1, 1]))

    def test_tf_to_ss_first_order(self):
        ss = tf_to_ss(tf([1], [1, 1]))
        assert ss.A[0, 0] == -1.0
        assert ss.B_u[0] == 1.0
        assert ss.C_out[0] == 1.0
        assert ss.D_u == 0.0

    def test_tf_to_ss_biproper_division(self):
        # (s+2)/(s+1) = 1 + 1/(s+1)
        ss = tf_to_ss(tf([1, 2], [1, 1]))
        assert ss.D_u == 1.0
        assert tf_allclose(ss_to_tf(ss, "control"), tf([1, 2], [1, 1]))

    def test_improper_rejected(self):
        with pytest.raises(ValueError):
            tf_to_ss(tf([1, 0, 0], [1, 1]))

    def test_round_trip_random_stable_systems(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(1, 7))
            A = rng.normal(size=(n, n))
            A -= (np.max(np.linalg.eigvals(A).real) + 1.0) * np.eye(n)
            B = rng.normal(size=n)
            C = rng.normal(size=n)
            D = float(rng.normal())
            sys = StateSpaceModel(A, B, np.zeros(n), C, D_u=D)
            t1 = ss_to_tf(sys, "control")
            t2 = ss_to_tf(tf_to_ss(t1), "control")
            for w in np.logspace(-2, 2, 50):
                direct = C @ np.linalg.solve(1j * w * np.eye(n) - A, B) + D
                for t in (t1, t2):
                    rel = abs(freq_eval(t, w) - direct) / max(abs(direct), 1e-12)
                    assert rel < 1e-8

    def test_controller_realization_matches_resolvent(self):
        num = np.convolve([3673.0], np.convolve([1, 0.84], [1, 20.2]))
        den = np.convolve(np.convolve([1, 9.45], [1, 4.3]),
                          [1, 2 * 309.6, 309.6**2 + 309.7**2])
        gc = tf(num, den)
        ss = tf_to_ss(gc)
        rng = np.random.default_rng(5)
        for w in rng.uniform(0.01, 500.0, 20):
            direct = (ss.C_out @ np.linalg.solve(1j * w * np.eye(ss.n) - ss.A,
                                                 ss.B_u) + ss.D_u)
            rel = abs(freq_eval(gc, w) - direct) / abs(direct)
            assert rel < 1e-8


class TestFreqEval:
    def test_first_order_point(self):
        z = freq_eval(tf([1], [1, 1]), 1.0)
        assert z == pytest.approx(0.5 - 0.5j, abs=1e-12)

    def test_pole_evaluation_raises(self):
        with pytest.raises(SingularityError):
            freq_eval(tf([1], [1, 0, 1]), 1.0)

    def test_negative_omega_rejected(self):
        with pytest.raises(ValueError):
            freq_eval(tf([1], [1, 1]), -1.0)


class TestNichols:
    def test_unity(self):
        pt = to_nichols(1 + 0j)
        assert pt.phase_deg == 0.0
        assert pt.mag_db == 0.0

    def test_minus_one(self):
        pt = to_nichols(-1 + 0j)
        assert pt.phase_deg == pytest.approx(-180.0, abs=1e-12)
        assert pt.mag_db == pytest.approx(0.0, abs=1e-12)

    def test_positive_imaginary_wraps(self):
        pt = to_nichols(0.1j)
        assert pt.phase_deg == pytest.approx(-270.0, abs=1e-12)
        assert pt.mag_db == pytest.approx(-20.0, abs=1e-12)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            to_nichols(0j)

    @given(st.complex_numbers(min_magnitude=1e-6, max_magnitude=1e6,
                              allow_nan=False, allow_infinity=False))
    def test_preserves_magnitude_and_phase_mod_360(self, z):
        pt = to_nichols(z)
        assert -360.0 < pt.phase_deg <= 0.0
        assert 10 ** (pt.mag_db / 20.0) == pytest.approx(abs(z), rel=1e-9)
        diff = (pt.phase_deg - math.degrees(math.atan2(z.imag, z.real))) % 360.0
        assert min(diff, 360.0 - diff) < 1e-9


class TestClosedLoops:
    def test_unity_plant_and_controller(self):
        out = closed_loop_tracking(tf([1], [1]), tf([1], [1]))
        assert tf_allclose(out, tf([1], [2]))

    def test_zero_controller(self):
        out = closed_loop_tracking(tf([1], [1, 1]), tf([0], [1]))
        assert out.num.is_zero

    def test_dc_value_reference_loop(self, nominal, ref_design):
        from qftlab.shaping import compose_controller
        gc = compose_controller(ref_design)
        T = closed_loop_tracking(nominal.Gu, gc)
        assert abs(freq_eval(T, 1e-6)) == pytest.approx(0.7936, abs=5e-4)

    def test_disturbance_zero_controller_returns_gd(self, nominal):
        out = closed_loop_disturbance(nominal.Gd, nominal.Gu, tf([0], [1]))
        assert tf_allclose(out, nominal.Gd)

    def test_disturbance_zero_gd(self):
        out = closed_loop_disturbance(tf([0], [1]), tf([1], [1, 1]), tf([1], [1]))
        assert out.num.is_zero

    def test_disturbance_dc_reference_loop(self, nominal, ref_design):
        from qftlab.shaping import compose_controller
        gc = compose_controller(ref_design)
        S = closed_loop_disturbance(nominal.Gd, nominal.Gu, gc)
        mag = abs(freq_eval(S, 1e-6))
        assert mag == pytest.approx(0.2064, abs=5e-4)
        assert mag <= 0.4

    def test_tracking_pointwise_identity(self, nominal, ref_design):
        from qftlab.shaping import compose_controller
        gc = compose_controller(ref_design)
        T = closed_loop_tracking(nominal.Gu, gc)
        for w in (0.1, 1.0, 7.7, 42.0, 300.0):
            l = freq_eval(nominal.Gu, w) * freq_eval(gc, w)
            expect = l / (1 + l)
            rel = abs(freq_eval(T, w) - expect) / abs(expect)
            assert rel < 1e-10


class TestSimulateRK4:
    def test_exponential_decay(self):
        sys = StateSpaceModel([[-1.0]], [0.0], [0.0], [1.0])
        n = 1000
        x = simulate_rk4(sys, np.zeros(n + 1), np.zeros(n + 1), 1e-3, 1.0,
                         x0=[1.0])
        assert abs(x[-1, 0] - math.exp(-1.0)) < 1e-9

    def test_oscillator_energy_drift(self):
        sys = StateSpaceModel([[0.0, 1.0], [-1.0, 0.0]], [0, 0], [0, 0], [1, 0])
        T = 2 * math.pi
        dt = 1e-3
        n = int(round(T / dt))
        # T must be an exact multiple of dt for the simulator
        T = n * dt
        x = simulate_rk4(sys, np.zeros(n + 1), np.zeros(n + 1), dt, T,
                         x0=[1.0, 0.0])
        energy = x[:, 0] ** 2 + x[:, 1] ** 2
        assert np.max(np.abs(energy - 1.0)) < 1e-8

    def test_convergence_order(self):
        sys = StateSpaceModel([[-1.0]], [0.0], [0.0], [1.0])
        errs = []
        for dt in (1e-2, 5e-3):
            n = int(round(1.0 / dt))
            x = simulate_rk4(sys, np.zeros(n + 1), np.zeros(n + 1), dt, 1.0,
                             x0=[1.0])
            errs.append(abs(x[-1, 0] - math.exp(-1.0)))
        order = math.log2(errs[0] / errs[1])
        assert order >= 3.8

    def test_richardson_on_closed_loop_bump(self, nominal, ref_design):
        # dt must stay inside the RK4 stability region for the fast plant
        # mode near -2380 rad/s, so refine downward from 1e-3
        from qftlab.roadsim import TwoBumps, generate_road, simulate_closed_loop
        profile = TwoBumps(t1_s=0.5, t2_s=1.5)
        T = 2.5
        runs = {}
        for dt in (1e-3, 5e-4, 2.5e-4):
            road = generate_road(profile, dt, T)
            runs[dt] = simulate_closed_loop(nominal, ref_design, road, dt, T)
        d1 = np.max(np.abs(runs[1e-3].x_a - runs[5e-4].x_a[::2]))
        d2 = np.max(np.abs(runs[5e-4].x_a - runs[2.5e-4].x_a[::2]))
        ratio = d1 / d2
        # fourth order gives 16x; the fast modes' step-edge errors decay
        # before accumulating, pushing the measured factor toward 32x
        assert 14.0 < ratio < 40.0

    def test_input_length_mismatch_rejected(self):
        sys = StateSpaceModel([[-1.0]], [1.0], [0.0], [1.0])
        with pytest.raises(ValueError):
            simulate_rk4(sys, np.zeros(5), np.zeros(6), 1e-3, 5e-3)

    def test_bad_dt_rejected(self):
        sys = StateSpaceModel([[-1.0]], [1.0], [0.0], [1.0])
        with pytest.raises(ValueError):
            simulate_rk4(sys, np.zeros(1), np.zeros(1), -1e-3, 1.0)
