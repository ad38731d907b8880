import math

import numpy as np
import pytest
from scipy import signal

from quadarm.arm_dynamics import GRAVITY
from quadarm.control.maneuver import (ControlAuthority, InnerLoopGains, InnerLoopState, MracManeuverController,
                                      OuterLoopGains, OuterLoopState, PidManeuverController,
                                      ReferenceSample, Setpoints, attitude_inner_loop,
                                      make_controller, mrac_maneuver_controller, nominal_gains,
                                      position_outer_loop, stacked_attitude_model)
from quadarm.control.pid import TABLE_II
from quadarm.integrate import rk4_step
from quadarm.quadcopter import (RigidBodyState, VehicleParams, Wrench, hover_thrusts,
                                quad_dynamics)

P = VehicleParams()
AUTH = ControlAuthority()
DT = 1e-3


def outer(ref_pos, state=None, yaw=0.0, mass=P.mass):
    state = state or RigidBodyState()
    ref = ReferenceSample(np.asarray(ref_pos, float), np.zeros(3), yaw)
    return position_outer_loop(ref, state, OuterLoopGains(), OuterLoopState(), DT, mass,
                               AUTH, P)


def torque_driven_run(moment_fn, setpoint_fn, steps):
    """Rigid body at hover thrust with the controller moments applied directly."""
    x = np.zeros(12)
    hover = hover_thrusts(P.mass, P)
    f = lambda z, u: quad_dynamics(z, hover, Wrench(torque=u), P)
    roll = np.empty(steps)
    for k in range(steps):
        s = RigidBodyState.from_vector(x)
        roll[k] = x[6]
        x = rk4_step(f, x, moment_fn(setpoint_fn(k), s), DT)
    return roll, x


class TestOuterLoop:
    def test_zero_error_is_hover_trim(self):
        sp = outer([0.0, 0.0, 0.0])
        assert sp.thrust == pytest.approx(P.mass * GRAVITY)
        assert sp.roll == 0.0 and sp.pitch == 0.0

    def test_hover_thrusts_from_full_controller(self):
        c = PidManeuverController(P, P.mass)
        out = c.step(ReferenceSample(np.zeros(3), np.zeros(3), 0.0), RigidBodyState(), DT)
        assert np.allclose(out.thrusts, P.mass * GRAVITY / 4)
        assert not out.saturated

    def test_forward_error_pitches_nose_down(self):
        assert outer([1.0, 0.0, 0.0]).pitch > 0.0

    def test_left_error_rolls_negative(self):
        sp = outer([0.0, 1.0, 0.0])
        assert sp.roll < 0.0 and sp.pitch == 0.0

    def test_heading_rotation(self):
        # facing +y, a +x error lies to the right of the nose
        sp = outer([1.0, 0.0, 0.0], RigidBodyState(attitude=[0, 0, math.pi / 2]), math.pi / 2)
        assert sp.roll > 0.0
        assert sp.pitch == pytest.approx(0.0, abs=1e-12)

    def test_tilt_limit(self):
        sp = outer([100.0, -100.0, 0.0])
        lim = OuterLoopGains().tilt_limit
        assert sp.pitch == pytest.approx(lim) and sp.roll == pytest.approx(lim)

    def test_altitude_error_raises_thrust(self):
        assert outer([0, 0, 0.5]).thrust > P.mass * GRAVITY
        assert outer([0, 0, -0.5]).thrust < P.mass * GRAVITY

    def test_thrust_envelope(self):
        cap = 4 * P.max_rotor_thrust
        assert outer([0, 0, 1e4]).thrust == pytest.approx(0.9 * cap)
        assert outer([0, 0, -1e4]).thrust == pytest.approx(0.1 * cap)

    def test_tilt_compensation(self):
        tilted = RigidBodyState(attitude=[0.3, 0.0, 0.0])
        assert outer([0, 0, 0], tilted).thrust == pytest.approx(P.mass * GRAVITY / math.cos(0.3))


class TestInnerLoop:
    @pytest.mark.parametrize("axis", [0, 1, 2])
    def test_decoupled_and_signed(self, axis):
        sp = [0.0, 0.0, 0.0]
        sp[axis] = 0.1
        m = attitude_inner_loop(Setpoints(0.0, *sp), RigidBodyState(), InnerLoopGains(),
                                InnerLoopState(), DT, AUTH)
        assert m[axis] > 0.0
        assert np.count_nonzero(m) == 1

    def test_yaw_error_wraps(self):
        st_ = RigidBodyState(attitude=[0, 0, math.pi - 0.05])
        m = attitude_inner_loop(Setpoints(0.0, 0.0, 0.0, -math.pi + 0.05), st_,
                                InnerLoopGains(), InnerLoopState(), DT, AUTH)
        assert m[2] > 0.0

    def test_roll_step_matches_transfer_function(self):
        """Sampled closed loop of a double integrator with the discrete PID."""
        c = PidManeuverController(P, P.mass)
        step = 0.05
        roll, _ = torque_driven_run(lambda sp, s: c.attitude_moments(sp, s, DT),
                                    lambda k: Setpoints(0.0, step, 0.0, 0.0), 3000)
        g = TABLE_II["roll"]
        a = AUTH.roll / P.inertia[0]
        plant_num = a * DT * DT / 2 * np.array([1.0, 1.0])          # ZOH of a/s^2
        plant_den = np.polymul([1.0, -1.0], [1.0, -1.0])
        ctrl_num = np.polyadd(g.kp * np.array([1 + g.n * DT, -1.0]),
                              g.kd * g.n * np.array([1.0, -1.0]))
        ctrl_den = np.array([1 + g.n * DT, -1.0])
        ln, ld = np.polymul(ctrl_num, plant_num), np.polymul(ctrl_den, plant_den)
        _, (y,) = signal.dstep(signal.dlti(ln, np.polyadd(ld, ln), dt=DT), n=3000)
        assert np.max(np.abs(roll - step * y.ravel())) < 0.02 * step


class TestMrac:
    def test_nominal_gains_match_reference(self):
        b = np.array([1.0, 2.0, 0.5])
        a, bb, a_m, b_m = stacked_attitude_model(4.0, 1.0, b)
        kx, kr = nominal_gains(a, bb, a_m, b_m)
        assert np.allclose(a + bb @ kx.T, a_m)
        assert np.allclose(bb @ kr.T, b_m)

    def test_tracks_reference_model(self):
        c = MracManeuverController(P, P.mass, seed=3)
        errs = []

        def moments(sp, s):
            out = c.attitude_moments(sp, s, DT)
            errs.append(c.reference.state - c.attitude_vector(s, sp.yaw))
            return out

        _, x = torque_driven_run(moments, lambda k: Setpoints(0, 0.1 * math.sin(k * DT), 0.05, 0.2),
                                 8000)
        errs = np.array(errs)
        assert np.max(np.abs(errs[:, ::2])) < 0.01        # angles
        assert x[7] == pytest.approx(0.05, abs=5e-3)
        assert x[8] == pytest.approx(0.2, abs=5e-3)

    def test_seed_controls_network_init(self):
        a = MracManeuverController(P, P.mass, seed=1).mrac.shl_v
        b = MracManeuverController(P, P.mass, seed=1).mrac.shl_v
        c = MracManeuverController(P, P.mass, seed=2).mrac.shl_v
        assert np.array_equal(a, b) and not np.array_equal(a, c)

    def test_hover_output(self):
        c = make_controller("mrac", P, P.mass)
        thrusts = mrac_maneuver_controller(ReferenceSample(np.zeros(3), np.zeros(3), 0.0),
                                           RigidBodyState(), c, DT)
        assert np.allclose(thrusts, P.mass * GRAVITY / 4)

    def test_factory(self):
        assert make_controller("pid", P, 1.0, seed=4).name == "pid"
        with pytest.raises(ValueError):
            make_controller("lqr", P, 1.0)

    def test_authority_validation(self):
        with pytest.raises(ValueError):
            ControlAuthority(roll=0.0)
