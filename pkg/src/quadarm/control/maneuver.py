"""Two-loop maneuver control: position outer loop, attitude inner loop.

Controller outputs are dimensionless commands. Each channel has an authority
that converts a unit command into physical units:

* thrust: m/s^2 of vertical acceleration per unit (times the nominal mass),
* roll, pitch, yaw: N m of body moment per unit.

Sign conventions (ENU world, FLU body): a +x position error asks for a
positive pitch (nose down), a +y error asks for a negative roll, and a
positive attitude error produces a positive moment about the same axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..arm_dynamics import GRAVITY
from ..kinematics import wrap_pi
from ..quadcopter import RigidBodyState, VehicleParams, motor_mixing
from .lyapunov import solve_lyapunov
from .mrac import (AdaptationRates, DEFAULT_NEURONS, DEFAULT_Q_DIAGONAL, MracState,
                   ReferenceModel, make_mrac_state, mrac_adapt, mrac_control)
from .pid import PidGains, PidState, TABLE_II, pid_step

AXES = ("roll", "pitch", "yaw")


@dataclass(frozen=True)
class ControlAuthority:
    thrust: float = 20.0
    roll: float = 0.4
    pitch: float = 0.4
    yaw: float = 0.0263

    def __post_init__(self):
        if not all(math.isfinite(v) and v > 0.0 for v in
                   (self.thrust, self.roll, self.pitch, self.yaw)):
            raise ValueError("control authorities must be positive")

    def moment(self, axis: str) -> float:
        return getattr(self, axis)


@dataclass(frozen=True)
class OuterLoopGains:
    thrust: PidGains = TABLE_II["thrust"]
    x: PidGains = PidGains(6.0, 1.5, 5.0, 20.0, 2.0)
    y: PidGains = PidGains(6.0, 1.5, 5.0, 20.0, 2.0)
    tilt_limit: float = math.radians(20.0)
    # collective thrust kept inside this fraction of the rotor capacity
    thrust_floor: float = 0.1
    thrust_ceiling: float = 0.9


@dataclass(frozen=True)
class InnerLoopGains:
    roll: PidGains = TABLE_II["roll"]
    pitch: PidGains = TABLE_II["pitch"]
    yaw: PidGains = TABLE_II["yaw"]


@dataclass
class OuterLoopState:
    x: PidState = field(default_factory=PidState)
    y: PidState = field(default_factory=PidState)
    z: PidState = field(default_factory=PidState)

    def reset(self):
        for s in (self.x, self.y, self.z):
            s.reset()


@dataclass
class InnerLoopState:
    roll: PidState = field(default_factory=PidState)
    pitch: PidState = field(default_factory=PidState)
    yaw: PidState = field(default_factory=PidState)


@dataclass(frozen=True)
class ReferenceSample:
    position: np.ndarray
    velocity: np.ndarray
    yaw: float


@dataclass(frozen=True)
class Setpoints:
    thrust: float     # N, collective
    roll: float
    pitch: float
    yaw: float


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def position_outer_loop(ref: ReferenceSample, state: RigidBodyState, gains: OuterLoopGains,
                        pid_states: OuterLoopState, dt: float, nominal_mass: float,
                        authority: ControlAuthority, vehicle: VehicleParams) -> Setpoints:
    """Thrust and attitude setpoints from the position error.

    Vertical error drives the thrust PID; its output is a vertical
    acceleration added to gravity and divided by the tilt factor. Horizontal
    errors give desired accelerations which are inverted to small-angle
    roll/pitch setpoints in the heading frame.
    """
    err = np.asarray(ref.position, dtype=float) - state.position
    ax = pid_step(gains.x, pid_states.x, float(err[0]), dt)
    ay = pid_step(gains.y, pid_states.y, float(err[1]), dt)
    uz = pid_step(gains.thrust, pid_states.z, float(err[2]), dt)

    cy, sy = math.cos(state.yaw), math.sin(state.yaw)
    a_fwd = cy * ax + sy * ay
    a_left = -sy * ax + cy * ay
    lim = gains.tilt_limit
    pitch_sp = _clamp(a_fwd / GRAVITY, -lim, lim)
    roll_sp = _clamp(-a_left / GRAVITY, -lim, lim)

    tilt = max(math.cos(state.roll) * math.cos(state.pitch), 0.5)
    thrust = nominal_mass * (GRAVITY + authority.thrust * uz) / tilt
    cap = 4.0 * vehicle.max_rotor_thrust
    thrust = _clamp(thrust, gains.thrust_floor * cap, gains.thrust_ceiling * cap)
    return Setpoints(thrust, roll_sp, pitch_sp, float(ref.yaw))


def attitude_errors(sp: Setpoints, state: RigidBodyState) -> np.ndarray:
    return np.array([sp.roll - state.roll, sp.pitch - state.pitch,
                     wrap_pi(sp.yaw - state.yaw)])


def attitude_inner_loop(sp: Setpoints, state: RigidBodyState, gains: InnerLoopGains,
                        pid_states: InnerLoopState, dt: float,
                        authority: ControlAuthority) -> np.ndarray:
    """Body moments (N m) about x, y, z from independent attitude PIDs."""
    err = attitude_errors(sp, state)
    out = np.empty(3)
    for i, axis in enumerate(AXES):
        u = pid_step(getattr(gains, axis), getattr(pid_states, axis), float(err[i]), dt)
        out[i] = authority.moment(axis) * u
    return out


@dataclass
class ControlOutput:
    thrusts: np.ndarray
    setpoints: Setpoints
    moments: np.ndarray
    saturated: bool


class PidManeuverController:
    name = "pid"

    def __init__(self, vehicle: VehicleParams, nominal_mass: float,
                 outer: OuterLoopGains | None = None, inner: InnerLoopGains | None = None,
                 authority: ControlAuthority | None = None):
        self.vehicle = vehicle
        self.nominal_mass = nominal_mass
        self.outer = outer or OuterLoopGains()
        self.inner = inner or InnerLoopGains()
        self.authority = authority or ControlAuthority()
        self.outer_state = OuterLoopState()
        self.inner_state = InnerLoopState()
        self._mix_inv = np.linalg.inv(vehicle.mixing_matrix())

    def attitude_moments(self, sp: Setpoints, state: RigidBodyState, dt: float) -> np.ndarray:
        return attitude_inner_loop(sp, state, self.inner, self.inner_state, dt, self.authority)

    def step(self, ref: ReferenceSample, state: RigidBodyState, dt: float) -> ControlOutput:
        sp = position_outer_loop(ref, state, self.outer, self.outer_state, dt,
                                 self.nominal_mass, self.authority, self.vehicle)
        moments = self.attitude_moments(sp, state, dt)
        thrusts, sat = motor_mixing(sp.thrust, *moments, self.vehicle, self._mix_inv)
        return ControlOutput(thrusts, sp, moments, sat)


@dataclass(frozen=True)
class MracSettings:
    q_diagonal: tuple = DEFAULT_Q_DIAGONAL
    omega_n: float = 4.0
    zeta: float = 1.0
    neurons: int = DEFAULT_NEURONS
    rates: AdaptationRates = AdaptationRates()
    v_scale: float = 0.1


def stacked_attitude_model(omega_n: float, zeta: float, b: np.ndarray):
    """Plant ``(A, B)`` and reference ``(A_m, B_m)`` for the stacked state.

    State order is (roll, p, pitch, q, yaw, r); ``b`` holds the nominal
    angular acceleration per unit command for each axis.
    """
    a = np.zeros((6, 6))
    bb = np.zeros((6, 3))
    a_m = np.zeros((6, 6))
    b_m = np.zeros((6, 3))
    w2 = omega_n * omega_n
    for i in range(3):
        j = 2 * i
        a[j, j + 1] = 1.0
        bb[j + 1, i] = b[i]
        a_m[j, j + 1] = 1.0
        a_m[j + 1, j] = -w2
        a_m[j + 1, j + 1] = -2.0 * zeta * omega_n
        b_m[j + 1, i] = w2
    return a, bb, a_m, b_m


def nominal_gains(a, b, a_m, b_m):
    """Matching gains with ``A + B kx^T = A_m`` and ``B kr^T = B_m``."""
    bp = np.linalg.pinv(b)
    kx = (bp @ (a_m - a)).T
    kr = (bp @ b_m).T
    return kx, kr


class MracManeuverController(PidManeuverController):
    """Thrust and position loops as in the PID controller; attitude by MRAC."""

    name = "mrac"

    def __init__(self, vehicle: VehicleParams, nominal_mass: float,
                 outer: OuterLoopGains | None = None, authority: ControlAuthority | None = None,
                 settings: MracSettings | None = None, seed: int = 0):
        super().__init__(vehicle, nominal_mass, outer, None, authority)
        self.settings = settings or MracSettings()
        s = self.settings
        inertia = np.asarray(vehicle.inertia, dtype=float)
        self.gain = np.array([self.authority.moment(ax) for ax in AXES])
        b_nom = self.gain / inertia
        self.a, self.b, a_m, b_m = stacked_attitude_model(s.omega_n, s.zeta, b_nom)
        self.reference = ReferenceModel(a_m, b_m)
        p = solve_lyapunov(a_m, np.diag(np.asarray(s.q_diagonal, dtype=float)))
        kx, kr = nominal_gains(self.a, self.b, a_m, b_m)
        self.mrac: MracState = make_mrac_state(6, 3, p, n_ref=3, neurons=s.neurons,
                                               kx0=kx, kr0=kr,
                                               rng=np.random.default_rng(seed),
                                               v_scale=s.v_scale)
        self._started = False

    @staticmethod
    def attitude_vector(state: RigidBodyState, yaw_ref: float) -> np.ndarray:
        # yaw expressed on the branch nearest the reference
        yaw = yaw_ref - wrap_pi(yaw_ref - state.yaw)
        w = state.body_rates
        return np.array([state.roll, w[0], state.pitch, w[1], yaw, w[2]])

    def attitude_moments(self, sp: Setpoints, state: RigidBodyState, dt: float) -> np.ndarray:
        x = self.attitude_vector(state, sp.yaw)
        r = np.array([sp.roll, sp.pitch, sp.yaw])
        if not self._started:
            self.reference.state = x.copy()
            self._started = True
        e = self.reference.state - x
        u = mrac_control(x, r, self.mrac)
        self.mrac = mrac_adapt(self.mrac, x, r, e, self.b, self.settings.rates, dt)
        self.reference.step(r, dt)
        return self.gain * u


def make_controller(kind: str, vehicle: VehicleParams, nominal_mass: float, **kw):
    if kind == "pid":
        kw.pop("settings", None)
        kw.pop("seed", None)
        return PidManeuverController(vehicle, nominal_mass, **kw)
    if kind == "mrac":
        kw.pop("inner", None)
        return MracManeuverController(vehicle, nominal_mass, **kw)
    raise ValueError(f"unknown controller {kind!r}")


def mrac_maneuver_controller(ref: ReferenceSample, state: RigidBodyState,
                             controller: MracManeuverController, dt: float) -> np.ndarray:
    """Rotor thrusts from the MRAC maneuver controller."""
    return controller.step(ref, state, dt).thrusts
