"""Fixed-step scenario runner for the quadcopter with its suspended arm."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .arm_dynamics import (ArmState, LinkParams, arm_derivative, default_links,
                           equations_of_motion, gravity_vector, torque_profile)
from .control.maneuver import (ControlAuthority, InnerLoopGains, MracSettings,
                               OuterLoopGains, ReferenceSample, make_controller)
from .errors import ConfigInvalid, NonFiniteState
from .integrate import rk4_step
from .kinematics import DEFAULT_GEOMETRY, ArmGeometry
from .quadcopter import RigidBodyState, VehicleParams, arm_reaction_wrench, quad_dynamics
from .trajectory import ReferenceTrajectory, generate_reference

__all__ = ["ArmConfig", "PayloadConfig", "ScenarioConfig", "SimLog", "rk4_step",
           "run_scenario", "simulate", "step_reference", "REST_POSE"]

# Arm hanging straight down below its mount.
REST_POSE = (-math.pi / 2.0, 0.0, 0.0)
_ZERO3 = np.zeros(3)


@dataclass(frozen=True)
class PayloadConfig:
    mass: float = 0.08 ** 3 * 1000.0
    attach_time: float = 0.0
    release_time: float = math.inf
    enabled: bool = True
    # controller hover trim follows the known payload mass
    feedforward: bool = True


@dataclass(frozen=True)
class ArmConfig:
    geometry: ArmGeometry = DEFAULT_GEOMETRY
    total_mass: float = 1.92
    mount: tuple = (0.0, 0.0, -0.1)
    target_q: tuple = (-1.4, -0.1, -0.1)
    rise_duration: float = 20.0
    time_constant: float = 5.0
    start_time: float | None = None   # None: start of the longest hold
    damping: float = 0.5              # joint viscous friction, N m s/rad

    def links(self) -> tuple[LinkParams, ...]:
        return default_links(self.geometry.lengths, self.total_mass)


@dataclass(frozen=True)
class ScenarioConfig:
    waypoints: tuple
    controller: str = "pid"
    dt: float = 1e-3
    duration: float | None = None
    seed: int = 0
    cruise_speed: float = 1.0
    accel_limit: float | None = 0.5
    payload: PayloadConfig = PayloadConfig()
    vehicle: VehicleParams = VehicleParams()
    arm: ArmConfig = ArmConfig()
    outer: OuterLoopGains = OuterLoopGains()
    inner: InnerLoopGains = InnerLoopGains()
    authority: ControlAuthority = ControlAuthority()
    mrac: MracSettings = MracSettings()
    name: str = "scenario"

    def validate(self) -> "ScenarioConfig":
        if self.controller not in ("pid", "mrac"):
            raise ConfigInvalid(f"controller must be pid or mrac, got {self.controller!r}")
        if not (0.0 < self.dt <= 0.01):
            raise ConfigInvalid(f"dt must lie in (0, 0.01], got {self.dt}")
        if self.duration is not None and not self.duration > 0.0:
            raise ConfigInvalid("duration must be positive")
        if not self.waypoints:
            raise ConfigInvalid("scenario has no waypoints")
        if not self.cruise_speed > 0.0:
            raise ConfigInvalid("cruise_speed must be positive")
        pl = self.payload
        if not pl.attach_time < pl.release_time:
            raise ConfigInvalid("payload attach_time must precede release_time")
        if pl.mass < 0.0:
            raise ConfigInvalid("payload mass must be non-negative")
        return self

    def with_overrides(self, controller: str | None = None,
                       payload: bool | None = None) -> "ScenarioConfig":
        cfg = self
        if controller is not None:
            cfg = replace(cfg, controller=controller)
        if payload is not None:
            cfg = replace(cfg, payload=replace(cfg.payload, enabled=payload))
        return cfg


@dataclass
class SimLog:
    t: np.ndarray
    reference: np.ndarray        # (n, 3)
    position: np.ndarray         # (n, 3)
    yaw_reference: np.ndarray
    attitude: np.ndarray         # (n, 3) roll, pitch, yaw
    thrusts: np.ndarray          # (n, 4)
    arm_q: np.ndarray            # (n, 3)
    payload_attached: np.ndarray  # (n,) bool
    setpoints: np.ndarray        # (n, 3) roll, pitch, yaw setpoints
    events: list = field(default_factory=list)
    controller: str = "pid"
    payload: bool = True
    name: str = "scenario"

    def __len__(self) -> int:
        return len(self.t)

    @property
    def yaw(self) -> np.ndarray:
        return self.attitude[:, 2]

    @classmethod
    def empty(cls, **kw) -> "SimLog":
        z = np.zeros((0, 3))
        return cls(np.zeros(0), z, z, np.zeros(0), z, np.zeros((0, 4)), z,
                   np.zeros(0, dtype=bool), z, **kw)


def _arm_start_time(cfg: ScenarioConfig, holds) -> float | None:
    if cfg.arm.start_time is not None:
        return cfg.arm.start_time
    if not holds:
        return None
    start, _, _ = max(holds, key=lambda h: h[1] - h[0])
    return start * cfg.dt


def run_scenario(cfg: ScenarioConfig) -> SimLog:
    """Run ``cfg`` to completion.

    Each step: apply payload events, step the controller on the sampled
    state, then advance arm and airframe by one RK4 step with the commands
    and the arm reaction wrench held.
    """
    cfg.validate()
    ref = generate_reference(cfg.waypoints, cfg.cruise_speed, cfg.dt, cfg.accel_limit,
                             cfg.duration)
    return simulate(cfg, ref)


def step_reference(start, step, duration: float, dt: float, step_time: float = 1.0,
                   yaw: float = 0.0) -> ReferenceTrajectory:
    """Hover at ``start``, then jump by ``step`` at ``step_time``."""
    n = int(round(duration / dt)) + 1
    t = np.arange(n) * dt
    pos = np.tile(np.asarray(start, dtype=float), (n, 1))
    pos[t >= step_time - 1e-12] += np.asarray(step, dtype=float)
    vel = np.zeros_like(pos)
    vel[:-1] = np.diff(pos, axis=0) / dt
    return ReferenceTrajectory(t, pos, vel, np.full(n, float(yaw)), dt, ())


def simulate(cfg: ScenarioConfig, ref: ReferenceTrajectory) -> SimLog:
    """Fly ``cfg``'s vehicle along an already sampled reference."""
    cfg.validate()
    dt = cfg.dt
    if abs(ref.dt - dt) > 1e-15:
        raise ConfigInvalid("reference sample time differs from the scenario dt")
    n = len(ref)
    vehicle = cfg.vehicle
    links = cfg.arm.links()
    pl = cfg.payload
    payload_mass = pl.mass if pl.enabled else 0.0
    nominal_mass = vehicle.mass + cfg.arm.total_mass

    ctrl = make_controller(cfg.controller, vehicle, nominal_mass, outer=cfg.outer,
                           inner=cfg.inner, authority=cfg.authority, settings=cfg.mrac,
                           seed=cfg.seed)

    t_arm = _arm_start_time(cfg, ref.holds)
    profile = None
    if t_arm is not None:
        attached_then = pl.enabled and pl.attach_time <= t_arm < pl.release_time
        tau_final = gravity_vector(np.asarray(cfg.arm.target_q, dtype=float), links,
                                   payload_mass if attached_then else 0.0)
        profile = torque_profile(tau_final, cfg.arm.rise_duration, dt, cfg.arm.time_constant)

    x = RigidBodyState(position=ref.position[0], attitude=(0.0, 0.0, ref.yaw[0])).as_vector()
    arm = np.array([*REST_POSE, 0.0, 0.0, 0.0])
    mixing = vehicle.mixing_matrix()
    mount = np.asarray(cfg.arm.mount, dtype=float)
    damping = cfg.arm.damping

    log_ref = ref.position
    log_pos = np.empty((n, 3))
    log_att = np.empty((n, 3))
    log_thr = np.empty((n, 4))
    log_q = np.empty((n, 3))
    log_pl = np.zeros(n, dtype=bool)
    log_sp = np.empty((n, 3))
    events = []
    attached = False

    for k in range(n):
        t = k * dt
        want = pl.enabled and pl.attach_time <= t < pl.release_time
        if want != attached:
            attached = want
            events.append((t, "attach" if attached else "release"))
        m_pl = payload_mass if attached else 0.0
        if pl.feedforward:
            ctrl.nominal_mass = nominal_mass + m_pl

        state = RigidBodyState.from_vector(x)
        sample = ReferenceSample(ref.position[k], ref.velocity[k], float(ref.yaw[k]))
        out = ctrl.step(sample, state, dt)

        log_pos[k] = x[0:3]
        log_att[k] = x[6:9]
        log_thr[k] = out.thrusts
        log_q[k] = arm[:3]
        log_pl[k] = attached
        log_sp[k] = (out.setpoints.roll, out.setpoints.pitch, out.setpoints.yaw)
        if k == n - 1:
            break

        tau_ext = profile.at(t - t_arm) if profile is not None else _ZERO3
        arm_state = ArmState(arm[:3], arm[3:])
        qdd = equations_of_motion(arm_state, tau_ext - damping * arm[3:], links, m_pl)
        wrench = arm_reaction_wrench(arm_state, qdd, links, m_pl, mount=mount,
                                     thrust=float(out.thrusts.sum()),
                                     vehicle_mass=vehicle.mass)

        x = rk4_step(lambda s, u: quad_dynamics(s, u, wrench, vehicle, mixing), x,
                     out.thrusts, dt)
        arm = rk4_step(lambda s, u: _damped_arm(s, u, links, m_pl, damping), arm, tau_ext, dt)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(arm))):
            raise NonFiniteState(t + dt)

    return SimLog(ref.t, log_ref, log_pos, ref.yaw.copy(), log_att, log_thr, log_q, log_pl,
                  log_sp, events, cfg.controller, pl.enabled, cfg.name)


def _damped_arm(s, tau_ext, links, payload, damping):
    return arm_derivative(s, tau_ext - damping * s[3:], links, payload)
