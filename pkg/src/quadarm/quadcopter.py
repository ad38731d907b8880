"""Rigid-body quadcopter, X-configuration motor mixing and arm coupling wrench.

Frames: world is ENU (z up). The body frame is x forward, y left, z up, with
attitude given as Z-Y-X Euler angles (yaw, then pitch, then roll). With this
choice a positive pitch tilts the nose down and the thrust vector toward +x.

Rotor layout (top view, x forward)::

        3 (+a,+a) CCW     1 (+a,-a) CW
                     \\  /
                      \\/
                      /\\
                     /  \\
        2 (-a,+a) CW      4 (-a,-a) CCW

where ``a = arm_length / sqrt(2)`` and spin is seen from above. A clockwise
rotor's drag reacts on the body as a positive (counter-clockwise) yaw torque.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arm_dynamics import GRAVITY, LinkParams, _TRI, com_positions
from .errors import EulerSingularity

_PITCH_LIMIT = math.pi / 2.0 - 1e-6

# Position of each rotor in units of a, and its yaw-torque sign.
_ROTOR_XY = np.array([[1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [-1.0, -1.0]])
_ROTOR_SPIN = np.array([1.0, 1.0, -1.0, -1.0])


@dataclass
class RigidBodyState:
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: np.ndarray = field(default_factory=lambda: np.zeros(3))  # roll, pitch, yaw
    body_rates: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name in ("position", "velocity", "attitude", "body_rates"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float).reshape(3))

    @property
    def roll(self) -> float:
        return float(self.attitude[0])

    @property
    def pitch(self) -> float:
        return float(self.attitude[1])

    @property
    def yaw(self) -> float:
        return float(self.attitude[2])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.position, self.velocity, self.attitude, self.body_rates])

    @classmethod
    def from_vector(cls, v) -> "RigidBodyState":
        v = np.asarray(v, dtype=float)
        return cls(v[0:3].copy(), v[3:6].copy(), v[6:9].copy(), v[9:12].copy())


@dataclass(frozen=True)
class VehicleParams:
    """Vehicle constants. Defaults describe a 9 kg take-off-weight class airframe.

    ``mass`` excludes the arm and payload, which act through the coupling wrench.
    """
    mass: float = 6.3
    inertia: tuple[float, float, float] = (0.35, 0.35, 0.6)
    arm_length: float = 0.45
    thrust_coefficient: float = 3.0e-5
    drag_coefficient: float = 6.0e-7
    max_rotor_thrust: float = 45.0

    def __post_init__(self):
        vals = (self.mass, *self.inertia, self.arm_length, self.thrust_coefficient,
                self.drag_coefficient, self.max_rotor_thrust)
        if not all(math.isfinite(v) and v > 0.0 for v in vals):
            raise ValueError("vehicle parameters must be positive and finite")

    @property
    def yaw_moment_ratio(self) -> float:
        """Reaction torque per newton of thrust (m)."""
        return self.drag_coefficient / self.thrust_coefficient

    def mixing_matrix(self) -> np.ndarray:
        """Rows map rotor thrusts to (total thrust, roll, pitch, yaw moments)."""
        a = self.arm_length / math.sqrt(2.0)
        A = np.empty((4, 4))
        A[0] = 1.0
        A[1] = a * _ROTOR_XY[:, 1]
        A[2] = -a * _ROTOR_XY[:, 0]
        A[3] = self.yaw_moment_ratio * _ROTOR_SPIN
        return A


@dataclass(frozen=True)
class Wrench:
    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    torque: np.ndarray = field(default_factory=lambda: np.zeros(3))


def rotation_body_to_world(roll: float, pitch: float, yaw: float) -> np.ndarray:
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    return np.array([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ])


def euler_rates(attitude, body_rates) -> np.ndarray:
    roll, pitch = attitude[0], attitude[1]
    if abs(pitch) >= _PITCH_LIMIT:
        raise EulerSingularity(f"pitch {pitch:.6f} rad at the Euler singularity")
    p, q, r = body_rates
    sr, cr = math.sin(roll), math.cos(roll)
    tp, cp = math.tan(pitch), math.cos(pitch)
    qs = q * sr + r * cr
    return np.array([p + qs * tp, q * cr - r * sr, qs / cp])


def quad_dynamics(x: np.ndarray, rotor_thrusts, external: Wrench,
                  p: VehicleParams, mixing: np.ndarray | None = None) -> np.ndarray:
    """Derivative of the 12-vector ``[position, velocity, attitude, body_rates]``.

    ``mixing`` may carry a precomputed :meth:`VehicleParams.mixing_matrix`.
    """
    if isinstance(x, RigidBodyState):
        x = x.as_vector()
    A = p.mixing_matrix() if mixing is None else mixing
    f = A @ np.asarray(rotor_thrusts, dtype=float)
    att = x[6:9]
    w = x[9:12]
    R = rotation_body_to_world(att[0], att[1], att[2])

    force_body = np.array([0.0, 0.0, f[0]]) + external.force
    accel = R @ force_body / p.mass
    accel[2] -= GRAVITY

    ix, iy, iz = p.inertia
    p_, q_, r_ = w
    tx, ty, tz = f[1:] + external.torque
    out = np.empty(12)
    out[0:3] = x[3:6]
    out[3:6] = accel
    out[6:9] = euler_rates(att, w)
    # Euler's equations, w x (I w) written out
    out[9] = (tx - (iz - iy) * q_ * r_) / ix
    out[10] = (ty - (ix - iz) * r_ * p_) / iy
    out[11] = (tz - (iy - ix) * p_ * q_) / iz
    return out


def hover_thrusts(total_mass: float, p: VehicleParams) -> np.ndarray:
    return np.full(4, total_mass * GRAVITY / 4.0)


def motor_mixing(thrust_cmd: float, roll_cmd: float, pitch_cmd: float, yaw_cmd: float,
                 p: VehicleParams, mixing_inverse: np.ndarray | None = None
                 ) -> tuple[np.ndarray, bool]:
    """Rotor thrusts realising the commanded collective thrust and body moments.

    Returns ``(thrusts, saturated)``; thrusts are clipped to ``[0, max]`` and
    ``saturated`` reports whether clipping happened.
    """
    Ainv = np.linalg.inv(p.mixing_matrix()) if mixing_inverse is None else mixing_inverse
    raw = Ainv @ np.array([thrust_cmd, roll_cmd, pitch_cmd, yaw_cmd], dtype=float)
    thrusts = np.clip(raw, 0.0, p.max_rotor_thrust)
    return thrusts, bool(np.any(thrusts != raw))


def arm_reaction_wrench(arm_state, arm_accel, links: Sequence[LinkParams], payload_mass: float,
                        base_attitude=(0.0, 0.0, 0.0), mount=(0.0, 0.0, -0.1),
                        base_yaw: float = 0.0, thrust: float | None = None,
                        vehicle_mass: float | None = None) -> Wrench:
    """Quasi-static wrench the suspended arm and payload exert on the airframe.

    Links and payload are lumped at their centres of mass. Each mass pushes
    on the airframe with ``m_i (s - a_i)`` where ``a_i`` is its acceleration
    relative to the body and ``s`` is the body-frame acceleration it shares
    with the airframe, gravity included:

    * without ``thrust``: ``s`` is gravity alone, rotated into the body by
      ``base_attitude``. At rest this is exactly the suspended weight.
    * with ``thrust`` (collective, N) and ``vehicle_mass``: the translational
      balance of the whole assembly gives ``s = -(T - sum m_i a_i) / M``, so
      a tilted vehicle feels no spurious pendulum moment.

    The arm's rotational inertia about the airframe is neglected. Moments are
    about the body origin; the arm plane is the body x-z plane yawed by
    ``base_yaw`` about the mount point.
    """
    masses = np.array([lk.m for lk in links] + [payload_mass])
    if not links or not np.any(masses > 0.0):
        return Wrench()
    q = np.asarray(arm_state.q, dtype=float)
    qd = np.asarray(arm_state.qdot, dtype=float)
    qdd = np.asarray(arm_accel, dtype=float)

    planar = com_positions(q, links)  # (4, 2): radial, height
    lengths = np.array([lk.l for lk in links])
    phi = _TRI @ q
    phid = _TRI @ qd
    phidd = _TRI @ qdd
    coefs = np.array([
        [lengths[0] / 2, 0.0, 0.0],
        [lengths[0], lengths[1] / 2, 0.0],
        [lengths[0], lengths[1], lengths[2] / 2],
        [lengths[0], lengths[1], lengths[2]],
    ])
    c, s = np.cos(phi), np.sin(phi)
    acc_r = coefs @ (-s * phidd - c * phid ** 2)
    acc_h = coefs @ (c * phidd - s * phid ** 2)

    cy, sy = math.cos(base_yaw), math.sin(base_yaw)
    mount = np.asarray(mount, dtype=float)
    r = np.column_stack([planar[:, 0] * cy, planar[:, 0] * sy, planar[:, 1]]) + mount
    a_rel = np.column_stack([acc_r * cy, acc_r * sy, acc_h])

    if thrust is None:
        R = rotation_body_to_world(*base_attitude)
        shared = R.T @ np.array([0.0, 0.0, -GRAVITY])
    else:
        if vehicle_mass is None:
            raise ValueError("vehicle_mass is required together with thrust")
        total = vehicle_mass + float(masses.sum())
        shared = -(np.array([0.0, 0.0, thrust]) - masses @ a_rel) / total
    F = masses[:, None] * (shared[None, :] - a_rel)
    torque = np.array([
        r[:, 1] @ F[:, 2] - r[:, 2] @ F[:, 1],
        r[:, 2] @ F[:, 0] - r[:, 0] @ F[:, 2],
        r[:, 0] @ F[:, 1] - r[:, 1] @ F[:, 0],
    ])
    return Wrench(F.sum(axis=0), torque)
