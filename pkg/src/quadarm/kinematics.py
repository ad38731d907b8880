"""Denavit-Hartenberg kinematics of the 4-revolute arm and 3-angle gripper.

Conventions
-----------
The arm base frame has z pointing up. Joint 1 (``theta1``) yaws the arm plane
about z; joints 2-4 are pitch joints acting inside that plane, measured from
the horizontal. A planar point is therefore described by its radial distance
``r = hypot(x, y)`` and its height ``z``, and the wrist azimuth is
``psi = theta2 + theta3 + theta4``.

The elbow-down branch is the one whose elbow lies below the shoulder-wrist
chord, i.e. ``theta3 >= 0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NonInvertible, SingularWarning, Unreachable

TWO_PI = 2.0 * math.pi
_ACOS_GRACE = 1e-12


def wrap_pi(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.remainder(angle, TWO_PI)
    return math.pi if a == -math.pi else a


def wrap_2pi(angle: float) -> float:
    """Wrap to [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class DHRow:
    theta: float
    d: float
    alpha: float
    a: float

    def __post_init__(self):
        vals = (self.theta, self.d, self.alpha, self.a)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite DH row {vals}")
        object.__setattr__(self, "theta", wrap_pi(self.theta))
        object.__setattr__(self, "alpha", wrap_pi(self.alpha))

    def transform(self) -> np.ndarray:
        return dz_transform(self.theta, self.d) @ dx_transform(self.alpha, self.a)


@dataclass(frozen=True)
class ArmGeometry:
    l1: float
    l2: float
    l3: float
    d1: float = 0.0

    def __post_init__(self):
        if min(self.l1, self.l2, self.l3) <= 0.0:
            raise ValueError("link lengths must be strictly positive")
        if self.d1 < 0.0:
            raise ValueError("d1 must be non-negative")

    @property
    def reach(self) -> float:
        return self.l1 + self.l2 + self.l3

    @property
    def lengths(self) -> tuple[float, float, float]:
        return (self.l1, self.l2, self.l3)


# The CAD link lengths are unpublished. These values make the worked example
# (target 0.9 m out, 0.38 m down, wrist pointing back) resolve to exactly
# (0, 300, 60, 180) degrees: l1*sin(60 deg) = 0.38 and l1/2 + l2 - l3 = 0.9.
_L1 = 0.38 / math.sin(math.pi / 3.0)
_L3 = 0.15
DEFAULT_GEOMETRY = ArmGeometry(l1=_L1, l2=0.9 - _L1 / 2.0 + _L3, l3=_L3, d1=0.1)


@dataclass(frozen=True)
class ArmJointAngles:
    theta1: float = 0.0
    theta2: float = 0.0
    theta3: float = 0.0
    theta4: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0
    phi3: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValueError("joint angles must be finite")

    @property
    def psi(self) -> float:
        return self.theta2 + self.theta3 + self.theta4

    @property
    def planar(self) -> np.ndarray:
        """Joints 2-4, the coordinates used by the arm dynamics."""
        return np.array([self.theta2, self.theta3, self.theta4])

    def as_tuple(self) -> tuple[float, ...]:
        return (self.theta1, self.theta2, self.theta3, self.theta4,
                self.phi1, self.phi2, self.phi3)

    def normalized(self) -> "ArmJointAngles":
        """Angles wrapped to [0, 2*pi) for reporting."""
        return ArmJointAngles(*(wrap_2pi(v) for v in self.as_tuple()))

    def degrees(self) -> tuple[float, ...]:
        return tuple(math.degrees(v) for v in self.normalized().as_tuple())


def dx_transform(alpha: float, a: float) -> np.ndarray:
    """Translate by ``a`` along x and rotate by ``alpha`` about x."""
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([
        [1.0, 0.0, 0.0, a],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])


def dz_transform(gamma: float, c: float) -> np.ndarray:
    """Translate by ``c`` along z and rotate by ``gamma`` about z."""
    cg, sg = math.cos(gamma), math.sin(gamma)
    return np.array([
        [cg, -sg, 0.0, 0.0],
        [sg, cg, 0.0, 0.0],
        [0.0, 0.0, 1.0, c],
        [0.0, 0.0, 0.0, 1.0],
    ])


def is_valid_transform(T: np.ndarray, tol: float = 1e-12) -> bool:
    T = np.asarray(T, dtype=float)
    if T.shape != (4, 4) or not np.all(np.isfinite(T)):
        return False
    if not np.array_equal(T[3], [0.0, 0.0, 0.0, 1.0]):
        return False
    R = T[:3, :3]
    if np.max(np.abs(R.T @ R - np.eye(3))) > tol:
        return False
    return abs(np.linalg.det(R) - 1.0) <= tol


def dh_table(q: ArmJointAngles, g: ArmGeometry) -> list[DHRow]:
    """Rows of the 7-joint table: arm joints 1-4 then gripper joints 5-7."""
    h = math.pi / 2.0
    return [
        DHRow(q.theta1, 0.0, h, 0.0),
        DHRow(q.theta2, 0.0, 0.0, g.l1),
        DHRow(q.theta3, 0.0, 0.0, g.l2),
        DHRow(q.theta4, 0.0, h, g.l3),
        DHRow(q.phi1, 0.0, h, 0.0),
        DHRow(q.phi2, 0.0, -h, 0.0),
        DHRow(q.phi3, 0.0, 0.0, 0.0),
    ]


def reach_matrix(q: ArmJointAngles, g: ArmGeometry) -> np.ndarray:
    h = math.pi / 2.0
    return (dz_transform(q.theta1, 0.0) @ dx_transform(h, 0.0)
            @ dz_transform(q.theta2, 0.0) @ dx_transform(0.0, g.l1)
            @ dz_transform(q.theta3, 0.0) @ dx_transform(0.0, g.l2)
            @ dz_transform(q.theta4, 0.0) @ dx_transform(h, g.l3))


def reach_position(q: ArmJointAngles, g: ArmGeometry) -> np.ndarray:
    """Closed form of the reach matrix translation column."""
    c2 = q.theta2
    c23 = c2 + q.theta3
    c234 = c23 + q.theta4
    L = g.l1 * math.cos(c2) + g.l2 * math.cos(c23) + g.l3 * math.cos(c234)
    S = g.l1 * math.sin(c2) + g.l2 * math.sin(c23) + g.l3 * math.sin(c234)
    return np.array([L * math.cos(q.theta1), L * math.sin(q.theta1), S])


def end_effector_matrix(phi1: float, phi2: float, phi3: float) -> np.ndarray:
    h = math.pi / 2.0
    return (dz_transform(phi1, 0.0) @ dx_transform(h, 0.0)
            @ dz_transform(phi2, 0.0) @ dx_transform(-h, 0.0)
            @ dz_transform(phi3, 0.0) @ dx_transform(0.0, 0.0))


def forward_kinematics(q: ArmJointAngles, g: ArmGeometry) -> np.ndarray:
    return reach_matrix(q, g) @ end_effector_matrix(q.phi1, q.phi2, q.phi3)


def inverse_kinematics(target, psi: float, g: ArmGeometry,
                       branch: str = "elbow-down") -> ArmJointAngles:
    """Joint angles placing the end of link 3 at ``target`` with azimuth ``psi``.

    ``target`` is (x, y, z) in the arm base frame. Gripper angles are left at
    zero; solve them separately with :func:`end_effector_ik`.

    Raises :class:`Unreachable` when the wrist point is outside the annulus of
    the l1-l2 sub-chain. A target on the vertical axis emits
    :class:`SingularWarning` and uses ``theta1 = 0``.
    """
    if branch not in ("elbow-down", "elbow-up"):
        raise ValueError(f"unknown branch {branch!r}")
    x, y, z = (float(v) for v in target)

    r = math.hypot(x, y)
    if r < 1e-12:
        warnings.warn("theta1 undefined for a target on the base axis; using 0",
                      SingularWarning, stacklevel=2)
        theta1 = 0.0
    else:
        theta1 = math.atan2(y, x)

    # wrist (end of link 2) in the arm plane
    wx = r - g.l3 * math.cos(psi)
    wz = z - g.l3 * math.sin(psi)

    c3 = (wx * wx + wz * wz - g.l1 ** 2 - g.l2 ** 2) / (2.0 * g.l1 * g.l2)
    if abs(c3) > 1.0 + _ACOS_GRACE:
        raise Unreachable(f"target {target!r} with psi={psi:.6g} is out of reach "
                          f"(cos theta3 = {c3:.6g})")
    c3 = min(1.0, max(-1.0, c3))
    theta3 = math.acos(c3)
    if branch == "elbow-up":
        theta3 = -theta3

    eta = math.atan2(wz, wx)
    theta2 = eta - math.atan2(g.l2 * math.sin(theta3), g.l1 + g.l2 * math.cos(theta3))
    theta4 = psi - (theta2 + theta3)
    return ArmJointAngles(theta1, theta2, theta3, theta4)


def end_effector_ik(R: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Gripper transform ``E`` solving ``R @ E = T``."""
    R = np.asarray(R, dtype=float)
    T = np.asarray(T, dtype=float)
    if not (np.all(np.isfinite(R)) and np.all(np.isfinite(T))):
        raise NonInvertible("non-finite transform")
    if np.linalg.cond(R) > 1e12:
        raise NonInvertible("reach matrix is numerically singular")
    try:
        return np.linalg.solve(R, T)
    except np.linalg.LinAlgError as exc:
        raise NonInvertible(str(exc)) from exc
