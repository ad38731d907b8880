"""Planar 3-link arm: Lagrangian equations of motion and the open-loop torque profile.

The three dynamic coordinates ``q = (q1, q2, q3)`` are the pitch joints 2-4 of
the kinematic chain; angles are measured from the horizontal and gravity acts
along -y of the arm plane (y is "up" in this module). Each link is a thin rod
with its centre of mass at mid-length. A grasped payload is a point mass at
the tip of link 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SingularMass

GRAVITY = 9.81

# Lower-triangular ones: phi = _TRI @ q gives cumulative link angles.
_TRI = np.tril(np.ones((3, 3)))


@dataclass(frozen=True)
class LinkParams:
    m: float
    l: float

    def __post_init__(self):
        if not (self.m > 0.0 and self.l > 0.0):
            raise ValueError(f"link mass and length must be positive, got {self}")


@dataclass
class ArmState:
    q: np.ndarray = field(default_factory=lambda: np.zeros(3))
    qdot: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float).reshape(3)
        self.qdot = np.asarray(self.qdot, dtype=float).reshape(3)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.qdot])

    @classmethod
    def from_vector(cls, v) -> "ArmState":
        v = np.asarray(v, dtype=float)
        return cls(v[:3].copy(), v[3:].copy())


def default_links(lengths: Sequence[float], total_mass: float = 1.92) -> tuple[LinkParams, ...]:
    """Links whose masses are proportional to length and sum to ``total_mass``."""
    total_len = float(sum(lengths))
    return tuple(LinkParams(total_mass * l / total_len, float(l)) for l in lengths)


def link_inertia(p: LinkParams) -> np.ndarray:
    """Thin-rod inertia about the centre of mass, rod along body x."""
    k = p.l ** 2 / 12.0
    return p.m * np.diag([0.0, k, k])


def link_rotation(cumulative_angle: float) -> np.ndarray:
    c, s = math.cos(cumulative_angle), math.sin(cumulative_angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def angular_jacobian(i: int) -> np.ndarray:
    if i not in (1, 2, 3):
        raise ValueError("link index must be 1, 2 or 3")
    J = np.zeros((3, 3))
    J[2, :i] = 1.0
    return J


def _com_coefficients(lengths: Sequence[float], i: int) -> np.ndarray:
    """Weights c_j so that the CoM of link i sits at sum_j c_j (cos phi_j, sin phi_j).

    ``i = 4`` denotes the tip of link 3 (payload attachment point).
    """
    c = np.zeros(3)
    if i == 4:
        c[:] = lengths
        return c
    c[: i - 1] = lengths[: i - 1]
    c[i - 1] = lengths[i - 1] / 2.0
    return c


def velocity_jacobian(q, i: int, links: Sequence[LinkParams]) -> np.ndarray:
    """Map from joint rates to the centre-of-mass velocity of link ``i``.

    Column k sums ``(2 - delta_ij) * l_j / 2 * (-s_j, c_j, 0)`` over j in [k, i].
    """
    if i not in (1, 2, 3):
        raise ValueError("link index must be 1, 2 or 3")
    q = np.asarray(getattr(q, "q", q), dtype=float)
    lengths = [lk.l for lk in links]
    phi = np.cumsum(q)
    J = np.zeros((3, 3))
    for k in range(i):
        for j in range(k, i):
            coef = lengths[j] if j < i - 1 else lengths[j] / 2.0
            J[0, k] -= coef * math.sin(phi[j])
            J[1, k] += coef * math.cos(phi[j])
    return J


def com_positions(q, links: Sequence[LinkParams]) -> np.ndarray:
    """Planar (x, y) of each link centre of mass followed by the tip, shape (4, 2)."""
    lengths = [lk.l for lk in links]
    phi = np.cumsum(np.asarray(q, dtype=float))
    u = np.column_stack([np.cos(phi), np.sin(phi)])
    C = np.array([_com_coefficients(lengths, i) for i in (1, 2, 3, 4)])
    return C @ u


def kinetic_energy(q, qdot, links: Sequence[LinkParams], payload: float = 0.0) -> float:
    """Sum over links of translational plus rotational energy."""
    q = np.asarray(q, dtype=float)
    qdot = np.asarray(qdot, dtype=float)
    phi = np.cumsum(q)
    T = 0.0
    for i, lk in enumerate(links, start=1):
        v = velocity_jacobian(q, i, links) @ qdot
        w = angular_jacobian(i) @ qdot
        R = link_rotation(phi[i - 1])
        I_world = R @ link_inertia(lk) @ R.T
        T += 0.5 * (lk.m * v @ v + w @ I_world @ w)
    if payload > 0.0:
        v_tip = _tip_jacobian(q, links) @ qdot
        T += 0.5 * payload * v_tip @ v_tip
    return float(T)


def _tip_jacobian(q, links) -> np.ndarray:
    lengths = [lk.l for lk in links]
    phi = np.cumsum(q)
    J = np.zeros((3, 3))
    for k in range(3):
        for j in range(k, 3):
            J[0, k] -= lengths[j] * math.sin(phi[j])
            J[1, k] += lengths[j] * math.cos(phi[j])
    return J


def potential_energy(q, links: Sequence[LinkParams], payload: float = 0.0,
                     g: float = GRAVITY) -> float:
    """Gravitational energy with the base horizontal plane as datum."""
    h = com_positions(q, links)[:, 1]
    masses = np.array([lk.m for lk in links] + [payload])
    return float(g * masses @ h)


class _Weights:
    """Mass-weighted products of the CoM coefficients, constant for given links."""

    def __init__(self, links: Sequence[LinkParams], payload: float):
        lengths = [lk.l for lk in links]
        pts = [(lk.m, _com_coefficients(lengths, i)) for i, lk in enumerate(links, 1)]
        if payload > 0.0:
            pts.append((payload, _com_coefficients(lengths, 4)))
        self.W = sum(m * np.outer(c, c) for m, c in pts)
        self.w = sum(m * c for m, c in pts)
        self.rot = np.diag([lk.m * lk.l ** 2 / 12.0 for lk in links])
        self.Wl = [float(v) for v in self.W.ravel()]
        self.wl = [float(v) for v in self.w]
        self.rotl = [float(v) for v in np.diag(self.rot)]


_weights_cache: dict = {}


def _weights(links, payload) -> _Weights:
    key = (tuple(links), float(payload))
    wt = _weights_cache.get(key)
    if wt is None:
        if len(_weights_cache) > 64:
            _weights_cache.clear()
        wt = _weights_cache[key] = _Weights(links, payload)
    return wt


def mass_matrix(q, links: Sequence[LinkParams], payload: float = 0.0) -> np.ndarray:
    wt = _weights(links, payload)
    phi = _TRI @ np.asarray(q, dtype=float)
    dphi = phi[:, None] - phi[None, :]
    inner = wt.W * np.cos(dphi) + wt.rot
    return _TRI.T @ inner @ _TRI


def mass_matrix_partials(q, links: Sequence[LinkParams], payload: float = 0.0) -> np.ndarray:
    """``dM[m] = dM/dq_m``, shape (3, 3, 3)."""
    wt = _weights(links, payload)
    phi = _TRI @ np.asarray(q, dtype=float)
    dphi = phi[:, None] - phi[None, :]
    ws = wt.W * np.sin(dphi)
    out = np.empty((3, 3, 3))
    idx = np.arange(3)
    for m in range(3):
        ge = (idx >= m).astype(float)
        D = ge[:, None] - ge[None, :]
        out[m] = _TRI.T @ (-ws * D) @ _TRI
    return out


def coriolis_matrix(q, qdot, links: Sequence[LinkParams], payload: float = 0.0) -> np.ndarray:
    """C(q, qdot) from Christoffel symbols of the first kind."""
    dM = mass_matrix_partials(q, links, payload)
    qdot = np.asarray(qdot, dtype=float)
    # dM[i, k, j] = dM_kj / dq_i
    a = np.einsum("ikj,i->kj", dM, qdot)
    b = np.einsum("jki,i->kj", dM, qdot)
    c = np.einsum("kij,i->kj", dM, qdot)
    return 0.5 * (a + b - c)


def gravity_vector(q, links: Sequence[LinkParams], payload: float = 0.0,
                   g: float = GRAVITY) -> np.ndarray:
    """dV/dq."""
    wt = _weights(links, payload)
    phi = _TRI @ np.asarray(q, dtype=float)
    return g * (_TRI.T @ (wt.w * np.cos(phi)))


def equations_of_motion(state: ArmState, tau, links: Sequence[LinkParams],
                        payload: float = 0.0, g: float = GRAVITY) -> np.ndarray:
    """Joint accelerations solving M qdd + C qd + G = tau."""
    wt = _weights(links, payload)
    qdd = _solve_eom(state.q, state.qdot, tau, wt, g)
    return np.array(qdd)


def _solve_eom(q, qd, tau, wt: "_Weights", g: float):
    # Scalar form of the same equations. The velocity-product vector uses
    # C(q, qd) @ qd = T^T ((W * sin(phi_j - phi_i)) @ phid**2), which the test
    # suite checks against the Christoffel construction in coriolis_matrix.
    W = wt.Wl
    r1, r2, r3 = wt.rotl
    w1, w2, w3 = wt.wl
    p1 = q[0]
    p2 = p1 + q[1]
    p3 = p2 + q[2]
    d1 = qd[0]
    d2 = d1 + qd[1]
    d3 = d2 + qd[2]
    c12, s12 = math.cos(p1 - p2), math.sin(p1 - p2)
    c13, s13 = math.cos(p1 - p3), math.sin(p1 - p3)
    c23, s23 = math.cos(p2 - p3), math.sin(p2 - p3)

    k11 = W[0] + r1
    k22 = W[4] + r2
    k33 = W[8] + r3
    k12 = W[1] * c12
    k13 = W[2] * c13
    k23 = W[5] * c23
    # M_kl = sum_{j>=k, j'>=l} K_jj'
    m33 = k33
    m23 = k23 + k33
    m22 = k22 + 2.0 * k23 + k33
    m13 = k13 + k23 + k33
    m12 = k12 + k13 + k22 + 2.0 * k23 + k33
    m11 = k11 + 2.0 * (k12 + k13 + k23) + k22 + k33

    e1, e2, e3 = d1 * d1, d2 * d2, d3 * d3
    # (W * sin(phi_row - phi_col)) @ phid**2
    v1 = W[1] * s12 * e2 + W[2] * s13 * e3
    v2 = -W[1] * s12 * e1 + W[5] * s23 * e3
    v3 = -W[2] * s13 * e1 - W[5] * s23 * e2
    g1 = g * w1 * math.cos(p1)
    g2 = g * w2 * math.cos(p2)
    g3 = g * w3 * math.cos(p3)
    f3 = v3 + g3
    f2 = v2 + g2 + f3
    f1 = v1 + g1 + f2

    b1 = tau[0] - f1
    b2 = tau[1] - f2
    b3 = tau[2] - f3

    a11 = m22 * m33 - m23 * m23
    a12 = m13 * m23 - m12 * m33
    a13 = m12 * m23 - m13 * m22
    det = m11 * a11 + m12 * a12 + m13 * a13
    if not det > 1e-12 * m11 * m22 * m33:
        raise SingularMass(f"mass matrix is ill-conditioned (det={det:.3g})")
    a22 = m11 * m33 - m13 * m13
    a23 = m12 * m13 - m11 * m23
    a33 = m11 * m22 - m12 * m12
    return ((a11 * b1 + a12 * b2 + a13 * b3) / det,
            (a12 * b1 + a22 * b2 + a23 * b3) / det,
            (a13 * b1 + a23 * b2 + a33 * b3) / det)


def arm_derivative(x: np.ndarray, tau, links, payload: float = 0.0,
                   g: float = GRAVITY) -> np.ndarray:
    """State derivative of ``x = [q, qdot]`` for the fixed-step integrators."""
    qdd = _solve_eom(x[:3], x[3:], tau, _weights(links, payload), g)
    return np.array([x[3], x[4], x[5], qdd[0], qdd[1], qdd[2]])


def total_energy(x, links, payload: float = 0.0, g: float = GRAVITY) -> float:
    return kinetic_energy(x[:3], x[3:], links, payload) + potential_energy(x[:3], links, payload, g)


@dataclass(frozen=True)
class TorqueProfile:
    tau_final: np.ndarray
    rise_duration: float
    dt: float
    series: np.ndarray

    @property
    def duration(self) -> float:
        return (len(self.series) - 1) * self.dt

    def at(self, t: float) -> np.ndarray:
        """Sample held from the most recent grid point; zero outside the profile."""
        if t < 0.0:
            return np.zeros(3)
        k = int(math.floor(t / self.dt + 1e-9))
        if k >= len(self.series):
            return np.zeros(3)
        return self.series[k]


def torque_profile(tau_final, rise_duration: float = 20.0, dt: float = 1e-3,
                   time_constant: float = 5.0) -> TorqueProfile:
    """Exponential ramp toward ``tau_final`` followed by its time reversal."""
    if dt <= 0.0 or rise_duration <= 0.0:
        raise ValueError("dt and rise_duration must be positive")
    tau_final = np.asarray(tau_final, dtype=float).reshape(3)
    n = int(round(rise_duration / dt)) + 1
    t = np.arange(n) * dt
    forward = np.outer(1.0 - np.exp(-t / time_constant), tau_final)
    series = np.concatenate([forward, forward[::-1]])
    return TorqueProfile(tau_final, float(rise_duration), float(dt), series)
