"""Direct model reference adaptive control with a single-hidden-layer network.

Sign conventions follow the Lyapunov design for a plant
``x' = A x + B (u + f(x))`` with tracking error ``e = x_m - x``::

    u        = kx^T x + kr^T r - Theta^T phi(x) - W^T sigma(V^T [1; x])
    kx'      =  gamma_x x (e^T P B)
    kr'      =  gamma_r r (e^T P B)
    Theta'   = -gamma_theta phi(x) (e^T P B)
    W'       = -gamma_w [(sigma - sigma' V^T xb)(e^T P B) + kappa |e| W]
    V'       = -gamma_v [xb (e^T P B) W^T sigma' + kappa |e| V]

``kappa`` is the e-modification damping that keeps the network weights
bounded. Adaptive laws are integrated with forward Euler.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import BoundedDriftWarning, NotHurwitz
from ..integrate import rk4_step
from .lyapunov import is_hurwitz, solve_lyapunov

# Lyapunov weights for the stacked (angle, rate) states of roll, pitch and yaw.
DEFAULT_Q_DIAGONAL = (125.0, 200.0, 125.0, 200.0, 120.0, 125.0)
DEFAULT_GAMMA_K = 110.0
DEFAULT_GAMMA_W = 5.0
DEFAULT_GAMMA_V = 1.0
DEFAULT_NEURONS = 50


@dataclass(frozen=True)
class AdaptationRates:
    gamma_x: float = DEFAULT_GAMMA_K
    gamma_r: float = DEFAULT_GAMMA_K
    gamma_theta: float = 1.0
    gamma_w: float = DEFAULT_GAMMA_W
    gamma_v: float = DEFAULT_GAMMA_V
    kappa: float = 0.01
    bound: float = 1e6


class ReferenceModel:
    def __init__(self, a_m, b_m, state=None):
        self.a_m = np.atleast_2d(np.asarray(a_m, dtype=float))
        self.b_m = np.asarray(b_m, dtype=float).reshape(self.a_m.shape[0], -1)
        if not is_hurwitz(self.a_m):
            raise NotHurwitz("reference model must be Hurwitz")
        n = self.a_m.shape[0]
        self.state = np.zeros(n) if state is None else np.asarray(state, dtype=float).reshape(n)

    @classmethod
    def second_order(cls, omega_n: float = 4.0, zeta: float = 1.0, state=None):
        """Unit-DC-gain model for an (angle, rate) pair."""
        w2 = omega_n * omega_n
        return cls([[0.0, 1.0], [-w2, -2.0 * zeta * omega_n]], [[0.0], [w2]], state)

    def derivative(self, x, r):
        return self.a_m @ x + self.b_m @ np.atleast_1d(r)

    def step(self, r, dt: float) -> np.ndarray:
        self.state = rk4_step(self.derivative, self.state, r, dt)
        return self.state


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class MracState:
    kx: np.ndarray            # (n, m)
    kr: np.ndarray            # (n_r, m)
    p: np.ndarray             # (n, n)
    shl_w: np.ndarray         # (N, m)
    shl_v: np.ndarray         # (n + 1, N)
    theta: np.ndarray = None  # (k, m) weights of an optional known basis
    basis: Optional[Callable] = field(default=None, compare=False)
    drift_flagged: bool = False

    def __post_init__(self):
        if self.theta is None:
            self.theta = np.zeros((0, self.kx.shape[1]))

    def validate(self):
        p = self.p
        if not np.allclose(p, p.T) or np.min(np.linalg.eigvalsh(p)) <= 0.0:
            raise ValueError("P must be symmetric positive definite")
        if not all(np.all(np.isfinite(a)) for a in (self.kx, self.kr, self.theta,
                                                    self.shl_w, self.shl_v)):
            raise ValueError("non-finite adaptive weights")
        return self

    def phi(self, x) -> np.ndarray:
        if self.basis is None:
            return np.zeros(0)
        return np.asarray(self.basis(x), dtype=float).reshape(-1)

    def weight_norm(self) -> float:
        """Largest absolute adaptive weight."""
        return max(float(np.abs(a).max()) for a in
                   (self.kx, self.kr, self.theta, self.shl_w, self.shl_v) if a.size)


def make_mrac_state(n: int, m: int, p, *, n_ref: int | None = None, neurons: int = DEFAULT_NEURONS,
                    kx0=None, kr0=None, basis=None, n_basis: int = 0,
                    rng: np.random.Generator | None = None, v_scale: float = 0.1) -> MracState:
    """Zero network output weights, small random inner weights."""
    n_ref = m if n_ref is None else n_ref
    rng = np.random.default_rng(0) if rng is None else rng
    kx = np.zeros((n, m)) if kx0 is None else np.array(kx0, dtype=float).reshape(n, m)
    kr = np.zeros((n_ref, m)) if kr0 is None else np.array(kr0, dtype=float).reshape(n_ref, m)
    return MracState(
        kx=kx, kr=kr, p=np.asarray(p, dtype=float),
        shl_w=np.zeros((neurons, m)),
        shl_v=v_scale * rng.standard_normal((n + 1, neurons)),
        theta=np.zeros((n_basis, m)), basis=basis,
    ).validate()


def shl_forward(x, shl_w, shl_v) -> np.ndarray:
    """Network estimate ``W^T sigma(V^T [1; x])``."""
    xb = np.concatenate(([1.0], np.atleast_1d(x)))
    return shl_w.T @ sigmoid(shl_v.T @ xb)


def shl_update(shl_w, shl_v, e, x, p, b, gamma_w: float = DEFAULT_GAMMA_W,
               gamma_v: float = DEFAULT_GAMMA_V, dt: float = 1e-3, kappa: float = 0.01):
    """One Euler step of the network weight laws; returns new ``(W, V)``."""
    e = np.atleast_1d(e)
    epb = e @ p @ np.atleast_2d(b)          # (m,)
    if not np.any(epb) and not np.any(e):
        return shl_w, shl_v
    xb = np.concatenate(([1.0], np.atleast_1d(x)))
    z = shl_v.T @ xb
    sig = sigmoid(z)
    dsig = sig * (1.0 - sig)                # diagonal of sigma'
    enorm = float(np.linalg.norm(e))
    # (sigma - sigma' V^T xb) epb^T
    w_reg = np.outer(sig - dsig * z, epb)
    w_dot = -gamma_w * (w_reg + kappa * enorm * shl_w)
    # xb (epb^T W^T sigma')
    v_reg = np.outer(xb, (shl_w @ epb) * dsig)
    v_dot = -gamma_v * (v_reg + kappa * enorm * shl_v)
    return shl_w + dt * w_dot, shl_v + dt * v_dot


def mrac_control(x, r, m: MracState) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    r = np.asarray(r, dtype=float).reshape(-1)
    u = x @ m.kx + r @ m.kr
    if m.theta.size:
        u -= m.phi(x) @ m.theta
    if m.shl_w.size:
        u -= shl_forward(x, m.shl_w, m.shl_v)
    return u


def mrac_adapt(m: MracState, x, r, e, b, rates: AdaptationRates, dt: float) -> MracState:
    """Forward-Euler update of every adaptive parameter."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    x = np.asarray(x, dtype=float).reshape(-1)
    r = np.asarray(r, dtype=float).reshape(-1)
    e = np.asarray(e, dtype=float).reshape(-1)
    epb = e @ m.p @ np.atleast_2d(b)
    kx = m.kx + (dt * rates.gamma_x) * (x[:, None] * epb)
    kr = m.kr + (dt * rates.gamma_r) * (r[:, None] * epb)
    theta = m.theta
    if theta.size:
        theta = theta - (dt * rates.gamma_theta) * (m.phi(x)[:, None] * epb)
    w, v = m.shl_w, m.shl_v
    if w.size:
        w, v = shl_update(w, v, e, x, m.p, b, rates.gamma_w, rates.gamma_v, dt, rates.kappa)
    out = MracState(kx, kr, m.p, w, v, theta, m.basis, m.drift_flagged)
    if not out.drift_flagged and out.weight_norm() > rates.bound:
        warnings.warn(f"adaptive weights exceeded {rates.bound:g}", BoundedDriftWarning,
                      stacklevel=2)
        out.drift_flagged = True
    return out


def lyapunov_function(e, p, kx_err, kr_err, theta_err, rates: AdaptationRates) -> float:
    """Error-system Lyapunov candidate in the parameter estimation errors.

    ``e^T P e + |kx~|^2/gamma_x + |kr~|^2/gamma_r + |Theta~|^2/gamma_theta``;
    the input matrix appears in the laws, so no ``|b|`` weighting is needed.
    """
    e = np.atleast_1d(e)
    val = float(e @ np.atleast_2d(p) @ e)
    val += float(np.sum(np.square(kx_err))) / rates.gamma_x
    val += float(np.sum(np.square(kr_err))) / rates.gamma_r
    if np.size(theta_err):
        val += float(np.sum(np.square(theta_err))) / rates.gamma_theta
    return val


def square_train(t: float, period: float, amplitude: float = 1.0) -> float:
    return amplitude if math.fmod(t, period) < 0.5 * period else -amplitude


def scalar_mrac_step(x: float, xm: float, r: float, kx: float, kr: float, theta: float,
                     a: float, b: float, theta_true: float, a_m: float, b_m: float,
                     p: float, rates: AdaptationRates, dt: float):
    """One sample of the scalar loop in plain floats.

    Same laws as :func:`mrac_control` / :func:`mrac_adapt` with the basis
    ``phi(x) = 1`` and no network; the test suite checks the two agree.
    Returns ``(x, xm, kx, kr, theta, u)`` after the step.
    """
    u = kx * x + kr * r - theta
    f_in = b * (u + theta_true)

    # RK4 on (x, xm) with u and r held
    k1x = a * x + f_in
    k1m = a_m * xm + b_m * r
    h = 0.5 * dt
    k2x = a * (x + h * k1x) + f_in
    k2m = a_m * (xm + h * k1m) + b_m * r
    k3x = a * (x + h * k2x) + f_in
    k3m = a_m * (xm + h * k2m) + b_m * r
    k4x = a * (x + dt * k3x) + f_in
    k4m = a_m * (xm + dt * k3m) + b_m * r

    epb = (xm - x) * p * b
    kx_n = kx + dt * rates.gamma_x * x * epb
    kr_n = kr + dt * rates.gamma_r * r * epb
    theta_n = theta - dt * rates.gamma_theta * epb
    x_n = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    xm_n = xm + dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
    return x_n, xm_n, kx_n, kr_n, theta_n, u


@dataclass
class ScalarBenchmarkResult:
    t: np.ndarray
    x: np.ndarray
    xm: np.ndarray
    r: np.ndarray
    kx: np.ndarray
    kr: np.ndarray
    theta: np.ndarray
    lyapunov: np.ndarray
    ideal: tuple[float, float, float]

    @property
    def error(self) -> np.ndarray:
        return self.xm - self.x

    def ultimate_bound(self, window: float) -> float:
        """Largest |e| over the final ``window`` seconds."""
        mask = self.t >= self.t[-1] - window
        return float(np.max(np.abs(self.error[mask])))

    def max_parameter(self) -> float:
        return float(max(np.max(np.abs(v)) for v in (self.kx, self.kr, self.theta)))


def run_scalar_mrac(a: float = 1.0, b: float = 3.0, theta_true: float = 0.5,
                    a_m: float = -4.0, b_m: float = 4.0, q: float = 1.0,
                    duration: float = 120.0, dt: float = 1e-3, period: float = 10.0,
                    rates: AdaptationRates | None = None) -> ScalarBenchmarkResult:
    """Adaptive tracking of an open-loop unstable first-order plant.

    Plant ``x' = a x + b (u + theta_true)``: the pole ``a`` and the matched
    input disturbance ``theta_true`` are unknown to the controller, ``b`` is
    known. Reference: unit square step train. All adaptation rates default to
    the feedback/feedforward rate of 110.
    """
    rates = rates or AdaptationRates(gamma_x=DEFAULT_GAMMA_K, gamma_r=DEFAULT_GAMMA_K,
                                     gamma_theta=DEFAULT_GAMMA_K)
    p = float(solve_lyapunov([[a_m]], [[q]])[0, 0])
    ideal = ((a_m - a) / b, b_m / b, theta_true)

    steps = int(round(duration / dt))
    t = np.arange(steps + 1) * dt
    out = np.empty((steps + 1, 7))
    x = xm = kx = kr = theta = 0.0
    for k in range(steps + 1):
        r = square_train(k * dt, period)
        e = xm - x
        lyap = (p * e * e + (kx - ideal[0]) ** 2 / rates.gamma_x
                + (kr - ideal[1]) ** 2 / rates.gamma_r
                + (theta - ideal[2]) ** 2 / rates.gamma_theta)
        out[k] = (x, xm, r, kx, kr, theta, lyap)
        if k == steps:
            break
        x, xm, kx, kr, theta, _ = scalar_mrac_step(x, xm, r, kx, kr, theta, a, b, theta_true,
                                                   a_m, b_m, p, rates, dt)
        if not math.isfinite(x):
            out = out[: k + 1]
            t = t[: k + 1]
            break
    return ScalarBenchmarkResult(t, out[:, 0], out[:, 1], out[:, 2], out[:, 3], out[:, 4],
                                 out[:, 5], out[:, 6], ideal)
