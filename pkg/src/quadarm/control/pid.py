"""PID with a first-order filtered derivative.

The continuous law is ``U(s) = Kp + Ki/s + Kd * N*s / (s + N)``. The filter is
discretised with backward Euler::

    D[k] = (D[k-1] + Kd*N*(e[k] - e[k-1])) / (1 + N*dt)

and the integrator accumulates ``e[k]*dt`` and is clamped to ``+-i_limit``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float
    kd: float
    n: float
    i_limit: float = math.inf

    def __post_init__(self):
        if not self.n > 0.0:
            raise ValueError("filter coefficient n must be positive")
        if not all(math.isfinite(v) for v in (self.kp, self.ki, self.kd, self.n)):
            raise ValueError("PID gains must be finite")
        if not self.i_limit > 0.0:
            raise ValueError("i_limit must be positive")


# Designed gains for the thrust, roll, pitch and yaw loops.
TABLE_II = {
    "thrust": PidGains(0.25, 0.05, 0.35, 10000.0),
    "roll": PidGains(100.0, 0.0, 800.0, 1000.0),
    "pitch": PidGains(100.0, 0.0, 800.0, 1000.0),
    "yaw": PidGains(205.61, 0.059203, 0.782, 100.0),
}


@dataclass
class PidState:
    integrator: float = 0.0
    filter_state: float = 0.0
    prev_error: float = 0.0

    def reset(self):
        self.integrator = 0.0
        self.filter_state = 0.0
        self.prev_error = 0.0


def pid_step(gains: PidGains, state: PidState, error: float, dt: float) -> float:
    """Advance ``state`` by one sample and return the control output."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    lim = gains.i_limit
    integ = state.integrator + error * dt
    if integ > lim:
        integ = lim
    elif integ < -lim:
        integ = -lim
    deriv = (state.filter_state + gains.kd * gains.n * (error - state.prev_error)) \
        / (1.0 + gains.n * dt)
    state.integrator = integ
    state.filter_state = deriv
    state.prev_error = error
    return gains.kp * error + gains.ki * integ + deriv


class PidController:
    def __init__(self, gains: PidGains):
        self.gains = gains
        self.state = PidState()

    def step(self, error: float, dt: float) -> float:
        return pid_step(self.gains, self.state, error, dt)

    def reset(self):
        self.state.reset()
