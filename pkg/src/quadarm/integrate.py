import numpy as np


def rk4_step(derivative_fn, state, inp, dt):
    """One classical Runge-Kutta step of ``x' = f(x, u)`` with ``u`` held over the step."""
    k1 = derivative_fn(state, inp)
    k2 = derivative_fn(state + (0.5 * dt) * k1, inp)
    k3 = derivative_fn(state + (0.5 * dt) * k2, inp)
    k4 = derivative_fn(state + dt * k3, inp)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def euler_step(derivative_fn, state, inp, dt):
    return state + dt * np.asarray(derivative_fn(state, inp))
