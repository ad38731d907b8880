"""Waypoint reference trajectories with trapezoidal speed profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyWaypointList


@dataclass(frozen=True)
class Waypoint:
    position: tuple[float, float, float]
    yaw: float = 0.0
    hold_time: float = 0.0

    def __post_init__(self):
        pos = tuple(float(v) for v in self.position)
        if len(pos) != 3:
            raise ValueError("waypoint position must have three components")
        object.__setattr__(self, "position", pos)
        if not all(math.isfinite(v) for v in (*pos, self.yaw, self.hold_time)):
            raise ValueError("waypoint values must be finite")
        if self.hold_time < 0.0:
            raise ValueError("hold_time must be non-negative")


@dataclass(frozen=True)
class ReferenceTrajectory:
    t: np.ndarray           # (n,)
    position: np.ndarray    # (n, 3)
    velocity: np.ndarray    # (n, 3), forward difference of position
    yaw: np.ndarray         # (n,)
    dt: float
    holds: tuple            # ((start, end, waypoint index), ...)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def duration(self) -> float:
        return float(self.t[-1])

    def index_at(self, t: float) -> int:
        return min(max(int(round(t / self.dt)), 0), len(self.t) - 1)

    def to_csv(self, path):
        data = np.column_stack([self.t, self.position, self.velocity, self.yaw])
        np.savetxt(path, data, fmt="%.9g", delimiter=",", comments="",
                   header="t,x,y,z,vx,vy,vz,yaw")


def _distance_profile(length: float, speed: float, accel: float | None, n: int, dt: float):
    """Travelled distance at ``k*dt`` for k in 0..n along a trapezoid (or triangle)."""
    t = np.arange(n + 1) * dt
    if accel is None or math.isinf(accel):
        return np.minimum(speed * t, length)
    t_acc = speed / accel
    if accel * t_acc * t_acc >= length:      # triangle
        t_acc = math.sqrt(length / accel)
        v_peak = accel * t_acc
        t_cruise = 0.0
    else:
        v_peak = speed
        t_cruise = (length - accel * t_acc * t_acc) / speed
    t_end = 2.0 * t_acc + t_cruise
    s = np.empty_like(t)
    a1 = t <= t_acc
    s[a1] = 0.5 * accel * t[a1] ** 2
    c = (t > t_acc) & (t <= t_acc + t_cruise)
    s_acc = 0.5 * accel * t_acc * t_acc
    s[c] = s_acc + v_peak * (t[c] - t_acc)
    d = t > t_acc + t_cruise
    rem = np.clip(t_end - t[d], 0.0, None)
    s[d] = length - 0.5 * accel * rem ** 2
    return np.minimum(s, length)


def segment_duration(length: float, speed: float, accel: float | None) -> float:
    if length == 0.0:
        return 0.0
    if accel is None or math.isinf(accel):
        return length / speed
    t_acc = speed / accel
    if accel * t_acc * t_acc >= length:
        return 2.0 * math.sqrt(length / accel)
    return 2.0 * t_acc + (length - accel * t_acc * t_acc) / speed


def generate_reference(waypoints: Sequence[Waypoint], cruise_speed: float, dt: float,
                       accel_limit: float | None = None,
                       duration: float | None = None) -> ReferenceTrajectory:
    """Sampled reference through ``waypoints``.

    The first waypoint is the start; each waypoint's hold is spent at it
    before leaving. Without ``accel_limit`` segments are flown at constant
    speed. If ``duration`` exceeds the natural length the final waypoint is
    held, if shorter the reference is truncated.
    """
    wps = list(waypoints)
    if not wps:
        raise EmptyWaypointList("at least one waypoint is required")
    if not cruise_speed > 0.0:
        raise ValueError("cruise_speed must be positive")
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    if accel_limit is not None and not accel_limit > 0.0:
        raise ValueError("accel_limit must be positive")

    pos_parts = [np.array([wps[0].position])]
    yaw_parts = [np.array([wps[0].yaw])]
    holds = []
    count = 1

    def extend_hold(i: int):
        nonlocal count
        k = int(round(wps[i].hold_time / dt))
        if k:
            holds.append((count - 1, count - 1 + k, i))
            pos_parts.append(np.repeat([wps[i].position], k, axis=0))
            yaw_parts.append(np.full(k, wps[i].yaw))
            count += k

    extend_hold(0)
    for i in range(1, len(wps)):
        p0 = np.array(wps[i - 1].position)
        p1 = np.array(wps[i].position)
        length = float(np.linalg.norm(p1 - p0))
        n = int(math.ceil(segment_duration(length, cruise_speed, accel_limit) / dt - 1e-9))
        if n:
            s = _distance_profile(length, cruise_speed, accel_limit, n, dt)[1:]
            s[-1] = length
            frac = s / length
            seg = p0 + frac[:, None] * (p1 - p0)
            seg[-1] = p1
            pos_parts.append(seg)
            yaw_parts.append(wps[i - 1].yaw + frac * (wps[i].yaw - wps[i - 1].yaw))
            count += n
        elif wps[i].yaw != wps[i - 1].yaw:
            pos_parts.append(np.array([wps[i].position]))
            yaw_parts.append(np.array([wps[i].yaw]))
            count += 1
        extend_hold(i)

    position = np.concatenate(pos_parts)
    yaw = np.concatenate(yaw_parts)
    if duration is not None:
        n_total = int(round(duration / dt)) + 1
        if n_total > len(position):
            pad = n_total - len(position)
            position = np.concatenate([position, np.repeat(position[-1:], pad, axis=0)])
            yaw = np.concatenate([yaw, np.full(pad, yaw[-1])])
        else:
            position = position[:n_total]
            yaw = yaw[:n_total]
    velocity = np.zeros_like(position)
    velocity[:-1] = np.diff(position, axis=0) / dt
    t = np.arange(len(position)) * dt
    return ReferenceTrajectory(t, position, velocity, yaw, dt, tuple(holds))
