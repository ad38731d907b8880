"""Scenario files: INI sections of ``key = value`` lines.

Grammar (every section and key optional unless noted)::

    [scenario]     name, controller (pid|mrac), dt, duration, seed,
                   cruise_speed, accel_limit (number or "none")
    [waypoints]    required; any key, value "x, y, z[, yaw[, hold]]",
                   flown in file order (yaw in rad, hold in s)
    [payload]      mass, attach_time, release_time, enabled (on|off),
                   feedforward (on|off)
    [vehicle]      mass, inertia (3 values), arm_length, thrust_coefficient,
                   drag_coefficient, max_rotor_thrust
    [arm]          l1, l2, l3, d1, total_mass, mount (3), target_q (3),
                   rise_duration, time_constant, start_time, damping
    [authority]    thrust, roll, pitch, yaw
    [outer]        tilt_limit (deg), thrust_floor, thrust_ceiling
    [pid.<loop>]   kp, ki, kd, n, i_limit for loop in
                   thrust, x, y, roll, pitch, yaw
    [mrac]         q_diagonal (6), omega_n, zeta, neurons, gamma_x, gamma_r,
                   gamma_w, gamma_v, kappa, bound, v_scale

Comments start with ``#`` or ``;``. Unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import fields, replace
from pathlib import Path

from .control.maneuver import (ControlAuthority, InnerLoopGains, MracSettings,
                               OuterLoopGains)
from .control.mrac import AdaptationRates
from .errors import ConfigInvalid
from .kinematics import ArmGeometry
from .quadcopter import VehicleParams
from .sim import ArmConfig, PayloadConfig, ScenarioConfig
from .trajectory import Waypoint

_BOOL = {"on": True, "off": False, "true": True, "false": False, "yes": True,
         "no": False, "1": True, "0": False}

_KEYS = {
    "scenario": {"name", "controller", "dt", "duration", "seed", "cruise_speed",
                 "accel_limit"},
    "payload": {"mass", "attach_time", "release_time", "enabled", "feedforward"},
    "vehicle": {"mass", "inertia", "arm_length", "thrust_coefficient", "drag_coefficient",
                "max_rotor_thrust"},
    "arm": {"l1", "l2", "l3", "d1", "total_mass", "mount", "target_q", "rise_duration",
            "time_constant", "start_time", "damping"},
    "authority": {"thrust", "roll", "pitch", "yaw"},
    "outer": {"tilt_limit", "thrust_floor", "thrust_ceiling"},
    "mrac": {"q_diagonal", "omega_n", "zeta", "neurons", "gamma_x", "gamma_r", "gamma_w",
             "gamma_v", "kappa", "bound", "v_scale"},
}
_PID_LOOPS = ("thrust", "x", "y", "roll", "pitch", "yaw")
_PID_KEYS = {"kp", "ki", "kd", "n", "i_limit"}


def _number(section: str, key: str, text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigInvalid(f"[{section}] {key}: not a number: {text!r}") from None
    if math.isnan(v):
        raise ConfigInvalid(f"[{section}] {key}: NaN is not allowed")
    return v


def _vector(section: str, key: str, text: str, size: int | None = None) -> tuple:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if size is not None and len(parts) != size:
        raise ConfigInvalid(f"[{section}] {key}: expected {size} values, got {len(parts)}")
    return tuple(_number(section, key, p) for p in parts)


def _bool(section: str, key: str, text: str) -> bool:
    try:
        return _BOOL[text.strip().lower()]
    except KeyError:
        raise ConfigInvalid(f"[{section}] {key}: expected on/off, got {text!r}") from None


def _check_keys(section: str, items: dict, allowed: set):
    extra = sorted(set(items) - allowed)
    if extra:
        raise ConfigInvalid(f"[{section}] unknown key(s): {', '.join(extra)}")


def _numbers(section: str, items: dict, vectors: dict | None = None,
             skip=()) -> dict:
    vectors = vectors or {}
    out = {}
    for k, v in items.items():
        if k in skip:
            continue
        if k in vectors:
            out[k] = _vector(section, k, v, vectors[k])
        else:
            out[k] = _number(section, k, v)
    return out


def _build(kind, section: str, **kw):
    try:
        return kind(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"[{section}] {exc}") from None


def parse_config(text: str, name: str = "scenario") -> ScenarioConfig:
    """Scenario from the text of a config file."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                   interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigInvalid(f"malformed config: {exc}") from None

    known = set(_KEYS) | {"waypoints"} | {f"pid.{l}" for l in _PID_LOOPS}
    unknown = sorted(set(cp.sections()) - known)
    if unknown:
        raise ConfigInvalid(f"unknown section(s): {', '.join(unknown)}")
    sec = {s: dict(cp.items(s)) for s in cp.sections()}
    for s, allowed in _KEYS.items():
        if s in sec:
            _check_keys(s, sec[s], allowed)

    if "waypoints" not in sec or not sec["waypoints"]:
        raise ConfigInvalid("config needs a non-empty [waypoints] section")
    waypoints = []
    for key, value in sec["waypoints"].items():
        v = _vector("waypoints", key, value)
        if not 3 <= len(v) <= 5:
            raise ConfigInvalid(f"[waypoints] {key}: expected x, y, z[, yaw[, hold]]")
        waypoints.append(_build(Waypoint, "waypoints", position=v[:3],
                                yaw=v[3] if len(v) > 3 else 0.0,
                                hold_time=v[4] if len(v) > 4 else 0.0))

    kw = {"waypoints": tuple(waypoints), "name": name}
    s = sec.get("scenario", {})
    if "name" in s:
        kw["name"] = s["name"].strip()
    if "controller" in s:
        kw["controller"] = s["controller"].strip().lower()
    for key in ("dt", "duration", "cruise_speed"):
        if key in s:
            kw[key] = _number("scenario", key, s[key])
    if "seed" in s:
        try:
            kw["seed"] = int(s["seed"])
        except ValueError:
            raise ConfigInvalid(f"[scenario] seed: not an integer: {s['seed']!r}") from None
    if "accel_limit" in s:
        raw = s["accel_limit"].strip().lower()
        kw["accel_limit"] = None if raw == "none" else _number("scenario", "accel_limit", raw)

    if "payload" in sec:
        p = sec["payload"]
        flags = {k: _bool("payload", k, p[k]) for k in ("enabled", "feedforward") if k in p}
        nums = _numbers("payload", p, skip=("enabled", "feedforward"))
        kw["payload"] = _build(PayloadConfig, "payload", **nums, **flags)

    if "vehicle" in sec:
        nums = _numbers("vehicle", sec["vehicle"], {"inertia": 3})
        kw["vehicle"] = _build(VehicleParams, "vehicle", **nums)

    if "arm" in sec:
        nums = _numbers("arm", sec["arm"], {"mount": 3, "target_q": 3})
        base = ArmConfig()
        g = base.geometry
        geometry = _build(ArmGeometry, "arm", l1=nums.pop("l1", g.l1), l2=nums.pop("l2", g.l2),
                          l3=nums.pop("l3", g.l3), d1=nums.pop("d1", g.d1))
        kw["arm"] = _build(ArmConfig, "arm", geometry=geometry, **nums)

    if "authority" in sec:
        kw["authority"] = _build(ControlAuthority, "authority",
                                 **_numbers("authority", sec["authority"]))

    outer = OuterLoopGains()
    inner = InnerLoopGains()
    for loop in _PID_LOOPS:
        name_ = f"pid.{loop}"
        if name_ not in sec:
            continue
        _check_keys(name_, sec[name_], _PID_KEYS)
        nums = _numbers(name_, sec[name_])
        target = outer if loop in ("thrust", "x", "y") else inner
        gains = _replace_checked(name_, getattr(target, loop), nums)
        if target is outer:
            outer = replace(outer, **{loop: gains})
        else:
            inner = replace(inner, **{loop: gains})
    if "outer" in sec:
        nums = _numbers("outer", sec["outer"])
        if "tilt_limit" in nums:
            nums["tilt_limit"] = math.radians(nums["tilt_limit"])
        outer = _replace_checked("outer", outer, nums)
    kw["outer"] = outer
    kw["inner"] = inner

    if "mrac" in sec:
        m = sec["mrac"]
        nums = _numbers("mrac", m, {"q_diagonal": 6})
        rate_keys = {f.name for f in fields(AdaptationRates)}
        rates = _replace_checked("mrac", AdaptationRates(),
                                 {k: nums.pop(k) for k in list(nums) if k in rate_keys})
        if "neurons" in nums:
            if nums["neurons"] != int(nums["neurons"]) or nums["neurons"] < 0:
                raise ConfigInvalid("[mrac] neurons must be a non-negative integer")
            nums["neurons"] = int(nums["neurons"])
        kw["mrac"] = _replace_checked("mrac", MracSettings(rates=rates), nums)

    cfg = _build(ScenarioConfig, "scenario", **kw)
    return cfg.validate()


def _replace_checked(section: str, obj, nums: dict):
    try:
        return replace(obj, **nums)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"[{section}] {exc}") from None


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from None
    return parse_config(text, name=path.stem)


def bundled_scenarios() -> dict[str, Path]:
    """Scenario files shipped with the package, by stem."""
    root = Path(__file__).with_name("scenarios")
    return {p.stem: p for p in sorted(root.glob("*.cfg"))}
