"""Simulation and control workbench for a quadcopter carrying a 3-link arm."""

from .arm_dynamics import ArmState, LinkParams, equations_of_motion, torque_profile
from .errors import (ConfigInvalid, EmptyWaypointList, LengthMismatch, NonFiniteState,
                     NotHurwitz, QuadArmError, Unreachable)
from .kinematics import (DEFAULT_GEOMETRY, ArmGeometry, ArmJointAngles, forward_kinematics,
                         inverse_kinematics)
from .quadcopter import RigidBodyState, VehicleParams, quad_dynamics
from .sim import ScenarioConfig, SimLog, run_scenario
from .trajectory import Waypoint, generate_reference

__version__ = "0.1.0"

__all__ = [
    "ArmState", "LinkParams", "equations_of_motion", "torque_profile",
    "ConfigInvalid", "EmptyWaypointList", "LengthMismatch", "NonFiniteState", "NotHurwitz",
    "QuadArmError", "Unreachable",
    "DEFAULT_GEOMETRY", "ArmGeometry", "ArmJointAngles", "forward_kinematics",
    "inverse_kinematics",
    "RigidBodyState", "VehicleParams", "quad_dynamics",
    "ScenarioConfig", "SimLog", "run_scenario",
    "Waypoint", "generate_reference",
]
