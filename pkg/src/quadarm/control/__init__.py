from .lyapunov import solve_lyapunov
from .maneuver import (MracManeuverController, PidManeuverController, attitude_inner_loop,
                       mrac_maneuver_controller, position_outer_loop)
from .mrac import (MracState, ReferenceModel, mrac_adapt, mrac_control, shl_forward,
                   shl_update)
from .pid import TABLE_II, PidGains, PidState, pid_step

__all__ = [
    "solve_lyapunov",
    "MracManeuverController", "PidManeuverController", "attitude_inner_loop",
    "mrac_maneuver_controller", "position_outer_loop",
    "MracState", "ReferenceModel", "mrac_adapt", "mrac_control", "shl_forward", "shl_update",
    "TABLE_II", "PidGains", "PidState", "pid_step",
]
