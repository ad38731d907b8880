"""Exception and warning types raised across the package."""


class QuadArmError(Exception):
    pass


class Unreachable(QuadArmError, ValueError):
    """Target lies outside the workspace of the planar arm."""


class NonInvertible(QuadArmError, ValueError):
    pass


class SingularMass(QuadArmError, ArithmeticError):
    pass


class EulerSingularity(QuadArmError, ArithmeticError):
    pass


class NotHurwitz(QuadArmError, ValueError):
    pass


class EmptyWaypointList(QuadArmError, ValueError):
    pass


class LengthMismatch(QuadArmError, ValueError):
    pass


class ConfigInvalid(QuadArmError, ValueError):
    pass


class NonFiniteState(QuadArmError, ArithmeticError):
    def __init__(self, t, what="state"):
        super().__init__(f"non-finite {what} at t={t:.6f} s")
        self.t = t


class SingularWarning(UserWarning):
    """Base yaw is undefined for a target on the arm's vertical axis."""


class BoundedDriftWarning(UserWarning):
    """An adaptive weight norm exceeded its monitoring bound."""
