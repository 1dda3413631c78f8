"""Exception hierarchy for the tcdrive package.

Every error raised by the package derives from :class:`TcDriveError` so
callers can catch one type at the CLI boundary.  The CLI maps
:class:`ValidationError` (and subclasses) to exit code 2 and
:class:`NumericalError` (and subclasses) to exit code 3.
"""

from __future__ import annotations


class TcDriveError(Exception):
    """Base class for all tcdrive errors."""


class ValidationError(TcDriveError):
    """A configuration or parameter value violates an invariant.

    Parameters
    ----------
    field : str
        Dotted path of the offending field (e.g. ``"tc.A"``).
    message : str
        Human-readable description of the violation.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ParseError(ValidationError):
    """A configuration file is malformed (unreadable or not a mapping)."""

    def __init__(self, message: str):
        super().__init__("<file>", message)


class NumericalError(TcDriveError):
    """Base class for runtime numerical failures (CLI exit code 3)."""


class SingularMassMatrix(NumericalError):
    """The 3x3 torque-converter mass matrix is numerically singular."""


class NoPhysicalRoot(NumericalError):
    """The steady flow-velocity equation has no positive real root."""


class NoBracket(NumericalError):
    """A scalar root search found no sign change over its bounds."""


class OutOfScheduleRange(NumericalError):
    """Speed ratio outside the turbine-torque schedule domain."""


class ZeroOutputPower(NumericalError):
    """Percent power loss is undefined at zero output power."""


class InfeasibleSolution(NumericalError):
    """A feasible steady-state solution was required but not available."""


class InfeasibleInitialization(NumericalError):
    """No feasible steady operating point exists to start a simulation."""


class NonFiniteState(NumericalError):
    """Integration produced a non-finite state or derivative.

    Parameters
    ----------
    step_index : int
        Index of the offending time step.
    """

    def __init__(self, step_index: int, detail: str = ""):
        self.step_index = int(step_index)
        msg = f"non-finite state at step {step_index}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)


class DimensionMismatch(TcDriveError):
    """A state vector does not match the configured model dimension."""
