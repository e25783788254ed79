"""
Exception hierarchy for the lateral vdW library.

Library functions raise these; the CLI turns them into exit codes
(configuration problems → 2, numerical failures → 1).
"""

from typing import Optional


class LateralVdwError(Exception):
    """Base class for every error raised by this project."""

    pass


class DomainError(LateralVdwError, ValueError):
    """Input outside the mathematical or physical domain of an operation."""

    pass


class OrderingError(DomainError):
    """Polarizability diagonal not enumerated as a11 <= a22 <= a33."""

    pass


class DegenerateParticleError(DomainError):
    """Polarizability diagonal with vanishing trace."""

    pass


class ConvergenceError(LateralVdwError):
    """
    A numerical procedure stopped before reaching its tolerance.

    Attributes:
        achieved_error (float): Best error estimate reached.
        target (float, optional): Tolerance that was requested.
    """

    def __init__(
        self, message: str, achieved_error: float, target: Optional[float] = None
    ):
        self.achieved_error = float(achieved_error)
        self.target = target
        detail = f"achieved error estimate {self.achieved_error:.3e}"
        if target is not None:
            detail += f", target {target:.3e}"
        super().__init__(f"{message} ({detail})")


class NoSignChangeError(LateralVdwError):
    """The origin curvature keeps its sign over the whole width bracket."""

    pass


class TrapDestabilizedError(LateralVdwError):
    """The corrugation curvature overwhelms the trap: omega^2 + U''/m < 0."""

    pass


class ConfigError(LateralVdwError):
    """Invalid run configuration document."""

    pass
