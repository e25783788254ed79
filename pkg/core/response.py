"""
Particle anisotropy and orientation.

The integrated polarizability A = gamma_iso * Pi(gamma_s, gamma_a) is
diagonal in the particle frame; the laboratory response entering the
trace formula is M = R Pi R^T with R the active z-y-z Euler rotation
R = R_z(phi) R_y(theta) R_z(psi). This convention maps e3' onto
(sin theta cos phi, sin theta sin phi, cos theta), so theta = pi/2 with
phi = psi = 0 aligns the particle axis with x.
"""

import math
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    FiniteFloat,
    PositiveFloat,
    ValidationError,
    model_validator,
)
from scipy.spatial.transform import Rotation

from core.errors import DegenerateParticleError, DomainError, OrderingError

ResponseMatrix = NDArray[np.float64]

TWO_PI = 2.0 * math.pi
# Slack on the gamma_a upper bound for values derived through arithmetic.
GAMMA_BOUND_SLACK = 1e-12


def canonical_euler(phi: float, theta: float, psi: float) -> tuple:
    """
    Map Euler angles to phi, psi in [0, 2pi) and theta in [0, pi].

    theta in (pi, 2pi) is folded with R_y(-theta) = R_z(pi) R_y(theta) R_z(-pi),
    which leaves the rotation matrix unchanged.
    """
    theta = theta % TWO_PI
    if theta > math.pi:
        theta = TWO_PI - theta
        phi += math.pi
        psi += math.pi
    phi, psi = phi % TWO_PI, psi % TWO_PI
    # a tiny negative angle can round up to exactly 2pi
    if phi >= TWO_PI:
        phi = 0.0
    if psi >= TWO_PI:
        psi = 0.0
    return phi, theta, psi


class Orientation(BaseModel):
    """Euler angles (radians) fixing the particle's principal axes."""

    model_config = ConfigDict(frozen=True)

    phi: FiniteFloat = 0.0
    theta: FiniteFloat = 0.0
    psi: FiniteFloat = 0.0

    @model_validator(mode="before")
    @classmethod
    def _canonicalize(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        angles = [float(data.get(key, 0.0)) for key in ("phi", "theta", "psi")]
        if not all(math.isfinite(a) for a in angles):
            raise ValueError("Euler angles must be finite")
        phi, theta, psi = canonical_euler(*angles)
        return {**data, "phi": phi, "theta": theta, "psi": psi}

    @classmethod
    def from_degrees(cls, phi: float = 0.0, theta: float = 0.0, psi: float = 0.0):
        """Build an orientation from angles given in degrees."""
        return cls(phi=math.radians(phi), theta=math.radians(theta), psi=math.radians(psi))

    def axis(self) -> NDArray[np.float64]:
        """Laboratory direction of the particle axis e3'."""
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )


class GammaParams(BaseModel):
    """
    Anisotropy parametrization of the integrated polarizability.

    Strict validation enforces 0 <= gamma_s < 1 and
    0 <= gamma_a <= min(gamma_s, 1 - gamma_s); pass strict=False for
    exploratory sweeps (the classical limit gamma_s = 1 needs it).
    """

    model_config = ConfigDict(frozen=True)

    gamma_iso: PositiveFloat = 1.0
    gamma_s: FiniteFloat = 0.0
    gamma_a: FiniteFloat = 0.0
    strict: bool = Field(default=True, exclude=True, repr=False)

    @model_validator(mode="after")
    def _check_domain(self) -> "GammaParams":
        if not self.strict:
            return self
        if not 0.0 <= self.gamma_s < 1.0:
            raise ValueError(f"gamma_s must lie in [0, 1), got {self.gamma_s}")
        bound = min(self.gamma_s, 1.0 - self.gamma_s)
        if not 0.0 <= self.gamma_a <= bound + GAMMA_BOUND_SLACK:
            raise ValueError(
                f"gamma_a must lie in [0, {bound:.6g}] for gamma_s={self.gamma_s}, "
                f"got {self.gamma_a}"
            )
        return self


# Pi(1, 0) = diag(0, 0, 3): the permanent-dipole counterpart.
CLASSICAL_GAMMAS = GammaParams(gamma_iso=1.0, gamma_s=1.0, gamma_a=0.0, strict=False)


def gamma_from_polarizability(a11: float, a22: float, a33: float) -> GammaParams:
    """
    Anisotropy parameters from the integrated polarizability diagonal.

    Args:
        a11 (float): Smallest principal value of A.
        a22 (float): Middle principal value of A.
        a33 (float): Largest principal value of A.

    Returns:
        GammaParams: (gamma_iso, gamma_s, gamma_a).

    Raises:
        DomainError: If a value is negative or not finite, or the result leaves the domain.
        OrderingError: If the diagonal is not sorted ascending.
        DegenerateParticleError: If the trace vanishes.
    """
    values = (float(a11), float(a22), float(a33))
    if not all(math.isfinite(v) for v in values):
        raise DomainError("Polarizability diagonal must be finite")
    if min(values) < 0.0:
        raise DomainError(f"Polarizability diagonal must be non-negative, got {values}")
    if not a11 <= a22 <= a33:
        raise OrderingError(
            f"Principal axes must be enumerated so that a11 <= a22 <= a33, got {values}"
        )
    trace = sum(values)
    if trace <= 0.0:
        raise DegenerateParticleError("Polarizability diagonal is identically zero")

    gamma_iso = trace / 3.0
    gamma_s = (a33 - (a22 + a11) / 2.0) / (3.0 * gamma_iso)
    gamma_a = ((a22 - a11) / 2.0) / (3.0 * gamma_iso)
    try:
        return GammaParams(gamma_iso=gamma_iso, gamma_s=gamma_s, gamma_a=gamma_a)
    except ValidationError as e:
        raise DomainError(f"Polarizability leaves the gamma domain: {e}") from e


def pi_matrix(g: GammaParams) -> NDArray[np.float64]:
    """Pi = I + gamma_s diag(-1, -1, 2) + gamma_a diag(-3, 3, 0)."""
    return np.diag(
        [
            1.0 - g.gamma_s - 3.0 * g.gamma_a,
            1.0 - g.gamma_s + 3.0 * g.gamma_a,
            1.0 + 2.0 * g.gamma_s,
        ]
    )


def euler_rotation(o: Orientation) -> NDArray[np.float64]:
    """
    Active z-y-z Euler rotation R = R_z(phi) R_y(theta) R_z(psi).

    Args:
        o (Orientation): Euler angles in radians.

    Returns:
        np.ndarray: Proper orthogonal (3, 3) matrix.
    """
    # Upper-case axes are intrinsic rotations: the matrix product above.
    return Rotation.from_euler("ZYZ", [o.phi, o.theta, o.psi]).as_matrix()


def response_matrix(o: Orientation, g: GammaParams) -> ResponseMatrix:
    """
    Rotated response M = R Pi R^T.

    Args:
        o (Orientation): Particle orientation.
        g (GammaParams): Anisotropy parameters.

    Returns:
        np.ndarray: Real symmetric (3, 3) matrix with trace 3.
    """
    r = euler_rotation(o)
    m = r @ pi_matrix(g) @ r.T
    return 0.5 * (m + m.T)
