"""
Energy ratio U/U(z0) from a kernel and a response matrix, and its
conversion to joules.

    quantum:    U(z0) = hbar gamma_iso a / (64 pi^2 eps0 z0^4)
    classical:  U(z0) = a p^2 / (192 pi eps0 z0^4)

Physical constants default to CODATA values from scipy.constants; tests
may inject round numbers.
"""

import math
from typing import Literal, Optional

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, FiniteFloat, PositiveFloat
from scipy import constants

from core.errors import DomainError
from core.response import CLASSICAL_GAMMAS, Orientation, response_matrix
from utils.logger import setup_logger

logger = setup_logger(__name__)

Mode = Literal["quantum", "classical"]

# Above a/z0 = 0.2 the first-order expansion in h is no longer trusted.
PERTURBATIVE_LIMIT = 0.2
# diag(1, 1, 2): weight of the response matrix in the PFA limit.
PFA_WEIGHTS = np.array([1.0, 1.0, 2.0])


class PhysicalSetup(BaseModel):
    """
    Dimensional inputs (SI units).

    gamma_iso is the integrated polarizability Int d(xi) Tr alpha(i xi)/3
    used by the quantum prefactor; dipole_p is the permanent dipole used by
    the classical one. mass and omega_trap are only needed for trap shifts.
    """

    model_config = ConfigDict(frozen=True)

    hbar: PositiveFloat = constants.hbar
    epsilon0: PositiveFloat = constants.epsilon_0
    amplitude_a: FiniteFloat
    z0: FiniteFloat
    gamma_iso: Optional[PositiveFloat] = None
    dipole_p: Optional[PositiveFloat] = None
    mass: Optional[PositiveFloat] = None
    omega_trap: Optional[PositiveFloat] = None


def energy_ratio(k: ArrayLike, m: ArrayLike) -> float:
    """U/U(z0) = -Tr(K M)."""
    return -float(np.trace(np.asarray(k, dtype=float) @ np.asarray(m, dtype=float)))


def energy_ratio_pfa(h_over_a: float, m: ArrayLike) -> float:
    """
    Proximity-force limit -3 (h/a) Tr(diag(1, 1, 2) M).

    Raises:
        DomainError: If h/a is not finite or lies outside [-1, 1].
    """
    if not math.isfinite(h_over_a) or abs(h_over_a) > 1.0:
        raise DomainError(f"h/a must lie in [-1, 1], got {h_over_a}")
    weighted = float(np.dot(PFA_WEIGHTS, np.diagonal(np.asarray(m, dtype=float))))
    return -3.0 * h_over_a * weighted


def classical_ratio(k: ArrayLike, o: Orientation) -> float:
    """Ratio for a permanent dipole: the response built from Pi(1, 0)."""
    return energy_ratio(k, response_matrix(o, CLASSICAL_GAMMAS))


def energy_scale(s: PhysicalSetup, mode: Mode = "quantum") -> float:
    """
    Prefactor U(z0) in joules.

    Args:
        s (PhysicalSetup): Dimensional inputs.
        mode (str): "quantum" or "classical".

    Returns:
        float: The positive energy scale.

    Raises:
        DomainError: If z0 or a is not positive, or the mode's particle
            parameter is missing.
    """
    if not s.z0 > 0.0:
        raise DomainError(f"Particle distance z0 must be positive, got {s.z0}")
    if not s.amplitude_a > 0.0:
        raise DomainError(f"Corrugation amplitude a must be positive, got {s.amplitude_a}")
    if s.amplitude_a > PERTURBATIVE_LIMIT * s.z0:
        logger.warning(
            f"Amplitude a = {s.amplitude_a:.3e} m exceeds {PERTURBATIVE_LIMIT} z0; "
            f"first-order results are outside their validity range"
        )

    z4 = s.z0**4
    if mode == "quantum":
        if s.gamma_iso is None:
            raise DomainError("Quantum energy scale needs gamma_iso")
        return s.hbar * s.gamma_iso * s.amplitude_a / (64.0 * math.pi**2 * s.epsilon0 * z4)
    if mode == "classical":
        if s.dipole_p is None:
            raise DomainError("Classical energy scale needs dipole_p")
        return s.amplitude_a * s.dipole_p**2 / (192.0 * math.pi * s.epsilon0 * z4)
    raise DomainError(f"Unknown mode {mode!r}")


def dimensional_energy(ratio: float, s: PhysicalSetup, mode: Mode = "quantum") -> float:
    """Energy in joules: ratio * U(z0)."""
    return ratio * energy_scale(s, mode)
