"""
Shared fixtures for the lateral vdW test suites.

Provides scenario builders for the recurring particle configurations and
the single-oscillator integrated polarizability used to feed gamma_iso.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Ensure project root is in sys.path for all test imports
PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from core.profile import GaussianProfile, GratingProfile, QuadratureSpec, StripProfile  # noqa: E402
from core.response import GammaParams, Orientation  # noqa: E402
from services.analysis import Scenario  # noqa: E402

AXIS_X = Orientation(theta=math.pi / 2)
AXIS_Z = Orientation()


def single_oscillator_integral(alpha0: float, omega0: float) -> float:
    """Int_0^inf alpha0 omega0^2 / (omega0^2 + xi^2) d(xi) = pi alpha0 omega0 / 2."""
    return math.pi * alpha0 * omega0 / 2.0


def gaussian_scenario(d_over_z0, gamma_s=0.6, orientation=AXIS_X, **kwargs) -> Scenario:
    return Scenario(
        profile=GaussianProfile(d_over_z0=d_over_z0, sign=kwargs.pop("sign", 1)),
        gammas=GammaParams(gamma_s=gamma_s),
        orientation=orientation,
        **kwargs,
    )


def strip_scenario(d_over_z0, gamma_s=0.2, orientation=AXIS_X, **kwargs) -> Scenario:
    return Scenario(
        profile=StripProfile(d_over_z0=d_over_z0, sign=kwargs.pop("sign", 1)),
        gammas=GammaParams(gamma_s=gamma_s),
        orientation=orientation,
        **kwargs,
    )


def grating_scenario(d_over_z0, n_strips, L_over_z0=0.5, gamma_s=0.2, orientation=AXIS_X, **kwargs) -> Scenario:
    return Scenario(
        profile=GratingProfile(
            d_over_z0=d_over_z0, L_over_z0=L_over_z0, n_strips=n_strips, sign=kwargs.pop("sign", 1)
        ),
        gammas=GammaParams(gamma_s=gamma_s),
        orientation=orientation,
        **kwargs,
    )


@pytest.fixture
def make_gaussian():
    return gaussian_scenario


@pytest.fixture
def make_strip():
    return strip_scenario


@pytest.fixture
def make_grating():
    return grating_scenario


@pytest.fixture
def oscillator_integral():
    """Integrated polarizability of a single Lorentz oscillator."""
    return single_oscillator_integral


@pytest.fixture
def wide_bump_scenario():
    """Gaussian bump, gamma_s = 0.6, axis along x, d/z0 = 0.8."""
    return gaussian_scenario(0.8)


@pytest.fixture
def narrow_bump_scenario():
    """Gaussian bump, gamma_s = 0.6, axis along x, d/z0 = 0.2."""
    return gaussian_scenario(0.2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fast_quad():
    """Looser quadrature for tests that only need the sign of a curvature."""
    return QuadratureSpec(rel_tol=1e-7, abs_tol=1e-10)
