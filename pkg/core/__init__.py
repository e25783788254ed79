"""Numerical core: Bessel functions, kernels, responses, profiles and energies."""

from core.energy import (
    PhysicalSetup,
    classical_ratio,
    dimensional_energy,
    energy_ratio,
    energy_ratio_pfa,
    energy_scale,
)
from core.errors import (
    ConfigError,
    ConvergenceError,
    DegenerateParticleError,
    DomainError,
    LateralVdwError,
    NoSignChangeError,
    OrderingError,
    TrapDestabilizedError,
)
from core.kernel import PlanarVector, j_matrix
from core.profile import (
    GaussianProfile,
    GratingProfile,
    Profile,
    QuadratureSpec,
    StripProfile,
    TabulatedProfile,
    apply_sign,
    kernel_gaussian,
    kernel_general_1d,
    kernel_grating,
    kernel_grating_derivative,
    kernel_strip,
    kernel_strip_derivative,
    load_tabulated_profile,
    profile_kernel,
    shifted_spectrum,
    strip_spectrum,
    tabulated_spectrum,
)
from core.response import (
    GammaParams,
    Orientation,
    euler_rotation,
    gamma_from_polarizability,
    pi_matrix,
    response_matrix,
)
from core.special import bessel_k

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DegenerateParticleError",
    "DomainError",
    "GammaParams",
    "GaussianProfile",
    "GratingProfile",
    "LateralVdwError",
    "NoSignChangeError",
    "Orientation",
    "OrderingError",
    "PhysicalSetup",
    "PlanarVector",
    "Profile",
    "QuadratureSpec",
    "StripProfile",
    "TabulatedProfile",
    "TrapDestabilizedError",
    "apply_sign",
    "bessel_k",
    "classical_ratio",
    "dimensional_energy",
    "energy_ratio",
    "energy_ratio_pfa",
    "energy_scale",
    "euler_rotation",
    "gamma_from_polarizability",
    "j_matrix",
    "kernel_gaussian",
    "kernel_general_1d",
    "kernel_grating",
    "kernel_grating_derivative",
    "kernel_strip",
    "kernel_strip_derivative",
    "load_tabulated_profile",
    "pi_matrix",
    "profile_kernel",
    "response_matrix",
    "shifted_spectrum",
    "strip_spectrum",
    "tabulated_spectrum",
]
