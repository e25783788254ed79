"""
Corrugation models and assembly of the kernel matrix K_ij.

For a profile h with spectrum h~(q), and u = z0 q,

    K_ij(r0) = (1/a) Int d^2q/(2pi)^2 h~(q) e^{i q.r0} J_ij(z0 q).

Gaussian bumps are integrated in polar coordinates (trapezoidal rule in
angle, adaptive panels in radius). Strips and gratings use the closed
form built from the primitives f_ij. Any other one-dimensional profile
goes through the spectral quadrature path, which also serves as the
oracle for the closed forms. Holes and trenches are carried by the sign
flag; sign 0 stands for the flat plane.
"""

import math
from pathlib import Path
from typing import Annotated, Callable, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    FiniteFloat,
    PositiveFloat,
    PositiveInt,
    field_validator,
)
from scipy.integrate import quad_vec
from scipy.signal.windows import tukey

from configs.config import config
from core.errors import ConvergenceError, DomainError
from core.kernel import j_components
from utils.logger import setup_logger

logger = setup_logger(__name__)

KernelMatrix = NDArray[np.float64]
Spectrum = Callable[[NDArray[np.float64]], ArrayLike]
Sign = Literal[-1, 0, 1]

# Narrowest Gaussian accepted; bounds the angular resolution cost.
MIN_GAUSSIAN_WIDTH = 1e-4
# exp(-(x/2)^2) < 1e-18 beyond x = 13: radial cutoff in units of z0/d.
GAUSSIAN_DECAY_CUTOFF = 13.0
# Fraction of a tabulated profile tapered to zero at each edge (Tukey window).
TABULATED_TAPER = 0.1
TABULATED_EDGE_WARNING = 1e-3
MAX_RESAMPLED_POINTS = 20001


class QuadratureSpec(BaseModel):
    """Tolerances and truncation of the spectral quadratures."""

    model_config = ConfigDict(frozen=True)

    rel_tol: PositiveFloat = Field(default_factory=lambda: config.QUAD_REL_TOL)
    abs_tol: PositiveFloat = Field(default_factory=lambda: config.QUAD_ABS_TOL)
    u_max: float = Field(default_factory=lambda: config.QUAD_U_MAX, ge=20.0)
    max_refinements: PositiveInt = Field(
        default_factory=lambda: config.QUAD_MAX_REFINEMENTS
    )


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------


class GaussianProfile(BaseModel):
    """h = sign * a * exp(-(|r|/d)^2)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["gaussian"] = "gaussian"
    d_over_z0: PositiveFloat
    sign: Sign = 1

    @property
    def is_even(self) -> bool:
        return True

    def height(self, x0_over_z0: float, y0_over_z0: float = 0.0) -> float:
        rho2 = x0_over_z0**2 + y0_over_z0**2
        return self.sign * math.exp(-rho2 / self.d_over_z0**2)


class StripProfile(BaseModel):
    """Rectangular strip of width d centered on x = 0."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["strip"] = "strip"
    d_over_z0: PositiveFloat
    sign: Sign = 1

    @property
    def is_even(self) -> bool:
        return True

    def height(self, x0_over_z0: float, y0_over_z0: float = 0.0) -> float:
        return float(self.sign) if abs(x0_over_z0) <= self.d_over_z0 / 2.0 else 0.0


class GratingProfile(BaseModel):
    """N strips of width d separated by gaps L, symmetric about x = 0."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["grating"] = "grating"
    d_over_z0: PositiveFloat
    L_over_z0: PositiveFloat
    n_strips: PositiveInt
    sign: Sign = 1

    @property
    def is_even(self) -> bool:
        return True

    @property
    def period(self) -> float:
        return self.L_over_z0 + self.d_over_z0

    def offsets(self) -> NDArray[np.float64]:
        """Shifts ((N+1)/2 - k)(L + d), k = 1..N; strip k is centered at -offset."""
        k = np.arange(1, self.n_strips + 1)
        return ((self.n_strips + 1) / 2.0 - k) * self.period

    def height(self, x0_over_z0: float, y0_over_z0: float = 0.0) -> float:
        inside = np.abs(x0_over_z0 + self.offsets()) <= self.d_over_z0 / 2.0
        return float(self.sign) if bool(np.any(inside)) else 0.0


class TabulatedProfile(BaseModel):
    """Sampled one-dimensional profile (x/z0, h/a); zero outside the table."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["tabulated"] = "tabulated"
    samples: Tuple[Tuple[FiniteFloat, FiniteFloat], ...]
    sign: Sign = 1

    @field_validator("samples")
    @classmethod
    def _check_samples(cls, samples):
        if len(samples) < 3:
            raise ValueError("A tabulated profile needs at least 3 samples")
        xs = np.array([s[0] for s in samples])
        hs = np.array([s[1] for s in samples])
        if np.any(np.diff(xs) <= 0.0):
            raise ValueError("Sample abscissae must be strictly increasing")
        if np.any(np.abs(hs) > 1.0):
            raise ValueError("Sample heights must satisfy |h|/a <= 1")
        return samples

    @property
    def xs(self) -> NDArray[np.float64]:
        return np.array([s[0] for s in self.samples])

    @property
    def hs(self) -> NDArray[np.float64]:
        return np.array([s[1] for s in self.samples])

    @property
    def is_even(self) -> bool:
        xs = self.xs
        mirrored = np.interp(-xs, xs, self.hs, left=0.0, right=0.0)
        return bool(np.allclose(self.hs, mirrored, rtol=0.0, atol=1e-12))

    def height(self, x0_over_z0: float, y0_over_z0: float = 0.0) -> float:
        return self.sign * float(
            np.interp(x0_over_z0, self.xs, self.hs, left=0.0, right=0.0)
        )

    def spectrum(self) -> Spectrum:
        """Unsigned dimensionless spectrum of the sampled profile."""
        return tabulated_spectrum(self.samples)


Profile = Annotated[
    Union[GaussianProfile, StripProfile, GratingProfile, TabulatedProfile],
    Field(discriminator="kind"),
]


def load_tabulated_profile(path: Union[str, Path], sign: Sign = 1) -> TabulatedProfile:
    """
    Read a two-column table (x/z0, h/a), whitespace separated, '#' comments.

    Args:
        path (str | Path): Table location.
        sign (int): +1 bump, -1 trench, 0 flat.

    Returns:
        TabulatedProfile: The parsed profile.

    Raises:
        DomainError: If a line does not hold exactly two numbers.
    """
    samples = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise DomainError(f"{path}:{lineno}: expected two columns, got {len(fields)}")
        try:
            samples.append((float(fields[0]), float(fields[1])))
        except ValueError as e:
            raise DomainError(f"{path}:{lineno}: {e}") from e
    logger.info(f"Loaded {len(samples)} profile samples from {path}")
    return TabulatedProfile(samples=tuple(samples), sign=sign)


# ---------------------------------------------------------------------------
# Spectra for the one-dimensional quadrature path
# ---------------------------------------------------------------------------


def strip_spectrum(d_over_z0: float) -> Spectrum:
    """Spectrum 2 sin(u d/2)/u of a unit strip of width d (in z0 units)."""

    def spectrum(u: NDArray[np.float64]) -> NDArray[np.float64]:
        return d_over_z0 * np.sinc(np.asarray(u) * d_over_z0 / (2.0 * math.pi))

    return spectrum


def shifted_spectrum(spectrum: Spectrum, shift_over_z0: float) -> Spectrum:
    """Spectrum of the profile translated by +shift: e^{-i u s} h~(u)."""

    def shifted(u: NDArray[np.float64]) -> NDArray[np.complex128]:
        u = np.asarray(u)
        return np.exp(-1j * u * shift_over_z0) * np.asarray(spectrum(u))

    return shifted


def tabulated_spectrum(samples: Sequence[Tuple[float, float]]) -> Spectrum:
    """
    Exact transform of the linear interpolant of a sampled profile.

    The table is resampled on a uniform grid when needed and tapered to zero
    at both edges, so the interpolant is a sum of hat functions and

        h~(u) = dx sinc^2(u dx / 2) sum_j h_j e^{-i u x_j}.
    """
    xs = np.array([s[0] for s in samples], dtype=float)
    hs = np.array([s[1] for s in samples], dtype=float)
    if max(abs(hs[0]), abs(hs[-1])) > TABULATED_EDGE_WARNING:
        logger.warning(
            f"Tabulated profile does not decay at the table edges "
            f"(h/a = {hs[0]:.3g}, {hs[-1]:.3g}); tapering to zero"
        )

    steps = np.diff(xs)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        n = min(int(math.ceil((xs[-1] - xs[0]) / steps.min())) + 1, MAX_RESAMPLED_POINTS)
        grid = np.linspace(xs[0], xs[-1], n)
        hs = np.interp(grid, xs, hs)
        xs = grid
        logger.debug(f"Resampled tabulated profile onto {n} uniform points")
    dx = float(xs[1] - xs[0])
    hs = hs * tukey(len(hs), alpha=TABULATED_TAPER)

    def spectrum(u: NDArray[np.float64]) -> NDArray[np.complex128]:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        phases = np.exp(-1j * np.outer(u, xs)) @ hs
        return dx * np.sinc(u * dx / (2.0 * math.pi)) ** 2 * phases

    return spectrum


# ---------------------------------------------------------------------------
# Quadrature helpers
# ---------------------------------------------------------------------------


def _integrate(
    integrand: Callable[[float], NDArray[np.float64]],
    upper: float,
    q: QuadratureSpec,
    points: Sequence[float],
    label: str,
) -> NDArray[np.float64]:
    breaks = sorted({p for p in points if 0.0 < p < upper})
    result, error, info = quad_vec(
        integrand,
        0.0,
        upper,
        epsabs=q.abs_tol,
        epsrel=q.rel_tol,
        limit=q.max_refinements,
        points=breaks or None,
        full_output=True,
    )
    target = max(q.abs_tol, q.rel_tol * float(np.linalg.norm(result)))
    if not info.success and error > target:
        logger.error(f"{label}: quadrature stopped with status {info.status}: {info.message}")
        raise ConvergenceError(f"{label} quadrature did not converge", error, target)
    logger.debug(f"{label}: {info.neval} evaluations, error estimate {error:.2e}")
    return result


def _real_entries(
    stacked: NDArray[np.float64], q: QuadratureSpec, label: str
) -> NDArray[np.float64]:
    """Split [re..., im...], check the imaginary residue and drop it."""
    n = stacked.size // 2
    real, imag = stacked[:n], stacked[n:]
    residue = float(np.max(np.abs(imag)))
    allowed = max(q.abs_tol, q.rel_tol * float(np.max(np.abs(real))))
    if residue > allowed:
        raise ConvergenceError(f"{label} kept an imaginary residue", residue, allowed)
    return real


def _angular_nodes(phase_span: float) -> int:
    # Bessel J_n(z) is negligible for n > z + 10 z^(1/3) + 32.
    n = phase_span + 10.0 * phase_span ** (1.0 / 3.0) + 32.0
    return 4 * int(math.ceil(n / 4.0))


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


def kernel_gaussian(
    r0_over_z0: Tuple[float, float], d_over_z0: float, q: Optional[QuadratureSpec] = None
) -> KernelMatrix:
    """
    Kernel matrix of a unit Gaussian bump exp(-(|r|/d)^2).

        K = (d/z0)^2/(4 pi) Int d^2u exp(-(d/z0)^2 |u|^2/4) e^{i u.r0/z0} J(u)

    Args:
        r0_over_z0 (tuple): Particle position (x0/z0, y0/z0).
        d_over_z0 (float): Gaussian width ratio, at least 1e-4.
        q (QuadratureSpec, optional): Tolerances; config defaults when omitted.

    Returns:
        np.ndarray: Real symmetric (3, 3) matrix.

    Raises:
        DomainError: If the width is too small or the inputs are not finite.
        ConvergenceError: If the radial quadrature misses its tolerance.
    """
    q = q or QuadratureSpec()
    x0, y0 = (float(c) for c in r0_over_z0)
    d = float(d_over_z0)
    if not all(math.isfinite(v) for v in (x0, y0, d)):
        raise DomainError("Gaussian kernel inputs must be finite")
    if d < MIN_GAUSSIAN_WIDTH:
        raise DomainError(
            f"Gaussian width d/z0 = {d} below the supported minimum {MIN_GAUSSIAN_WIDTH}"
        )

    u_top = min(q.u_max, GAUSSIAN_DECAY_CUTOFF / d)
    n_angle = _angular_nodes(u_top * math.hypot(x0, y0))
    chi = 2.0 * math.pi * np.arange(n_angle) / n_angle
    cos_chi, sin_chi = np.cos(chi), np.sin(chi)
    projection = x0 * cos_chi + y0 * sin_chi
    # d^2 pi / (2 pi)^2 times the trapezoid weight 2 pi / n
    prefactor = d * d / (2.0 * n_angle)

    def integrand(u: float) -> NDArray[np.float64]:
        parts = j_components(u * cos_chi, u * sin_chi)
        phase = np.exp(1j * u * projection)
        even = np.einsum("n,nij->ij", phase, parts.even)
        odd = 1j * np.einsum("n,nk->k", phase, parts.odd)
        entries = np.array(
            [even[0, 0], even[1, 1], even[2, 2], even[0, 1], odd[0], odd[1]]
        )
        entries *= prefactor * u * math.exp(-0.25 * d * d * u * u)
        return np.concatenate([entries.real, entries.imag])

    stacked = _integrate(
        integrand, u_top, q, (2.0 / d, 1.0, 4.0, 10.0, 20.0), "Gaussian kernel"
    )
    xx, yy, zz, xy, xz, yz = _real_entries(stacked, q, "Gaussian kernel")
    return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])


def kernel_general_1d(
    x0_over_z0: float, spectrum: Spectrum, q: Optional[QuadratureSpec] = None
) -> KernelMatrix:
    """
    Kernel matrix of a profile that depends on x only.

        K = Int du/(2 pi) s(u) e^{i u x0/z0} J(u, 0),  s(u) = h~_1(u/z0)/(a z0)

    The integral over the real line is folded onto [0, u_max]; the spectrum
    callable receives arrays and may not be evaluated at u = 0.

    Args:
        x0_over_z0 (float): Particle abscissa.
        spectrum (callable): Dimensionless spectrum s(u), vectorized.
        q (QuadratureSpec, optional): Tolerances; config defaults when omitted.

    Returns:
        np.ndarray: Real symmetric (3, 3) matrix with K_xy = K_yz = 0.

    Raises:
        DomainError: If x0 is not finite.
        ConvergenceError: If the quadrature misses its tolerance.
    """
    q = q or QuadratureSpec()
    x0 = float(x0_over_z0)
    if not math.isfinite(x0):
        raise DomainError("Kernel abscissa must be finite")

    def integrand(u: float) -> NDArray[np.float64]:
        us = np.array([u, -u])
        weights = np.asarray(spectrum(us), dtype=complex) * np.exp(1j * us * x0)
        parts = j_components(us, 0.0)
        even = np.einsum("n,nij->ij", weights, parts.even)
        odd = 1j * np.dot(weights, parts.odd[:, 0])
        entries = np.array([even[0, 0], even[1, 1], even[2, 2], odd]) / (2.0 * math.pi)
        return np.concatenate([entries.real, entries.imag])

    stacked = _integrate(integrand, q.u_max, q, (1.0, 4.0, 10.0, 20.0), "1D kernel")
    xx, yy, zz, xz = _real_entries(stacked, q, "1D kernel")
    return np.array([[xx, 0.0, xz], [0.0, yy, 0.0], [xz, 0.0, zz]])


def strip_primitive(u: float) -> NDArray[np.float64]:
    """Matrix of the strip primitives f_ij(u); f_xy = f_yz = 0."""
    u2 = u * u
    s = 1.0 + u2
    fxx = u**3 * (8.0 * u2 * u2 + 28.0 * u2 + 35.0) / s**3.5
    fyy = u * (8.0 * u2 * u2 + 20.0 * u2 + 15.0) / s**2.5
    fzz = u * (16.0 * u2**3 + 56.0 * u2 * u2 + 66.0 * u2 + 41.0) / s**3.5
    fxz = (8.0 * u2 - 7.0) / s**3.5
    return np.array([[fxx, 0.0, fxz], [0.0, fyy, 0.0], [fxz, 0.0, fzz]])


def strip_primitive_derivative(u: float) -> NDArray[np.float64]:
    """Matrix of f'_ij(u)."""
    u2 = u * u
    s = 1.0 + u2
    dxx = 105.0 * u2 / s**4.5
    dyy = 15.0 / s**3.5
    dzz = (16.0 * u2 * u2 - 48.0 * u2 + 41.0) / s**4.5
    dxz = u * (65.0 - 40.0 * u2) / s**4.5
    return np.array([[dxx, 0.0, dxz], [0.0, dyy, 0.0], [dxz, 0.0, dzz]])


def _check_strip_args(x0: float, d: float) -> None:
    if not (math.isfinite(x0) and math.isfinite(d)):
        raise DomainError("Strip kernel inputs must be finite")
    if d <= 0.0:
        raise DomainError(f"Strip width must be positive, got {d}")


def kernel_strip(x0_over_z0: float, d_over_z0: float) -> KernelMatrix:
    """
    Closed-form kernel of a unit strip of width d centered on x = 0.

        K_ij = (3/16) [f_ij(x0/z0 + d/2z0) - f_ij(x0/z0 - d/2z0)]

    Raises:
        DomainError: If the inputs are not finite or the width is not positive.
    """
    _check_strip_args(x0_over_z0, d_over_z0)
    half = 0.5 * d_over_z0
    return 0.1875 * (
        strip_primitive(x0_over_z0 + half) - strip_primitive(x0_over_z0 - half)
    )


def kernel_strip_derivative(x0_over_z0: float, d_over_z0: float) -> KernelMatrix:
    """dK/d(x0/z0) of the unit strip, from f'_ij."""
    _check_strip_args(x0_over_z0, d_over_z0)
    half = 0.5 * d_over_z0
    return 0.1875 * (
        strip_primitive_derivative(x0_over_z0 + half)
        - strip_primitive_derivative(x0_over_z0 - half)
    )


def _grating_sum(
    strip_fn: Callable[[float, float], KernelMatrix],
    x0_over_z0: float,
    d_over_z0: float,
    L_over_z0: float,
    n: int,
) -> KernelMatrix:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"Number of strips must be a positive integer, got {n}")
    if not (math.isfinite(L_over_z0) and L_over_z0 > 0.0):
        raise DomainError(f"Strip separation must be positive and finite, got {L_over_z0}")
    period = L_over_z0 + d_over_z0
    total = np.zeros((3, 3))
    for k in range(1, int(n) + 1):
        total = total + strip_fn(x0_over_z0 + ((n + 1) / 2.0 - k) * period, d_over_z0)
    return total


def kernel_grating(
    x0_over_z0: float, d_over_z0: float, L_over_z0: float, n: int
) -> KernelMatrix:
    """Sum of n strip kernels shifted by ((n+1)/2 - k)(L + d)/z0, k = 1..n."""
    return _grating_sum(kernel_strip, x0_over_z0, d_over_z0, L_over_z0, n)


def kernel_grating_derivative(
    x0_over_z0: float, d_over_z0: float, L_over_z0: float, n: int
) -> KernelMatrix:
    """dK/d(x0/z0) of the grating."""
    return _grating_sum(kernel_strip_derivative, x0_over_z0, d_over_z0, L_over_z0, n)


def apply_sign(k: KernelMatrix, sign: int) -> KernelMatrix:
    """
    Multiply a kernel by the profile sign (+1 bump, -1 hole, 0 flat).

    Raises:
        DomainError: If sign is not one of -1, 0, +1.
    """
    if sign not in (-1, 0, 1):
        raise DomainError(f"Profile sign must be -1, 0 or +1, got {sign}")
    return float(sign) * np.asarray(k, dtype=float)


def profile_kernel(
    profile: Profile,
    x0_over_z0: float,
    y0_over_z0: float = 0.0,
    q: Optional[QuadratureSpec] = None,
) -> KernelMatrix:
    """
    Signed kernel matrix of any profile at (x0/z0, y0/z0).

    One-dimensional profiles ignore y0.
    """
    if profile.sign == 0:
        return np.zeros((3, 3))
    if isinstance(profile, GaussianProfile):
        k = kernel_gaussian((x0_over_z0, y0_over_z0), profile.d_over_z0, q)
    elif isinstance(profile, StripProfile):
        k = kernel_strip(x0_over_z0, profile.d_over_z0)
    elif isinstance(profile, GratingProfile):
        k = kernel_grating(
            x0_over_z0, profile.d_over_z0, profile.L_over_z0, profile.n_strips
        )
    elif isinstance(profile, TabulatedProfile):
        k = kernel_general_1d(x0_over_z0, profile.spectrum(), q)
    else:
        raise DomainError(f"Unsupported profile type: {type(profile).__name__}")
    return apply_sign(k, profile.sign)


def has_closed_form_derivative(profile: Profile) -> bool:
    return isinstance(profile, (StripProfile, GratingProfile))


def profile_kernel_derivative(profile: Profile, x0_over_z0: float) -> KernelMatrix:
    """
    Signed dK/d(x0/z0) for strips and gratings.

    Raises:
        DomainError: For profiles without a closed-form derivative.
    """
    if profile.sign == 0:
        return np.zeros((3, 3))
    if isinstance(profile, StripProfile):
        k = kernel_strip_derivative(x0_over_z0, profile.d_over_z0)
    elif isinstance(profile, GratingProfile):
        k = kernel_grating_derivative(
            x0_over_z0, profile.d_over_z0, profile.L_over_z0, profile.n_strips
        )
    else:
        raise DomainError(f"No closed-form derivative for {profile.kind} profiles")
    return apply_sign(k, profile.sign)
