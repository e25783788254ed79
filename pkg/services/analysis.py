"""
Analysis service built on the energy ratio.

Provides the lateral force, classification of the origin, the critical
width and threshold anisotropy of the sign inversion, minima finding,
peak/valley regimes of gratings, trap-frequency shifts and 2D maps.

All positions are dimensionless (x0/z0, y0/z0). Derivatives use central
stencils with one Richardson step unless a closed form exists.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from scipy.optimize import bisect, brentq

from core.energy import Mode, PhysicalSetup, energy_ratio, energy_ratio_pfa, energy_scale
from core.errors import (
    ConvergenceError,
    DomainError,
    LateralVdwError,
    NoSignChangeError,
    TrapDestabilizedError,
)
from core.profile import (
    GaussianProfile,
    GratingProfile,
    Profile,
    QuadratureSpec,
    StripProfile,
    has_closed_form_derivative,
    profile_kernel,
    profile_kernel_derivative,
)
from core.response import CLASSICAL_GAMMAS, GammaParams, Orientation, response_matrix
from services.sweeps import ordered_map
from utils.logger import setup_logger

logger = setup_logger(__name__)

Family = Literal["gaussian", "strip"]
ExtremumKind = Literal["minimum", "maximum", "saddle", "degenerate"]
Regime = Literal["peak", "valley", "degenerate"]

FORCE_STEP = 1e-3
FORCE_TOLERANCE = 1e-5
CURVATURE_STEP = 0.05
CURVATURE_TOLERANCE = 1e-7
CURVATURE_HALVINGS = 2
DEGENERACY_BAND = 1e-6
WIDTH_BRACKET = (1e-3, 20.0)
THRESHOLD_WIDTHS = (4e-3, 2e-3, 1e-3)
GAMMA_BRACKET = (0.0, 0.99)
GAMMA_SCAN_POINTS = 100
THRESHOLD_AGREEMENT = 1e-3
MIN_GRID_POINTS = 16
MINIMUM_XTOL = 1e-7
MINIMUM_CURVATURE_STEP = 0.02
REGIME_MIN_STRIPS = 5
REGIME_TIE = 1e-9

# Particle axis along x: the orientation of the sign-inversion diagrams.
AXIS_ALONG_X = Orientation(theta=math.pi / 2)


class Scenario(BaseModel):
    """A profile, a particle and the way the energy is evaluated."""

    model_config = ConfigDict(frozen=True)

    profile: Profile
    gammas: GammaParams = Field(default_factory=GammaParams)
    orientation: Orientation = Field(default_factory=Orientation)
    mode: Mode = "quantum"
    approximation: Literal["exact", "pfa"] = "exact"
    quad: QuadratureSpec = Field(default_factory=QuadratureSpec)

    def response(self) -> NDArray[np.float64]:
        """Response matrix M; classical mode uses Pi(1, 0)."""
        gammas = CLASSICAL_GAMMAS if self.mode == "classical" else self.gammas
        return response_matrix(self.orientation, gammas)


class ExtremumReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    location: float
    value: float
    kind: ExtremumKind
    curvature: float
    y_location: Optional[float] = None
    is_global: bool = False


class MinimaScan(BaseModel):
    """Interior minima sorted by location, and minima sitting on the window edges."""

    model_config = ConfigDict(frozen=True)

    minima: Tuple[ExtremumReport, ...]
    boundary: Tuple[ExtremumReport, ...] = ()


class TrapReport(BaseModel):
    """
    Trap response to the corrugation at the origin.

    curvature is d^2(U/U(z0))/d(x0/z0)^2; curvature_si is d^2U/dx0^2 in J/m^2.
    """

    model_config = ConfigDict(frozen=True)

    curvature: float
    curvature_si: float
    omega_prime: float
    delta_omega: float


class RegimeReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    regime: Regime
    strip_center_ratio: float
    gap_center_ratio: float


class PhaseBoundary(BaseModel):
    """Critical widths per gamma_s (None below threshold) and the extrapolated threshold."""

    model_config = ConfigDict(frozen=True)

    family: Family
    rows: Tuple[Tuple[float, Optional[float]], ...]
    threshold: float


class MapFailure(NamedTuple):
    ix: int
    iy: int
    message: str


@dataclass(frozen=True)
class EnergyMap:
    """Ratio on a grid, ratio[iy, ix] at (x[ix], y[iy]); NaN where evaluation failed."""

    x: NDArray[np.float64]
    y: NDArray[np.float64]
    ratio: NDArray[np.float64]
    failures: Tuple[MapFailure, ...] = ()


class _CurvatureEstimate(NamedTuple):
    value: NDArray[np.float64]
    error: float
    samples: Dict[float, NDArray[np.float64]]


# ---------------------------------------------------------------------------
# Point evaluations
# ---------------------------------------------------------------------------


def ratio_at(s: Scenario, x0_over_z0: float, y0_over_z0: float = 0.0) -> float:
    """
    Energy ratio U/U(z0) at (x0/z0, y0/z0).

    Raises:
        ConvergenceError: If a kernel quadrature misses its tolerance.
    """
    m = s.response()
    if s.approximation == "pfa":
        return energy_ratio_pfa(s.profile.height(x0_over_z0, y0_over_z0), m)
    return energy_ratio(profile_kernel(s.profile, x0_over_z0, y0_over_z0, s.quad), m)


def lateral_force_ratio(
    s: Scenario, x0_over_z0: float, y0_over_z0: float = 0.0
) -> Tuple[float, float]:
    """
    Lateral force along x in units of U(z0)/z0, -d(ratio)/d(x0/z0).

    Strips and gratings use the closed-form kernel derivative; other profiles
    use central differences at steps 1e-3 and 5e-4 combined by Richardson
    extrapolation.

    Args:
        s (Scenario): Scenario to evaluate.
        x0_over_z0 (float): Particle abscissa.
        y0_over_z0 (float): Particle ordinate (Gaussian profiles only).

    Returns:
        tuple: (force, error estimate).

    Raises:
        ConvergenceError: If the two difference quotients disagree by more
            than 1e-5 of the sampled ratio scale.
    """
    if s.approximation == "exact" and has_closed_form_derivative(s.profile):
        dk = profile_kernel_derivative(s.profile, x0_over_z0)
        force = -energy_ratio(dk, s.response())
        roundoff = 64.0 * np.finfo(float).eps * float(np.max(np.abs(dk)))
        return force, roundoff

    h = FORCE_STEP
    r = {
        dx: ratio_at(s, x0_over_z0 + dx, y0_over_z0) for dx in (h, -h, h / 2, -h / 2)
    }
    coarse = (r[h] - r[-h]) / (2.0 * h)
    fine = (r[h / 2] - r[-h / 2]) / h
    slope = (4.0 * fine - coarse) / 3.0
    error = abs(slope - fine)
    scale = max(abs(v) for v in r.values())
    if error > FORCE_TOLERANCE * scale:
        logger.error(f"Force at x0/z0={x0_over_z0}: Richardson estimates disagree")
        raise ConvergenceError(
            f"Force at x0/z0={x0_over_z0} is not resolved by the difference stencil",
            error,
            FORCE_TOLERANCE * scale,
        )
    return -slope, error


# ---------------------------------------------------------------------------
# Origin curvature
# ---------------------------------------------------------------------------


def _second_derivative(
    fn: Callable[[float], object], step: float = CURVATURE_STEP
) -> _CurvatureEstimate:
    """5-point central stencil at x = 0 with Richardson halving."""
    samples: Dict[float, NDArray[np.float64]] = {}

    def at(x: float) -> NDArray[np.float64]:
        if x not in samples:
            samples[x] = np.asarray(fn(x), dtype=float)
        return samples[x]

    def stencil(h: float) -> NDArray[np.float64]:
        return (-at(2 * h) + 16.0 * at(h) - 30.0 * at(0.0) + 16.0 * at(-h) - at(-2 * h)) / (
            12.0 * h * h
        )

    h = step
    coarse = stencil(h)
    best, best_error = coarse, math.inf
    for _ in range(CURVATURE_HALVINGS + 1):
        fine = stencil(h / 2)
        extrapolated = (16.0 * fine - coarse) / 15.0
        error = float(np.max(np.abs(extrapolated - fine)))
        if error >= best_error:
            # quadrature noise dominates from here on
            break
        best, best_error = extrapolated, error
        scale = max(float(np.max(np.abs(v))) for v in samples.values())
        if error <= CURVATURE_TOLERANCE * scale:
            break
        h, coarse = h / 2, fine
    return _CurvatureEstimate(best, best_error, samples)


def _require_even(profile: Profile) -> None:
    if not profile.is_even:
        raise DomainError(f"Origin analysis needs an even profile, got an asymmetric {profile.kind}")


def origin_curvature_matrix(
    profile: Profile, quad: Optional[QuadratureSpec] = None
) -> Tuple[NDArray[np.float64], float]:
    """
    d^2K/d(x0/z0)^2 at the origin and its error estimate.

    The ratio curvature of any particle is -Tr(C M) for this matrix C.

    Raises:
        DomainError: If the profile is not even.
    """
    _require_even(profile)
    est = _second_derivative(lambda x: profile_kernel(profile, x, 0.0, quad))
    return est.value, est.error


def classify_origin(s: Scenario) -> ExtremumReport:
    """
    Classify x0 = 0 as a minimum or a maximum along x.

    The curvature is degenerate when |curvature| <= 1e-6 of the largest
    |ratio| met by the stencil.

    Raises:
        DomainError: If the profile is not even.
    """
    _require_even(s.profile)
    est = _second_derivative(lambda x: ratio_at(s, x))
    curvature = float(est.value)
    scale = max(abs(float(v)) for v in est.samples.values())
    if abs(curvature) <= DEGENERACY_BAND * scale:
        kind = "degenerate"
    elif curvature > 0.0:
        kind = "minimum"
    else:
        kind = "maximum"
    logger.debug(f"Origin of {s.profile.kind}: {kind}, curvature {curvature:.6e}")
    return ExtremumReport(
        location=0.0,
        value=float(est.samples[0.0]),
        kind=kind,
        curvature=curvature,
        y_location=0.0 if isinstance(s.profile, GaussianProfile) else None,
    )


# ---------------------------------------------------------------------------
# Sign-inversion diagrams
# ---------------------------------------------------------------------------


def family_profile(family: Family, d_over_z0: float) -> Profile:
    """Unit bump of the given family and width."""
    if family == "gaussian":
        return GaussianProfile(d_over_z0=d_over_z0)
    if family == "strip":
        return StripProfile(d_over_z0=d_over_z0)
    raise DomainError(f"Unknown profile family {family!r}")


def _width_quad(quad: Optional[QuadratureSpec], d_over_z0: float) -> QuadratureSpec:
    # Narrow bumps give kernels of order (d/z0)^2; keep abs_tol relative to that.
    quad = quad or QuadratureSpec()
    return quad.model_copy(update={"abs_tol": quad.abs_tol * min(1.0, d_over_z0**2)})


def _origin_ratio_curvature(
    family: Family,
    d_over_z0: float,
    gammas: GammaParams,
    orientation: Orientation,
    quad: Optional[QuadratureSpec],
) -> float:
    s = Scenario(
        profile=family_profile(family, d_over_z0),
        gammas=gammas,
        orientation=orientation,
        quad=_width_quad(quad, d_over_z0),
    )
    return classify_origin(s).curvature


def critical_width(
    gamma_s: float,
    family: Family,
    tol: float = 1e-6,
    quad: Optional[QuadratureSpec] = None,
    orientation: Orientation = AXIS_ALONG_X,
) -> float:
    """
    Width d/z0 at which the origin turns from a maximum into a minimum.

    Args:
        gamma_s (float): Anisotropy of the particle (gamma_a = 0).
        family (str): "gaussian" or "strip".
        tol (float): Absolute tolerance on d/z0.
        quad (QuadratureSpec, optional): Gaussian quadrature tolerances.
        orientation (Orientation): Particle orientation, axis along x by default.

    Returns:
        float: Critical d/z0 in [1e-3, 20].

    Raises:
        DomainError: If gamma_s is outside [0, 1).
        NoSignChangeError: If the origin curvature keeps its sign over the bracket.
    """
    try:
        gammas = GammaParams(gamma_s=gamma_s)
    except ValidationError as e:
        raise DomainError(f"gamma_s={gamma_s} is not a physical anisotropy") from e

    def curvature(d: float) -> float:
        return _origin_ratio_curvature(family, d, gammas, orientation, quad)

    lo, hi = WIDTH_BRACKET
    c_lo, c_hi = curvature(lo), curvature(hi)
    if c_lo == 0.0:
        return lo
    if c_hi == 0.0:
        return hi
    if (c_lo > 0.0) == (c_hi > 0.0):
        raise NoSignChangeError(
            f"Origin curvature keeps its sign for gamma_s={gamma_s} ({family}) "
            f"over d/z0 in [{lo}, {hi}]"
        )
    root = bisect(curvature, lo, hi, xtol=tol, maxiter=200)
    logger.info(f"Critical width for gamma_s={gamma_s} ({family}): d/z0 = {root:.6f}")
    return float(root)


def _single_gamma_root(curvature: Callable[[float], float], d_over_z0: float) -> float:
    grid = np.linspace(*GAMMA_BRACKET, GAMMA_SCAN_POINTS)
    values = np.array([curvature(g) for g in grid])
    changes = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
    if len(changes) == 0:
        raise NoSignChangeError(
            f"Origin curvature keeps its sign for gamma_s in {GAMMA_BRACKET} at d/z0={d_over_z0}"
        )
    roots = [brentq(curvature, grid[i], grid[i + 1], xtol=1e-14) for i in changes]
    if len(roots) > 1:
        raise ConvergenceError(
            f"Origin curvature changes sign {len(roots)} times in gamma_s at d/z0={d_over_z0}",
            max(roots) - min(roots),
        )
    return float(roots[0])


def threshold_gamma(
    family: Family,
    quad: Optional[QuadratureSpec] = None,
    orientation: Orientation = AXIS_ALONG_X,
) -> float:
    """
    Smallest gamma_s allowing a sign inversion, extrapolated to d/z0 -> 0.

    The origin curvature is linear in gamma_s, so one curvature matrix per
    width suffices. Roots at d/z0 in {4e-3, 2e-3, 1e-3} are fitted linearly
    in (d/z0)^2 and cross-checked against the Richardson combination of the
    two smallest widths.

    Raises:
        NoSignChangeError: If no root exists in [0, 0.99].
        ConvergenceError: If the root is not unique or the two
            extrapolations differ by more than 1e-3.
    """
    roots = []
    for d in THRESHOLD_WIDTHS:
        c, _ = origin_curvature_matrix(family_profile(family, d), _width_quad(quad, d))

        def curvature(g: float, c=c) -> float:
            return energy_ratio(c, response_matrix(orientation, GammaParams(gamma_s=g)))

        roots.append(_single_gamma_root(curvature, d))
        logger.debug(f"{family}: curvature root gamma_s={roots[-1]:.9f} at d/z0={d}")

    widths = np.array(THRESHOLD_WIDTHS)
    _, intercept = np.polyfit(widths**2, np.array(roots), 1)
    richardson = (4.0 * roots[2] - roots[1]) / 3.0
    spread = abs(intercept - richardson)
    if spread > THRESHOLD_AGREEMENT:
        raise ConvergenceError(
            f"Threshold extrapolations disagree for {family}", spread, THRESHOLD_AGREEMENT
        )
    logger.info(f"Threshold gamma_s for {family}: {intercept:.6f}")
    return float(intercept)


def phase_boundary(
    gamma_values: Sequence[float],
    family: Family,
    tol: float = 1e-6,
    quad: Optional[QuadratureSpec] = None,
    threads: Optional[int] = None,
    orientation: Orientation = AXIS_ALONG_X,
) -> PhaseBoundary:
    """Critical width for every gamma_s (None when there is no inversion)."""
    threshold = threshold_gamma(family, quad, orientation)

    def row(gamma_s: float) -> Tuple[float, Optional[float]]:
        try:
            return float(gamma_s), critical_width(gamma_s, family, tol, quad, orientation)
        except NoSignChangeError:
            logger.info(f"No sign inversion for gamma_s={gamma_s} ({family})")
            return float(gamma_s), None

    rows = ordered_map(row, gamma_values, threads)
    return PhaseBoundary(family=family, rows=tuple(rows), threshold=threshold)


# ---------------------------------------------------------------------------
# Minima along x
# ---------------------------------------------------------------------------


def _stencil_curvature(s: Scenario, x: float, y0: float) -> float:
    h = MINIMUM_CURVATURE_STEP
    values = [ratio_at(s, x + k * h, y0) for k in (-2, -1, 0, 1, 2)]
    return (-values[0] + 16.0 * values[1] - 30.0 * values[2] + 16.0 * values[3] - values[4]) / (
        12.0 * h * h
    )


def _refine_minimum(s: Scenario, lo: float, hi: float, guess: float, y0: float) -> float:
    def force(x: float) -> float:
        return lateral_force_ratio(s, x, y0)[0]

    f_lo, f_hi = force(lo), force(hi)
    if f_lo > 0.0 and f_hi < 0.0:
        return float(bisect(force, lo, hi, xtol=MINIMUM_XTOL))
    logger.debug(f"No force sign change in [{lo:.6g}, {hi:.6g}]; keeping grid point {guess:.6g}")
    return float(guess)


def _minimum_report(s: Scenario, x: float, y0: float, scale: float) -> ExtremumReport:
    curvature = _stencil_curvature(s, x, y0)
    kind = "minimum" if curvature > DEGENERACY_BAND * scale else "degenerate"
    return ExtremumReport(
        location=x,
        value=ratio_at(s, x, y0),
        kind=kind,
        curvature=curvature,
        y_location=y0 if isinstance(s.profile, GaussianProfile) else None,
    )


def scan_minima_1d(
    s: Scenario,
    x_range: Tuple[float, float],
    grid_n: int = 121,
    y0_over_z0: float = 0.0,
    threads: Optional[int] = None,
) -> MinimaScan:
    """
    Local minima of the ratio along x.

    A coarse grid locates candidate minima, which are refined by bisection
    on the sign of the lateral force. Minima on the window edges are
    returned separately.

    Args:
        s (Scenario): Scenario to scan.
        x_range (tuple): (x_lo, x_hi) in units of z0.
        grid_n (int): Coarse grid size, at least 16.
        y0_over_z0 (float): Fixed ordinate of the scan line.
        threads (int, optional): Worker threads for the coarse grid.

    Returns:
        MinimaScan: Interior minima sorted by location with the global one
            flagged, and boundary minima.

    Raises:
        DomainError: If grid_n < 16 or the range is empty or reversed.
    """
    x_lo, x_hi = x_range
    if grid_n < MIN_GRID_POINTS:
        raise DomainError(f"Minima scan needs at least {MIN_GRID_POINTS} grid points, got {grid_n}")
    if not x_lo < x_hi:
        raise DomainError(f"Scan range must be increasing, got [{x_lo}, {x_hi}]")

    xs = np.linspace(x_lo, x_hi, grid_n)
    rs = np.array(ordered_map(lambda x: ratio_at(s, x, y0_over_z0), xs, threads))
    scale = float(np.max(np.abs(rs)))

    minima: List[ExtremumReport] = []
    for i in range(1, grid_n - 1):
        if rs[i] < rs[i - 1] and rs[i] <= rs[i + 1]:
            x = _refine_minimum(s, xs[i - 1], xs[i + 1], xs[i], y0_over_z0)
            if minima and abs(x - minima[-1].location) < 10.0 * MINIMUM_XTOL:
                continue
            minima.append(_minimum_report(s, x, y0_over_z0, scale))

    if minima:
        best = min(range(len(minima)), key=lambda k: minima[k].value)
        minima[best] = minima[best].model_copy(update={"is_global": True})

    boundary = []
    if rs[0] < rs[1]:
        boundary.append(_minimum_report(s, float(xs[0]), y0_over_z0, scale))
    if rs[-1] < rs[-2]:
        boundary.append(_minimum_report(s, float(xs[-1]), y0_over_z0, scale))
    for b in boundary:
        logger.warning(f"Minimum at window edge x0/z0={b.location:.6g}; treated as a boundary artifact")

    logger.info(f"Found {len(minima)} interior minima in [{x_lo}, {x_hi}]")
    return MinimaScan(minima=tuple(minima), boundary=tuple(boundary))


def find_minima_1d(
    s: Scenario,
    x_range: Tuple[float, float],
    grid_n: int = 121,
    y0_over_z0: float = 0.0,
    threads: Optional[int] = None,
) -> List[ExtremumReport]:
    """Interior minima along x; see scan_minima_1d."""
    return list(scan_minima_1d(s, x_range, grid_n, y0_over_z0, threads).minima)


# ---------------------------------------------------------------------------
# Gratings, traps and maps
# ---------------------------------------------------------------------------


def regime_report(s: Scenario) -> RegimeReport:
    """
    Compare the ratio over the central strip with the ratio over the adjacent gap.

    Raises:
        DomainError: If the profile is not a grating of at least 5 strips.
    """
    profile = s.profile
    if not isinstance(profile, GratingProfile) or profile.n_strips < REGIME_MIN_STRIPS:
        raise DomainError(f"Regime classification needs a grating of at least {REGIME_MIN_STRIPS} strips")

    half_period = profile.period / 2.0
    if profile.n_strips % 2:
        strip_x, gap_x = 0.0, half_period
    else:
        strip_x, gap_x = half_period, 0.0
    strip_ratio = ratio_at(s, strip_x)
    gap_ratio = ratio_at(s, gap_x)

    if abs(strip_ratio - gap_ratio) <= REGIME_TIE * max(abs(strip_ratio), abs(gap_ratio)):
        regime = "degenerate"
    elif strip_ratio < gap_ratio:
        regime = "peak"
    else:
        regime = "valley"
    logger.info(f"Grating of {profile.n_strips} strips (d/z0={profile.d_over_z0}): {regime} regime")
    return RegimeReport(regime=regime, strip_center_ratio=strip_ratio, gap_center_ratio=gap_ratio)


def regime_classify(s: Scenario) -> Regime:
    return regime_report(s).regime


def trap_report(s: Scenario, p: PhysicalSetup) -> TrapReport:
    """
    Shift of the trap frequency of a particle held at the origin.

        omega' = sqrt(omega^2 + U''/m),  U'' = curvature * U(z0) / z0^2

    Raises:
        DomainError: If mass or omega_trap is missing.
        TrapDestabilizedError: If omega^2 + U''/m < 0.
    """
    if p.mass is None or p.omega_trap is None:
        raise DomainError("Trap shift needs mass and omega_trap")
    origin = classify_origin(s)
    curvature_si = origin.curvature * energy_scale(p, s.mode) / p.z0**2
    stiffness = curvature_si / p.mass
    squared = p.omega_trap**2 + stiffness
    if squared < 0.0:
        raise TrapDestabilizedError(
            f"Corrugation curvature {curvature_si:.3e} J/m^2 overwhelms the trap "
            f"(omega^2 + U''/m = {squared:.3e} rad^2/s^2)"
        )
    omega_prime = math.sqrt(squared)
    # stiffness / (omega' + omega) avoids cancellation in omega' - omega
    delta_omega = stiffness / (omega_prime + p.omega_trap)
    logger.info(f"Trap shift: delta omega = {delta_omega:.6e} rad/s")
    return TrapReport(
        curvature=origin.curvature,
        curvature_si=curvature_si,
        omega_prime=omega_prime,
        delta_omega=delta_omega,
    )


def trap_shift(s: Scenario, p: PhysicalSetup) -> float:
    return trap_report(s, p).delta_omega


def energy_map_2d(
    s: Scenario,
    x_range: Tuple[float, float],
    y_range: Tuple[float, float],
    nx: int,
    ny: int,
    threads: Optional[int] = None,
) -> EnergyMap:
    """
    Ratio on an nx by ny grid, row-major (y outer, x inner).

    Points whose quadrature fails are stored as NaN and listed in
    EnergyMap.failures instead of aborting the map.

    Raises:
        DomainError: If a grid size is below 1 or a range is reversed.
    """
    if nx < 1 or ny < 1:
        raise DomainError(f"Grid sizes must be at least 1, got {nx} x {ny}")
    if x_range[0] > x_range[1] or y_range[0] > y_range[1]:
        raise DomainError(f"Map ranges must be increasing, got {x_range} and {y_range}")

    x = np.linspace(x_range[0], x_range[1], nx)
    y = np.linspace(y_range[0], y_range[1], ny)
    points = [(ix, iy) for iy in range(ny) for ix in range(nx)]

    def evaluate(point: Tuple[int, int]) -> Tuple[float, Optional[str]]:
        ix, iy = point
        try:
            return ratio_at(s, x[ix], y[iy]), None
        except LateralVdwError as e:
            logger.warning(f"Map point ({x[ix]:.6g}, {y[iy]:.6g}) failed: {e}")
            return math.nan, str(e)

    results = ordered_map(evaluate, points, threads)
    ratio = np.array([value for value, _ in results]).reshape(ny, nx)
    failures = tuple(
        MapFailure(ix, iy, message)
        for (ix, iy), (_, message) in zip(points, results)
        if message is not None
    )
    logger.info(f"Energy map {nx} x {ny} done with {len(failures)} failed points")
    return EnergyMap(x=x, y=y, ratio=ratio, failures=failures)
