"""
Test cases for services/analysis.py: energy landscapes
- Normal case: minima of strips and gratings, grating regimes, trap shifts, 2D maps
- Edge case: boundary minima, flat planes, failed map points, thread count
- Failure case: short grids, reversed ranges, missing trap data, destabilized traps
"""

import math

import numpy as np
import pytest

from core.energy import PhysicalSetup
from core.errors import ConvergenceError, DomainError, TrapDestabilizedError
from core.response import Orientation
import services.analysis as analysis
from services.analysis import (
    energy_map_2d,
    find_minima_1d,
    ratio_at,
    regime_classify,
    regime_report,
    scan_minima_1d,
    trap_report,
    trap_shift,
)

ROUND_SETUP = dict(hbar=1.0, epsilon0=1.0, amplitude_a=0.01, z0=1.0, gamma_iso=1.0, mass=1.0, omega_trap=1.0)


# ---------------------------------------------------------------------------
# Minima along x
# ---------------------------------------------------------------------------


def test_two_wide_strips_have_minima_over_the_strips(make_grating):
    minima = find_minima_1d(make_grating(0.8, 2), (-3.0, 3.0))
    assert len(minima) == 2
    left, right = minima
    assert left.location == pytest.approx(-0.65, abs=0.2)
    assert right.location == pytest.approx(0.65, abs=0.2)
    assert left.location + right.location == pytest.approx(0.0, abs=1e-5)
    assert sum(m.is_global for m in minima) == 1
    assert all(m.kind == "minimum" and m.curvature > 0.0 for m in minima)


def test_two_narrow_strips_have_one_minimum_between_them(make_grating):
    minima = find_minima_1d(make_grating(0.2, 2), (-3.0, 3.0))
    assert len(minima) == 1
    assert minima[0].location == pytest.approx(0.0, abs=1e-5)
    assert minima[0].is_global


@pytest.mark.parametrize("d", [0.8, 0.2])
def test_single_strip_minimum_stays_at_center(make_strip, d):
    minima = find_minima_1d(make_strip(d), (-3.0, 3.0))
    assert [round(m.location, 5) for m in minima] == [0.0]
    assert minima[0].y_location is None


def test_gaussian_below_critical_width_has_two_symmetric_minima(narrow_bump_scenario):
    minima = find_minima_1d(narrow_bump_scenario, (-3.0, 3.0), grid_n=61)
    assert len(minima) == 2
    assert minima[0].location < 0.0 < minima[1].location
    assert minima[0].location + minima[1].location == pytest.approx(0.0, abs=1e-5)
    assert minima[0].y_location == 0.0


def test_axis_along_z_keeps_single_minimum_at_origin(make_gaussian):
    minima = find_minima_1d(make_gaussian(0.2, orientation=Orientation()), (-2.0, 2.0), grid_n=41)
    assert len(minima) == 1
    assert minima[0].location == pytest.approx(0.0, abs=1e-5)


def test_tilted_particle_two_minima_with_unequal_depths(make_gaussian):
    s = make_gaussian(0.2, orientation=Orientation(theta=0.47 * math.pi))
    scan = scan_minima_1d(s, (-2.0, 2.0), grid_n=81)
    assert len(scan.minima) == 2
    xs = np.linspace(-2.0, 2.0, 81)
    scale = max(abs(ratio_at(s, x)) for x in xs)
    assert abs(scan.minima[0].value - scan.minima[1].value) > 1e-3 * scale


def test_more_tilted_particle_single_minimum_off_origin(make_gaussian):
    s = make_gaussian(0.2, orientation=Orientation(theta=math.pi / 3))
    minima = find_minima_1d(s, (-2.0, 2.0), grid_n=81)
    assert len(minima) == 1
    assert abs(minima[0].location) > 1e-2
    assert minima[0].is_global


def test_monotone_window_reports_boundary_minimum(make_strip):
    """Edge case: an edge of the window is not an interior minimum."""
    scan = scan_minima_1d(make_strip(0.8, gamma_s=0.0), (0.5, 3.0), grid_n=26)
    assert scan.minima == ()
    assert [b.location for b in scan.boundary] == [0.5]


def test_minima_independent_of_thread_count(make_grating):
    serial = find_minima_1d(make_grating(0.8, 2), (-3.0, 3.0), threads=1)
    parallel = find_minima_1d(make_grating(0.8, 2), (-3.0, 3.0), threads=4)
    assert serial == parallel


def test_minima_scan_preconditions(make_strip):
    """Failure case: short grids and empty or reversed ranges."""
    with pytest.raises(DomainError):
        scan_minima_1d(make_strip(0.8), (-3.0, 3.0), grid_n=10)
    with pytest.raises(DomainError):
        scan_minima_1d(make_strip(0.8), (3.0, -3.0))
    with pytest.raises(DomainError):
        scan_minima_1d(make_strip(0.8), (1.0, 1.0))


# ---------------------------------------------------------------------------
# Grating regimes
# ---------------------------------------------------------------------------


def test_wide_strips_peak_regime(make_grating):
    assert regime_classify(make_grating(0.8, 20)) == "peak"


def test_narrow_strips_valley_regime(make_grating):
    report = regime_report(make_grating(0.2, 20))
    assert report.regime == "valley"
    assert report.gap_center_ratio < report.strip_center_ratio


@pytest.mark.parametrize("d", [0.8, 0.2])
def test_isotropic_particle_peak_regime(make_grating, d):
    assert regime_classify(make_grating(d, 20, gamma_s=0.0)) == "peak"


def test_odd_grating_has_strip_at_origin(make_grating):
    s = make_grating(0.8, 21)
    report = regime_report(s)
    assert report.strip_center_ratio == ratio_at(s, 0.0)
    assert report.gap_center_ratio == ratio_at(s, s.profile.period / 2.0)


def test_flat_grating_is_degenerate(make_grating):
    assert regime_classify(make_grating(0.8, 20, sign=0)) == "degenerate"


def test_regime_needs_a_long_grating(make_grating, make_strip):
    with pytest.raises(DomainError):
        regime_classify(make_grating(0.8, 3))
    with pytest.raises(DomainError):
        regime_classify(make_strip(0.8))


# ---------------------------------------------------------------------------
# Trap frequency
# ---------------------------------------------------------------------------


def test_trap_stiffened_over_minimum(wide_bump_scenario):
    report = trap_report(wide_bump_scenario, PhysicalSetup(**ROUND_SETUP))
    assert report.curvature > 0.0
    assert report.delta_omega > 0.0
    assert report.omega_prime - 1.0 == pytest.approx(report.delta_omega, rel=1e-6)


def test_trap_softened_over_maximum(narrow_bump_scenario):
    assert trap_shift(narrow_bump_scenario, PhysicalSetup(**ROUND_SETUP)) < 0.0


def test_trap_unchanged_over_flat_plane(make_gaussian):
    report = trap_report(make_gaussian(0.8, sign=0), PhysicalSetup(**ROUND_SETUP))
    assert report.delta_omega == 0.0
    assert report.omega_prime == 1.0


def test_trap_curvature_in_si_units(wide_bump_scenario):
    setup = PhysicalSetup(**{**ROUND_SETUP, "z0": 2.0})
    report = trap_report(wide_bump_scenario, setup)
    scale = 0.01 / (64.0 * math.pi**2 * 2.0**4)
    assert report.curvature_si == pytest.approx(report.curvature * scale / 4.0, rel=1e-12)


def test_trap_destabilized_by_light_particle(narrow_bump_scenario):
    """Failure case: omega^2 + U''/m < 0."""
    with pytest.raises(TrapDestabilizedError):
        trap_report(narrow_bump_scenario, PhysicalSetup(**{**ROUND_SETUP, "mass": 1e-12}))


def test_trap_needs_mass_and_frequency(wide_bump_scenario):
    with pytest.raises(DomainError):
        trap_report(wide_bump_scenario, PhysicalSetup(**{**ROUND_SETUP, "mass": None}))
    with pytest.raises(DomainError):
        trap_report(wide_bump_scenario, PhysicalSetup(**{**ROUND_SETUP, "omega_trap": None}))


# ---------------------------------------------------------------------------
# 2D maps
# ---------------------------------------------------------------------------


def test_map_mirror_symmetric_in_y(make_gaussian):
    s = make_gaussian(0.8, orientation=Orientation(theta=math.pi / 3))
    grid = energy_map_2d(s, (-1.0, 1.0), (-1.0, 1.0), 5, 5)
    assert grid.ratio.shape == (5, 5)
    np.testing.assert_allclose(grid.ratio, grid.ratio[::-1, :], atol=1e-9)
    assert grid.failures == ()


def test_map_circular_symmetry_for_axis_along_z(make_gaussian):
    s = make_gaussian(0.2, orientation=Orientation())
    grid = energy_map_2d(s, (-1.0, 1.0), (-1.0, 1.0), 5, 5)
    np.testing.assert_allclose(grid.ratio, grid.ratio.T, atol=1e-8)


def test_map_is_row_major(make_strip):
    s = make_strip(0.8)
    grid = energy_map_2d(s, (-1.0, 1.0), (0.0, 2.0), 3, 2)
    assert grid.ratio.shape == (2, 3)
    for iy in range(2):
        for ix, x in enumerate(grid.x):
            assert grid.ratio[iy, ix] == ratio_at(s, x)


def test_map_independent_of_thread_count(make_gaussian):
    s = make_gaussian(0.5)
    serial = energy_map_2d(s, (-1.0, 1.0), (-0.5, 0.5), 4, 3, threads=1)
    parallel = energy_map_2d(s, (-1.0, 1.0), (-0.5, 0.5), 4, 3, threads=3)
    np.testing.assert_array_equal(serial.ratio, parallel.ratio)


def test_map_single_point(make_strip):
    grid = energy_map_2d(make_strip(0.8), (0.0, 0.0), (0.0, 0.0), 1, 1)
    assert grid.ratio.shape == (1, 1)


def test_map_marks_failed_points(make_strip, monkeypatch):
    """Edge case: a failing point becomes NaN and is listed, the map survives."""
    real_kernel = analysis.profile_kernel

    def flaky_kernel(profile, x0, y0=0.0, q=None):
        if x0 > 0.5:
            raise ConvergenceError("forced failure", 1.0, 1e-9)
        return real_kernel(profile, x0, y0, q)

    monkeypatch.setattr(analysis, "profile_kernel", flaky_kernel)
    grid = energy_map_2d(make_strip(0.8), (-1.0, 1.0), (0.0, 1.0), 5, 2)
    assert int(np.isnan(grid.ratio).sum()) == 2
    assert [(f.ix, f.iy) for f in grid.failures] == [(4, 0), (4, 1)]
    assert "forced failure" in grid.failures[0].message
    assert np.isfinite(grid.ratio[:, :4]).all()


def test_map_preconditions(make_strip):
    with pytest.raises(DomainError):
        energy_map_2d(make_strip(0.8), (-1.0, 1.0), (-1.0, 1.0), 0, 3)
    with pytest.raises(DomainError):
        energy_map_2d(make_strip(0.8), (1.0, -1.0), (-1.0, 1.0), 3, 3)
