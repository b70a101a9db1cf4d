"""Trap frequencies, Larmor margin, cloud geometry and phase-space density."""

from __future__ import annotations

import math

import pytest

from doppler_reabs import (
    cloud_from_temperatures,
    larmor_safety,
    peak_density,
    phase_space_density,
    sigma_from_temperature,
    temperature_from_sigma,
    thermal_debroglie_wavelength,
    trap_frequencies,
    trap_from_lab_units,
)


def test_trap_frequencies_frozen(trap, species):
    wx, wy, wz = trap_frequencies(trap, species)
    assert wx / (2 * math.pi) == pytest.approx(110.645549, rel=1e-6)
    assert wy / (2 * math.pi) == pytest.approx(110.645549, rel=1e-6)
    assert wz / (2 * math.pi) == pytest.approx(42.3740194, rel=1e-6)


def test_trap_frequency_scaling(trap, species):
    stiffer = trap_from_lab_units(
        curvature_x_G_per_cm2=1500.0,
        curvature_y_G_per_cm2=1500.0,
        curvature_z_G_per_cm2=220.0,
        offset_field_G=28.0,
        magnetic_moment_muB=6.0,
    )
    for w_ref, w_stiff in zip(
        trap_frequencies(trap, species), trap_frequencies(stiffer, species)
    ):
        assert w_stiff == pytest.approx(math.sqrt(2.0) * w_ref, rel=1e-12)


def test_trap_validation():
    with pytest.raises(ValueError):
        trap_from_lab_units(750.0, 750.0, -110.0, 28.0, 6.0)
    with pytest.raises(ValueError):
        trap_from_lab_units(750.0, 750.0, 110.0, 0.0, 6.0)


def test_larmor_margin_frozen(trap, species):
    safety = larmor_safety(trap, species)
    assert safety.larmor_frequency == pytest.approx(1.47740881e9, rel=1e-6)
    assert safety.margin == pytest.approx(2125136.68, rel=1e-6)
    assert safety.safe


def test_larmor_threshold(trap, species):
    assert not larmor_safety(trap, species, margin_threshold=1e7).safe


def test_sigma_temperature_roundtrip(trap):
    mu = trap.magnetic_moment
    for temperature in (1e-6, 120e-6, 1e-3):
        sigma = sigma_from_temperature(temperature, trap.curvature_z, mu)
        back = temperature_from_sigma(sigma, trap.curvature_z, mu)
        assert back == pytest.approx(temperature, rel=1e-12)


def test_sigma_frozen_at_1mK(trap):
    mu = trap.magnetic_moment
    assert sigma_from_temperature(1e-3, trap.curvature_y, mu) == pytest.approx(
        5.75177121e-4, rel=1e-6
    )
    assert sigma_from_temperature(1e-3, trap.curvature_z, mu) == pytest.approx(
        1.50188227e-3, rel=1e-6
    )


def test_sigma_validation(trap):
    with pytest.raises(ValueError):
        sigma_from_temperature(-1e-6, trap.curvature_z, trap.magnetic_moment)
    with pytest.raises(ValueError):
        temperature_from_sigma(1e-4, 0.0, trap.magnetic_moment)


def test_peak_density_frozen(hot_cloud):
    assert hot_cloud.peak_density == pytest.approx(1.27788302e16, rel=1e-6)


def test_peak_density_scaling():
    n1 = peak_density(1e8, 1e-4, 1e-4, 1e-4)
    assert peak_density(2e8, 1e-4, 1e-4, 1e-4) == pytest.approx(2 * n1, rel=1e-12)
    assert peak_density(1e8, 2e-4, 1e-4, 1e-4) == pytest.approx(n1 / 2, rel=1e-12)


def test_cloud_from_temperatures_consistency(trap, hot_cloud):
    mu = trap.magnetic_moment
    assert hot_cloud.sigma_x == pytest.approx(
        sigma_from_temperature(1e-3, trap.curvature_x, mu), rel=1e-12
    )
    assert hot_cloud.peak_density == pytest.approx(
        peak_density(1e8, hot_cloud.sigma_x, hot_cloud.sigma_y, hot_cloud.sigma_z),
        rel=1e-12,
    )


def test_phase_space_density_frozen(hot_cloud, species):
    assert phase_space_density(hot_cloud, species) == pytest.approx(
        5.73437117e-9, rel=1e-6
    )


def test_phase_space_density_cooling_law(trap, species):
    # at constant atom number an isotropic temperature drop by c raises
    # the peak phase-space density by c^3
    hot = cloud_from_temperatures(trap, 1e8, 1e-3, 1e-3, 1e-3)
    cold = cloud_from_temperatures(trap, 1e8, 2e-4, 2e-4, 2e-4)
    gain = phase_space_density(cold, species) / phase_space_density(hot, species)
    assert gain == pytest.approx(5.0**3, rel=1e-9)


def test_debroglie_frozen(species):
    assert thermal_debroglie_wavelength(120e-6, species) == pytest.approx(
        2.21007805e-8, rel=1e-6
    )
    with pytest.raises(ValueError):
        thermal_debroglie_wavelength(0.0, species)


def test_cloud_validation(trap):
    with pytest.raises(ValueError):
        cloud_from_temperatures(trap, 0.0, 1e-3, 1e-3, 1e-3)
    with pytest.raises(ValueError):
        cloud_from_temperatures(trap, 1e8, 1e-3, -1e-3, 1e-3)
