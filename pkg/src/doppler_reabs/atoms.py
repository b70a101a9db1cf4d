"""Atomic species data and single-transition light-atom arithmetic.

Covers the closed cooling transition J -> J+1 of a spin-polarized atom:
derived transition constants, Clebsch-Gordan branching (squared), Lande
g-factors, Zeeman-shifted effective detunings, low-saturation scattering
rates, and a pessimistic estimate of depolarization out of the stretched
state for imperfect polarization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import constants as const


@dataclass(frozen=True)
class AtomSpecies:
    """Transition and mass data for one cooling transition.

    The model is restricted to J_excited = J_ground + 1; the atom is
    assumed polarized in the ground sublevel m_j.
    """

    name: str
    mass: float                  # [kg]
    wavelength: float            # [m]
    linewidth: float             # Gamma [rad/s]
    saturation_intensity: float  # [W/m^2]
    j_ground: int
    j_excited: int
    l_ground: int
    s_ground: int
    l_excited: int
    s_excited: int
    m_j: int                     # polarized ground sublevel

    def __post_init__(self):
        if self.mass <= 0 or self.wavelength <= 0 or self.linewidth <= 0:
            raise ValueError("mass, wavelength and linewidth must be positive")
        if self.saturation_intensity <= 0:
            raise ValueError("saturation_intensity must be positive")
        if self.j_ground < 0:
            raise ValueError("j_ground must be >= 0")
        if self.j_excited != self.j_ground + 1:
            raise ValueError("only J_excited = J_ground + 1 is supported")
        if abs(self.m_j) > self.j_ground:
            raise ValueError("|m_j| must not exceed j_ground")

    @property
    def g_ground(self) -> float:
        return lande_g(self.l_ground, self.s_ground, self.j_ground)

    @property
    def g_excited(self) -> float:
        return lande_g(self.l_excited, self.s_excited, self.j_excited)


@dataclass(frozen=True)
class DerivedAtomConstants:
    """Constants derived from an AtomSpecies, all SI."""

    wavenumber: float            # k = 2 pi / lambda [1/m]
    reduced_wavelength: float    # lambda / (2 pi) [m]
    recoil_energy: float         # (hbar k)^2 / 2m [J]
    doppler_temperature: float   # hbar Gamma / (2 k_B) [K]
    resonant_cross_section: float  # 6 pi (lambda/2pi)^2 [m^2]


@dataclass(frozen=True)
class LaserConfig:
    """Cooling light parameters.

    intensity is the measured single-beam intensity normalized to the
    saturation intensity; attenuation_factor divides it to give the
    intensity actually seen by the atoms; detuning is in units of Gamma,
    before any Zeeman shift; polarization_purity is the intensity
    fraction in the wrong polarization (0 = perfectly circular).
    """

    intensity: float
    detuning: float
    attenuation_factor: float = 1.0
    polarization_purity: float = 0.0

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("intensity must be >= 0")
        if self.attenuation_factor < 1:
            raise ValueError("attenuation_factor must be >= 1")
        if not 0.0 <= self.polarization_purity <= 1.0:
            raise ValueError("polarization_purity must lie in [0, 1]")

    @property
    def effective_intensity(self) -> float:
        """Intensity at the atoms after attenuation, in saturation units."""
        return self.intensity / self.attenuation_factor


@dataclass(frozen=True)
class DepolarizationReport:
    """Outcome of a depolarization assessment."""

    ratio: float          # depolarizing over polarizing scattering rate
    loss_fraction: float  # pessimistic fraction pumped out during cooling


def species_from_lab_units(
    name: str,
    mass_u: float,
    wavelength_nm: float,
    linewidth_MHz: float,
    saturation_intensity_W_per_m2: float,
    j_ground: int,
    j_excited: int,
    l_ground: int,
    s_ground: int,
    l_excited: int,
    s_excited: int,
    m_j: int,
) -> AtomSpecies:
    """Build an AtomSpecies from the units transition data is quoted in.

    linewidth_MHz is Gamma/(2 pi) in MHz.
    """
    return AtomSpecies(
        name=name,
        mass=mass_u * const.ATOMIC_MASS,
        wavelength=wavelength_nm * 1e-9,
        linewidth=2.0 * math.pi * linewidth_MHz * 1e6,
        saturation_intensity=saturation_intensity_W_per_m2,
        j_ground=int(j_ground),
        j_excited=int(j_excited),
        l_ground=int(l_ground),
        s_ground=int(s_ground),
        l_excited=int(l_excited),
        s_excited=int(s_excited),
        m_j=int(m_j),
    )


def derive_constants(species: AtomSpecies) -> DerivedAtomConstants:
    """Compute the transition constants that everything downstream uses."""
    k = 2.0 * math.pi / species.wavelength
    lbar = species.wavelength / (2.0 * math.pi)
    return DerivedAtomConstants(
        wavenumber=k,
        reduced_wavelength=lbar,
        recoil_energy=(const.HBAR * k) ** 2 / (2.0 * species.mass),
        doppler_temperature=const.HBAR * species.linewidth / (2.0 * const.K_B),
        resonant_cross_section=6.0 * math.pi * lbar**2,
    )


def cg_squared(j: int, m_g: int, q: int) -> float:
    """Squared Clebsch-Gordan coefficient |<j,m_g;1,q|j+1,m_g+q>|^2.

    Closed form for the J -> J+1 manifold only; q = +1, 0, -1 selects
    sigma+, pi, sigma-.
    """
    if q not in (-1, 0, 1):
        raise ValueError("q must be -1, 0 or +1")
    if abs(m_g) > j:
        raise ValueError("|m_g| must not exceed j")
    if abs(m_g + q) > j + 1:
        raise ValueError("target sublevel out of range")
    if q == 0:
        return ((j + 1) ** 2 - m_g**2) / ((j + 1) * (2 * j + 1))
    # q = +1 or -1
    return (j + q * m_g + 1) * (j + q * m_g + 2) / (2 * (j + 1) * (2 * j + 1))


def lande_g(l: int, s: int, j: int) -> float:
    """Lande g-factor of a fine-structure level (L, S, J)."""
    if j == 0:
        raise ValueError("g-factor undefined for J = 0")
    return 1.0 + (j * (j + 1) + s * (s + 1) - l * (l + 1)) / (2.0 * j * (j + 1))


def zeeman_shift(species: AtomSpecies, m_g: int, q: int, field: float) -> float:
    """Zeeman shift of the transition m_g -> m_g + q, in units of Gamma."""
    gg = species.g_ground
    ge = species.g_excited
    return const.MU_B * field * (ge * (m_g + q) - gg * m_g) / (
        const.HBAR * species.linewidth
    )


def effective_detuning(
    laser_detuning: float,
    field: float,
    species: AtomSpecies,
    m_g: int,
    q: int,
) -> float:
    """Laser detuning from the Zeeman-shifted transition, in units of Gamma."""
    if abs(m_g) > species.j_ground or abs(m_g + q) > species.j_excited:
        raise ValueError("transition out of range")
    return laser_detuning - zeeman_shift(species, m_g, q, field)


def scattering_rate(
    species: AtomSpecies, intensity: float, delta_eff: float, cg2: float
) -> float:
    """Low-saturation photon scattering rate [1/s].

    intensity is the single-beam normalized intensity; both beams of the
    standing wave contribute, hence the factor 2I.
    """
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    return (
        species.linewidth / 2.0 * 2.0 * intensity * cg2 / (1.0 + 4.0 * delta_eff**2)
    )


def depolarization_assessment(
    species: AtomSpecies,
    laser: LaserConfig,
    offset_field: float,
    cooling_duration: float,
) -> DepolarizationReport:
    """Estimate depolarization of the stretched state by impure light.

    laser.detuning is taken as the effective detuning of the polarizing
    sigma+ transition at the trap bottom field offset_field; the impure
    intensity fraction drives the pi and sigma- transitions at their
    Zeeman-shifted detunings relative to it.  The loss fraction is a
    single-exponential survival estimate with the full depolarizing rate,
    deliberately pessimistic.
    """
    if cooling_duration <= 0:
        raise ValueError("cooling_duration must be positive")
    m = species.m_j
    delta_pol = laser.detuning
    intensity = laser.effective_intensity
    r_pol = scattering_rate(
        species, intensity, delta_pol, cg_squared(species.j_ground, m, +1)
    )
    shift_pol = zeeman_shift(species, m, +1, offset_field)
    r_dep = 0.0
    for q in (0, -1):
        if abs(m + q) > species.j_excited:
            continue
        delta_q = delta_pol + shift_pol - zeeman_shift(species, m, q, offset_field)
        r_dep += scattering_rate(
            species,
            laser.polarization_purity * intensity,
            delta_q,
            cg_squared(species.j_ground, m, q),
        )
    ratio = r_dep / r_pol if r_pol > 0 else 0.0
    loss = -math.expm1(-r_dep * cooling_duration)
    return DepolarizationReport(ratio=ratio, loss_fraction=loss)
