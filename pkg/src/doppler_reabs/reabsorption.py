"""Photon reabsorption geometry for an ellipsoidal Gaussian cloud.

A photon scattered once inside an optically dense cloud is reabsorbed
with a probability set by the column density along its emission
direction.  Weighting the sigma+ dipole emission pattern, which enters
as (1 + cos^2 theta)^2 in absorption times emission, over direction and
projecting onto the trap axes gives three effective
reabsorbed-photon numbers per laser photon: kappa_y (radial momentum
transfer), kappa_z (axial momentum transfer) and kappa (total number of
rescattering events).  Optical densities along the axes come from the
same column-density bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .atoms import AtomSpecies, derive_constants

HALF_PI = math.pi / 2.0
KAPPA0_PREFACTOR = 9.0 / (128.0 * math.sqrt(2.0 * math.pi))

# Angular integrals over [0, pi] of (1 + cos^2)^2 times each projection
# weight for a direction-independent sigma(theta); used as quadrature
# cross-checks.  13*pi/16, 7/3 and 56/15.
SPHERE_INTEGRAL_RADIAL = 13.0 * math.pi / 16.0
SPHERE_INTEGRAL_AXIAL = 7.0 / 3.0
SPHERE_INTEGRAL_TOTAL = 56.0 / 15.0

_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-11, limit=200)


@dataclass(frozen=True)
class CloudShape:
    """Gaussian cloud sizes and peak density entering the reabsorption integrals."""

    sigma_y: float       # radial standard deviation [m]
    sigma_z: float       # axial standard deviation [m]
    peak_density: float  # [1/m^3]

    def __post_init__(self):
        if self.sigma_y <= 0 or self.sigma_z <= 0:
            raise ValueError("cloud sizes must be positive")
        if self.peak_density < 0:
            raise ValueError("peak_density must be >= 0")

    @property
    def aspect_ratio(self) -> float:
        """Elongation along the cooling axis, sigma_z / sigma_y."""
        return self.sigma_z / self.sigma_y


@dataclass(frozen=True)
class KappaSet:
    """Effective reabsorbed-photon numbers per incident laser photon."""

    kappa_y: float
    kappa_z: float
    kappa: float
    kappa0: float  # column prefactor [1/m]


@dataclass(frozen=True)
class EffectiveIntensity:
    """Reabsorbed and total intensities per axis, in saturation units."""

    axial_reabsorbed: float
    radial_reabsorbed: float
    axial_total: float
    radial_total: float


def sigma_theta(shape: CloudShape, theta: float) -> float:
    """Cloud size along a direction at angle theta from the trap axis [m].

    Polar chord of the ellipse with axial semi-axis sigma_z and radial
    semi-axis sigma_y; symmetric under theta -> pi - theta.
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    c = math.cos(theta)
    s = math.sin(theta)
    return 1.0 / math.sqrt(c * c / shape.sigma_z**2 + s * s / shape.sigma_y**2)


def kappa0(n0: float, cross_section: float) -> float:
    """Column prefactor of the reabsorption integrals [1/m]."""
    if n0 < 0:
        raise ValueError("n0 must be >= 0")
    return n0 * cross_section * KAPPA0_PREFACTOR


def _angular_integral(shape: CloudShape, projection) -> float:
    # All integrands are symmetric about pi/2, so integrate half the range.
    def integrand(theta: float) -> float:
        c = math.cos(theta)
        return (1.0 + c * c) ** 2 * sigma_theta(shape, theta) * projection(theta)

    value, _ = quad(integrand, 0.0, HALF_PI, **_QUAD_OPTS)
    return 2.0 * value


def kappa_set(shape: CloudShape, species: AtomSpecies) -> KappaSet:
    """Reabsorption coefficients for a cloud shape by angular quadrature."""
    k0 = kappa0(shape.peak_density, derive_constants(species).resonant_cross_section)
    radial = _angular_integral(shape, lambda t: math.sin(t) ** 2)
    axial = _angular_integral(shape, lambda t: math.sin(t) * abs(math.cos(t)))
    total = _angular_integral(shape, math.sin)
    return KappaSet(
        kappa_y=k0 * (2.0 / math.pi) * radial,
        kappa_z=k0 * axial,
        kappa=k0 * total,
        kappa0=k0,
    )


def optical_density(
    shape: CloudShape,
    species: AtomSpecies,
    axis: str,
    atom_number: float | None = None,
) -> float:
    """Peak resonant optical density along one trap axis.

    Column density through the cloud center times the resonant cross
    section.  When atom_number is given the peak density is recomputed
    from it (radially symmetric cloud, sigma_x = sigma_y) instead of
    using shape.peak_density.
    """
    if axis not in ("y", "z"):
        raise ValueError("axis must be 'y' or 'z'")
    sigma_i = shape.sigma_y if axis == "y" else shape.sigma_z
    n0 = shape.peak_density
    if atom_number is not None:
        n0 = atom_number / (
            (2.0 * math.pi) ** 1.5 * shape.sigma_y**2 * shape.sigma_z
        )
    cross = derive_constants(species).resonant_cross_section
    return cross * n0 * math.sqrt(2.0 * math.pi) * sigma_i


def effective_intensity(intensity: float, kappas: KappaSet) -> EffectiveIntensity:
    """Reabsorbed and total light intensities seen along each axis.

    A standing wave of single-beam intensity I delivers 2I; rescattering
    adds 2I*kappa_z axially and 2I*kappa_y radially.  The radial axis
    carries no direct beam, so its total is the reabsorbed part alone.
    """
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    axial_re = 2.0 * intensity * kappas.kappa_z
    radial_re = 2.0 * intensity * kappas.kappa_y
    return EffectiveIntensity(
        axial_reabsorbed=axial_re,
        radial_reabsorbed=radial_re,
        axial_total=2.0 * intensity + axial_re,
        radial_total=radial_re,
    )
