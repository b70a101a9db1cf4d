"""Doppler cooling of optically dense, spin-polarized clouds in magnetic traps.

Rate-equation simulation of one-dimensional Doppler cooling where photon
reabsorption both heats the cloud and, by redirecting momentum, cools the
axes the laser never touches.  The package covers the atomic-transition
arithmetic, harmonic-trap and cloud bookkeeping, the reabsorption
geometry integrals, closed-form steady states, time-domain integration,
least-squares parameter estimation, and a config-driven CLI with named
presets for the chromium experiment the model was built around.
"""

from .atoms import (
    AtomSpecies,
    DepolarizationReport,
    DerivedAtomConstants,
    LaserConfig,
    cg_squared,
    depolarization_assessment,
    derive_constants,
    effective_detuning,
    lande_g,
    scattering_rate,
    species_from_lab_units,
    zeeman_shift,
)
from .config import ConfigError, GridSpec, ScenarioConfig, parse_config, preset_dump
from .dynamics import (
    IntegrationError,
    RateSet,
    SteadyState,
    TemperatureTrace,
    TraceSample,
    detuning_factor,
    rates,
    simulate,
    steady_state,
    steady_state_vs_od,
    steady_state_with_heating,
    temperature_slope,
    transient,
)
from .fitting import (
    DegenerateDataError,
    FitResult,
    ScanPoint,
    fit_exponential,
    fit_intensity_scan,
    fit_od_scan,
    levenberg_marquardt,
    load_scan_points,
)
from .presets import SPECIES_PRESETS, TRAP_PRESETS, cr52, stuttgart_cloverleaf
from .reabsorption import (
    CloudShape,
    EffectiveIntensity,
    KappaSet,
    effective_intensity,
    kappa0,
    kappa_set,
    optical_density,
    sigma_theta,
)
from .runners import (
    SelfCheckReport,
    run_aspect_scan,
    run_dynamics,
    run_fit,
    run_intensity_scan,
    run_od_scan,
    run_selfcheck,
    run_steady_state,
)
from .trap import (
    CloudState,
    LarmorSafety,
    TrapConfig,
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

__version__ = "1.0.0"

__all__ = [
    "AtomSpecies",
    "CloudShape",
    "CloudState",
    "ConfigError",
    "DegenerateDataError",
    "DepolarizationReport",
    "DerivedAtomConstants",
    "EffectiveIntensity",
    "FitResult",
    "GridSpec",
    "IntegrationError",
    "KappaSet",
    "LarmorSafety",
    "LaserConfig",
    "RateSet",
    "ScanPoint",
    "ScenarioConfig",
    "SelfCheckReport",
    "SPECIES_PRESETS",
    "SteadyState",
    "TemperatureTrace",
    "TraceSample",
    "TrapConfig",
    "TRAP_PRESETS",
    "cg_squared",
    "cloud_from_temperatures",
    "cr52",
    "depolarization_assessment",
    "derive_constants",
    "detuning_factor",
    "effective_detuning",
    "effective_intensity",
    "fit_exponential",
    "fit_intensity_scan",
    "fit_od_scan",
    "kappa0",
    "kappa_set",
    "lande_g",
    "larmor_safety",
    "levenberg_marquardt",
    "load_scan_points",
    "optical_density",
    "parse_config",
    "peak_density",
    "phase_space_density",
    "preset_dump",
    "rates",
    "run_aspect_scan",
    "run_dynamics",
    "run_fit",
    "run_intensity_scan",
    "run_od_scan",
    "run_selfcheck",
    "run_steady_state",
    "scattering_rate",
    "sigma_from_temperature",
    "sigma_theta",
    "simulate",
    "species_from_lab_units",
    "steady_state",
    "steady_state_vs_od",
    "steady_state_with_heating",
    "stuttgart_cloverleaf",
    "temperature_from_sigma",
    "temperature_slope",
    "thermal_debroglie_wavelength",
    "transient",
    "trap_frequencies",
    "trap_from_lab_units",
]
