"""Scenario runners: each maps a validated config to deterministic CSV text.

Every runner returns the complete CSV document as a string, with the
resolved configuration echoed into # key=value comment lines so a result
file carries its own provenance.  Identical configs produce byte-identical
output.  Grid points of a scan may evaluate on a small thread pool
(capped by the DOPPLER_REABS_THREADS environment variable, default 1);
rows are always emitted in grid order.

All intensities entering scan grids are normalized to saturation and are
the values at the atoms; the [laser] attenuation_factor applies only to
the [laser] intensity key itself.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import constants as const
from .atoms import AtomSpecies, LaserConfig, derive_constants, effective_detuning
from .config import ScenarioConfig
from .dynamics import (
    TemperatureTrace,
    rates,
    simulate,
    steady_state,
    steady_state_vs_od,
    steady_state_with_heating,
)
from .fitting import (
    FitResult,
    ScanPoint,
    fit_exponential,
    fit_intensity_scan,
    fit_od_scan,
    load_scan_points,
)
from .presets import cr52, stuttgart_cloverleaf
from .reabsorption import (
    CloudShape,
    KappaSet,
    SPHERE_INTEGRAL_AXIAL,
    SPHERE_INTEGRAL_RADIAL,
    SPHERE_INTEGRAL_TOTAL,
    _angular_integral,
    kappa_set,
    optical_density,
)
from .trap import (
    CloudState,
    cloud_from_temperatures,
    phase_space_density,
    trap_frequencies,
)

THREADS_ENV_VAR = "DOPPLER_REABS_THREADS"


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _ordered_map(fn, values):
    threads = _thread_count()
    if threads == 1 or len(values) < 2:
        return [fn(v) for v in values]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, values))


def _fmt_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if not math.isfinite(value):
            return "divergent"
        return f"{value:.12g}"
    return str(value)


def _render_csv(header_items, columns, rows) -> str:
    lines = [f"# {key}={value}" for key, value in header_items]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _initial_cloud(config: ScenarioConfig) -> CloudState:
    t_x, t_y, t_z = config.temperatures
    return cloud_from_temperatures(
        config.trap, config.atom_number, t_x, t_y, t_z
    )


def _steady_shape(config: ScenarioConfig) -> CloudShape:
    if config.cloud_sigma_y is not None:
        return CloudShape(
            sigma_y=config.cloud_sigma_y,
            sigma_z=config.cloud_sigma_z,
            peak_density=config.cloud_peak_density,
        )
    cloud = _initial_cloud(config)
    return CloudShape(
        sigma_y=cloud.sigma_y, sigma_z=cloud.sigma_z, peak_density=cloud.peak_density
    )


def run_steady_state(config: ScenarioConfig) -> str:
    """Closed-form steady state for one cloud shape: one CSV row."""
    shape = _steady_shape(config)
    kappas = kappa_set(shape, config.species)
    ss = steady_state(kappas, config.delta_pol, config.species)
    rate = rates(
        config.laser, kappas, config.delta_pol, config.species, config.trap,
        config.consistency_mode,
    )
    od_y = optical_density(shape, config.species, "y")
    columns = (
        "sigma_z_m", "sigma_y_m", "n0_per_m3",
        "kappa_y", "kappa_z", "kappa",
        "T_z_inf_K", "T_y_inf_K", "od_y",
        "cool_rate_z_per_s", "cool_rate_y_per_s",
    )
    row = (
        shape.sigma_z, shape.sigma_y, shape.peak_density,
        kappas.kappa_y, kappas.kappa_z, kappas.kappa,
        ss.T_z_inf, ss.T_y_inf, od_y,
        rate.cool_rate_z, rate.cool_rate_y,
    )
    return _render_csv(config.resolved_items(), columns, [row])


def _trace_psd(sample, species: AtomSpecies) -> float:
    # the simulation ties the unobserved x axis to y, so the geometric
    # mean temperature uses T_y twice
    t_geo = (sample.T_y ** 2 * sample.T_z) ** (1.0 / 3.0)
    lambda_db = const.PLANCK / math.sqrt(
        2.0 * math.pi * species.mass * const.K_B * t_geo
    )
    return sample.peak_density * lambda_db**3


def run_dynamics(config: ScenarioConfig) -> str:
    """Integrate the rate equations; trace CSV plus a phase-space column."""
    initial = _initial_cloud(config)
    trace = simulate(
        initial,
        config.trap,
        config.species,
        config.laser,
        config.duration,
        self_consistent=config.self_consistent,
        consistency_mode=config.consistency_mode,
        sample_stride=config.sample_stride,
        delta_pol=config.delta_pol,
    )
    columns = TemperatureTrace.CSV_COLUMNS + ("psd",)
    rows = [
        row + (_trace_psd(sample, config.species),)
        for row, sample in zip(trace.csv_rows(), trace.samples)
    ]
    return _render_csv(config.resolved_items(), columns, rows)


def _aspect_shape(config: ScenarioConfig, alpha: float) -> CloudShape:
    n = config.atom_number
    n0_ref = config.cloud_peak_density
    norm = (2.0 * math.pi) ** 1.5
    if config.aspect_mode == "fixed_n0":
        sigma_y = (n / (norm * n0_ref * alpha)) ** (1.0 / 3.0)
        n0 = n0_ref
    else:  # fixed_N: keep the alpha = 1 radius, let density dilute
        sigma_y = (n / (norm * n0_ref)) ** (1.0 / 3.0)
        n0 = n0_ref / alpha
    return CloudShape(sigma_y=sigma_y, sigma_z=alpha * sigma_y, peak_density=n0)


def run_aspect_scan(config: ScenarioConfig) -> str:
    """Steady state as a function of cloud aspect ratio sigma_z/sigma_y."""
    def point(alpha: float):
        shape = _aspect_shape(config, alpha)
        kappas = kappa_set(shape, config.species)
        ss = steady_state(kappas, config.delta_pol, config.species)
        return (alpha, ss.T_z_inf, ss.T_y_inf)

    rows = _ordered_map(point, config.grid.values())
    return _render_csv(
        config.resolved_items(), ("alpha", "T_z_inf_K", "T_y_inf_K"), rows
    )


def run_intensity_scan(config: ScenarioConfig) -> str:
    """Radial steady state and cooling rate across an intensity grid."""
    kappas = KappaSet(
        kappa_y=config.kappa_y, kappa_z=config.kappa_z, kappa=config.kappa,
        kappa0=0.0,
    )

    def point(intensity: float):
        t_inf = steady_state_with_heating(
            config.kappa_y, config.kappa, config.heating_power,
            intensity, config.delta_pol, config.species,
        )
        if intensity > 0:
            laser = replace(config.laser, intensity=intensity, attenuation_factor=1.0)
            rate = rates(
                laser, kappas, config.delta_pol, config.species, config.trap,
                config.consistency_mode,
            ).cool_rate_y
        else:
            rate = 0.0
        return (intensity, t_inf, rate)

    rows = _ordered_map(point, config.grid.values())
    return _render_csv(
        config.resolved_items(),
        ("intensity_Isat", "T_y_inf_K", "cool_rate_y_per_s"),
        rows,
    )


def run_od_scan(config: ScenarioConfig) -> str:
    """Radial steady state across an optical-density grid."""
    kappa_y_star = config.kappa_y_at_ref / config.od_ref
    kappa_star = config.kappa_at_ref / config.od_ref
    intensity = config.laser.effective_intensity

    def point(od: float):
        t_inf = steady_state_vs_od(
            kappa_y_star, kappa_star, od, config.heating_power,
            intensity, config.delta_pol, config.species,
        )
        return (od, t_inf)

    rows = _ordered_map(point, config.grid.values())
    return _render_csv(config.resolved_items(), ("od_y", "T_y_inf_K"), rows)


def _synthetic_points(config: ScenarioConfig, seed: int) -> list[ScanPoint]:
    rng = np.random.default_rng(seed)
    xs = config.grid.values()
    if config.kind == "intensity_scan":
        def model(x):
            return steady_state_with_heating(
                config.kappa_y, config.kappa, config.heating_power,
                x, config.delta_pol, config.species,
            )
    else:
        kappa_y_star = config.kappa_y_at_ref / config.od_ref
        kappa_star = config.kappa_at_ref / config.od_ref
        intensity = config.laser.effective_intensity

        def model(x):
            return steady_state_vs_od(
                kappa_y_star, kappa_star, x, config.heating_power,
                intensity, config.delta_pol, config.species,
            )

    points = []
    for x in xs:
        y_true = model(x)
        if not math.isfinite(y_true):
            continue
        noise = config.noise_fraction * rng.standard_normal() if config.noise_fraction else 0.0
        y = y_true * (1.0 + noise)
        y_err = config.noise_fraction * y_true if config.noise_fraction else None
        points.append(ScanPoint(x=x, y=y, y_err=y_err))
    return points


def _fit_csv(config: ScenarioConfig, result: FitResult) -> str:
    errors = result.standard_errors or {}
    rows = [
        (name, value, errors.get(name, ""))
        for name, value in result.parameters.items()
    ]
    rows.append(("residual_norm_K", result.residual_norm, ""))
    rows.append(("converged", result.converged, ""))
    rows.append(("iterations", result.iterations, ""))
    return _render_csv(
        config.resolved_items(), ("parameter", "value", "standard_error"), rows
    )


def run_fit(config: ScenarioConfig, seed: int = 0) -> str:
    """Fit the model matching the scenario kind; parameter table as CSV.

    dynamics fits an exponential to the simulated trace; the scan kinds
    fit their steady-state models to points loaded from scenario.data or,
    when no data path is given, to points synthesized from the config's
    own parameter values on the scan grid (seeded noise of
    noise_fraction, which then also sets the per-point error bars).
    """
    if config.kind == "dynamics":
        initial = _initial_cloud(config)
        trace = simulate(
            initial, config.trap, config.species, config.laser, config.duration,
            self_consistent=config.self_consistent,
            consistency_mode=config.consistency_mode,
            sample_stride=config.sample_stride,
            delta_pol=config.delta_pol,
        )
        result = fit_exponential(trace, axis=config.fit_axis, window=config.window)
        return _fit_csv(config, result)

    if config.kind not in ("intensity_scan", "od_scan"):
        raise ValueError(f"scenario kind '{config.kind}' has no fit")
    if config.data is not None:
        points = load_scan_points(config.data)
    else:
        points = _synthetic_points(config, seed)
    if config.kind == "intensity_scan":
        result = fit_intensity_scan(
            points, config.kappa, config.delta_pol, config.species
        )
    else:
        result = fit_od_scan(
            points,
            config.kappa_y_at_ref,
            config.kappa_at_ref,
            config.od_ref,
            config.heating_power,
            config.laser.effective_intensity,
            config.delta_pol,
            config.species,
            refit=True,
        )
    return _fit_csv(config, result)


@dataclass(frozen=True)
class SelfCheck:
    name: str
    expected: str
    actual: str
    tolerance: str
    passed: bool


@dataclass(frozen=True)
class SelfCheckReport:
    checks: tuple[SelfCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def table(self) -> str:
        headers = ("check", "expected", "actual", "tolerance", "status")
        rows = [
            (c.name, c.expected, c.actual, c.tolerance, "pass" if c.passed else "FAIL")
            for c in self.checks
        ]
        widths = [
            max(len(headers[i]), *(len(r[i]) for r in rows)) for i in range(5)
        ]
        lines = [
            "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
            "  ".join("-" * w for w in widths),
        ]
        lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
        n_pass = sum(c.passed for c in self.checks)
        lines.append("")
        verdict = "all checks passed" if self.all_passed else "CHECKS FAILED"
        lines.append(f"{verdict} ({n_pass}/{len(self.checks)})")
        return "\n".join(lines) + "\n"


def _check_range(name, value, lo, hi, expected) -> SelfCheck:
    return SelfCheck(
        name=name,
        expected=expected,
        actual=f"{value:.6g}",
        tolerance=f"[{lo:g}, {hi:g}]",
        passed=lo <= value <= hi,
    )


def _check_rel(name, value, reference, rel_tol, expected=None) -> SelfCheck:
    return SelfCheck(
        name=name,
        expected=expected if expected is not None else f"{reference:.6g}",
        actual=f"{value:.6g}",
        tolerance=f"rel {rel_tol:g}",
        passed=abs(value - reference) <= rel_tol * abs(reference),
    )


def run_selfcheck() -> SelfCheckReport:
    """Recompute the built-in reference numbers and compare with tolerances.

    Uses the built-in chromium and cloverleaf presets throughout; the
    slowest entries integrate the full cooling dynamics and together stay
    well under two minutes.
    """
    species = cr52()
    trap = stuttgart_cloverleaf()
    derived = derive_constants(species)
    checks: list[SelfCheck] = []

    # trap frequencies
    _, omega_y, omega_z = trap_frequencies(trap, species)
    f_y, f_z = omega_y / (2 * math.pi), omega_z / (2 * math.pi)
    checks.append(_check_range("radial trap frequency [Hz]", f_y, 110 * 0.98, 110 * 1.02, "110"))
    checks.append(_check_range("axial trap frequency [Hz]", f_z, 42 * 0.98, 42 * 1.02, "42"))

    # effective detuning of the stretched transition at the trap bottom
    delta_pol = effective_detuning(7.0, trap.offset_field, species, species.m_j, +1)
    checks.append(_check_range(
        "effective detuning [Gamma]", delta_pol, -0.9, -0.7, "-0.8"
    ))

    # reabsorption coefficients at the measured steady-state shape
    shape = CloudShape(sigma_y=410e-6, sigma_z=700e-6, peak_density=5.6e16)
    kappas = kappa_set(shape, species)
    checks.append(_check_range("kappa_y at steady-state shape", kappas.kappa_y, 0.09, 0.12, "0.1"))
    checks.append(_check_range("kappa at steady-state shape", kappas.kappa, 0.22, 0.28, "0.24"))

    # spherical-cloud angular integrals against closed forms
    sphere = CloudShape(sigma_y=1e-4, sigma_z=1e-4, peak_density=0.0)
    radial = _angular_integral(sphere, lambda t: math.sin(t) ** 2) / 1e-4
    axial = _angular_integral(sphere, lambda t: math.sin(t) * abs(math.cos(t))) / 1e-4
    total = _angular_integral(sphere, math.sin) / 1e-4
    checks.append(_check_rel("sphere integral, radial", radial, SPHERE_INTEGRAL_RADIAL, 1e-9))
    checks.append(_check_rel("sphere integral, axial", axial, SPHERE_INTEGRAL_AXIAL, 1e-9))
    checks.append(_check_rel("sphere integral, total", total, SPHERE_INTEGRAL_TOTAL, 1e-9))

    # closed-form steady states
    t_d = derived.doppler_temperature
    no_reabs = steady_state(
        KappaSet(kappa_y=0.0, kappa_z=0.0, kappa=0.0, kappa0=0.0), -0.5, species
    )
    checks.append(_check_rel(
        "axial floor without reabsorption [K]", no_reabs.T_z_inf, 0.7 * t_d, 1e-12,
        expected="0.7 T_D",
    ))
    ss = steady_state(kappas, -0.5, species)
    checks.append(_check_range(
        "radial steady state [T_D]", ss.T_y_inf / t_d, 2.1, 2.5, "2.3"
    ))
    checks.append(_check_range(
        "axial steady state [uK]", ss.T_z_inf * 1e6, 88 * 0.9, 88 * 1.1, "~90"
    ))

    # optical density of the steady-state shape
    od_y = optical_density(shape, species, "y")
    checks.append(_check_range("radial optical density", od_y, 4.0, 5.5, "4.5"))

    # cooling dynamics, measured-scenario start (1 mK, 1e8 atoms)
    laser = LaserConfig(intensity=4e-3, detuning=7.0, attenuation_factor=3.0)
    initial = cloud_from_temperatures(trap, 1e8, 1e-3, 1e-3, 1e-3)
    frozen = simulate(
        initial, trap, species, laser, 0.4,
        self_consistent=False, sample_stride=10, delta_pol=delta_pol,
    )
    tau_y = fit_exponential(frozen, axis="y").parameters["tau"]
    checks.append(_check_range(
        "radial cooling time, frozen shape [ms]", tau_y * 1e3, 25, 100, "~50"
    ))
    tau_z = fit_exponential(frozen, axis="z", window=(0.0, 0.06)).parameters["tau"]
    checks.append(_check_range(
        "axial cooling time at the rate cap [ms]", tau_z * 1e3, 5, 15, "~10"
    ))

    self_consistent = simulate(
        initial, trap, species, laser, 0.6,
        self_consistent=True, sample_stride=10, delta_pol=delta_pol,
    )
    gain = _trace_psd(self_consistent.samples[-1], species) / _trace_psd(
        self_consistent.samples[0], species
    )
    checks.append(_check_range("phase-space density gain", gain, 30, 300, "~80"))
    checks.append(SelfCheck(
        name="self-consistent run ends colder radially",
        expected="T_y(self-consistent) < T_y(frozen)",
        actual=f"{self_consistent.samples[-1].T_y * 1e6:.4g} uK vs "
               f"{frozen.samples[-1].T_y * 1e6:.4g} uK",
        tolerance="ordering",
        passed=self_consistent.samples[-1].T_y < frozen.samples[-1].T_y,
    ))

    # aspect-ratio scan properties at fixed peak density
    alphas = [float(a) for a in np.geomspace(0.1, 10.0, 41)]
    n0_ref = 5e16
    norm = (2.0 * math.pi) ** 1.5

    def aspect_point(alpha: float):
        sigma_y = (1e8 / (norm * n0_ref * alpha)) ** (1.0 / 3.0)
        s = CloudShape(sigma_y=sigma_y, sigma_z=alpha * sigma_y, peak_density=n0_ref)
        return steady_state(kappa_set(s, species), -0.5, species)

    states = [aspect_point(a) for a in alphas]
    t_y_vals = [s.T_y_inf for s in states]
    t_z_vals = [s.T_z_inf for s in states]
    alpha_star = alphas[t_y_vals.index(min(t_y_vals))]
    checks.append(_check_range(
        "aspect ratio of coldest radial state", alpha_star, 0.5, 2.0, "~1"
    ))
    spread = (max(t_z_vals) - min(t_z_vals)) / min(t_z_vals)
    checks.append(_check_range(
        "axial spread across aspect ratios", spread, 0.0, 0.10, "<10%"
    ))

    return SelfCheckReport(checks=tuple(checks))
