"""Least-squares estimation of cooling-model parameters.

Exponential relaxation fits to temperature traces, the radial
steady-state-versus-intensity model with an unknown constant heating
power, and the per-optical-density variant.  All fits run on a small
Levenberg-Marquardt loop (damped Gauss-Newton with a forward-difference
Jacobian); parameter uncertainties come from the covariance diagonal.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .atoms import AtomSpecies, derive_constants
from .dynamics import (
    TemperatureTrace,
    detuning_factor,
    steady_state_vs_od,
    steady_state_with_heating,
)

JACOBIAN_REL_STEP = 1e-7
MAX_ITERATIONS = 200
STEP_TOLERANCE = 1e-8


class DegenerateDataError(ValueError):
    """The data cannot identify the model parameters."""


@dataclass(frozen=True)
class ScanPoint:
    """One measured point of a parameter scan."""

    x: float                 # scan variable (intensity or optical density)
    y: float                 # temperature [K]
    y_err: float | None = None

    def __post_init__(self):
        if self.x <= 0:
            raise ValueError("x must be positive")
        if self.y <= 0:
            raise ValueError("y must be positive")
        if self.y_err is not None and self.y_err <= 0:
            raise ValueError("y_err must be positive when given")


@dataclass(frozen=True)
class FitResult:
    """Converged (or last-iterate) parameters of a least-squares fit."""

    parameters: dict[str, float]
    standard_errors: dict[str, float] | None
    residual_norm: float     # euclidean norm of unweighted residuals [K]
    converged: bool
    iterations: int


def _forward_jacobian(residual_fn, p, r0):
    jac = np.empty((r0.size, p.size))
    for i in range(p.size):
        dp = JACOBIAN_REL_STEP * abs(p[i])
        if dp == 0.0:
            dp = JACOBIAN_REL_STEP
        shifted = p.copy()
        shifted[i] += dp
        jac[:, i] = (residual_fn(shifted) - r0) / dp
    return jac


def _cost(r):
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)):
        return math.inf
    return float(r @ r)


def levenberg_marquardt(
    residual_fn,
    p0,
    max_iterations: int = MAX_ITERATIONS,
    step_tolerance: float = STEP_TOLERANCE,
):
    """Minimize sum(residual_fn(p)**2); returns (p, converged, iterations, jac).

    Damped Gauss-Newton: the normal equations are regularized with
    lambda*diag(JtJ); lambda grows tenfold on a rejected step and shrinks
    tenfold on an accepted one.  Convergence is declared when the largest
    relative parameter change falls below step_tolerance.
    """
    p = np.asarray(p0, dtype=float).copy()
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        r = np.asarray(residual_fn(p), dtype=float)
        cost = _cost(r)
        lam = 1e-3
        converged = False
        iterations = 0
        jac = _forward_jacobian(residual_fn, p, r)
        for iterations in range(1, max_iterations + 1):
            jtj = jac.T @ jac
            grad = jac.T @ r
            accepted = False
            for _ in range(60):
                damping = lam * np.diag(np.maximum(np.diag(jtj), 1e-300))
                try:
                    step = np.linalg.solve(jtj + damping, -grad)
                except np.linalg.LinAlgError:
                    lam *= 10.0
                    continue
                p_trial = p + step
                r_trial = np.asarray(residual_fn(p_trial), dtype=float)
                cost_trial = _cost(r_trial)
                if cost_trial <= cost:
                    accepted = True
                    lam = max(lam / 10.0, 1e-14)
                    break
                lam *= 10.0
            if not accepted:
                break
            rel_change = float(
                np.max(np.abs(step) / np.maximum(np.abs(p_trial), 1e-300))
            )
            p, r, cost = p_trial, r_trial, cost_trial
            jac = _forward_jacobian(residual_fn, p, r)
            if rel_change < step_tolerance:
                converged = True
                break
    return p, converged, iterations, jac


def _covariance_errors(jac, residuals, n_params, weighted):
    """Standard errors from the covariance diagonal; None if singular."""
    try:
        cov = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        return None
    if not weighted:
        dof = residuals.size - n_params
        if dof > 0:
            cov = cov * float(residuals @ residuals) / dof
    diag = np.diag(cov)
    if np.any(diag < 0):
        return None
    return np.sqrt(diag)


def _build_result(names, p, converged, iterations, jac, r_weighted, r_raw, weighted):
    errors = None
    if converged:
        se = _covariance_errors(jac, r_weighted, len(names), weighted)
        if se is not None:
            errors = {name: float(s) for name, s in zip(names, se)}
        else:
            errors = {name: math.nan for name in names}
    return FitResult(
        parameters={name: float(v) for name, v in zip(names, p)},
        standard_errors=errors,
        residual_norm=float(np.linalg.norm(r_raw)),
        converged=converged,
        iterations=iterations,
    )


def fit_exponential(
    trace: TemperatureTrace,
    axis: str = "y",
    window: tuple[float, float] | None = None,
) -> FitResult:
    """Fit T(t) = T_inf + (T0 - T_inf) exp(-t/tau) to one axis of a trace.

    window is an inclusive (t_min, t_max) time range; None uses the
    whole trace.  A constant trace leaves tau unidentifiable and raises.
    """
    times = np.asarray(trace.times())
    temps = np.asarray(trace.temperatures(axis))
    if window is not None:
        keep = (times >= window[0]) & (times <= window[1])
        times, temps = times[keep], temps[keep]
    if times.size < 4:
        raise ValueError("need at least 4 samples in the fit window")
    if float(np.ptp(temps)) == 0.0:
        raise DegenerateDataError(
            "temperature is constant over the window; tau is unidentifiable"
        )

    span = float(times[-1] - times[0])

    def residual_fn(p):
        t_inf, t0, tau = p
        if tau <= 0:
            return np.full(times.size, np.inf)
        return t_inf + (t0 - t_inf) * np.exp(-times / tau) - temps

    p0 = np.array([temps[-1], temps[0], span / 3.0])
    p, converged, iterations, jac = levenberg_marquardt(residual_fn, p0)
    r = residual_fn(p)
    return _build_result(
        ("T_inf", "T0", "tau"), p, converged, iterations, jac, r, r, weighted=False
    )


def _weighted_residuals(points, model):
    has_err = [pt.y_err is not None for pt in points]
    if any(has_err) and not all(has_err):
        raise ValueError("either every point carries y_err or none does")
    weighted = all(has_err) and len(points) > 0
    y = np.array([pt.y for pt in points])
    x = np.array([pt.x for pt in points])
    err = np.array([pt.y_err for pt in points], dtype=float) if weighted else None

    def raw(p):
        return np.array([model(xi, p) for xi in x]) - y

    if weighted:
        def scaled(p):
            return raw(p) / err
    else:
        scaled = raw
    return raw, scaled, weighted


def fit_intensity_scan(
    points: list[ScanPoint],
    kappa: float,
    delta_pol: float,
    species: AtomSpecies,
) -> FitResult:
    """Fit the radial steady state versus intensity for kappa_y and the
    constant heating power.

    kappa (total rescattering number) and delta_pol are held fixed.
    Needs at least 3 points spanning a factor of 3 in intensity, since
    the two parameters separate into an asymptote and a low-intensity
    upturn.  Points with y_err are combined as a weighted fit.
    """
    if len(points) < 3:
        raise ValueError("need at least 3 scan points")
    xs = [pt.x for pt in points]
    if max(xs) / min(xs) < 3.0:
        raise ValueError("intensity range must span at least a factor of 3")

    def model(x, p):
        kappa_y, heating = p
        if kappa_y <= 0:
            return math.inf
        return steady_state_with_heating(kappa_y, kappa, heating, x, delta_pol, species)

    raw, scaled, weighted = _weighted_residuals(points, model)

    # Data-driven start: the high-intensity asymptote pins kappa_y, the
    # lowest point then pins the heating power.
    derived = derive_constants(species)
    base = derived.doppler_temperature / 2.0 * detuning_factor(delta_pol)
    ordered = sorted(points, key=lambda pt: pt.x)
    t_high = ordered[-1].y
    ratio = max(t_high / base - 1.0, 1e-6)
    kappa_y0 = 0.3 * (1.0 + kappa) / ratio
    t_low, x_low = ordered[0].y, ordered[0].x
    heating0 = max(
        (t_low * kappa_y0 / base - kappa_y0 - 0.3 * (1.0 + kappa))
        * derived.recoil_energy * species.linewidth * x_low,
        0.0,
    )
    p0 = np.array([kappa_y0, heating0])

    p, converged, iterations, jac = levenberg_marquardt(scaled, p0)
    return _build_result(
        ("kappa_y", "heating_power"),
        p, converged, iterations, jac, scaled(p), raw(p), weighted,
    )


def fit_od_scan(
    points: list[ScanPoint],
    kappa_y_at_ref: float,
    kappa_at_ref: float,
    od_ref: float,
    heating_power: float,
    intensity: float,
    delta_pol: float,
    species: AtomSpecies,
    refit: bool = False,
) -> FitResult:
    """Evaluate (and optionally refit) the steady state versus optical density.

    The per-OD coefficients are fixed by their values at a reference
    optical density, kappa_y_star = kappa_y_at_ref/od_ref and kappa_star
    = kappa_at_ref/od_ref.  With refit=True the single parameter
    kappa_y_star is adjusted to the points; otherwise the curve is
    evaluated as-is and only the residual norm is reported.
    """
    if od_ref <= 0:
        raise ValueError("od_ref must be positive")
    kappa_star = kappa_at_ref / od_ref

    def model(x, p):
        (kappa_y_star,) = p
        if kappa_y_star <= 0:
            return math.inf
        return steady_state_vs_od(
            kappa_y_star, kappa_star, x, heating_power, intensity, delta_pol, species
        )

    raw, scaled, weighted = _weighted_residuals(points, model)
    p0 = np.array([kappa_y_at_ref / od_ref])
    if not refit:
        r_raw = raw(p0)
        return FitResult(
            parameters={
                "kappa_y_star": float(p0[0]),
                "kappa_star": kappa_star,
            },
            standard_errors={},
            residual_norm=float(np.linalg.norm(r_raw)),
            converged=True,
            iterations=0,
        )
    p, converged, iterations, jac = levenberg_marquardt(scaled, p0)
    result = _build_result(
        ("kappa_y_star",), p, converged, iterations, jac, scaled(p), raw(p), weighted
    )
    result.parameters["kappa_star"] = kappa_star
    return result


def load_scan_points(source) -> list[ScanPoint]:
    """Read scan points from CSV text or a path; columns x, y and optional y_err.

    Lines starting with # are ignored, matching the trace CSV format.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as handle:
            text = handle.read()
    rows = [
        line for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    reader = csv.DictReader(io.StringIO("\n".join(rows)))
    if reader.fieldnames is None or "x" not in reader.fieldnames or "y" not in reader.fieldnames:
        raise ValueError("scan CSV needs columns 'x' and 'y'")
    points = []
    for record in reader:
        y_err = record.get("y_err")
        points.append(
            ScanPoint(
                x=float(record["x"]),
                y=float(record["y"]),
                y_err=float(y_err) if y_err not in (None, "") else None,
            )
        )
    return points
