"""Command-line front end.

Verbs:
  simulate     dynamics and steady_state scenarios
  scan         aspect_scan, intensity_scan and od_scan scenarios
  fit          parameter estimation for dynamics and scan models
  selfcheck    recompute the built-in reference numbers
  preset-dump  print the built-in presets in config format

Scenario configs are sectioned key=value text (see parse_config).  CSV
goes to --out when given, else to the path in scenario.output, else to
stdout.  Exit codes: 0 success, 1 invalid input, 2 runtime or
convergence failure, 3 selfcheck failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, ScenarioConfig, parse_config, preset_dump
from .dynamics import IntegrationError
from .runners import (
    run_aspect_scan,
    run_dynamics,
    run_fit,
    run_intensity_scan,
    run_od_scan,
    run_selfcheck,
    run_steady_state,
)

_VERB_KINDS = {
    "simulate": ("dynamics", "steady_state"),
    "scan": ("aspect_scan", "intensity_scan", "od_scan"),
    "fit": ("dynamics", "intensity_scan", "od_scan"),
}
_RUNNERS = {
    "dynamics": run_dynamics,
    "steady_state": run_steady_state,
    "aspect_scan": run_aspect_scan,
    "intensity_scan": run_intensity_scan,
    "od_scan": run_od_scan,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doppler-reabs",
        description="Doppler cooling of dense spin-polarized clouds: "
                    "simulation, scans and parameter fits.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_config_verb(name, help_text, with_seed=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario config file")
        p.add_argument("--out", help="output CSV path (default: scenario.output or stdout)")
        p.add_argument(
            "--mode", choices=("consistency", "verbatim"),
            help="override the rate convention of the config",
        )
        if with_seed:
            p.add_argument(
                "--seed", type=int, default=0,
                help="RNG seed for synthetic fit data (default 0)",
            )
        return p

    add_config_verb("simulate", "run a dynamics or steady_state scenario")
    add_config_verb("scan", "run an aspect, intensity or optical-density scan")
    add_config_verb("fit", "fit model parameters for a scenario", with_seed=True)

    p_check = sub.add_parser("selfcheck", help="verify the built-in anchor numbers")
    p_check.add_argument("--out", help="write the report here instead of stdout")

    p_dump = sub.add_parser("preset-dump", help="print the built-in presets")
    p_dump.add_argument("--out", help="write the presets here instead of stdout")
    return parser


def _load_config(args) -> ScenarioConfig:
    with open(args.config, "r", encoding="utf-8") as handle:
        config = parse_config(handle.read())
    if config.kind not in _VERB_KINDS[args.verb]:
        allowed = ", ".join(_VERB_KINDS[args.verb])
        raise ConfigError(
            [(0, f"scenario kind '{config.kind}' does not run under "
                 f"'{args.verb}' (expected one of: {allowed})")]
        )
    if args.mode is not None:
        config = config.with_consistency_mode(args.mode == "consistency")
    return config


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _fit_converged(csv_text: str) -> bool:
    for line in csv_text.splitlines():
        if line.startswith("converged,"):
            return line.split(",")[1] == "true"
    return True


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "selfcheck":
            report = run_selfcheck()
            _emit(report.table(), args.out)
            return 0 if report.all_passed else 3
        if args.verb == "preset-dump":
            _emit(preset_dump(), args.out)
            return 0
        config = _load_config(args)
        out_path = args.out or config.output
        if args.verb == "fit":
            text = run_fit(config, seed=args.seed)
            _emit(text, out_path)
            if not _fit_converged(text):
                print("error: fit did not converge; last iterate reported",
                      file=sys.stderr)
                return 2
            return 0
        text = _RUNNERS[config.kind](config)
        _emit(text, out_path)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
