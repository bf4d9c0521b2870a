"""``fscs`` command line: afCS sweep, success map, single trial."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from ._errors import ConfigError, InvalidArgumentError, NonConvergenceError
from .experiment import (
    FULL_TRIALS,
    ExperimentConfig,
    afcs_sweep,
    format_config,
    load_config,
    run_trial,
    success_map,
    write_afcs_csv,
    write_success_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_NUMERIC = 4

log = logging.getLogger("fscs")


def _config(args) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
        if args.problem and args.problem != config.problem:
            raise ConfigError("--problem conflicts with the config file")
        return config
    return ExperimentConfig(problem=args.problem or "P1")


def _xi_path(out: Path, xi_out) -> Path:
    return Path(xi_out) if xi_out else out.with_name(out.stem + "_xi" + out.suffix)


def cmd_afcs_sweep(args) -> int:
    config = _config(args)
    sweep = afcs_sweep(config, verbose=args.verbose)
    out = Path(args.out)
    write_afcs_csv(sweep, out, _xi_path(out, args.xi_out))
    if sweep.all_degenerate:
        log.error("every sweep point is a degenerate acquisition")
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_success_map(args) -> int:
    config = _config(args)
    if args.full:
        config = dataclasses.replace(config, trials_per_cell=FULL_TRIALS)
    smap = success_map(config, workers=args.workers)
    write_success_csv(smap, args.out)
    if smap.all_degenerate:
        log.error("every sweep point is a degenerate acquisition")
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_trial(args) -> int:
    config = _config(args)
    outcome = run_trial(config, args.period, args.ni, args.seed)
    print(json.dumps(outcome.as_dict(), sort_keys=True))
    return EXIT_OK


def cmd_show_config(args) -> int:
    sys.stdout.write(format_config(_config(args)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fscs", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress and diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value experiment config file")
        p.add_argument("--problem", choices=("P1", "P2", "custom"), help="built-in problem when no config is given")

    p = sub.add_parser("afcs-sweep", help="zeta_k and xi over the sampling-period sweep")
    common(p)
    p.add_argument("--out", required=True, help="CSV of period_s,column,zeta")
    p.add_argument("--xi-out", help="CSV of period_s,xi (default: <out>_xi.csv)")
    p.set_defaults(func=cmd_afcs_sweep)

    p = sub.add_parser("success-map", help="reconstruction success ratio per (period, N_I)")
    common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--full", action="store_true", help=f"{FULL_TRIALS} trials per cell")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_success_map)

    p = sub.add_parser("trial", help="run one random trial and print its outcome as JSON")
    common(p)
    p.add_argument("--period", type=float, required=True, help="sampling period in seconds")
    p.add_argument("--ni", type=int, required=True, help="number of interfering tones")
    p.add_argument("--seed", type=int, required=True, help="trial seed")
    p.set_defaults(func=cmd_trial)

    p = sub.add_parser("show-config", help="print the effective configuration")
    common(p)
    p.set_defaults(func=cmd_show_config)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, InvalidArgumentError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (NonConvergenceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        log.error("numeric failure: %s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
