"""Command-line entry point: ``randive <experiment> [options]``.

Exit codes: 0 on success, 2 on configuration errors (unknown keys, bad
values, missing data file), 3 when ``--check`` is passed and a reference
check fails.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import EXPERIMENTS, ConfigError, ExperimentConfig, run_experiment


def build_parser():
    parser = argparse.ArgumentParser(
        prog="randive",
        description="Random dive MH experiment runner",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} study")
        p.add_argument("--config", help="flat JSON config file (unknown keys are errors)")
        p.add_argument("--seed", type=int, help="master seed (chain i uses stream index i)")
        p.add_argument("--scale", type=float, help="replication scale factor in (0, 1]")
        p.add_argument("--threads", type=int, help="worker processes (default: all cores)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--data", help="price CSV for the shareprice study")
        p.add_argument(
            "--allow-synthetic",
            action="store_true",
            help="shareprice only: fall back to model-generated data when no CSV is given",
        )
        p.add_argument(
            "--check",
            action="store_true",
            help="exit with status 3 if any reference check fails",
        )
    return parser


def _load_config_file(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return doc


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        overrides = _load_config_file(args.config) if args.config else {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.scale is not None:
            overrides["scale_factor"] = args.scale
        if args.threads is not None:
            overrides["threads"] = args.threads
        if args.out is not None:
            overrides["output_dir"] = args.out
        if args.data is not None:
            overrides["data_path"] = args.data
        if args.allow_synthetic:
            overrides["allow_synthetic"] = True
        config = ExperimentConfig.build(args.experiment, overrides)
        if args.data is None and args.allow_synthetic and config.experiment == "shareprice":
            print("warning: no price CSV given, using model-generated synthetic data", file=sys.stderr)
        result = run_experiment(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for check in result.checks:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"[{status}] {check['name']}: {check['value']} (expected {check['expected']})")
    print(f"wrote {config.output_dir}/summary.json ({result.wall_clock_s:.1f}s)")
    if args.check and not result.all_checks_passed:
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
