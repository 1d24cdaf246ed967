"""Command line entry point: ``kastap run|list-presets|validate``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError
from .experiment import PRESETS, get_preset, list_presets, load_spec, run_experiment


def _resolve(target: str):
    if target in PRESETS:
        return get_preset(target)
    if Path(target).exists():
        return load_spec(target)
    raise ConfigError(f"{target!r} is neither a preset id nor a config file (see 'kastap list-presets')")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="kastap", description="Knowledge-aided STAP experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a preset or a config file")
    run.add_argument("target", help="preset id or path to a YAML/JSON experiment config")
    run.add_argument("--seed", type=int, help="override the master seed")
    run.add_argument("--out", help="output directory (default: the config's output_dir)")
    run.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    sub.add_parser("list-presets", help="list the figure presets")
    val = sub.add_parser("validate", help="check a config file without running it")
    val.add_argument("config")
    args = parser.parse_args(argv)

    try:
        if args.command == "list-presets":
            print(list_presets())
            return 0
        if args.command == "validate":
            spec = load_spec(args.config)
            print(f"{args.config}: ok ({spec.sweep} sweep, {len(spec.algorithms)} algorithms)")
            return 0
        spec = _resolve(args.target)
        changes = {}
        if args.seed is not None:
            changes["master_seed"] = args.seed
        if args.trials is not None:
            changes["trials"] = args.trials
        if args.out is not None:
            changes["output_dir"] = args.out
        spec = spec.replace(**changes)
        csv_path, json_path = run_experiment(spec)
        print(f"wrote {csv_path} and {json_path}")
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
