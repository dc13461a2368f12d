"""Command line entry point.

Subcommands: run, spectra, chainmap, couplings, validate. All accept
--config, --out and repeatable --override key=value flags; exit codes
are 0 (success), 2 (configuration error), 3 (numeric/capacity error).
"""

import argparse
import sys
from dataclasses import replace

from .errors import CapacityError, ConfigurationError, NumericError
from .scenarios import (
    _FIELD_TYPES,
    RunConfig,
    _coerce,
    load_config,
    run_scenario,
    validate_config,
)

_SUBCOMMAND_SCENARIO = {
    "spectra": "spectra_sweep",
    "chainmap": "chainmap_diagnostic",
    "couplings": "coupling_profile",
}


def _add_common(parser):
    parser.add_argument("--config", help="configuration file (key = value lines)")
    parser.add_argument("--out", help="output directory (overrides output_dir)")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a configuration key (repeatable)",
    )
    parser.add_argument("--jobs", type=int, help="parallel sweep workers")


def _build_parser():
    parser = argparse.ArgumentParser(prog="cavqed1d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run the scenario named in the configuration"),
        ("spectra", "run a spectra sweep (scenario = spectra_sweep)"),
        ("chainmap", "run the chain-map diagnostic"),
        ("couplings", "emit the slab coupling-profile comparison"),
        ("validate", "validate a configuration and print the report"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
    return parser


def _load(args):
    config = load_config(args.config) if args.config else RunConfig()
    if args.command in _SUBCOMMAND_SCENARIO:
        config = replace(config, scenario=_SUBCOMMAND_SCENARIO[args.command])
    for item in args.override:
        if "=" not in item:
            raise ConfigurationError(f"--override expects key=value, got {item!r}")
        key, raw = (part.strip() for part in item.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"--override: unknown key {key!r}")
        config = replace(config, **{key: _coerce(key, raw, 0)})
    if args.jobs:
        config = replace(config, jobs=args.jobs)
    return config


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        config = _load(args)
        if args.command == "validate":
            issues = validate_config(config)
            if issues:
                for issue in issues:
                    print(f"invalid: {issue}")
                return 2
            print("configuration valid")
            return 0
        bundle = run_scenario(config, out_dir=args.out)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (CapacityError, NumericError) as exc:
        print(f"numeric/capacity error: {exc}", file=sys.stderr)
        return 3
    print(f"scenario {config.scenario} complete in {bundle.wall_time:.1f} s")
    for name in sorted(bundle.files):
        print(f"  {bundle.files[name]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
