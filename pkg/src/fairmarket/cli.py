"""Command-line interface.

``fairmarket run --config cfg.json [--out DIR] [--seeds 1,2,3]`` runs
the configured scenario over its seeds and writes the output tables;
``fairmarket gen --config cfg.json --out DIR`` exports the generated
marketplace CSVs (one subdirectory per seed) without running any
scenario.  Exit status: 0 success, 1 configuration error, 2 I/O error.
"""

import argparse
import os
import sys
from dataclasses import replace

from . import __version__
from .config import ConfigError, parse_config, with_seeds
from .experiment import run_scenario, write_outputs
from .marketplace import export_csv, generate

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fairmarket",
        description=(
            "Multisided-fairness recommendation marketplace simulator: "
            "scenario runner and synthetic data generator."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser(
        "run", help="run a scenario over its seeds and write output tables"
    )
    run_cmd.add_argument("--config", required=True, help="JSON config path")
    run_cmd.add_argument("--out", help="output directory (overrides config)")
    run_cmd.add_argument(
        "--seeds", help="comma-separated seed list (overrides config)"
    )

    gen_cmd = commands.add_parser(
        "gen", help="export marketplace CSVs for each seed, no scenario"
    )
    gen_cmd.add_argument("--config", required=True, help="JSON config path")
    gen_cmd.add_argument("--out", required=True, help="output directory")
    return parser


def _load_config(path):
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read())


def _parse_seed_list(text):
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"seeds: not a comma-separated integer list ({exc})")


def _cmd_run(args):
    config = _load_config(args.config)
    if args.seeds is not None:
        config = with_seeds(config, _parse_seed_list(args.seeds))
    out_dir = args.out if args.out is not None else config.out_dir
    result, marketplaces = run_scenario(config)
    write_outputs(result, marketplaces, out_dir)
    return EXIT_OK


def _cmd_gen(args):
    config = _load_config(args.config)
    for seed in config.seeds:
        marketplace = generate(replace(config.generator, seed=seed))
        export_csv(marketplace, os.path.join(args.out, f"seed_{seed}"))
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_gen(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
