"""Command-line entry point.

Exit status: 0 on success, 1 for invalid configuration or parameters,
2 for numerical failures.
"""

import argparse
import os
import sys

from activecloak.cli.config import ConfigError, load_config
from activecloak.errors import GeometryError, NumericalError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

SCENARIO_COMMANDS = ("interior", "cloak-green", "cloak-svd", "illusion", "scatter", "metrics")
CONFIG_DIR = os.path.join(os.path.dirname(__file__), "configs")


def bundled_config(name):
    """Path of a config shipped with the package, e.g. ``fig1_interior``."""
    path = os.path.join(CONFIG_DIR, name if name.endswith(".json") else name + ".json")
    if not os.path.exists(path):
        raise ConfigError(f"no bundled config named {name!r}")
    return path


def _resolve_config(value):
    if value is None or os.path.exists(value):
        return value
    return bundled_config(value)


def build_parser():
    parser = argparse.ArgumentParser(prog="activecloak", description="Active exterior cloaking in 2D.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SCENARIO_COMMANDS + ("sweep",):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file or bundled config name")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help="dotted config key, value parsed as JSON when possible")
    r = sub.add_parser("render", help="write a PPM heatmap for an existing grid file")
    r.add_argument("--grid", required=True, help="grid text file with its JSON sidecar")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--clip", type=float, default=1.0, help="colour scale limit for Re(u)")
    r.add_argument("--config", help="ignored; accepted for a uniform interface")
    r.add_argument("--override", action="append", default=[], help="ignored")
    return parser


def _render(args):
    from activecloak.cli import formats

    os.makedirs(args.out, exist_ok=True)
    try:
        grid = formats.read_grid(args.grid)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read grid {args.grid!r}: {exc}") from None
    stem = os.path.splitext(os.path.basename(args.grid))[0]
    files = formats.write_ppm(os.path.join(args.out, stem + ".ppm"), grid, args.clip)
    formats.write_manifest(args.out, files)


def run(argv=None):
    args = build_parser().parse_args(argv)
    from activecloak.cli import pipeline

    if args.command == "render":
        _render(args)
        return EXIT_OK
    cfg = load_config(_resolve_config(args.config), args.override)
    if args.command == "sweep":
        pipeline.run_sweep(cfg, args.out)
    else:
        pipeline.run_scenario(cfg, args.out, args.command)
    return EXIT_OK


def main(argv=None):
    try:
        return run(argv)
    except (ConfigError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
