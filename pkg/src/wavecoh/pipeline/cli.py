"""Command-line entry point.

Exit codes: 0 success; otherwise the category code of the raised error
(see ``wavecoh.errors``), 1 for unexpected failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
import typing

from ..errors import WavecohError
from . import commands
from .config import RunConfig

log = logging.getLogger("wavecoh")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value configuration file")
    hints = typing.get_type_hints(RunConfig)
    for f in dataclasses.fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        hint = hints[f.name]
        if hint is bool:
            parser.add_argument(flag, dest=f.name, action=argparse.BooleanOptionalAction,
                                default=None)
        elif f.name == "inputs":
            parser.add_argument("--input", dest="inputs", action="append", default=None,
                                metavar="PATH[::FORMAT]", help="extra input series")
        else:
            base = next((t for t in typing.get_args(hint) if t is not type(None)), hint)
            parser.add_argument(flag, dest=f.name, type=base if base in (int, float) else str,
                                default=None)


def build_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    changes = {f.name: getattr(args, f.name) for f in dataclasses.fields(RunConfig)
               if getattr(args, f.name, None) is not None}
    return config.replace(**changes) if changes else config


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavecoh", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a source file into the generic CSV format")
    p.add_argument("path")
    p.add_argument("--format", default="generic_csv",
                   help="SIDC_sunspots | GISS_temperature | CDIAC_co2 | generic_csv")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--annual", action="store_true", help="aggregate monthly data to years")
    p.add_argument("--fill", choices=["none", "linear"], default="none")
    p.add_argument("--label")

    for name, help_ in [("power", "wavelet power with red-noise significance"),
                        ("coherence", "wavelet coherence for sunspots x temperatures"),
                        ("granger", "time and frequency-band Granger tests"),
                        ("reproduce", "run the full study")]:
        p = sub.add_parser(name, help=help_)
        _add_config_flags(p)
        p.add_argument("--write-config", metavar="PATH",
                       help="save the effective configuration and exit")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "ingest":
            s = commands.cmd_ingest(args.path, args.format, args.output, args.annual,
                                    args.fill, args.label)
            print(f"{s.label}: {len(s)} {s.step} values, "
                  f"{s.time_labels()[0]}..{s.time_labels()[-1]} -> {args.output}")
            return 0
        config = build_config(args)
        if args.write_config:
            config.save(args.write_config)
            return 0
        if args.command == "power":
            for r in commands.cmd_power(config):
                print(r["file"])
        elif args.command == "coherence":
            for r in commands.cmd_coherence(config):
                print(r["file"])
        elif args.command == "granger":
            doc = commands.cmd_granger(config)
            print(commands.granger_table(doc), end="")
        elif args.command == "reproduce":
            commands.cmd_reproduce(config)
            print(f"results written to {config.output_dir}")
        return 0
    except WavecohError as exc:
        print(f"error [{exc.category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return 13
