"""Command-line front end: ``matrixap <subcommand> [options]``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .report import ConfigError, dumps, emit_plot_data, run
from .weights import list_catalog

OUT_DIR_ENV = "MATRIXAP_OUT_DIR"

# subcommand -> analyses it runs when no --config is given
SHORTCUTS = {"projection": ["projection"], "sufficient": ["sufficient"], "roudenko": ["roudenko"],
             "probe": ["transform"]}


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _ladder(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad resolution ladder {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("resolution ladder needs positive depths")
    return vals


def _plot(text: str):
    block, sep, path = text.rpartition(":")
    if not sep or not block or not path:
        raise argparse.ArgumentTypeError(f"expected BLOCK:PATH, got {text!r}")
    return block, path


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", type=Path, help="report path (default: stdout, or $%s/<cmd>.json)" % OUT_DIR_ENV)
    common.add_argument("--plot", type=_plot, action="append", default=[], metavar="BLOCK:PATH",
                        help="write a block trace as plot columns (repeatable)")
    common.add_argument("--resolution-ladder", type=_ladder, metavar="LIST",
                        help="comma-separated grading depths, e.g. 1e-4,1e-7,1e-10")

    shortcut = argparse.ArgumentParser(add_help=False)
    shortcut.add_argument("--weight", help="catalog weight name")
    shortcut.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE",
                          help="catalog parameter, value parsed as JSON when possible")
    shortcut.add_argument("--p", type=float, help="Lebesgue exponent")

    parser = argparse.ArgumentParser(prog="matrixap", description=__doc__)
    parser.add_argument("--version", action="version", version=f"matrixap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="run the analyses listed in --config")
    sub.add_parser("projection", parents=[common, shortcut], help="coordinate projection bounds")
    sub.add_parser("sufficient", parents=[common, shortcut], help="sufficient A_p conditions")
    sub.add_parser("roudenko", parents=[common, shortcut], help="double-integral A_p constant")
    sub.add_parser("probe", parents=[common, shortcut], help="weighted transform norm probe")
    sub.add_parser("reproduce-example", parents=[common], help="checks on the built-in 2x2 example")
    sub.add_parser("list-catalog", help="list catalog weights as JSON")
    return parser


def _config_from_args(args) -> dict:
    cfg = {}
    if args.config is not None:
        try:
            cfg = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    elif args.command == "analyze":
        raise ConfigError("analyze needs --config")
    if args.command in SHORTCUTS:
        cfg.setdefault("analyses", SHORTCUTS[args.command])
        if args.weight is not None:
            cfg["weight"] = {"catalog": args.weight, "params": dict(args.param)}
        elif args.param:
            w = cfg.setdefault("weight", {"catalog": "identity"})
            w.setdefault("params", {}).update(dict(args.param))
        if args.p is not None:
            cfg["p"] = args.p
    if args.command == "reproduce-example":
        cfg["analyses"] = ["example"]
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.resolution_ladder:
        cfg.setdefault("grid", {})["depths"] = args.resolution_ladder
    return cfg


def _output_path(args) -> Path | None:
    if args.out is not None:
        return args.out
    out_dir = os.environ.get(OUT_DIR_ENV)
    if out_dir:
        return Path(out_dir) / f"{args.command}.json"
    return None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-catalog":
        print(json.dumps(list_catalog(), indent=2, sort_keys=True))
        return 0
    try:
        cfg = _config_from_args(args)
        report = run(cfg)
    except ConfigError as exc:
        print(f"matrixap: config error: {exc}", file=sys.stderr)
        return 2
    text = dumps(report)
    path = _output_path(args)
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    for block, plot_path in args.plot:
        try:
            emit_plot_data(report, block, plot_path)
        except KeyError as exc:
            print(f"matrixap: {exc.args[0]}", file=sys.stderr)
            return 2
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
