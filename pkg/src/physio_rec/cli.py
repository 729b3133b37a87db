"""``physio-rec`` command line.

Standard output carries only the JSON result of a command; diagnostics
go to standard error. Exit status is 0 on success, 1 on data or
configuration errors and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .config import CONFIG_ENV, AppConfig, load_config
from .errors import PhysioRecError
from .pipeline import evaluate, infer_at, recommend, train
from .recommender_core import UserPreferences
from .sensor_stream import parse_sensor_log
from .storage import (
    load_catalog,
    load_preferences,
    load_weights,
    read_trace,
    save_weights,
    write_trace,
)
from .tourist_sim import simulate
from .weight_learning import init_weights

log = logging.getLogger("physio_rec")


class CommandError(PhysioRecError):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _read_log(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CommandError(f"sensor log not found: {path}") from None
    return parse_sensor_log(text)


def _require(path: Path, what: str, hint: str = "") -> Path:
    if not path.exists():
        raise CommandError(f"{what} not found: {path}" + (f"; {hint}" if hint else ""))
    return path


def cmd_infer(args, cfg: AppConfig) -> int:
    samples = _read_log(args.log)
    pc = infer_at(samples, args.now, cfg.inference, cfg.window)
    _emit(pc.to_dict())
    return 0


def cmd_recommend(args, cfg: AppConfig) -> int:
    if args.k < 1:
        raise CommandError("--k must be >= 1")
    weights_path = Path(args.weights) if args.weights else cfg.weights_path
    catalog_path = Path(args.catalog) if args.catalog else cfg.catalog_path
    prefs_path = Path(args.prefs) if args.prefs else cfg.preferences_path
    w = load_weights(
        _require(weights_path, "weights file", "run `physio-rec train` or `physio-rec init-weights` first"),
        cfg.w_max,
    )
    catalog = load_catalog(_require(catalog_path, "catalog file"))
    prefs = load_preferences(prefs_path) if prefs_path.exists() else UserPreferences.empty()
    pc = infer_at(_read_log(args.log), args.now, cfg.inference, cfg.window)
    _emit(recommend(pc, w, catalog, prefs, args.k, cfg.blend).to_dict())
    return 0


def cmd_simulate(args, cfg: AppConfig) -> int:
    steps = simulate(cfg.sim, cfg.inference, cfg.window)
    write_trace(args.out, steps)
    log.info("wrote %d steps for %d tourists to %s", len(steps), cfg.sim.n_tourists, args.out)
    return 0


def cmd_train(args, cfg: AppConfig) -> int:
    steps = read_trace(_require(Path(args.trace), "trace file"))
    if not steps:
        raise CommandError(f"trace file {args.trace} contains no steps")
    w = train(steps, cfg, reinfer=args.reinfer)
    save_weights(args.out, w)
    log.info("trained on %d events, wrote %s", len(steps), args.out)
    return 0


def cmd_evaluate(args, cfg: AppConfig) -> int:
    steps = read_trace(_require(Path(args.trace), "trace file"))
    if not steps:
        raise CommandError(f"trace file {args.trace} contains no steps")
    w = load_weights(_require(Path(args.weights), "weights file"), cfg.w_max)
    _emit({"agreement": evaluate(steps, w, cfg)})
    return 0


def cmd_init_weights(args, cfg: AppConfig) -> int:
    save_weights(args.out, init_weights(cfg.prior, args.magnitude, cfg.w_max))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="physio-rec", description="Wearable-driven tourist activity recommender.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--config", help=f"configuration JSON (default: ${CONFIG_ENV}, else built-in defaults)")
        return p

    p = with_config(sub.add_parser("infer", help="print the condition vector at a time"))
    p.add_argument("--log", required=True)
    p.add_argument("--now", type=int, required=True, help="query time, epoch seconds")
    p.set_defaults(func=cmd_infer)

    p = with_config(sub.add_parser("recommend", help="print category, ARI and top venues"))
    p.add_argument("--log", required=True)
    p.add_argument("--now", type=int, required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--weights", help="override the configured weights path")
    p.add_argument("--catalog", help="override the configured catalog path")
    p.add_argument("--prefs", help="override the configured preferences path")
    p.set_defaults(func=cmd_recommend)

    p = with_config(sub.add_parser("simulate", help="write a synthetic tourist trace"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = with_config(sub.add_parser("train", help="fit the weight matrix on a trace"))
    p.add_argument("--trace", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--reinfer", action="store_true", help="re-derive conditions from the trace's sensor samples")
    p.set_defaults(func=cmd_train)

    p = with_config(sub.add_parser("evaluate", help="policy agreement with the planted matrix"))
    p.add_argument("--trace", required=True)
    p.add_argument("--weights", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = with_config(sub.add_parser("init-weights", help="write the sign prior scaled by --magnitude"))
    p.add_argument("--out", required=True)
    p.add_argument("--magnitude", type=float, default=1.0)
    p.set_defaults(func=cmd_init_weights)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="physio-rec: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (PhysioRecError, OSError, ValueError) as exc:
        print(f"physio-rec: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
