"""Command line: ``mrcst transform | evaluate | ablation``.

Exit codes: 0 success, 2 usage or configuration error, 1 runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .config import FORMATS, METHODS, NORMS, ConfigError, RunConfig, from_dict, load_config, to_dict
from .dataset import DatasetError, apply_normalizer, fit_normalizer, load, write_generic_csv
from .envelope import TRIM_MODES
from .evaluate import build_channels, run_ablation, run_loso

log = logging.getLogger("mrcst")


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration; flags override its values")
    p.add_argument("--input", help="dataset file")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--q", type=int, help="clusters per subject")
    p.add_argument("--depth", type=int, help="iterative clustering layers")
    p.add_argument("--trim", choices=TRIM_MODES, help="trimmed-mean denominator")
    p.add_argument("--norm", choices=NORMS)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-step", type=float)
    p.add_argument("--fusion-mode", choices=("score", "label"))
    p.add_argument("--weights", type=float, nargs=3, metavar=("A1", "A2", "A3"),
                   help="fixed fusion weights instead of the grid search")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrcst", description="Multitype reconstruction of subject sample sets")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="write the E_f, E_s, E_t datasets")
    _common(p)
    p.add_argument("--normalized", choices=("none", "global"), default="none",
                   help="debug only: min-max scale each file on all of its rows")

    p = sub.add_parser("evaluate", help="leave-one-subject-out evaluation")
    _common(p)
    p.add_argument("--method")
    p.add_argument("--classifier")

    p = sub.add_parser("ablation", help="all method x classifier cells")
    _common(p)
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overlay: dict = {}
    if args.input is not None or args.format is not None:
        overlay["dataset"] = {k: v for k, v in (("path", args.input), ("format", args.format)) if v is not None}
    ops = {k: v for k, v in (("q", args.q), ("depth", args.depth), ("trim", args.trim)) if v is not None}
    if ops:
        overlay["operators"] = ops
    fus = {k: v for k, v in (("grid_step", args.grid_step), ("mode", args.fusion_mode),
                             ("weights", args.weights)) if v is not None}
    if fus:
        overlay["fusion"] = fus
    for key, val in (("normalization", args.norm), ("runs", args.runs), ("seed", args.seed),
                     ("jobs", args.jobs), ("out", args.out),
                     ("method", getattr(args, "method", None)), ("classifier", getattr(args, "classifier", None))):
        if val is not None:
            overlay[key] = val
    cfg = from_dict(overlay, cfg)
    cfg.validate()
    if not cfg.dataset.path:
        raise ConfigError("dataset.path", "no input given (use --input or the config file)")
    if not Path(cfg.dataset.path).is_file():
        raise UsageError(f"input file not found: {cfg.dataset.path}")
    return cfg


def cmd_transform(cfg: RunConfig, normalized: str = "none") -> dict:
    segments = load(cfg.dataset.path, cfg.dataset.format)
    channels = build_channels(segments, cfg, run=0, names=("ef", "es", "et"))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    counts = {}
    for name, data in channels.items():
        if normalized == "global":
            data = apply_normalizer(fit_normalizer(data, cfg.normalization), data)
        counts[name] = write_generic_csv(out / f"{name}.csv", data)
    manifest = {"config": to_dict(cfg.resolved()), "seed": cfg.seed, "run": 0, "normalized": normalized,
                "input_rows": int(sum(s.n_samples for s in segments)), "subjects": len(segments),
                "rows": counts}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def cmd_evaluate(cfg: RunConfig):
    segments = load(cfg.dataset.path, cfg.dataset.format)
    report = run_loso(segments, cfg)
    report.write(cfg.out)
    return report


def _fmt(mean, std) -> str:
    return "" if mean is None else f"{mean:.2f}±{std:.2f}"


def cmd_ablation(cfg: RunConfig):
    segments = load(cfg.dataset.path, cfg.dataset.format)
    reports = run_ablation(segments, cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "ablation.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "classifier", "accuracy", "sensitivity", "specificity"])
        for r in reports:
            s = r.summary
            w.writerow([r.method, r.classifier, *[_fmt(s[f"{m}_mean"], s[f"{m}_std"])
                                                  for m in ("accuracy", "sensitivity", "specificity")]])
    table = {"config": to_dict(cfg.resolved()), "seed": cfg.seed,
             "cells": [{"method": r.method, "classifier": r.classifier, **r.summary, "per_run": r.per_run}
                       for r in reports]}
    (out / "ablation.json").write_text(json.dumps(table, indent=2) + "\n")
    return reports


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "method", None) is not None and args.method not in METHODS:
        print(f"mrcst: error: method must be one of {METHODS}, got {args.method!r}", file=sys.stderr)
        return 2
    try:
        cfg = resolve_config(args)
    except (ConfigError, UsageError) as e:
        print(f"mrcst: error: {e}", file=sys.stderr)
        return 2
    try:
        if args.command == "transform":
            m = cmd_transform(cfg, args.normalized)
            print(json.dumps(m["rows"]))
        elif args.command == "evaluate":
            r = cmd_evaluate(cfg)
            print(f"{r.method}/{r.classifier}: accuracy {r.summary['accuracy_mean']:.2f}"
                  f" ± {r.summary['accuracy_std']:.2f}")
        else:
            cmd_ablation(cfg)
            print((Path(cfg.out) / "ablation.csv").read_text(), end="")
    except (DatasetError, ValueError, OSError) as e:
        print(f"mrcst: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
