"""Baseline vs MRCST under subject-level LOSO, averaged over seeds.

    python scripts/compare_baseline.py --input train_data.txt --format sakar --runs 10

Prints one line per method and writes both reports under ``--out``.
"""
import argparse
import json
import time
from pathlib import Path

from mrcst.config import RunConfig
from mrcst.dataset import load
from mrcst.evaluate import ScoreBook, run_loso


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="sakar", choices=("sakar", "maxlittle", "csv"))
    p.add_argument("--classifier", default="svm", choices=("svm", "rf"))
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--q", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="out/compare")
    args = p.parse_args()

    segments = load(args.input, args.format)
    book = ScoreBook()
    rows = {}
    for method in ("none", "mrcst"):
        cfg = RunConfig()
        cfg.dataset.path, cfg.dataset.format = args.input, args.format
        cfg.operators.q = args.q
        cfg.method, cfg.classifier = method, args.classifier
        cfg.runs, cfg.seed, cfg.jobs = args.runs, args.seed, args.jobs
        t0 = time.perf_counter()
        rep = run_loso(segments, cfg, book)
        rep.write(Path(args.out) / method)
        s = rep.summary
        rows[method] = s
        print(f"{method:6s} acc {s['accuracy_mean']:6.2f}±{s['accuracy_std']:.2f}  "
              f"sens {s['sensitivity_mean']:6.2f}  spec {s['specificity_mean']:6.2f}  "
              f"({time.perf_counter() - t0:.0f}s)")
    gain = rows["mrcst"]["accuracy_mean"] - rows["none"]["accuracy_mean"]
    print(f"gain: {gain:+.2f} points")
    (Path(args.out) / "summary.json").write_text(json.dumps(rows, indent=2) + "\n")


if __name__ == "__main__":
    main()
