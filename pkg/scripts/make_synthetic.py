"""Write synthetic stand-ins in the Sakar, MaxLittle and generic CSV layouts.

Useful for exercising the CLI end to end when the UCI files are not at hand.
Numbers obtained on these files say nothing about the real datasets.
"""
import argparse
from pathlib import Path

from mrcst.dataset import write_generic_csv
from mrcst.synthetic import make_segments, write_maxlittle_format, write_sakar_format


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="data/synthetic")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    sakar = make_segments(40, 26, 26, seed=args.seed)
    write_sakar_format(out / "sakar_like.txt", sakar)
    # 23 positive of 31, ragged 6-7 recordings each
    maxl = make_segments(31, (6, 7), 22, n_positive=23, seed=args.seed + 1)
    write_maxlittle_format(out / "maxlittle_like.data", maxl)
    write_generic_csv(out / "small.csv", make_segments(12, 8, 6, seed=args.seed + 2))
    for f in sorted(out.iterdir()):
        print(f)


if __name__ == "__main__":
    main()
