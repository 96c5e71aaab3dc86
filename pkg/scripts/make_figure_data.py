#!/usr/bin/env python3
"""Regenerate the three figure-ready datasets into data/.

fig1.csv       escape rate of every length-4 hole over Bernoulli(p, 1-p),
               p swept over [1/2, 0.99] in exact steps of 1/200
relerr.csv     maximal rate, regime-wise bounds, and relative errors for
               p in {17/20, 9/10, 19/20} and r = 2..40
markov_r3.csv  escape rate of every length-3 hole over the two-symbol chain
               with diagonal (pi_aa, pi_bb) swept over a 1/20 grid

Usage: python scripts/make_figure_data.py [--outdir data] [--jobs N]
"""

import argparse
import pathlib
import sys

from holerates.cli import main as holerates_main


def run(outdir: pathlib.Path, jobs: int) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    commands = [
        ["figure", "fig1", "--jobs", str(jobs), "--out", str(outdir / "fig1.csv")],
        ["figure", "relerr", "--out", str(outdir / "relerr.csv")],
        ["figure", "markov-r3", "--jobs", str(jobs), "--out", str(outdir / "markov_r3.csv")],
    ]
    for command in commands:
        code = holerates_main(command)
        if code != 0:
            print(f"failed ({code}): {' '.join(command)}", file=sys.stderr)
            return code
        print(f"wrote {command[-1]}")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="data", type=pathlib.Path)
    parser.add_argument("--jobs", default=1, type=int)
    args = parser.parse_args()
    sys.exit(run(args.outdir, args.jobs))
