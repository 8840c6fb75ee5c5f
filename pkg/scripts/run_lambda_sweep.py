#!/usr/bin/env python3
"""Concentration-cutoff sweep: reconstruct the hemisphere scenario with the
Slepian method at 37 cutoffs lambda_c = 0.05 .. 0.95 and tabulate kept
basis size, interior SNR, and coefficient error per cutoff.
"""

import argparse
import sys
from math import pi

from rgsfcs.cli import main as cli


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/lambda-sweep")
    ap.add_argument("--n-max", type=int, default=20)
    ap.add_argument("--measurements", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", help="comma-separated lambda_c values")
    args = ap.parse_args(argv)

    common = ["--n-max", str(args.n_max), "--theta2", str(pi / 2),
              "--seed", str(args.seed), "--out", args.out]
    rc = cli(["simulate", *common, "--measurements", str(args.measurements)])
    if rc != 0:
        return rc
    sweep = ["sweep-lambda", *common, "--inputs", args.out]
    if args.grid:
        sweep += ["--grid", args.grid]
    return cli(sweep)


if __name__ == "__main__":
    sys.exit(run())
