#!/usr/bin/env python3
"""Hemisphere study: simulate an axisymmetric beam measured on the upper
hemisphere (theta2 = pi/2) and compare all five reconstruction methods on
the same 300 random belt samples.

Artifacts land in OUT/: device/truth/measurements, per-method reports and
field metrics, and comparison.csv.
"""

import argparse
import sys
from math import pi

from rgsfcs.cli import main as cli


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/hemisphere")
    ap.add_argument("--n-max", type=int, default=20)
    ap.add_argument("--measurements", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--noise-sigma", type=float, default=0.0)
    args = ap.parse_args(argv)

    common = ["--n-max", str(args.n_max), "--theta2", str(pi / 2),
              "--lambda-c", "0.05", "--seed", str(args.seed),
              "--out", args.out]
    rc = cli(["simulate", *common,
              "--measurements", str(args.measurements),
              "--noise-sigma", str(args.noise_sigma)])
    if rc != 0:
        return rc
    return cli(["compare", *common, "--inputs", args.out])


if __name__ == "__main__":
    sys.exit(run())
