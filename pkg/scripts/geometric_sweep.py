#!/usr/bin/env python3
"""Geometric cobosons always condense: verdicts and proof margins over (z, N).

Writes CSV with the majorization verdict, the number of ranks compared,
the smallest level-wise proof margin and F_N.
"""
import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from coboson.majorization import check_majorization, geometric_prefix_proof
from coboson.schmidt import geometric_for_tail
from coboson.symfun import chi_sequence, f_ratio


@dataclass
class SweepConfig:
    z_values: tuple = tuple(np.round(np.arange(0.1, 1.0, 0.1), 2)) + (0.95, 0.99)
    n_max: int = 8
    levels: int = 64
    tail: float = 1e-12


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-max", type=int, default=SweepConfig.n_max)
    parser.add_argument("--levels", type=int, default=SweepConfig.levels)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()
    cfg = SweepConfig(n_max=args.n_max, levels=args.levels)

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(out)
    writer.writerow(["z", "n", "outcome", "checked_prefixes", "min_margin", "f_ratio"])
    for z in cfg.z_values:
        g = geometric_for_tail(float(z), cfg.tail)
        chi = chi_sequence(g, cfg.n_max)
        for n in range(2, cfg.n_max + 1):
            v = check_majorization(g, n, chi=chi)
            margin = min(r.margin for r in geometric_prefix_proof(float(z), n, cfg.levels))
            writer.writerow([float(z), n, v.outcome.value, v.checked_prefixes, repr(margin), repr(f_ratio(chi, n))])
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
