#!/usr/bin/env python3
"""Where does chi_{N+1}/chi_N sit between its purity bounds?

Samples random distributions and reports, per N, the mean relative position
(ratio - lower)/(upper - lower) and how often the series approximation
beats the lower bound.
"""
import argparse
from collections import defaultdict

import numpy as np

from coboson.schmidt import purity, random_distribution
from coboson.symfun import elementary_symmetric, f_bounds, f_ratio, f_series_approx


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--d", type=int, default=40)
    parser.add_argument("--n-max", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    pos = defaultdict(list)
    series_wins = defaultdict(int)
    for _ in range(args.trials):
        dist = random_distribution(rng, args.d)
        P = purity(dist)
        top = min(args.n_max, dist.d - 1)
        chi = elementary_symmetric(dist, top + 1)
        for n in range(1, top + 1):
            lo, hi = f_bounds(P, n)
            r = f_ratio(chi, n + 1)
            if hi > lo:
                pos[n].append((r - lo) / (hi - lo))
            series_wins[n] += abs(f_series_approx(dist, n) - r) < abs(lo - r)
    print("N,samples,mean_position,series_better_than_lower")
    for n in sorted(pos):
        print(f"{n},{len(pos[n])},{np.mean(pos[n]):.4f},{series_wins[n] / len(pos[n]):.3f}")


if __name__ == "__main__":
    main()
