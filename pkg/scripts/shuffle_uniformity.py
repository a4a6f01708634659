#!/usr/bin/env python3
"""Empirical uniformity check of the seeded shuffle.

Runs the label shuffle over many seeds and reports the per-permutation
frequencies plus a chi-square statistic against the uniform expectation.
"""

from __future__ import annotations

import argparse
import itertools

from blindeval.blinding import fisher_yates
from blindeval.rng import Splitmix64
from blindeval.special import chi2_sf


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=4, help="sequence length (default 4)")
    parser.add_argument("--seeds", type=int, default=100_000, help="number of seeds")
    args = parser.parse_args()

    counts = {perm: 0 for perm in itertools.permutations(range(args.n))}
    for seed in range(args.seeds):
        counts[tuple(fisher_yates(args.n, Splitmix64(seed)))] += 1

    expected = args.seeds / len(counts)
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    df = len(counts) - 1
    print(f"{args.seeds} seeds, n={args.n}: {len(counts)} permutations, "
          f"expected {expected:.1f} each")
    worst = max(counts.items(), key=lambda kv: abs(kv[1] - expected))
    print(f"largest deviation: {worst[0]} seen {worst[1]} times "
          f"({100 * (worst[1] - expected) / expected:+.2f}%)")
    print(f"chi-square = {chi2:.2f} on {df} df, p = {chi2_sf(chi2, df):.4f}")


if __name__ == "__main__":
    main()
