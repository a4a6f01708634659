#!/usr/bin/env python3
"""Regenerate the frozen concordance fixtures in tests/concordance_fixtures.py.

Randomized local search over 3x16 rank matrices for tie-corrected W values
whose chi2 = m(n-1)W lands within 0.01 of the published targets 32.85 and
35.10.  Untied permutations keep sum(R_i^2) even, which cannot reach the
35.10 target, so that search runs with one tied pair in the third judge.
"""

from __future__ import annotations

import argparse
import random


def midranks(row):
    n = len(row)
    order = sorted(range(n), key=lambda i: row[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and row[order[j + 1]] == row[order[i]]:
            j += 1
        for t in range(i, j + 1):
            ranks[order[t]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def kendall_w(rows):
    m, n = len(rows), len(rows[0])
    ranked = [midranks(r) for r in rows]
    rank_sums = [sum(ranked[j][i] for j in range(m)) for i in range(n)]
    s2 = sum(r * r for r in rank_sums)
    ties = 0.0
    for row in rows:
        counts = {}
        for v in row:
            counts[v] = counts.get(v, 0) + 1
        ties += sum(t ** 3 - t for t in counts.values())
    return (12 * s2 - 3 * m * m * n * (n + 1) ** 2) / (m * m * n * (n * n - 1) - m * ties)


def search(target, tie_in_third_judge, seed, max_steps=400_000):
    rng = random.Random(seed)
    rows = [list(range(1, 17)) for _ in range(3)]
    if tie_in_third_judge:
        rows[2][15] = 15
    cur = [r[:] for r in rows]
    cur_w = kendall_w(cur)
    best = (cur_w, [r[:] for r in cur])
    for _ in range(max_steps):
        j = rng.randrange(3)
        a, b = rng.randrange(16), rng.randrange(16)
        cur[j][a], cur[j][b] = cur[j][b], cur[j][a]
        w = kendall_w(cur)
        if abs(w - target) <= abs(cur_w - target) or rng.random() < 0.02:
            cur_w = w
        else:
            cur[j][a], cur[j][b] = cur[j][b], cur[j][a]
        if abs(cur_w - target) < abs(best[0] - target):
            best = (cur_w, [r[:] for r in cur])
        if abs(best[0] - target) < 2.0e-4:
            break
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=12345)
    args = parser.parse_args()
    for target, tied in ((0.73, False), (0.78, True)):
        w, rows = search(target, tied, args.seed)
        chi2 = 3 * 15 * w
        print(f"# W = {w!r} -> chi2 = {chi2!r} (target {45 * target:.2f} +- 0.01)")
        for row in rows:
            print(f"    {row},")
        if abs(chi2 - 45 * target) > 0.01:
            raise SystemExit(f"search missed the {target} target; try another --seed")


if __name__ == "__main__":
    main()
