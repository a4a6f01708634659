"""Independent oracles used to verify the statistics engine.

Deliberately built on different machinery than the engine: numpy/scipy
ranking, brute-force enumeration, and permutation resampling.  Nothing
here imports from blindeval.stats.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata


def brute_force_ranks(values):
    """Midranks by sorting indices and averaging positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for t in range(i, j + 1):
            ranks[order[t]] = sum(range(i + 1, j + 2)) / (j - i + 1)
        i = j + 1
    return ranks


def rank_then_pearson(x, y):
    """Spearman as numpy Pearson over scipy midranks."""
    rx = rankdata(x)
    ry = rankdata(y)
    return float(np.corrcoef(rx, ry)[0, 1])


def wilcoxon_exact_two_sided(diffs):
    """Full 2^n enumeration of sign assignments over ranked |d|.

    Returns the two-sided p for the observed signs: the probability,
    under random signs, that min(T+, T-) is at most the observed min.
    """
    diffs = [d for d in diffs if d != 0]
    n = len(diffs)
    ranks = rankdata([abs(d) for d in diffs])
    total = float(ranks.sum())
    observed_t_plus = float(sum(r for r, d in zip(ranks, diffs) if d > 0))
    observed_min = min(observed_t_plus, total - observed_t_plus)

    patterns = np.arange(2 ** n, dtype=np.int64)
    signs = (patterns[:, None] >> np.arange(n)) & 1      # 1 = positive
    t_plus = signs @ np.asarray(ranks)
    mins = np.minimum(t_plus, total - t_plus)
    favourable = int((mins <= observed_min + 1e-12).sum())
    return favourable / 2 ** n


def friedman_chi2(matrix):
    """Tie-corrected Friedman statistic, recomputed independently."""
    matrix = np.asarray(matrix, dtype=float)
    n, k = matrix.shape
    ranks = rankdata(matrix, axis=1)
    col_sums = ranks.sum(axis=0)
    raw = 12.0 / (n * k * (k + 1)) * (col_sums ** 2).sum() - 3.0 * n * (k + 1)
    ties = 0.0
    for row in matrix:
        _, counts = np.unique(row, return_counts=True)
        ties += (counts ** 3 - counts).sum()
    correction = 1.0 - ties / (n * k * (k * k - 1))
    return raw / correction


def friedman_permutation_p(matrix, n_perms=20_000, seed=0, convention="exclusive"):
    """Within-block shuffle oracle for the Friedman test.

    The permuted statistic is discrete; at n = 8..12 blocks the atom
    P(T = t_obs) can carry 1-2% of mass.  The continuous chi-square tail
    the engine reports corresponds to the atom-excluded tail, so the
    default convention is P(T > t_obs); "inclusive" gives the classical
    test convention P(T >= t_obs), which exceeds the exclusive value by
    exactly the atom.
    """
    matrix = np.asarray(matrix, dtype=float)
    n, k = matrix.shape
    observed = friedman_chi2(matrix)
    ranks = rankdata(matrix, axis=1)
    # per-block tie structure is invariant under within-block permutation,
    # so permuting the midrank rows is equivalent to permuting the values
    rng = np.random.default_rng(seed)
    tiled = np.broadcast_to(ranks, (n_perms, n, k))
    permuted = rng.permuted(tiled, axis=2)
    col_sums = permuted.sum(axis=1)
    raw = 12.0 / (n * k * (k + 1)) * (col_sums ** 2).sum(axis=1) - 3.0 * n * (k + 1)
    ties = 0.0
    for row in matrix:
        _, counts = np.unique(row, return_counts=True)
        ties += (counts ** 3 - counts).sum()
    correction = 1.0 - ties / (n * k * (k * k - 1))
    stats = raw / correction
    if convention == "inclusive":
        return float((stats >= observed - 1e-9).mean())
    return float((stats > observed + 1e-9).mean())


def kendall_w_oracle(rows):
    """Tie-corrected W recomputed with scipy ranks and numpy sums."""
    rows = np.asarray(rows, dtype=float)
    m, n = rows.shape
    ranks = rankdata(rows, axis=1)
    rank_sums = ranks.sum(axis=0)
    s2 = float((rank_sums ** 2).sum())
    ties = 0.0
    for row in rows:
        _, counts = np.unique(row, return_counts=True)
        ties += (counts ** 3 - counts).sum()
    return (12 * s2 - 3 * m * m * n * (n + 1) ** 2) / (m * m * n * (n * n - 1) - m * ties)
