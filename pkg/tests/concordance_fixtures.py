"""Frozen 3-judge x 16-object rating matrices for the concordance checks.

Produced once by scripts/make_concordance_fixture.py (randomized local
search over rank permutations) and frozen here; the engine must report
chi2 = 3 * 15 * W within 0.01 of the published targets on them.
"""

# W = 0.7300653594771241 -> chi2 = 32.85294117647059 (target 32.85 +- 0.01)
RATINGS_W073 = [
    [1, 2, 3, 4, 5, 13, 7, 8, 9, 10, 6, 11, 12, 14, 15, 16],
    [5, 2, 3, 4, 10, 6, 12, 8, 7, 1, 11, 9, 13, 14, 15, 16],
    [5, 2, 3, 4, 8, 14, 7, 6, 9, 10, 11, 13, 12, 1, 15, 16],
]

# W = 0.7799574955043322 -> chi2 = 35.09808729769495 (target 35.10 +- 0.01)
# third judge carries one tie pair, exercising the tie-corrected denominator
RATINGS_W078 = [
    [10, 2, 3, 9, 7, 6, 5, 8, 4, 13, 14, 12, 11, 1, 15, 16],
    [10, 4, 1, 11, 5, 9, 6, 8, 7, 3, 14, 12, 13, 2, 15, 16],
    [1, 2, 7, 5, 4, 14, 3, 8, 9, 10, 11, 13, 12, 6, 15, 15],
]
