"""Blinded, multi-judge, role-conditioned comparison of competing
translations of concept-dense source passages."""

__version__ = "0.1.0"

from .blinding import BlindPlan, fisher_yates, make_blind_plan, unblind
from .corpus import Corpus, SourceCase, TranslationCandidate, validate_corpus
from .persona import QuestionnaireTemplate, ReaderRole, render_evaluation_prompt
from .scoretable import ScoreRow, ScoreTable
from .stats import (TestResult, average_ranks, bonferroni, cross_model_agreement,
                    cross_role_agreement, friedman, kendall_w, spearman_rho,
                    version_difference_battery, wilcoxon_signed_rank)

__all__ = [
    "BlindPlan", "Corpus", "QuestionnaireTemplate", "ReaderRole", "ScoreRow",
    "ScoreTable", "SourceCase", "TestResult", "TranslationCandidate",
    "average_ranks", "bonferroni", "cross_model_agreement", "cross_role_agreement",
    "fisher_yates", "friedman", "kendall_w", "make_blind_plan",
    "render_evaluation_prompt", "spearman_rho", "unblind", "validate_corpus",
    "version_difference_battery", "wilcoxon_signed_rank",
]
