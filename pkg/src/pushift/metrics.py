"""Evaluation metrics: empirical AUC, reweighted error rates, and the
exact population AUC machinery behind the ranking-bound check.

Empirical AUC uses the rank-sum formulation with ties counted 1/2, the
unbiased treatment of the pairwise definition.  ``ties_present`` lets
callers flag results where the tie convention actually mattered.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from .divergence import DiscreteDistributionPair, population_divergence
from .errors import ConfigError
from .generators import BregmanGenerator

__all__ = [
    "auc",
    "ties_present",
    "auc_brute_force",
    "population_auc_risk",
    "auc_excess_bound_check",
    "error_rate",
    "accuracy",
    "prior_abs_error",
]


def auc(scores_pos, scores_neg) -> float:
    """Probability a random positive outranks a random negative, ties at 1/2.

    Rank-sum implementation, O(n log n).
    """
    sp = np.asarray(scores_pos, dtype=float).reshape(-1)
    sn = np.asarray(scores_neg, dtype=float).reshape(-1)
    if sp.size == 0 or sn.size == 0:
        raise ValueError("both score lists must be nonempty")
    ranks = rankdata(np.concatenate((sp, sn)), method="average")
    rank_sum = float(np.sum(ranks[: sp.size]))
    return (rank_sum - sp.size * (sp.size + 1) / 2.0) / (sp.size * sn.size)


def ties_present(scores_pos, scores_neg) -> bool:
    """True when some positive and negative score coincide exactly."""
    sp = np.unique(np.asarray(scores_pos, dtype=float))
    sn = np.unique(np.asarray(scores_neg, dtype=float))
    return bool(np.intersect1d(sp, sn).size)


def auc_brute_force(scores_pos, scores_neg) -> float:
    """Quadratic pairwise enumeration; the oracle for the rank-sum path."""
    sp = np.asarray(scores_pos, dtype=float).reshape(-1)
    sn = np.asarray(scores_neg, dtype=float).reshape(-1)
    wins = (sp[:, None] > sn[None, :]).sum() + 0.5 * (sp[:, None] == sn[None, :]).sum()
    return float(wins / (sp.size * sn.size))


def population_auc_risk(dist: DiscreteDistributionPair, score_values) -> float:
    """Exact 1 - AUC of a score over a finite-support distribution."""
    s = np.asarray(score_values, dtype=float)
    if s.shape != dist.support.shape[:1]:
        raise ValueError("score values must align with the support")
    pp = dist.p_plus_mass
    pm = dist.p_minus_mass
    gt = (s[:, None] > s[None, :]).astype(float) + 0.5 * (s[:, None] == s[None, :])
    return 1.0 - float(pp @ gt @ pm)


def auc_excess_bound_check(
    dist: DiscreteDistributionPair,
    r_values,
    gen: BregmanGenerator,
    tol: float = 1e-10,
):
    """Exact AUC regret of r against its divergence bound.

    The optimal score is the true ratio itself, so the regret is computed
    against it.  Returns (lhs, rhs); raises if the bound fails.
    """
    if not gen.strongly_convex:
        raise ConfigError(f"generator {gen.name} is not strongly convex (mu={gen.mu})")
    lhs = population_auc_risk(dist, r_values) - population_auc_risk(dist, dist.true_ratio)
    br = population_divergence(gen, dist, r_values)
    rhs = np.sqrt(max(0.0, 2.0 * br / gen.mu)) / (1.0 - dist.prior)
    if lhs > rhs + tol:
        raise AssertionError(f"AUC bound violated: lhs={lhs!r} > rhs={rhs!r}")
    return lhs, float(rhs)


def error_rate(labels, predictions, test_prior=None) -> float:
    """Misclassification rate, optionally reweighted to a target prior.

    With ``test_prior`` given, the per-class error rates are mixed as
    test_prior * FNR + (1 - test_prior) * FPR; otherwise the plain rate.
    """
    y = np.asarray(labels, dtype=int)
    d = np.asarray(predictions, dtype=int)
    if y.shape != d.shape:
        raise ValueError("labels and predictions must have equal length")
    if test_prior is None:
        return float(np.mean(y != d))
    pos, neg = y == 1, y == -1
    if not np.any(pos) or not np.any(neg):
        raise ValueError("both classes must be present to reweight error rates")
    fnr = float(np.mean(d[pos] == -1))
    fpr = float(np.mean(d[neg] == 1))
    return test_prior * fnr + (1.0 - test_prior) * fpr


def accuracy(labels, predictions, test_prior=None) -> float:
    return 1.0 - error_rate(labels, predictions, test_prior)


def prior_abs_error(estimate: float, truth: float) -> float:
    return abs(float(estimate) - float(truth))
