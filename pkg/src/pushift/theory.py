"""Randomized numerical verification of the package's guiding inequalities.

Every suite draws finite-support distribution pairs, candidate ratio
assignments, and cost/prior settings, then compares an exactly computed
left-hand side against its exactly computed bound (or identity partner).
All expectations are exhaustive sums, so a failure is a genuine
counterexample rather than sampling noise.

Suites:

* ``classification_bound``        threshold rule at the matched cost, no shift
* ``shifted_classification_bound`` same with independent test prior and cost
* ``auc_bound``                   ranking regret against the divergence
* ``quadratic_tightness``         the curvature-matched quadratic generator
                                  never exceeds the exponential generator
* ``squared_loss_identity``       exact decomposition of the quadratic
                                  divergence into squared-loss excess risk
* ``threshold_perturbation``      excess risk of a perturbed threshold stays
                                  within the worst-case slope bound

``flip`` inverts the pass rule of the inequality suites; it exists so the
harness can verify that a violated inequality is actually reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import (
    ShiftSpec,
    bound_constant,
    cost_threshold,
    excess_risk_bound_check,
    finite_support_bayes_risk,
    finite_support_risk,
    squared_loss_decomposition,
    threshold_decisions,
)
from .divergence import DiscreteDistributionPair, population_divergence
from .generators import exp_generator, lsif_generator, scaled_quadratic_generator
from .metrics import auc_excess_bound_check

__all__ = ["SuiteResult", "random_distribution", "random_ratio_values", "run_suite", "run_all", "SUITES"]

IDENTITY_TOL = 1e-10
INEQUALITY_TOL = 1e-10


@dataclass
class SuiteResult:
    name: str
    kind: str  # "inequality" or "identity"
    trials: int
    passed: bool
    worst_margin: float  # min(rhs - lhs) for inequalities, -max|lhs-rhs| for identities
    max_slack: float  # max(rhs - lhs) observed

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "trials": self.trials,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "max_slack": self.max_slack,
        }


def random_distribution(rng, max_support: int = 20) -> DiscreteDistributionPair:
    m = int(rng.integers(2, max_support + 1))
    p_plus = rng.uniform(0.05, 1.0, m)
    p_minus = rng.uniform(0.05, 1.0, m)
    return DiscreteDistributionPair(
        support=np.arange(m, dtype=float),
        p_plus_mass=p_plus / p_plus.sum(),
        p_minus_mass=p_minus / p_minus.sum(),
        prior=float(rng.uniform(0.1, 0.9)),
    )


def random_ratio_values(rng, dist: DiscreteDistributionPair) -> np.ndarray:
    """Candidate model outputs spanning exact, noisy, and adversarial regimes."""
    r_star = dist.true_ratio
    regime = rng.integers(0, 5)
    if regime == 0:
        return r_star.copy()
    if regime == 1:
        return np.zeros_like(r_star)
    if regime == 2:
        return rng.uniform(0.0, 4.0, r_star.shape)
    if regime == 3:
        return np.maximum(0.0, r_star + rng.normal(0.0, rng.uniform(1e-3, 0.5), r_star.shape))
    # order-reversing transform of the true ratio
    return float(np.max(r_star)) - r_star + 0.5


def _random_generator(rng):
    pick = rng.integers(0, 3)
    if pick == 0:
        return lsif_generator()
    if pick == 1:
        return scaled_quadratic_generator(float(rng.uniform(0.2, 5.0)))
    return exp_generator()


def _suite_classification_bound(rng, trials, shift: bool):
    records = []
    for _ in range(trials):
        dist = random_distribution(rng)
        r = random_ratio_values(rng, dist)
        gen = _random_generator(rng)
        test_prior = float(rng.uniform(0.1, 0.9)) if shift else dist.prior
        spec = ShiftSpec(train_prior=dist.prior, test_prior=test_prior, cost=float(rng.uniform(0.1, 0.9)))
        records.append(excess_risk_bound_check(dist, r, spec, gen, tol=np.inf))
    return records


def _suite_auc_bound(rng, trials):
    records = []
    for _ in range(trials):
        dist = random_distribution(rng)
        r = random_ratio_values(rng, dist)
        gen = _random_generator(rng)
        records.append(auc_excess_bound_check(dist, r, gen, tol=np.inf))
    return records


def _suite_quadratic_tightness(rng, trials):
    gen_exp = exp_generator()
    gen_quad = scaled_quadratic_generator(gen_exp.mu)
    records = []
    for _ in range(trials):
        dist = random_distribution(rng)
        r = np.minimum(random_ratio_values(rng, dist), 8.0)
        lhs = population_divergence(gen_quad, dist, r)
        rhs = population_divergence(gen_exp, dist, r)
        records.append((lhs, rhs))
    return records


def _suite_squared_loss_identity(rng, trials):
    records = []
    for _ in range(trials):
        dist = random_distribution(rng)
        r = random_ratio_values(rng, dist)
        mu = float(rng.uniform(0.2, 5.0))
        records.append(squared_loss_decomposition(dist, r, mu=mu))
    return records


def _suite_threshold_perturbation(rng, trials):
    records = []
    for _ in range(trials):
        dist = random_distribution(rng)
        r = random_ratio_values(rng, dist)
        gen = _random_generator(rng)
        spec = ShiftSpec(
            train_prior=dist.prior,
            test_prior=float(rng.uniform(0.1, 0.9)),
            cost=float(rng.uniform(0.1, 0.9)),
        )
        _, theta = cost_threshold(spec)
        delta = float(rng.uniform(-0.9, 1.0)) * theta
        theta_hat = theta + delta
        decisions = threshold_decisions(r, theta_hat)
        lhs = finite_support_risk(dist, decisions, spec.test_prior, spec.cost) - finite_support_bayes_risk(
            dist, spec.test_prior, spec.cost
        )
        br = population_divergence(gen, dist, r)
        rhs = bound_constant(spec) * (2.0 * np.sqrt(max(0.0, 2.0 * br / gen.mu)) + abs(delta))
        records.append((lhs, float(rhs)))
    return records


SUITES = {
    "classification_bound": ("inequality", lambda rng, n: _suite_classification_bound(rng, n, shift=False)),
    "shifted_classification_bound": ("inequality", lambda rng, n: _suite_classification_bound(rng, n, shift=True)),
    "auc_bound": ("inequality", _suite_auc_bound),
    "quadratic_tightness": ("inequality", _suite_quadratic_tightness),
    "squared_loss_identity": ("identity", _suite_squared_loss_identity),
    "threshold_perturbation": ("inequality", _suite_threshold_perturbation),
}


def run_suite(name: str, seed: int = 0, trials: int = 100, flip: bool = False) -> SuiteResult:
    kind, fn = SUITES[name]
    rng = np.random.default_rng(seed)
    records = fn(rng, trials)
    lhs = np.array([a for a, _ in records])
    rhs = np.array([b for _, b in records])
    margins = rhs - lhs
    if kind == "identity":
        worst = -float(np.max(np.abs(margins)))
        passed = -worst <= IDENTITY_TOL
    else:
        if flip:
            margins = -margins
        worst = float(np.min(margins))
        passed = worst >= -INEQUALITY_TOL
    return SuiteResult(
        name=name,
        kind=kind,
        trials=trials,
        passed=bool(passed),
        worst_margin=worst,
        max_slack=float(np.max(margins)),
    )


def run_all(seed: int = 0, trials: int = 100, flip: bool = False):
    return [run_suite(name, seed=seed + i, trials=trials, flip=flip) for i, name in enumerate(SUITES)]
