"""Empirical and population Bregman-divergence objectives over PU data.

The plain empirical objective drops the model-free constant; the corrected
objective clips the part whose population value is provably nonnegative and
adds the constant back, so the two are directly comparable:

    plain(r)     = mean_P[-f'(r)] + mean_U[f_conj(r)]
    corrected(r) = mean_P[-f'(r) + alpha * big_f(r)]
                   + max(0, mean_U[big_f(r)] - alpha * mean_P[big_f(r)])
                   + f_conj(0)

``corrected - plain = max(0, bracket) - bracket``, hence corrected >= plain
with equality exactly when the bracket is nonnegative.

The gradient helper applies the per-batch branch rule used by the trainer:
descend on the plain objective while the bracket is nonnegative, otherwise
descend on the negated bracket to push it back above zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .generators import BregmanGenerator

__all__ = [
    "Branch",
    "ObjectiveValue",
    "DiscreteDistributionPair",
    "empirical_objective",
    "corrected_objective",
    "objective_gradient",
    "population_divergence",
]


class Branch(Enum):
    NORMAL = "normal"
    CORRECTED = "corrected"


@dataclass(frozen=True)
class ObjectiveValue:
    value: float
    branch: Branch
    bracket: float


def _check_ratios(name, values):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if np.any(arr < 0):
        raise ValueError(f"{name} contains negative ratio values")
    return arr


def empirical_objective(gen: BregmanGenerator, r_pos, r_unl) -> float:
    """Plain objective: mean_P[-f'(r)] + mean_U[f_conj(r)]."""
    rp = _check_ratios("r_pos", r_pos)
    ru = _check_ratios("r_unl", r_unl)
    return float(np.mean(-gen.f_prime(rp)) + np.mean(gen.f_conj(ru)))


def corrected_objective(gen: BregmanGenerator, alpha: float, r_pos, r_unl) -> ObjectiveValue:
    """Nonnegativity-corrected objective with its branch flag.

    ``alpha`` acts as a lower bound on the positive class-prior; with
    alpha = 0 the bracket is a mean of nonnegative terms and the corrected
    branch can never fire.
    """
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    rp = _check_ratios("r_pos", r_pos)
    ru = _check_ratios("r_unl", r_unl)
    pos_term = float(np.mean(-gen.f_prime(rp) + alpha * gen.big_f(rp)))
    bracket = float(np.mean(gen.big_f(ru)) - alpha * np.mean(gen.big_f(rp)))
    branch = Branch.NORMAL if bracket >= 0 else Branch.CORRECTED
    value = pos_term + max(0.0, bracket) + gen.f_conj_at_zero
    return ObjectiveValue(value=value, branch=branch, bracket=bracket)


def branch_weights(gen: BregmanGenerator, alpha: float, r_pos, r_unl):
    """Per-point chain-rule weights for the active branch of the objective.

    Returns ``(w_pos, w_unl, branch)`` such that the gradient of the branch
    objective is sum_i w_pos[i] * dr/dtheta(x_i) + sum_j w_unl[j] * dr/dtheta(x_j).
    Uses d/dt f_conj(t) = t f''(t) and d/dt (-f'(t)) = -f''(t).
    """
    rp = np.asarray(r_pos, dtype=float)
    ru = np.asarray(r_unl, dtype=float)
    n_p, n_u = rp.size, ru.size
    bracket = float(np.mean(gen.big_f(ru)) - alpha * np.mean(gen.big_f(rp)))
    if bracket >= 0:
        w_pos = -gen.f_prime2(rp) / n_p
        w_unl = ru * gen.f_prime2(ru) / n_u
        branch = Branch.NORMAL
    else:
        w_pos = alpha * rp * gen.f_prime2(rp) / n_p
        w_unl = -ru * gen.f_prime2(ru) / n_u
        branch = Branch.CORRECTED
    return w_pos, w_unl, branch


def objective_gradient(gen: BregmanGenerator, alpha: float, model, batch_pos, batch_unl):
    """Parameter gradient of the corrected objective on one mini-batch.

    Returns ``(grad, branch)``.  On the normal branch this is the gradient of
    the plain objective; on the corrected branch it is the gradient of the
    negated bracket, the defensive direction that restores nonnegativity.
    """
    xp = np.atleast_2d(np.asarray(batch_pos, dtype=float))
    xu = np.atleast_2d(np.asarray(batch_unl, dtype=float))
    if xp.shape[0] == 0 or xu.shape[0] == 0:
        raise ValueError("batches must be nonempty")
    w_pos, w_unl, branch = branch_weights(gen, alpha, model.predict(xp), model.predict(xu))
    grad = model.grad_dot(xp, w_pos) + model.grad_dot(xu, w_unl)
    return grad, branch


@dataclass(frozen=True)
class DiscreteDistributionPair:
    """Finite-support class-conditional pair with a mixing prior.

    The marginal is prior * p_plus + (1 - prior) * p_minus.  Used as an
    exactly computable stand-in for the population quantities in the
    numerical bound and identity checks.
    """

    support: np.ndarray
    p_plus_mass: np.ndarray
    p_minus_mass: np.ndarray
    prior: float

    def __post_init__(self):
        object.__setattr__(self, "support", np.asarray(self.support, dtype=float))
        object.__setattr__(self, "p_plus_mass", np.asarray(self.p_plus_mass, dtype=float))
        object.__setattr__(self, "p_minus_mass", np.asarray(self.p_minus_mass, dtype=float))
        m = self.support.shape[0]
        if self.p_plus_mass.shape != (m,) or self.p_minus_mass.shape != (m,):
            raise ValueError("mass vectors must align with the support")
        for name, mass in (("p_plus_mass", self.p_plus_mass), ("p_minus_mass", self.p_minus_mass)):
            if np.any(mass < 0):
                raise ValueError(f"{name} has negative entries")
            if abs(mass.sum() - 1.0) > 1e-12:
                raise ValueError(f"{name} sums to {mass.sum()}, not 1")
        if not (0.0 < self.prior < 1.0):
            raise ValueError(f"prior must be in (0, 1), got {self.prior}")

    @property
    def marginal_mass(self) -> np.ndarray:
        return self.prior * self.p_plus_mass + (1.0 - self.prior) * self.p_minus_mass

    @property
    def true_ratio(self) -> np.ndarray:
        """p_plus / marginal on each support point carrying mass."""
        p = self.marginal_mass
        out = np.zeros_like(p)
        np.divide(self.p_plus_mass, p, out=out, where=p > 0)
        return out

    @property
    def posterior(self) -> np.ndarray:
        """Probability of the positive class on each support point."""
        return self.prior * self.true_ratio


def population_divergence(gen: BregmanGenerator, dist: DiscreteDistributionPair, r_values) -> float:
    """Exact Bregman divergence from the true ratio to ``r_values``.

    Weighted sum over the discrete support of
    f(r*) - f(r) - f'(r) * (r* - r) against the marginal mass.
    """
    r = np.asarray(r_values, dtype=float)
    if r.shape != dist.support.shape[:1]:
        raise ValueError(
            f"r_values has length {r.shape}, support has {dist.support.shape[0]} points"
        )
    if np.any(r < 0):
        raise ValueError("r_values contains negative entries")
    p = dist.marginal_mass
    r_star = dist.true_ratio
    integrand = gen.f(r_star) - gen.f(r) - gen.f_prime(r) * (r_star - r)
    return float(np.sum(p * integrand))
