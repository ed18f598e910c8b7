"""Mini-batch training of ratio models on positive/unlabeled data.

Each optimization step evaluates the branch rule on its own mini-batch:
while the clipped part of the corrected objective is nonnegative the step
descends on the plain objective, otherwise it descends on the negated
bracket.  Batches take ``batch_size`` unlabeled points and a proportional
draw of positives so both empirical means are estimated every step; one
epoch is one pass over the unlabeled set.

Model selection keeps the parameter snapshot from the epoch with the lowest
plain objective on the validation split.  That criterion contains neither
the class-prior nor the correction strength, so it needs no labels and no
prior knowledge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .divergence import Branch, branch_weights, corrected_objective, empirical_objective
from .errors import ConfigError, TrainingDiverged
from .generators import BregmanGenerator

__all__ = ["TrainConfig", "TrainReport", "AdamState", "adam_step", "train"]


@dataclass
class TrainConfig:
    alpha: float = 0.0
    epochs: int = 200
    batch_size: int = 200
    learning_rate: float = 2e-5
    lr_halving_period: Optional[int] = None
    adam_beta1: float = 0.5
    adam_beta2: float = 0.999
    l2_reg: float = 0.1
    seed: int = 0

    def validate(self):
        if not (0.0 <= self.alpha < 1.0):
            raise ConfigError(f"alpha must be in [0, 1), got {self.alpha}")
        if self.epochs < 0:
            raise ConfigError("epochs must be nonnegative")
        if self.batch_size <= 0:
            raise ConfigError("batch_size must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.lr_halving_period is not None and self.lr_halving_period <= 0:
            raise ConfigError("lr_halving_period must be positive when set")
        for name in ("adam_beta1", "adam_beta2"):
            b = getattr(self, name)
            if not (0.0 < b < 1.0):
                raise ConfigError(f"{name} must be in (0, 1), got {b}")
        if self.l2_reg < 0:
            raise ConfigError("l2_reg must be nonnegative")


@dataclass
class TrainReport:
    train_objective: list = field(default_factory=list)
    val_objective: list = field(default_factory=list)
    corrected_fraction: list = field(default_factory=list)
    best_epoch: int = -1

    def to_dict(self) -> dict:
        return {
            "train_objective": self.train_objective,
            "val_objective": self.val_objective,
            "corrected_fraction": self.corrected_fraction,
            "best_epoch": self.best_epoch,
        }


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, n, beta1=0.9, beta2=0.999, eps=1e-8):
        return cls(m=np.zeros(n), v=np.zeros(n), beta1=beta1, beta2=beta2, eps=eps)


def adam_step(state: AdamState, grad: np.ndarray, lr: float) -> np.ndarray:
    """Advance the Adam state by one step and return the parameter delta."""
    grad = np.asarray(grad, dtype=float)
    if grad.shape != state.m.shape:
        raise ValueError(f"gradient shape {grad.shape} does not match state {state.m.shape}")
    state.t += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    m_hat = state.m / (1.0 - state.beta1**state.t)
    v_hat = state.v / (1.0 - state.beta2**state.t)
    return -lr * m_hat / (np.sqrt(v_hat) + state.eps)


def _epoch_batches(rng, n_pos, n_unl, batch_size):
    """Index pairs covering the unlabeled set once, with paired positives.

    Unlabeled indices are a reshuffled partition into slices of
    ``batch_size``; each slice is paired with a proportional draw of
    positives (with replacement if the pool is smaller), so both empirical
    means in the bracket are estimated on every step.
    """
    order = rng.permutation(n_unl)
    batches = []
    for start in range(0, n_unl, batch_size):
        unl_idx = order[start : start + batch_size]
        n_draw = max(1, round(unl_idx.size * n_pos / n_unl))
        pos_idx = rng.choice(n_pos, size=n_draw, replace=n_draw > n_pos)
        batches.append((pos_idx, unl_idx))
    return batches


class _SplitView:
    """Model evaluation over fixed rows, reusing precomputed features.

    The kernel-expansion models spend almost all their time building the
    feature matrix, and the training loop revisits the same rows every
    epoch, so the matrix is built once and sliced per batch.  Models without
    a feature cache fall through to plain prediction.
    """

    def __init__(self, model, X):
        self.model = model
        self.X = X
        self.phi = model.feature_cache(X) if hasattr(model, "feature_cache") else None

    def predict(self, idx=None):
        if self.phi is not None:
            return self.model.predict_features(self.phi if idx is None else self.phi[idx])
        return self.model.predict(self.X if idx is None else self.X[idx])

    def grad_dot(self, idx, weights):
        if self.phi is not None:
            return self.model.grad_dot_features(self.phi[idx], weights)
        return self.model.grad_dot(self.X[idx], weights)


def train(model, data, gen: BregmanGenerator, cfg: TrainConfig):
    """Train ``model`` on a train/validation split of PU data.

    ``data`` is a ``SplitDataset``; the model is mutated in place and also
    returned with the best-validation parameters restored, together with the
    per-epoch ``TrainReport``.
    """
    cfg.validate()
    tr, va = data.train, data.val
    for name, ds in (("train", tr), ("validation", va)):
        if ds.n_pos == 0 or ds.n_unl == 0:
            raise ConfigError(f"{name} split needs at least one positive and one unlabeled point")
    if cfg.batch_size > tr.n_unl:
        raise ConfigError(
            f"batch_size {cfg.batch_size} exceeds the unlabeled training pool ({tr.n_unl})"
        )

    report = TrainReport()
    if cfg.epochs == 0:
        return model, report

    rng = np.random.default_rng(cfg.seed)
    state = AdamState.zeros(model.n_params, beta1=cfg.adam_beta1, beta2=cfg.adam_beta2)
    best_val = np.inf
    best_params = model.params.copy()

    tr_pos, tr_unl = _SplitView(model, tr.positives), _SplitView(model, tr.unlabeled)
    va_pos, va_unl = _SplitView(model, va.positives), _SplitView(model, va.unlabeled)

    for epoch in range(cfg.epochs):
        lr = cfg.learning_rate
        if cfg.lr_halving_period:
            lr *= 0.5 ** (epoch // cfg.lr_halving_period)
        n_corrected = 0
        batches = _epoch_batches(rng, tr.n_pos, tr.n_unl, cfg.batch_size)
        for pos_idx, unl_idx in batches:
            w_pos, w_unl, branch = branch_weights(
                gen, cfg.alpha, tr_pos.predict(pos_idx), tr_unl.predict(unl_idx)
            )
            grad = tr_pos.grad_dot(pos_idx, w_pos) + tr_unl.grad_dot(unl_idx, w_unl)
            if branch is Branch.CORRECTED:
                n_corrected += 1
            if cfg.l2_reg:
                grad = grad + cfg.l2_reg * model.params
            model.params = model.params + adam_step(state, grad, lr)

        train_obj = corrected_objective(gen, cfg.alpha, tr_pos.predict(), tr_unl.predict()).value
        val_obj = empirical_objective(gen, va_pos.predict(), va_unl.predict())
        if not (np.isfinite(train_obj) and np.isfinite(val_obj)):
            raise TrainingDiverged(
                f"non-finite objective at epoch {epoch}: train={train_obj}, val={val_obj}"
            )
        report.train_objective.append(float(train_obj))
        report.val_objective.append(float(val_obj))
        report.corrected_fraction.append(n_corrected / len(batches))
        if val_obj < best_val:
            best_val = val_obj
            best_params = model.params.copy()
            report.best_epoch = epoch

    model.params = best_params
    return model, report
