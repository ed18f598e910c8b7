"""Unbiased and non-negative PU risk estimators with surrogate losses.

Both estimators rewrite the supervised risk in terms of the positive and
unlabeled samples only; they require the class-prior as an explicit input.
The unbiased form can go negative once a flexible model overfits; the
non-negative form clips the part whose population value cannot be negative
and descends on the negated bracket whenever a mini-batch lands below zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit

from .divergence import Branch
from .errors import ConfigError, TrainingDiverged
from .trainer import AdamState, TrainConfig, TrainReport, _epoch_batches, _SplitView, adam_step

__all__ = [
    "SurrogateLoss",
    "logistic_loss",
    "sigmoid_loss",
    "upu_risk",
    "nnpu_risk",
    "train_baseline",
]


@dataclass(frozen=True)
class SurrogateLoss:
    kind: str
    loss: Callable
    dloss_dv: Callable


def logistic_loss() -> SurrogateLoss:
    return SurrogateLoss(
        kind="logistic",
        loss=lambda y, v: np.logaddexp(0.0, -y * np.asarray(v, dtype=float)),
        dloss_dv=lambda y, v: -y * expit(-y * np.asarray(v, dtype=float)),
    )


def sigmoid_loss() -> SurrogateLoss:
    def _d(y, v):
        s = expit(-y * np.asarray(v, dtype=float))
        return -y * s * (1.0 - s)

    return SurrogateLoss(
        kind="sigmoid",
        loss=lambda y, v: expit(-y * np.asarray(v, dtype=float)),
        dloss_dv=_d,
    )


def _check(prior, g_pos, g_unl):
    if not (0.0 <= prior <= 1.0):
        raise ValueError(f"prior must be in [0, 1], got {prior}")
    gp = np.asarray(g_pos, dtype=float).reshape(-1)
    gu = np.asarray(g_unl, dtype=float).reshape(-1)
    if gp.size == 0 or gu.size == 0:
        raise ValueError("decision value lists must be nonempty")
    return gp, gu


def upu_risk(loss: SurrogateLoss, prior: float, g_pos, g_unl) -> float:
    """Unbiased plug-in risk; may be negative under overfitting."""
    gp, gu = _check(prior, g_pos, g_unl)
    return float(
        prior * np.mean(loss.loss(1, gp))
        - prior * np.mean(loss.loss(-1, gp))
        + np.mean(loss.loss(-1, gu))
    )


def nnpu_risk(loss: SurrogateLoss, prior: float, g_pos, g_unl):
    """Non-negative plug-in risk with its branch flag."""
    gp, gu = _check(prior, g_pos, g_unl)
    pos_term = prior * np.mean(loss.loss(1, gp))
    bracket = float(np.mean(loss.loss(-1, gu)) - prior * np.mean(loss.loss(-1, gp)))
    branch = Branch.NORMAL if bracket >= 0 else Branch.CORRECTED
    return float(pos_term + max(0.0, bracket)), branch


def risk_weights(method, loss, prior, g_pos, g_unl):
    """Per-point chain-rule weights for the uPU or nnPU batch gradient."""
    gp = np.asarray(g_pos, dtype=float)
    gu = np.asarray(g_unl, dtype=float)
    n_p, n_u = gp.size, gu.size
    bracket = float(np.mean(loss.loss(-1, gu)) - prior * np.mean(loss.loss(-1, gp)))
    if method == "upu" or bracket >= 0:
        w_pos = prior * (loss.dloss_dv(1, gp) - loss.dloss_dv(-1, gp)) / n_p
        w_unl = loss.dloss_dv(-1, gu) / n_u
        branch = Branch.NORMAL
    else:
        w_pos = prior * loss.dloss_dv(-1, gp) / n_p
        w_unl = -loss.dloss_dv(-1, gu) / n_u
        branch = Branch.CORRECTED
    return w_pos, w_unl, branch


def train_baseline(method: str, loss: SurrogateLoss, prior: float, model, data, cfg: TrainConfig):
    """Train a decision model by uPU or nnPU risk minimization.

    Mirrors the ratio trainer: Adam, per-batch branch rule for nnPU, and a
    best-validation snapshot.  The validation criterion is the unbiased risk
    (computable from PU data alone, given the prior).
    """
    method = method.lower()
    if method not in ("upu", "nnpu"):
        raise ConfigError(f"unknown baseline method {method!r}")
    if not (0.0 < prior < 1.0):
        raise ConfigError(f"baselines need a prior in (0, 1), got {prior}")
    cfg.validate()
    tr, va = data.train, data.val
    for name, ds in (("train", tr), ("validation", va)):
        if ds.n_pos == 0 or ds.n_unl == 0:
            raise ConfigError(f"{name} split needs at least one positive and one unlabeled point")
    if cfg.batch_size > tr.n_unl:
        raise ConfigError(f"batch_size {cfg.batch_size} exceeds the unlabeled training pool ({tr.n_unl})")

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
            w_pos, w_unl, branch = risk_weights(
                method, loss, prior, tr_pos.predict(pos_idx), tr_unl.predict(unl_idx)
            )
            grad = tr_pos.grad_dot(pos_idx, w_pos) + tr_unl.grad_dot(unl_idx, w_unl)
            if branch is Branch.CORRECTED:
                n_corrected += 1
            if cfg.l2_reg:
                grad = grad + cfg.l2_reg * model.params
            model.params = model.params + adam_step(state, grad, lr)

        if method == "upu":
            train_risk = upu_risk(loss, prior, tr_pos.predict(), tr_unl.predict())
        else:
            train_risk, _ = nnpu_risk(loss, prior, tr_pos.predict(), tr_unl.predict())
        val_risk = upu_risk(loss, prior, va_pos.predict(), va_unl.predict())
        if not (np.isfinite(train_risk) and np.isfinite(val_risk)):
            raise TrainingDiverged(f"non-finite risk at epoch {epoch}")
        report.train_objective.append(float(train_risk))
        report.val_objective.append(float(val_risk))
        report.corrected_fraction.append(n_corrected / len(batches))
        if val_risk < best_val:
            best_val = val_risk
            best_params = model.params.copy()
            report.best_epoch = epoch

    model.params = best_params
    return model, report
