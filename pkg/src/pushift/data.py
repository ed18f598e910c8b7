"""Synthetic data generation, PU sampling, splitting, and CSV ingestion.

All randomness flows through seeded Philox generators (counter based), so
every dataset is bit-reproducible across platforms.  Hidden labels on the
unlabeled side exist purely for evaluation; nothing on the training path
reads them, and the CSV writers never emit them alongside training inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DataError

__all__ = [
    "philox_rng",
    "PUDataset",
    "SplitDataset",
    "GaussianMixtureSpec",
    "case1_mixture",
    "case2_mixture",
    "synth_from_mixture",
    "synth_case1",
    "synth_case2",
    "synth_gaussian_pair",
    "pu_sample",
    "split_dataset",
    "save_csv",
    "load_csv",
    "load_pu_dataset",
]


def philox_rng(seed) -> np.random.Generator:
    """Counter-based generator; accepts an int or a SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class PUDataset:
    positives: np.ndarray
    unlabeled: np.ndarray
    hidden_labels: Optional[np.ndarray] = None

    def __post_init__(self):
        self.positives = np.atleast_2d(np.asarray(self.positives, dtype=float))
        self.unlabeled = np.atleast_2d(np.asarray(self.unlabeled, dtype=float))
        if self.positives.shape[1] != self.unlabeled.shape[1]:
            raise DataError(
                f"dimension mismatch: positives are {self.positives.shape[1]}-d, "
                f"unlabeled are {self.unlabeled.shape[1]}-d"
            )
        if self.hidden_labels is not None:
            self.hidden_labels = np.asarray(self.hidden_labels, dtype=int)
            if self.hidden_labels.shape != (self.unlabeled.shape[0],):
                raise DataError("hidden_labels length must match the unlabeled set")

    @property
    def n_pos(self) -> int:
        return self.positives.shape[0]

    @property
    def n_unl(self) -> int:
        return self.unlabeled.shape[0]

    @property
    def dim(self) -> int:
        return self.positives.shape[1]


@dataclass
class SplitDataset:
    train: PUDataset
    val: PUDataset


def split_dataset(ds: PUDataset, val_fraction: float = 0.2, seed: int = 0) -> SplitDataset:
    """Split positives and unlabeled independently into train/validation."""
    if not (0.0 < val_fraction < 1.0):
        raise ConfigError(f"val_fraction must be in (0, 1), got {val_fraction}")
    rng = philox_rng(seed)

    def _split(n):
        n_val = max(1, int(round(n * val_fraction)))
        if n_val >= n:
            raise DataError(f"cannot split {n} points with val_fraction={val_fraction}")
        order = rng.permutation(n)
        return order[n_val:], order[:n_val]

    p_tr, p_va = _split(ds.n_pos)
    u_tr, u_va = _split(ds.n_unl)
    hl = ds.hidden_labels
    return SplitDataset(
        train=PUDataset(ds.positives[p_tr], ds.unlabeled[u_tr], None if hl is None else hl[u_tr]),
        val=PUDataset(ds.positives[p_va], ds.unlabeled[u_va], None if hl is None else hl[u_va]),
    )


@dataclass
class GaussianMixtureSpec:
    """Univariate Gaussian mixtures for the two synthetic scenarios.

    Components are (mean, variance, weight) triples per class; the marginal
    mixes the classes with ``prior``.
    """

    components_pos: list
    components_neg: list
    prior: float

    def __post_init__(self):
        for name, comps in (("components_pos", self.components_pos), ("components_neg", self.components_neg)):
            w = sum(c[2] for c in comps)
            if abs(w - 1.0) > 1e-12:
                raise ConfigError(f"{name} weights sum to {w}, not 1")
            if any(c[1] <= 0 for c in comps):
                raise ConfigError(f"{name} contains a nonpositive variance")
        if not (0.0 < self.prior < 1.0):
            raise ConfigError(f"prior must be in (0, 1), got {self.prior}")

    @staticmethod
    def _pdf(comps, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for mean, var, weight in comps:
            out += weight * np.exp(-((x - mean) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
        return out

    @staticmethod
    def _cdf(comps, x):
        from scipy.stats import norm

        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for mean, var, weight in comps:
            out += weight * norm.cdf(x, loc=mean, scale=math.sqrt(var))
        return out

    def pdf_pos(self, x):
        return self._pdf(self.components_pos, x)

    def pdf_neg(self, x):
        return self._pdf(self.components_neg, x)

    def pdf_marginal(self, x, prior=None):
        pi = self.prior if prior is None else prior
        return pi * self.pdf_pos(x) + (1.0 - pi) * self.pdf_neg(x)

    def cdf_pos(self, x):
        return self._cdf(self.components_pos, x)

    def cdf_marginal(self, x, prior=None):
        pi = self.prior if prior is None else prior
        return pi * self._cdf(self.components_pos, x) + (1.0 - pi) * self._cdf(self.components_neg, x)

    def true_ratio(self, x, prior=None):
        """p_pos / marginal, the population target of ratio fitting."""
        return self.pdf_pos(x) / self.pdf_marginal(x, prior=prior)

    def max_mixture_proportion(self) -> float:
        """Largest kappa with marginal = kappa * p_pos + (1 - kappa) * q.

        Equals inf_x p(x) / p_pos(x) = prior + (1 - prior) * inf_x p_neg/p_pos.
        For these constructions the negative-to-positive density ratio is
        monotone toward the upper tail, where it tends to 0 when the positive
        class has the dominant rightmost component, and to the ratio of
        component weights when both classes share that component.  Falls back
        to the grid infimum when neither closed form applies.
        """
        key = lambda c: (c[0], c[1])  # larger mean wins the tail; variance breaks ties
        pos_top = max(self.components_pos, key=key)
        neg_top = max(self.components_neg, key=key)
        if key(neg_top) < key(pos_top):
            tail = 0.0
        elif key(neg_top) == key(pos_top):
            tail = neg_top[2] / pos_top[2]
        else:
            return self.grid_infimum_ratio(lo=-40.0, hi=40.0, num=800001)
        return self.prior + (1.0 - self.prior) * tail

    def grid_infimum_ratio(self, lo=-12.0, hi=12.0, num=200001) -> float:
        """Fine-grid infimum of p(x) / p_pos(x), the numeric counterpart."""
        x = np.linspace(lo, hi, num)
        return float(np.min(self.pdf_marginal(x) / self.pdf_pos(x)))

    def _sample_class(self, rng, comps, n):
        weights = np.array([c[2] for c in comps])
        means = np.array([c[0] for c in comps])
        sds = np.sqrt([c[1] for c in comps])
        which = rng.choice(len(comps), size=n, p=weights)
        return rng.normal(means[which], sds[which])

    def sample(self, rng, n_pos, n_unl, prior=None):
        """Draw positives from p_pos and unlabeled from the marginal."""
        pi = self.prior if prior is None else prior
        pos = self._sample_class(rng, self.components_pos, n_pos)
        labels = np.where(rng.random(n_unl) < pi, 1, -1)
        unl = np.empty(n_unl)
        mask = labels == 1
        unl[mask] = self._sample_class(rng, self.components_pos, int(mask.sum()))
        unl[~mask] = self._sample_class(rng, self.components_neg, int((~mask).sum()))
        return pos[:, None], unl[:, None], labels


def case1_mixture(prior: float = 0.4) -> GaussianMixtureSpec:
    """Separated case: p_pos = N(+1, 1), p_neg = N(-1, 1)."""
    return GaussianMixtureSpec(
        components_pos=[(1.0, 1.0, 1.0)],
        components_neg=[(-1.0, 1.0, 1.0)],
        prior=prior,
    )


def case2_mixture(prior: float = 0.6) -> GaussianMixtureSpec:
    """Overlapping case: each class is a mixture leaking into the other.

    p_pos = 0.8 N(+1,1) + 0.2 N(-1,1), p_neg = 0.2 N(+1,1) + 0.8 N(-1,1).
    The class-prior is then not identifiable from PU data alone: the maximum
    mixture proportion exceeds the prior.
    """
    return GaussianMixtureSpec(
        components_pos=[(1.0, 1.0, 0.8), (-1.0, 1.0, 0.2)],
        components_neg=[(1.0, 1.0, 0.2), (-1.0, 1.0, 0.8)],
        prior=prior,
    )


def synth_from_mixture(mix: GaussianMixtureSpec, n_pos, n_unl, prior, seed) -> PUDataset:
    if n_pos <= 0 or n_unl <= 0:
        raise ConfigError(f"sample counts must be positive, got n_pos={n_pos}, n_unl={n_unl}")
    if not (0.0 < prior < 1.0):
        raise ConfigError(f"prior must be in (0, 1), got {prior}")
    rng = philox_rng(seed)
    pos, unl, labels = mix.sample(rng, n_pos, n_unl, prior=prior)
    return PUDataset(pos, unl, labels)


def synth_case1(n_pos, n_unl, prior: float = 0.4, seed: int = 0) -> PUDataset:
    return synth_from_mixture(case1_mixture(prior), n_pos, n_unl, prior, seed)


def synth_case2(n_pos, n_unl, prior: float = 0.6, seed: int = 0) -> PUDataset:
    return synth_from_mixture(case2_mixture(prior), n_pos, n_unl, prior, seed)


def synth_gaussian_pair(
    dim: int,
    n_pos: int,
    n_unl: int,
    prior: float,
    seed,
    separation: float = 2.0,
) -> PUDataset:
    """Spherical Gaussian pair in ``dim`` dimensions, means +-m.

    The class means sit at +-(separation/2) * (1,...,1)/sqrt(dim), so the
    between-class distance is ``separation`` regardless of dimension.
    """
    if n_pos <= 0 or n_unl <= 0:
        raise ConfigError(f"sample counts must be positive, got n_pos={n_pos}, n_unl={n_unl}")
    if not (0.0 < prior < 1.0):
        raise ConfigError(f"prior must be in (0, 1), got {prior}")
    rng = philox_rng(seed)
    mean = (separation / 2.0) * np.ones(dim) / np.sqrt(dim)
    pos = rng.normal(size=(n_pos, dim)) + mean
    labels = np.where(rng.random(n_unl) < prior, 1, -1)
    unl = rng.normal(size=(n_unl, dim)) + np.where(labels[:, None] == 1, mean, -mean)
    return PUDataset(pos, unl, labels)


def pu_sample(pool_X, pool_y, n_pos, n_unl, unlabeled_prior, seed: int = 0, disjoint: bool = False) -> PUDataset:
    """Assemble a PU dataset from a labeled pool.

    Positives come from the positive class; the unlabeled set mixes both
    classes with expected positive fraction ``unlabeled_prior``.  Hidden
    labels are kept for evaluation.  With ``disjoint=True`` the labeled
    positives are removed from the pool before the unlabeled draw.
    """
    pool_X = np.atleast_2d(np.asarray(pool_X, dtype=float))
    pool_y = np.asarray(pool_y, dtype=int)
    if pool_y.shape != (pool_X.shape[0],):
        raise DataError("pool labels must align with pool rows")
    if not (0.0 <= unlabeled_prior <= 1.0):
        raise ConfigError(f"unlabeled_prior must be in [0, 1], got {unlabeled_prior}")
    rng = philox_rng(seed)

    pos_all = np.flatnonzero(pool_y == 1)
    neg_all = np.flatnonzero(pool_y == -1)
    if len(pos_all) < n_pos:
        raise DataError(f"pool has {len(pos_all)} positives, need {n_pos}")
    pos_idx = rng.choice(pos_all, size=n_pos, replace=False)

    pos_left = np.setdiff1d(pos_all, pos_idx) if disjoint else pos_all
    labels = np.where(rng.random(n_unl) < unlabeled_prior, 1, -1)
    need_pos, need_neg = int(np.sum(labels == 1)), int(np.sum(labels == -1))
    if len(pos_left) < need_pos or len(neg_all) < need_neg:
        raise DataError(
            f"pool too small for unlabeled draw (have {len(pos_left)} pos / "
            f"{len(neg_all)} neg, need {need_pos} / {need_neg})"
        )
    unl_idx = np.empty(n_unl, dtype=int)
    unl_idx[labels == 1] = rng.choice(pos_left, size=need_pos, replace=False)
    unl_idx[labels == -1] = rng.choice(neg_all, size=need_neg, replace=False)
    return PUDataset(pool_X[pos_idx], pool_X[unl_idx], labels)


def save_csv(path, X, labels=None, header: bool = False) -> None:
    """Write a numeric CSV; labels, when given, become the last column."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    with open(path, "w") as fh:
        if header:
            cols = [f"x{j}" for j in range(X.shape[1])]
            if labels is not None:
                cols.append("label")
            fh.write(",".join(cols) + "\n")
        for i in range(X.shape[0]):
            row = [repr(float(v)) for v in X[i]]
            if labels is not None:
                row.append(str(int(labels[i])))
            fh.write(",".join(row) + "\n")


def load_csv(path, labeled: Optional[bool] = None):
    """Read a numeric CSV written by ``save_csv`` or compatible tools.

    A leading non-numeric row is treated as a header and skipped.  When
    ``labeled`` is None the last column is taken as labels if every entry is
    exactly +1 or -1.  Returns ``(X, labels)`` with labels possibly None.
    """
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise DataError(f"{path} is empty")

    start = 0
    try:
        [float(v) for v in lines[0].split(",")]
    except ValueError:
        start = 1
        if len(lines) == 1:
            raise DataError(f"{path} has a header but no data rows")

    rows = []
    width = None
    for i, ln in enumerate(lines[start:], start=start + 1):
        cells = ln.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DataError(f"{path}: ragged row {i} has {len(cells)} cells, expected {width}")
        try:
            rows.append([float(v) for v in cells])
        except ValueError:
            bad = next(j for j, v in enumerate(cells) if not _is_float(v))
            raise DataError(f"{path}: non-numeric cell at row {i}, column {bad + 1}")
    data = np.asarray(rows, dtype=float)

    if labeled is None:
        last = data[:, -1]
        labeled = data.shape[1] > 1 and bool(np.all(np.isin(last, (-1.0, 1.0))))
    if labeled:
        if data.shape[1] < 2:
            raise DataError(f"{path}: labeled file needs at least one feature column")
        return data[:, :-1], data[:, -1].astype(int)
    return data, None


def load_pu_dataset(positives_path, unlabeled_path) -> PUDataset:
    """Assemble a PU dataset from two feature-only CSV files."""
    out = []
    for path in (positives_path, unlabeled_path):
        X, labels = load_csv(path)
        if labels is not None:
            raise DataError(f"{path} unexpectedly carries a label column")
        out.append(X)
    return PUDataset(out[0], out[1])


def _is_float(v: str) -> bool:
    try:
        float(v)
        return True
    except ValueError:
        return False
