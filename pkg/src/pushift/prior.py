"""Class-prior estimation by sweeping thresholds over a trained score.

The estimator scans every thresholding h(x) = +1 iff r(x) >= theta and
returns the smallest ratio of the unlabeled acceptance rate to the positive
acceptance rate, restricted to thresholds whose positive acceptance rate
clears a finite-sample confidence floor ``gamma_bar``.  Only the ordering of
the scores matters, so any strictly increasing transform of r leaves the
estimate unchanged.

``ThresholdIntervals`` is a lossless summary of the positive acceptance rate
as a function of the threshold.  Shipping it (instead of the raw positive
scores) is enough to rerun the same sweep against fresh unlabeled data at
test time, which is how the test-time class-prior is estimated without
retaining any training data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegeneratePriorError

__all__ = [
    "PriorEstimate",
    "ThresholdIntervals",
    "epsilon",
    "gamma_bar",
    "estimate_prior",
    "build_intervals",
    "estimate_test_prior",
]


def epsilon(n: int, delta: float) -> float:
    """Confidence radius for an empirical acceptance rate at sample size n."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    return math.sqrt(4.0 * math.log(math.e * n / 2.0) / n) + math.sqrt(
        math.log(2.0 / delta) / (2.0 * n)
    )


def gamma_bar(n_pos: int, n_unl: int, gamma: float) -> float:
    """Admissibility floor for the positive acceptance rate.

    Values >= 1 mean no thresholding hypothesis is admissible at these
    sample sizes; callers treat that as a degenerate condition.
    """
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    return max(epsilon(n_pos, 1.0 / n_pos), epsilon(n_unl, 1.0 / n_unl)) / gamma


@dataclass(frozen=True)
class PriorEstimate:
    value: float
    raw_value: float
    argmin_threshold: float
    gamma_bar: float
    n_pos_used: int
    n_unl_used: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "raw_value": self.raw_value,
            "argmin_threshold": self.argmin_threshold,
            "gamma_bar": self.gamma_bar,
            "n_pos_used": self.n_pos_used,
            "n_unl_used": self.n_unl_used,
        }


def _acceptance_counts(sorted_values, thresholds):
    """Number of values >= each threshold, given values sorted ascending."""
    return sorted_values.size - np.searchsorted(sorted_values, thresholds, side="left")


def _sweep(thresholds, p_plus, p_top, gbar, n_pos, n_top):
    admissible = p_plus > gbar
    if not np.any(admissible):
        raise DegeneratePriorError(gbar, n_pos, n_top)
    ratios = np.full_like(p_plus, np.inf)
    np.divide(p_top, p_plus, out=ratios, where=admissible)
    k = int(np.argmin(ratios))
    raw = float(ratios[k])
    return PriorEstimate(
        value=min(1.0, max(0.0, raw)),
        raw_value=raw,
        argmin_threshold=float(thresholds[k]),
        gamma_bar=float(gbar),
        n_pos_used=n_pos,
        n_unl_used=n_top,
    )


def estimate_prior(r_pos, r_unl, gamma: float = 0.5) -> PriorEstimate:
    """Estimate the positive class-prior from scores on P and U samples.

    Threshold candidates are every attained score value plus sentinels; both
    acceptance rates are step functions with breakpoints there, so the
    infimum over all real thresholds is attained on this finite set.
    """
    rp = np.sort(np.asarray(r_pos, dtype=float).reshape(-1))
    ru = np.sort(np.asarray(r_unl, dtype=float).reshape(-1))
    if rp.size == 0 or ru.size == 0:
        raise ValueError("score lists must be nonempty")
    gbar = gamma_bar(rp.size, ru.size, gamma)
    if gbar >= 1.0:
        raise DegeneratePriorError(gbar, rp.size, ru.size)

    thresholds = np.concatenate(([-np.inf], np.unique(np.concatenate((rp, ru))), [np.inf]))
    p_plus = _acceptance_counts(rp, thresholds) / rp.size
    p_unl = _acceptance_counts(ru, thresholds) / ru.size
    return _sweep(thresholds, p_plus, p_unl, gbar, rp.size, ru.size)


@dataclass(frozen=True)
class ThresholdIntervals:
    """Positive acceptance rate as a step function of the threshold.

    ``boundaries`` are the strictly increasing distinct score values attained
    on the positive set; ``accept_counts[i]`` is the number of positive
    scores >= boundaries[i].  ``reconstruct`` recovers the acceptance rate of
    any threshold exactly, so the summary is lossless for the sweep.
    """

    boundaries: np.ndarray
    accept_counts: np.ndarray
    n_pos: int
    gamma: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "boundaries", np.asarray(self.boundaries, dtype=float))
        object.__setattr__(self, "accept_counts", np.asarray(self.accept_counts, dtype=int))
        self.validate()

    def validate(self):
        b, c = self.boundaries, self.accept_counts
        if b.ndim != 1 or b.shape != c.shape or b.size == 0:
            raise DataError("interval boundaries and counts must be aligned and nonempty")
        if np.any(np.diff(b) <= 0):
            raise DataError("interval boundaries must be strictly increasing")
        if np.any(np.diff(c) >= 0):
            raise DataError("acceptance counts must be strictly decreasing")
        if c[0] != self.n_pos or c[-1] < 1 or np.any(c > self.n_pos):
            raise DataError("acceptance counts are inconsistent with n_pos")
        if not (0.0 < self.gamma < 1.0):
            raise DataError(f"gamma must be in (0, 1), got {self.gamma}")

    def reconstruct(self, thresholds):
        """Fraction of the positive set scoring >= each threshold."""
        t = np.asarray(thresholds, dtype=float)
        idx = np.searchsorted(self.boundaries, t, side="left")
        counts = np.where(idx < self.boundaries.size, self.accept_counts[np.minimum(idx, self.boundaries.size - 1)], 0)
        return counts / self.n_pos

    def to_dict(self) -> dict:
        return {
            "n_pos": int(self.n_pos),
            "gamma": self.gamma,
            "boundaries": self.boundaries.tolist(),
            "accept_counts": self.accept_counts.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ThresholdIntervals":
        try:
            return cls(
                boundaries=np.asarray(doc["boundaries"], dtype=float),
                accept_counts=np.asarray(doc["accept_counts"], dtype=int),
                n_pos=int(doc["n_pos"]),
                gamma=float(doc.get("gamma", 0.5)),
            )
        except KeyError as exc:
            raise DataError(f"interval document is missing field {exc}") from exc

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ThresholdIntervals":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read intervals file {path}: {exc}") from exc
        return cls.from_dict(doc)


def build_intervals(r_pos, gamma: float = 0.5) -> ThresholdIntervals:
    """Summarize positive-set scores into their acceptance step function."""
    rp = np.asarray(r_pos, dtype=float).reshape(-1)
    if rp.size == 0:
        raise ValueError("r_pos must be nonempty")
    values, counts = np.unique(rp, return_counts=True)
    accept = counts[::-1].cumsum()[::-1]
    return ThresholdIntervals(boundaries=values, accept_counts=accept, n_pos=rp.size, gamma=gamma)


def estimate_test_prior(intervals: ThresholdIntervals, r_test_unl, gamma: float = None) -> PriorEstimate:
    """Estimate a shifted class-prior from test scores and a saved summary.

    Runs the same sweep as ``estimate_prior`` with the positive acceptance
    rate read from ``intervals``; the raw positive scores are not needed.
    """
    ru = np.sort(np.asarray(r_test_unl, dtype=float).reshape(-1))
    if ru.size == 0:
        raise ValueError("test score list must be nonempty")
    g = intervals.gamma if gamma is None else gamma
    gbar = gamma_bar(intervals.n_pos, ru.size, g)
    if gbar >= 1.0:
        raise DegeneratePriorError(gbar, intervals.n_pos, ru.size)

    thresholds = np.concatenate(
        ([-np.inf], np.unique(np.concatenate((intervals.boundaries, ru))), [np.inf])
    )
    p_plus = intervals.reconstruct(thresholds)
    p_test = _acceptance_counts(ru, thresholds) / ru.size
    return _sweep(thresholds, p_plus, p_test, gbar, intervals.n_pos, ru.size)
