"""Threshold-free scoring: ROC-AUC with tie handling, per-group breakdowns,
and bootstrap confidence intervals.

The AUC here is the Mann-Whitney statistic: over all (fake, real) pairs, a
fake scoring strictly higher counts 1, an exact tie counts 0.5. The
implementation uses tie-averaged ranks, which matches the pairwise
definition exactly; it never silently reports 0.5 for degenerate input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .rng import RngStream


class UndefinedMetricError(ValueError):
    """AUC is undefined: the input does not contain both classes."""


@dataclass(frozen=True)
class LabeledScores:
    """Per-item detector scores joined with hidden labels.

    ``groups`` optionally tags each item (degradation kind, fake method) for
    per-group breakdowns.
    """

    ids: tuple[str, ...]
    scores: np.ndarray
    labels: np.ndarray
    groups: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if scores.shape != labels.shape or scores.ndim != 1:
            raise ValueError("scores and labels must be 1-D arrays of equal length")
        if len(self.ids) != len(scores):
            raise ValueError("ids and scores must have equal length")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        if not np.all((labels == 0) | (labels == 1)):
            raise ValueError("labels must be 0 (real) or 1 (fake)")
        if self.groups is not None and len(self.groups) != len(scores):
            raise ValueError("groups must match item count")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_items(cls, items: Sequence[tuple[str, float, int]], groups: Sequence[str] | None = None) -> "LabeledScores":
        ids = tuple(i for i, _, _ in items)
        scores = np.array([s for _, s, _ in items], dtype=np.float64)
        labels = np.array([l for _, _, l in items], dtype=np.int64)
        return cls(ids=ids, scores=scores, labels=labels, groups=tuple(groups) if groups is not None else None)

    def __len__(self) -> int:
        return len(self.ids)


def average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks in ascending order; tied values share the average rank."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=np.float64)
    ranks[order] = np.arange(1, len(values) + 1, dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(sorted_vals):
        j = i
        while j + 1 < len(sorted_vals) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        if j > i:
            ranks[order[i : j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def auc_from_arrays(scores: np.ndarray, labels: np.ndarray) -> float:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_fake = int(np.sum(labels == 1))
    n_real = int(np.sum(labels == 0))
    if n_fake == 0 or n_real == 0:
        raise UndefinedMetricError(
            f"AUC needs both classes; got {n_fake} fake and {n_real} real items"
        )
    ranks = average_ranks(scores)
    rank_sum = float(np.sum(ranks[labels == 1]))
    u = rank_sum - n_fake * (n_fake + 1) / 2.0
    return u / (n_fake * n_real)


def auc(ls: LabeledScores) -> float:
    """Probability a random fake outscores a random real, ties counting half."""
    return auc_from_arrays(ls.scores, ls.labels)


def per_group_auc(ls: LabeledScores) -> dict[str, float]:
    """AUC per group tag: that group's fakes against the full real pool.

    Groups with no fake items are omitted (their AUC is undefined under this
    pairing). Real items contribute to every group's comparison pool.
    """
    if ls.groups is None:
        raise ValueError("per_group_auc requires group tags")
    real_scores = ls.scores[ls.labels == 0]
    if real_scores.size == 0:
        raise UndefinedMetricError("AUC needs at least one real item")
    out: dict[str, float] = {}
    for group in sorted(set(ls.groups)):
        member = np.array([g == group for g in ls.groups])
        fake_scores = ls.scores[member & (ls.labels == 1)]
        if fake_scores.size == 0:
            continue
        scores = np.concatenate([fake_scores, real_scores])
        labels = np.concatenate([np.ones(fake_scores.size, np.int64), np.zeros(real_scores.size, np.int64)])
        out[group] = auc_from_arrays(scores, labels)
    return out


def bootstrap_ci(
    ls: LabeledScores,
    n_resamples: int = 1000,
    level: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap interval for AUC over stratified resamples.

    Fakes and reals are resampled separately with replacement, so every
    resample keeps both classes; deterministic under ``seed``.
    """
    if n_resamples < 100:
        raise ValueError(f"n_resamples must be >= 100, got {n_resamples}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    fake = ls.scores[ls.labels == 1]
    real = ls.scores[ls.labels == 0]
    if fake.size == 0 or real.size == 0:
        raise UndefinedMetricError("bootstrap_ci needs both classes")
    gen = RngStream(seed, "bootstrap-auc").generator()
    stats = np.empty(n_resamples, dtype=np.float64)
    labels = np.concatenate([np.ones(fake.size, np.int64), np.zeros(real.size, np.int64)])
    for i in range(n_resamples):
        f = fake[gen.integers(0, fake.size, fake.size)]
        r = real[gen.integers(0, real.size, real.size)]
        stats[i] = auc_from_arrays(np.concatenate([f, r]), labels)
    lo = (1.0 - level) / 2.0
    low, high = np.quantile(stats, [lo, 1.0 - lo])
    return float(low), float(high)
