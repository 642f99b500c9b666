"""Score-combination primitives for detector ensembles.

Pure operations over per-image detector outputs: logit-space averaging,
weighted probability mixing, discretized voting, rank calibration,
robustness-weighted ensembling with flip TTA, and top-k patch pooling.
Weights are normalized internally, so callers may pass ratios (e.g. 1:2:2)
verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .metrics import average_ranks


@dataclass(frozen=True)
class LogitPair:
    """Pre-sigmoid real/fake logits from a two-logit detector head."""

    l_real: float
    l_fake: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.l_real) and math.isfinite(self.l_fake)):
            raise ValueError("logits must be finite")


@dataclass(frozen=True)
class FusionWeights:
    """Nonnegative mixing weights; ratios are fine, normalization is internal."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("weights must be nonempty")
        if any(not math.isfinite(v) or v < 0.0 for v in values):
            raise ValueError(f"weights must be finite and nonnegative, got {values}")
        if sum(values) <= 0.0:
            raise ValueError("weights must not all be zero")
        object.__setattr__(self, "values", values)

    def normalized(self) -> np.ndarray:
        arr = np.asarray(self.values, dtype=np.float64)
        return arr / arr.sum()

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class RobustWeighting:
    """Ensemble weights derived from per-model AUC under degradations."""

    robust_aucs: tuple[float, ...]

    def __post_init__(self) -> None:
        aucs = tuple(float(a) for a in self.robust_aucs)
        if not aucs:
            raise ValueError("need at least one model AUC")
        if any(not math.isfinite(a) or a <= 0.0 or a > 1.0 for a in aucs):
            raise ValueError(f"robust AUCs must lie in (0, 1], got {aucs}")
        object.__setattr__(self, "robust_aucs", aucs)

    @property
    def weights(self) -> np.ndarray:
        arr = np.asarray(self.robust_aucs, dtype=np.float64)
        return arr / arr.sum()


TTA_VIEWS = ("original", "hflip", "rot90", "center_crop", "direct_resize")


def _coerce_weights(w: FusionWeights | RobustWeighting | Sequence[float], n: int) -> np.ndarray:
    if isinstance(w, RobustWeighting):
        weights = w.weights
    elif isinstance(w, FusionWeights):
        weights = w.normalized()
    else:
        weights = FusionWeights(tuple(w)).normalized()
    if len(weights) != n:
        raise ValueError(f"expected {n} weights, got {len(weights)}")
    return weights


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def logit_evidence(lp: LogitPair) -> float:
    """Directional evidence: fake logit minus real logit."""
    return lp.l_fake - lp.l_real


def mean_logit_fuse(evidences: Sequence[float], w: FusionWeights | Sequence[float] | None = None) -> float:
    """Weighted mean of evidence scores pushed through a sigmoid.

    Fusing in evidence space before the sigmoid retains each model's full
    confidence range; uniform weights reproduce plain logit averaging.
    """
    evidences = [float(e) for e in evidences]
    if not evidences:
        raise ValueError("need at least one evidence score")
    if any(not math.isfinite(e) for e in evidences):
        raise ValueError("evidence scores must be finite")
    weights = _coerce_weights(w if w is not None else [1.0] * len(evidences), len(evidences))
    return sigmoid(float(np.dot(weights, evidences)))


def weighted_prob_fuse(probs: Sequence[float], w: FusionWeights | Sequence[float]) -> float:
    """Convex combination of probabilities (e.g. the 0.35/0.65 head mix)."""
    probs = [float(p) for p in probs]
    if any(not 0.0 <= p <= 1.0 for p in probs):
        raise ValueError(f"probabilities must lie in [0, 1], got {probs}")
    weights = _coerce_weights(w, len(probs))
    return float(np.dot(weights, probs))


def quantize_prob(p: float) -> float:
    """Snap a probability onto the 11-level grid {0.0, 0.1, ..., 1.0}.

    Exact midpoints round half away from zero; idempotent by construction.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return math.floor(p * 10.0 + 0.5) / 10.0


def discretized_vote(quantized: Sequence[float], w: FusionWeights | Sequence[float]) -> float:
    """Weighted mean of already-quantized probabilities (e.g. 1:2:2 voting)."""
    quantized = [float(q) for q in quantized]
    for q in quantized:
        if not 0.0 <= q <= 1.0 or q != quantize_prob(q):
            raise ValueError(f"input {q} is not quantized to 0.1 steps")
    weights = _coerce_weights(w, len(quantized))
    return float(np.dot(weights, quantized))


def rank_normalize(scores: Sequence[float]) -> np.ndarray:
    """Map scores to [0, 1] by ascending rank; ties get the averaged rank.

    The result is invariant to any strictly increasing recalibration of the
    input scores.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.size < 2:
        raise ValueError("rank normalization needs at least two scores")
    return (average_ranks(scores) - 1.0) / (scores.size - 1.0)


def rank_fuse(model_scores: Sequence[Sequence[float]], w: FusionWeights | Sequence[float]) -> np.ndarray:
    """Weighted sum of per-model rank-normalized score vectors."""
    vectors = [np.asarray(s, dtype=np.float64) for s in model_scores]
    if not vectors:
        raise ValueError("need at least one model")
    n = vectors[0].size
    if any(v.size != n for v in vectors):
        raise ValueError("all models must score the same items")
    weights = _coerce_weights(w, len(vectors))
    fused = np.zeros(n, dtype=np.float64)
    for weight, vector in zip(weights, vectors):
        fused += weight * rank_normalize(vector)
    return fused


def robust_weights(aucs: Sequence[float]) -> RobustWeighting:
    """Normalize per-model robust AUCs into ensemble weights."""
    return RobustWeighting(tuple(aucs))


def tta_fuse(
    view_scores: Sequence[Sequence[float]],
    w: FusionWeights | RobustWeighting | Sequence[float] | None = None,
) -> float:
    """Mean over views of the weighted per-model sum.

    ``view_scores[v][k]`` is model ``k``'s probability on view ``v``. With two
    views (original, hflip) this is the flip-TTA ensemble; it generalizes to
    3-view and 4-view schemes unchanged.
    """
    if not view_scores:
        raise ValueError("need at least one view")
    n_models = len(view_scores[0])
    if n_models == 0:
        raise ValueError("each view must provide at least one model score")
    rows = []
    for v, scores in enumerate(view_scores):
        if len(scores) != n_models:
            raise ValueError(f"view {v} provides {len(scores)} scores, expected {n_models}")
        rows.append([float(s) for s in scores])
    weights = _coerce_weights(w if w is not None else [1.0] * n_models, n_models)
    per_view = [float(np.dot(weights, row)) for row in rows]
    return float(np.mean(per_view))


def topk_pool(
    patch_scores: Sequence[float],
    fraction: float | None = None,
    count: int | None = None,
    mode: str = "mean",
) -> float:
    """Aggregate patch responses by their top-k subset.

    ``fraction`` converts to a count by round-half-away, floored at 1.
    ``mean`` averages the selected scores; ``softmax`` returns their
    softmax-weighted average, emphasizing the strongest responses.
    """
    scores = np.asarray(patch_scores, dtype=np.float64)
    if scores.ndim != 1 or scores.size == 0:
        raise ValueError("patch scores must be a nonempty 1-D sequence")
    if (fraction is None) == (count is None):
        raise ValueError("pass exactly one of fraction or count")
    if fraction is not None:
        if not 0.0 < fraction <= 1.0:
            raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
        count = max(1, int(math.floor(fraction * scores.size + 0.5)))
    if count < 1 or count > scores.size:
        raise ValueError(f"count {count} outside [1, {scores.size}]")
    top = np.sort(scores)[-count:]
    if mode == "mean":
        return float(np.mean(top))
    if mode == "softmax":
        shifted = np.exp(top - top.max())
        return float(np.dot(shifted / shifted.sum(), top))
    raise ValueError(f"unknown pooling mode {mode!r}")


def topk_count(n_patches: int, fraction: float) -> int:
    """Number of patches selected at a given fraction (round, floor at 1)."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    return max(1, int(math.floor(fraction * n_patches + 0.5)))
