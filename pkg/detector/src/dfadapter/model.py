"""Linear baseline detector over residual features.

A scikit-learn style estimator (``fit`` / ``predict_proba`` / ``get_params``)
wrapping feature standardization and a logistic regression whose
regularization is scaled so that duplicating the training set leaves the
fitted weights unchanged. Models persist as JSON, never pickle.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import roc_auc_score

from .features import FEATURE_NAMES, N_FEATURES, featurize, load_image

MODEL_FORMAT = "dfadapter-linear-v1"


class ResidualForensicsClassifier(BaseEstimator, ClassifierMixin):
    """Standardized logistic regression on the residual feature vector.

    ``reg_strength`` is the effective inverse regularization in mean-loss
    form: internally C = reg_strength / n_samples, which makes the fit
    invariant to duplicating the training rows.
    """

    def __init__(self, reg_strength: float = 1000.0, max_iter: int = 2000, tol: float = 1e-8):
        self.reg_strength = reg_strength
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if len(set(y.tolist())) < 2:
            raise ValueError("training data must contain both classes")
        self.mean_ = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0.0] = 1.0
        self.scale_ = scale
        z = (X - self.mean_) / self.scale_
        clf = LogisticRegression(
            C=self.reg_strength / len(y),
            solver="lbfgs",
            max_iter=self.max_iter,
            tol=self.tol,
        )
        clf.fit(z, y)
        self.coef_ = clf.coef_[0].copy()
        self.intercept_ = float(clf.intercept_[0])
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X):
        if not hasattr(self, "coef_"):
            raise NotFittedError("fit the classifier first")
        z = (np.asarray(X, dtype=np.float64) - self.mean_) / self.scale_
        return z @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        margin = self.decision_function(X)
        fake = 1.0 / (1.0 + np.exp(-margin))
        return np.column_stack([1.0 - fake, fake])

    def predict(self, X):
        return (self.decision_function(X) >= 0.0).astype(np.int64)


@dataclass(frozen=True)
class BaselineModel:
    """Portable form of a fitted classifier plus its TTA default."""

    mean: np.ndarray
    scale: np.ndarray
    coef: np.ndarray
    intercept: float
    train_auc: float

    def score_features(self, features: np.ndarray) -> float:
        z = (features - self.mean) / self.scale
        margin = float(z @ self.coef + self.intercept)
        if margin >= 0:
            return 1.0 / (1.0 + math.exp(-margin))
        e = math.exp(margin)
        return e / (1.0 + e)

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": MODEL_FORMAT,
                "feature_names": FEATURE_NAMES,
                "mean": self.mean.tolist(),
                "scale": self.scale.tolist(),
                "coef": self.coef.tolist(),
                "intercept": self.intercept,
                "train_auc": self.train_auc,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "BaselineModel":
        payload = json.loads(text)
        if payload.get("format") != MODEL_FORMAT:
            raise ValueError(f"unsupported model format {payload.get('format')!r}")
        if payload["feature_names"] != FEATURE_NAMES:
            raise ValueError("model feature order does not match this build")
        return cls(
            mean=np.array(payload["mean"], dtype=np.float64),
            scale=np.array(payload["scale"], dtype=np.float64),
            coef=np.array(payload["coef"], dtype=np.float64),
            intercept=float(payload["intercept"]),
            train_auc=float(payload["train_auc"]),
        )

    @classmethod
    def load(cls, path: str | Path) -> "BaselineModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


def read_manifest_items(path: str | Path) -> list[dict[str, str]]:
    """Rows of a harness manifest or participant-view CSV (id,path[,label])."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"id", "path"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected at least id,path columns, got {reader.fieldnames}")
        return list(reader)


def fit_baseline(manifest_path: str | Path, images_root: str | Path | None = None) -> BaselineModel:
    """Fit the linear baseline on a labeled manifest; reports training AUC."""
    rows = read_manifest_items(manifest_path)
    if not rows or "label" not in rows[0]:
        raise ValueError(f"{manifest_path}: fitting needs a labeled manifest")
    root = Path(images_root) if images_root is not None else Path(manifest_path).parent
    features = np.stack([featurize(load_image(root / row["path"])) for row in rows])
    labels = np.array([int(row["label"]) for row in rows], dtype=np.int64)
    clf = ResidualForensicsClassifier().fit(features, labels)
    train_auc = float(roc_auc_score(labels, clf.predict_proba(features)[:, 1]))
    return BaselineModel(
        mean=clf.mean_,
        scale=clf.scale_,
        coef=clf.coef_,
        intercept=clf.intercept_,
        train_auc=train_auc,
    )


def tta_views(image: np.ndarray, tta: str) -> list[np.ndarray]:
    """Deterministic views scored and averaged: off, flip, or flip3."""
    if tta == "off":
        return [image]
    if tta == "flip":
        return [image, image[:, ::-1]]
    if tta == "flip3":
        return [image, image[:, ::-1], np.rot90(image)]
    raise ValueError(f"unknown tta mode {tta!r} (use off, flip, or flip3)")


def score_image(model: BaselineModel, image: np.ndarray, tta: str = "off") -> float:
    scores = [model.score_features(featurize(np.ascontiguousarray(view))) for view in tta_views(image, tta)]
    return float(np.mean(scores))


def run(
    manifest_path: str | Path,
    model: BaselineModel,
    tta: str = "off",
    images_root: str | Path | None = None,
) -> list[tuple[str, float]]:
    """Score every manifest row; unreadable images score 0.5 and are logged."""
    rows = read_manifest_items(manifest_path)
    root = Path(images_root) if images_root is not None else Path(manifest_path).parent
    out: list[tuple[str, float]] = []
    for row in rows:
        try:
            image = load_image(root / row["path"])
            out.append((row["id"], score_image(model, image, tta)))
        except OSError as exc:
            print(f"warning: {row['id']}: {exc}; scoring 0.5", file=sys.stderr)
            out.append((row["id"], 0.5))
    return out
