"""CART classification tree with weighted gini splits."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _core
from ..domain import N_CLASSES, N_FEATURES, Dataset


class FitError(ValueError):
    pass


def gini_impurity(class_counts) -> float:
    counts = [float(c) for c in class_counts]
    if any(c < 0 for c in counts):
        raise ValueError("class counts must be nonnegative")
    n = sum(counts)
    if n <= 0:
        raise ValueError("gini impurity is undefined for an empty node")
    s = 0.0
    for c in counts:
        p = c / n
        s += p * p
    return 1.0 - s


def find_best_split(features, labels, candidate_features=None):
    """Unweighted best split, or None when no split reduces impurity.

    Thresholds are midpoints between consecutive distinct values; ties go to
    the lower feature index, then the lower threshold.
    """
    X = np.ascontiguousarray(features, dtype=np.float64)
    y = np.ascontiguousarray(labels, dtype=np.int64)
    if X.shape[0] < 2:
        return None
    if candidate_features is None:
        candidate_features = range(X.shape[1])
    f, thr, gain = _core.best_split(X, y, np.ones(y.size), np.arange(y.size), candidate_features, N_CLASSES)
    if f < 0:
        return None
    return f, thr, gain


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int | None = None
    min_samples_split: int = 2
    feature_subsample: str | int = "all"

    def __post_init__(self):
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0 or None")
        fs = self.feature_subsample
        if isinstance(fs, str):
            if fs not in ("all", "sqrt"):
                raise ValueError(f"feature_subsample must be 'all', 'sqrt' or an int, got {fs!r}")
        elif not 1 <= int(fs) <= N_FEATURES:
            raise ValueError(f"feature_subsample must be in 1..{N_FEATURES}")

    def n_candidate_features(self, n_features: int = N_FEATURES) -> int:
        if self.feature_subsample == "all":
            return n_features
        if self.feature_subsample == "sqrt":
            return max(1, int(math.isqrt(n_features)))
        return int(self.feature_subsample)

    def to_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "feature_subsample": self.feature_subsample,
        }


@dataclass(frozen=True, eq=False)
class TreeModel:
    """Flat preorder node arrays; ``feature == -1`` marks a leaf.

    ``value[node]`` holds the (weighted) class proportions of the training
    samples that reached the node.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature < 0))

    def depth(self) -> int:
        d = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                d[self.left[i]] = d[self.right[i]] = d[i] + 1
        return int(d.max())

    def apply(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        return _core.apply_tree(X, self.feature, self.threshold, self.left, self.right)

    def predict_proba(self, X) -> np.ndarray:
        return self.value[self.apply(X)]

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def used_features(self) -> set[int]:
        return {int(f) for f in self.feature if f >= 0}

    def to_dict(self) -> dict:
        return {
            "kind": "tree",
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> TreeModel:
        return cls(
            np.asarray(d["feature"], dtype=np.int64),
            np.asarray(d["threshold"], dtype=np.float64),
            np.asarray(d["left"], dtype=np.int64),
            np.asarray(d["right"], dtype=np.int64),
            np.asarray(d["value"], dtype=np.float64).reshape(-1, N_CLASSES),
        )


def _leaf_value(y, w, rows) -> np.ndarray:
    totals = np.bincount(y[rows], weights=w[rows], minlength=N_CLASSES)
    s = totals.sum()
    if not s > 0:
        totals = np.bincount(y[rows], minlength=N_CLASSES).astype(np.float64)
        s = totals.sum()
    return totals / s


def grow_tree(X, y, w, rows, cfg: TreeConfig, rng: np.random.Generator) -> TreeModel:
    """Grow a tree on ``X[rows]``; ``rows`` may repeat (bootstrap)."""
    n_features = X.shape[1]
    m_try = cfg.n_candidate_features(n_features)
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(node_rows):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(_leaf_value(y, w, node_rows))
        return len(feature) - 1

    root = new_node(rows)
    stack = [(root, rows, 0)]
    while stack:
        node, node_rows, depth = stack.pop()
        if cfg.max_depth is not None and depth >= cfg.max_depth:
            continue
        if node_rows.size < cfg.min_samples_split:
            continue
        node_y = y[node_rows]
        if np.all(node_y == node_y[0]):
            continue
        if m_try < n_features:
            candidates = rng.choice(n_features, size=m_try, replace=False)
        else:
            candidates = range(n_features)
        f, thr, _ = _core.best_split(X, y, w, node_rows, candidates, N_CLASSES)
        if f < 0:
            continue
        goes_left = X[node_rows, f] <= thr
        lrows, rrows = node_rows[goes_left], node_rows[~goes_left]
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node(lrows)
        right[node] = new_node(rrows)
        # right pushed first so the left subtree is expanded first
        stack.append((right[node], rrows, depth + 1))
        stack.append((left[node], lrows, depth + 1))

    return TreeModel(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64).reshape(-1, N_CLASSES),
    )


def fit_tree(train: Dataset, weights=None, cfg: TreeConfig | None = None, seed: int = 0) -> TreeModel:
    cfg = cfg or TreeConfig()
    if len(train) == 0:
        raise FitError("cannot fit a tree on an empty dataset")
    X = np.ascontiguousarray(train.features)
    y = np.ascontiguousarray(train.labels)
    if weights is None:
        w = np.ones(len(train))
    else:
        w = np.ascontiguousarray(weights, dtype=np.float64)
        if w.shape != y.shape or np.any(w < 0) or not w.sum() > 0:
            raise FitError("weights must be nonnegative, one per sample, with positive sum")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return grow_tree(X, y, w, np.arange(len(train), dtype=np.int64), cfg, rng)


def predict_tree(model: TreeModel, sample) -> np.ndarray:
    x = np.asarray(sample, dtype=np.float64).reshape(1, -1)
    return model.predict_proba(x)[0]
