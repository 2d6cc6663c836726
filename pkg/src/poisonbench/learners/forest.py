"""Random forest: bootstrap-resampled trees with per-node feature subsampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..domain import N_CLASSES, Dataset
from .tree import FitError, TreeConfig, TreeModel, grow_tree


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple[TreeModel, ...]
    bootstrap: bool
    seed: int

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def predict_proba(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        acc = np.zeros((X.shape[0], N_CLASSES))
        for t in self.trees:
            acc += t.predict_proba(X)
        return acc / len(self.trees)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def used_features(self) -> set[int]:
        return set().union(*(t.used_features() for t in self.trees))

    def to_dict(self) -> dict:
        return {
            "kind": "forest",
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> ForestModel:
        return cls(tuple(TreeModel.from_dict(t) for t in d["trees"]), bool(d["bootstrap"]), int(d["seed"]))


def tree_seed(seed: int, t: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(t,))


def fit_forest(
    train: Dataset,
    n_trees: int = 100,
    cfg: TreeConfig | None = None,
    seed: int = 0,
    bootstrap: bool = True,
) -> ForestModel:
    """Each tree draws its bootstrap sample and node feature subsets from its
    own stream derived from (seed, tree index), so tree order never matters."""
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if len(train) == 0:
        raise FitError("cannot fit a forest on an empty dataset")
    cfg = cfg or TreeConfig(feature_subsample="sqrt")
    X = np.ascontiguousarray(train.features)
    y = np.ascontiguousarray(train.labels)
    w = np.ones(len(train))
    n = len(train)
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng(tree_seed(seed, t))
        rows = np.sort(rng.integers(0, n, size=n)) if bootstrap else np.arange(n, dtype=np.int64)
        trees.append(grow_tree(X, y, w, rows.astype(np.int64), cfg, rng))
    return ForestModel(tuple(trees), bootstrap, seed)


def predict_forest(model: ForestModel, sample) -> np.ndarray:
    return model.predict_proba(np.asarray(sample, dtype=np.float64).reshape(1, -1))[0]
