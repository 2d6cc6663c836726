"""Multiclass AdaBoost (SAMME) over weighted CART base learners."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..domain import N_CLASSES, Dataset
from .tree import FitError, TreeConfig, TreeModel, grow_tree

PERFECT_ERR = 1e-10


def samme_alpha(err: float, n_classes: int = N_CLASSES) -> float:
    """ln((1 - err) / err) + ln(K - 1); positive iff err < (K - 1) / K."""
    if err <= PERFECT_ERR:
        return math.log(1.0 / PERFECT_ERR) + math.log(n_classes - 1)
    return math.log((1.0 - err) / err) + math.log(n_classes - 1)


@dataclass(frozen=True)
class RoundInfo:
    round: int
    err: float
    alpha: float
    accepted: bool
    weight_sum: float


@dataclass(frozen=True, eq=False)
class BoostModel:
    learners: tuple[TreeModel, ...]
    alphas: tuple[float, ...]
    n_rounds: int
    history: tuple[RoundInfo, ...] = field(default=(), repr=False)

    def votes(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        score = np.zeros((X.shape[0], N_CLASSES))
        rows = np.arange(X.shape[0])
        for tree, alpha in zip(self.learners, self.alphas):
            score[rows, tree.predict(X)] += alpha
        return score

    def predict_proba(self, X) -> np.ndarray:
        score = self.votes(X)
        return score / score.sum(axis=1, keepdims=True)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.votes(X), axis=1)

    def used_features(self) -> set[int]:
        return set().union(*(t.used_features() for t in self.learners))

    def to_dict(self) -> dict:
        return {
            "kind": "adaboost",
            "n_rounds": self.n_rounds,
            "alphas": list(self.alphas),
            "learners": [t.to_dict() for t in self.learners],
        }

    @classmethod
    def from_dict(cls, d: dict) -> BoostModel:
        return cls(
            tuple(TreeModel.from_dict(t) for t in d["learners"]),
            tuple(float(a) for a in d["alphas"]),
            int(d["n_rounds"]),
        )


def fit_adaboost(
    train: Dataset,
    n_rounds: int = 100,
    base_cfg: TreeConfig | None = None,
    seed: int = 0,
) -> BoostModel:
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    if len(train) == 0:
        raise FitError("cannot boost on an empty dataset")
    base_cfg = base_cfg or TreeConfig(max_depth=3)
    X = np.ascontiguousarray(train.features)
    y = np.ascontiguousarray(train.labels)
    n = len(train)
    rows = np.arange(n, dtype=np.int64)
    w = np.full(n, 1.0 / n)
    learners, alphas, history = [], [], []
    for m in range(n_rounds):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(m,)))
        tree = grow_tree(X, y, w, rows, base_cfg, rng)
        miss = tree.predict(X) != y
        err = float(np.sum(w[miss]) / np.sum(w))
        alpha = samme_alpha(err)
        if alpha <= 0:
            history.append(RoundInfo(m, err, alpha, False, float(w.sum())))
            continue
        learners.append(tree)
        alphas.append(alpha)
        if err <= PERFECT_ERR:
            history.append(RoundInfo(m, err, alpha, True, float(w.sum())))
            break
        w = w * np.exp(alpha * miss)
        w = w / w.sum()
        history.append(RoundInfo(m, err, alpha, True, float(w.sum())))
    if not learners:
        raise FitError(
            "every boosting round was rejected (weak learners no better than chance); "
            "use deeper base trees"
        )
    return BoostModel(tuple(learners), tuple(alphas), n_rounds, tuple(history))


def predict_adaboost(model: BoostModel, sample) -> np.ndarray:
    return model.predict_proba(np.asarray(sample, dtype=np.float64).reshape(1, -1))[0]
