"""From-scratch CART tree, random forest and SAMME AdaBoost.

Models serialize to plain JSON-compatible dicts (``to_dict``):

* tree: ``{"kind": "tree", "feature", "threshold", "left", "right", "value"}``,
  parallel preorder node arrays, ``feature = -1`` and ``left = right = -1`` at
  leaves, ``value`` a list of 4-class proportions per node.
* forest: ``{"kind": "forest", "bootstrap", "seed", "trees": [tree, ...]}``
* adaboost: ``{"kind": "adaboost", "n_rounds", "alphas", "learners": [tree, ...]}``
"""
from .boost import BoostModel, RoundInfo, fit_adaboost, predict_adaboost, samme_alpha
from .forest import ForestModel, fit_forest, predict_forest
from .tree import (
    FitError,
    TreeConfig,
    TreeModel,
    find_best_split,
    fit_tree,
    gini_impurity,
    predict_tree,
)

_KINDS = {"tree": TreeModel, "forest": ForestModel, "adaboost": BoostModel}


def model_from_dict(d: dict):
    try:
        return _KINDS[d["kind"]].from_dict(d)
    except KeyError:
        raise ValueError(f"unknown model kind {d.get('kind')!r}") from None


__all__ = [
    "BoostModel", "FitError", "ForestModel", "RoundInfo", "TreeConfig", "TreeModel",
    "find_best_split", "fit_adaboost", "fit_forest", "fit_tree", "gini_impurity",
    "model_from_dict", "predict_adaboost", "predict_forest", "predict_tree", "samme_alpha",
]
