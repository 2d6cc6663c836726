"""Permutation feature importance (accuracy drop) and per-electrode totals."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .domain import N_FEATURES, Dataset, FeatureSchema


@dataclass(frozen=True, eq=False)
class ImportanceReport:
    mean: np.ndarray
    std: np.ndarray
    samples: np.ndarray  # (features, repeats) accuracy drops
    baseline: float
    repeats: int
    seed: int
    schema: FeatureSchema = field(default_factory=FeatureSchema)
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")

    @property
    def electrode_scores(self) -> np.ndarray:
        return aggregate_importance_by_electrode(self, self.schema)

    def ranking(self) -> list[int]:
        """Feature indices by decreasing mean importance (stable)."""
        return [int(i) for i in np.argsort(-self.mean, kind="stable")]

    def to_dict(self) -> dict:
        feats = []
        for j in range(len(self.mean)):
            electrode, band = self.schema.feature_location(j)
            feats.append({
                "index": j,
                "feature": self.schema.feature_name(j),
                "electrode": electrode,
                "band": band,
                "mean": float(self.mean[j]),
                "std": float(self.std[j]),
                "samples": [float(v) for v in self.samples[j]],
            })
        return {
            "context": dict(self.context),
            "metric": "accuracy_drop",
            "baseline_accuracy": self.baseline,
            "repeats": self.repeats,
            "seed": self.seed,
            "features": feats,
            "electrodes": {e: float(s) for e, s in zip(self.schema.electrodes, self.electrode_scores)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """Long format: one row per feature."""
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["feature", "electrode", "band", "mean", "stddev", "model", "attack", "rate"])
        for j in range(len(self.mean)):
            electrode, band = self.schema.feature_location(j)
            w.writerow([
                self.schema.feature_name(j), electrode, band,
                repr(float(self.mean[j])), repr(float(self.std[j])),
                self.context.get("model", ""), self.context.get("attack", ""), self.context.get("rate", ""),
            ])
        return out.getvalue()


def _accuracy(model, X, y) -> float:
    return float(np.mean(model.predict(X) == y))


def permutation_importance(model, data: Dataset, repeats: int = 5, seed: int = 0, context=None) -> ImportanceReport:
    """Mean and spread of the accuracy drop when one column is shuffled.

    Each (feature, repeat) cell draws its permutation from a stream keyed by
    (seed, feature, repeat); ``data`` itself is never modified.
    """
    if len(data) == 0:
        raise ValueError("permutation importance needs a nonempty evaluation set")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    X = np.array(data.features, dtype=np.float64, copy=True)
    y = data.labels
    baseline = _accuracy(model, X, y)
    n_features = X.shape[1]
    drops = np.zeros((n_features, repeats))
    for j in range(n_features):
        original = X[:, j].copy()
        for r in range(repeats):
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(j, r)))
            X[:, j] = original[rng.permutation(original.size)]
            drops[j, r] = baseline - _accuracy(model, X, y)
        X[:, j] = original
    return ImportanceReport(
        mean=drops.mean(axis=1),
        std=drops.std(axis=1),
        samples=drops,
        baseline=baseline,
        repeats=repeats,
        seed=seed,
        schema=data.schema,
        context=dict(context or {}),
    )


def aggregate_importance_by_electrode(report: ImportanceReport, schema: FeatureSchema | None = None) -> np.ndarray:
    schema = schema or report.schema
    mean = np.asarray(report.mean, dtype=np.float64)
    if mean.shape != (N_FEATURES,):
        raise ValueError(f"importance report covers {mean.size} features, expected {N_FEATURES}")
    return np.array([float(np.sum(mean[schema.electrode_features(e)])) for e in schema.electrodes])
