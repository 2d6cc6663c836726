"""Accuracy, precision/recall/F1 and multiclass log loss over 4 risk classes."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .domain import N_CLASSES

AVERAGING_MODES = ("macro", "weighted")


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """counts[true, predicted]."""

    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion_matrix(y_true, y_pred) -> ConfusionMatrix:
    t = np.asarray(y_true, dtype=np.int64).ravel()
    p = np.asarray(y_pred, dtype=np.int64).ravel()
    if t.shape != p.shape:
        raise ValueError(f"length mismatch: {t.size} true labels vs {p.size} predictions")
    if t.size == 0:
        raise ValueError("cannot build a confusion matrix from zero samples")
    counts = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return ConfusionMatrix(counts)


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ValueError("accuracy of an empty confusion matrix is undefined")
    return float(np.trace(cm.counts)) / cm.total


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int
    degenerate: bool


@dataclass(frozen=True)
class PRF:
    per_class: tuple[ClassScores, ...]
    precision: float
    recall: float
    f1: float
    mode: str


def precision_recall_f1(cm: ConfusionMatrix, mode: str = "macro") -> PRF:
    """Per-class scores plus their macro or support-weighted mean.

    A zero denominator yields 0 for that score and marks the class degenerate.
    """
    if mode not in AVERAGING_MODES:
        raise ValueError(f"averaging mode must be one of {AVERAGING_MODES}, got {mode!r}")
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    c = cm.counts
    rows = c.sum(axis=1)
    cols = c.sum(axis=0)
    per = []
    for k in range(N_CLASSES):
        tp = float(c[k, k])
        degenerate = rows[k] == 0 or cols[k] == 0
        prec = tp / cols[k] if cols[k] else 0.0
        rec = tp / rows[k] if rows[k] else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec > 0 else 0.0
        per.append(ClassScores(prec, rec, f1, int(rows[k]), bool(degenerate)))
    if mode == "macro":
        weights = np.full(N_CLASSES, 1.0 / N_CLASSES)
    else:
        weights = rows / rows.sum()
    agg = [float(sum(w * getattr(s, name) for w, s in zip(weights, per))) for name in ("precision", "recall", "f1")]
    return PRF(tuple(per), agg[0], agg[1], agg[2], mode)


def log_loss(y_true, probabilities, epsilon: float = 1e-15) -> float:
    """Mean negative natural log of the clamped probability of the true class."""
    if not 0 < epsilon <= 1e-6:
        raise ValueError("epsilon must lie in (0, 1e-6]")
    y = np.asarray(y_true, dtype=np.int64).ravel()
    P = np.asarray(probabilities, dtype=np.float64)
    if P.ndim != 2 or P.shape != (y.size, N_CLASSES):
        raise ValueError(f"probabilities must be {y.size} x {N_CLASSES}, got {P.shape}")
    if y.size == 0:
        raise ValueError("log loss of zero samples is undefined")
    bad = np.flatnonzero(np.abs(P.sum(axis=1) - 1.0) > 1e-6)
    if bad.size:
        raise ValueError(f"probability row {int(bad[0])} sums to {P[bad[0]].sum():.9g}, not 1")
    p = np.clip(P[np.arange(y.size), y], epsilon, 1.0 - epsilon)
    return float(-np.mean(np.log(p)))


@dataclass(frozen=True)
class MetricsRow:
    """One Table-style record; percentages in [0, 100]."""

    model: str
    scenario: str
    rate: float
    accuracy: float
    recall: float
    precision: float
    f1: float
    log_loss: float
    averaging: str

    def __post_init__(self):
        for name in ("accuracy", "recall", "precision", "f1"):
            v = getattr(self, name)
            if not 0.0 <= v <= 100.0:
                raise ValueError(f"{name} must be a percentage, got {v}")
        if not self.log_loss >= 0 or math.isnan(self.log_loss):
            raise ValueError("log loss must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(y_true, probabilities, model: str, scenario: str, rate: float, mode: str = "macro") -> MetricsRow:
    P = np.asarray(probabilities, dtype=np.float64)
    cm = confusion_matrix(y_true, np.argmax(P, axis=1))
    prf = precision_recall_f1(cm, mode)
    return MetricsRow(
        model=model,
        scenario=scenario,
        rate=rate,
        accuracy=100.0 * accuracy(cm),
        recall=100.0 * prf.recall,
        precision=100.0 * prf.precision,
        f1=100.0 * prf.f1,
        log_loss=log_loss(y_true, P),
        averaging=mode,
    )
