"""CSV loading, stratified train/test splitting and the synthetic band-power generator."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .domain import (
    N_CLASSES,
    N_FEATURES,
    Dataset,
    FeatureSchema,
    LabelParseError,
    parse_label,
)


class DataFormatError(ValueError):
    pass


class StratificationError(ValueError):
    pass


def load_dataset(path, label_column: str = "label", schema: FeatureSchema | None = None) -> Dataset:
    """Read a header-first CSV of 25 feature columns plus one label column.

    Feature order follows the header (label column excluded).
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    expected = N_FEATURES + 1
    rows, labels = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if len(header) != expected:
            raise DataFormatError(
                f"{path}:1: expected {expected} columns (25 features + {label_column!r}), got {len(header)}"
            )
        if label_column not in header:
            raise DataFormatError(f"{path}:1: no label column named {label_column!r}")
        label_at = header.index(label_column)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != expected:
                raise DataFormatError(f"{path}:{lineno}: expected {expected} columns, got {len(row)}")
            values = []
            for col, cell in enumerate(row):
                if col == label_at:
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise DataFormatError(
                        f"{path}:{lineno}: non-numeric value {cell!r} in column {header[col]!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DataFormatError(f"{path}:{lineno}: non-finite value {cell!r} in column {header[col]!r}")
                values.append(v)
            try:
                labels.append(int(parse_label(row[label_at])))
            except LabelParseError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from None
            rows.append(values)
    features = np.array(rows, dtype=np.float64).reshape(len(rows), N_FEATURES)
    return Dataset(features, np.array(labels, dtype=np.int64), schema or FeatureSchema())


def write_dataset(data: Dataset, path, label_column: str = "label") -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(data.schema.feature_names + [label_column])
        for x, y in zip(data.features, data.risk_labels()):
            w.writerow([repr(float(v)) for v in x] + [y.render()])


@dataclass(frozen=True, eq=False)
class SplitDataset:
    train: Dataset
    test: Dataset
    seed: int
    train_fraction: float
    train_rows: np.ndarray
    test_rows: np.ndarray


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(data: Dataset, train_fraction: float = 0.8, seed: int = 0) -> SplitDataset:
    """Per-class seeded shuffle; class c sends round_half_up(fraction * n_c) rows to train."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    counts = data.class_counts()
    short = [c for c in range(N_CLASSES) if counts[c] < 2]
    if short:
        raise StratificationError(f"classes {short} have fewer than 2 samples; cannot stratify")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    train_rows, test_rows = [], []
    for c in range(N_CLASSES):
        members = np.flatnonzero(data.labels == c)
        members = members[rng.permutation(members.size)]
        k = _round_half_up(train_fraction * members.size)
        train_rows.append(members[:k])
        test_rows.append(members[k:])
    tr = np.sort(np.concatenate(train_rows))
    te = np.sort(np.concatenate(test_rows))
    return SplitDataset(data.subset(tr), data.subset(te), seed, train_fraction, tr, te)


@dataclass(frozen=True, eq=False)
class SyntheticSpec:
    samples_per_class: int = 500
    class_means: np.ndarray | None = None
    noise_stddev: float = 1.0
    dominant_electrode: str | None = "Pz"
    dominance_factor: float = 3.0
    schema: FeatureSchema = field(default_factory=FeatureSchema)

    def __post_init__(self):
        if self.samples_per_class < 1:
            raise ValueError("samples_per_class must be >= 1")
        if not self.noise_stddev > 0:
            raise ValueError("noise_stddev must be > 0")
        means = default_class_means() if self.class_means is None else np.array(self.class_means, dtype=np.float64)
        if means.shape != (N_CLASSES, N_FEATURES):
            raise ValueError(f"class_means must be {N_CLASSES} x {N_FEATURES}")
        if self.dominant_electrode is not None and self.dominant_electrode not in self.schema.electrodes:
            raise ValueError(f"unknown electrode {self.dominant_electrode!r}")
        object.__setattr__(self, "class_means", means)

    def effective_means(self) -> np.ndarray:
        means = self.class_means.copy()
        if self.dominant_electrode is not None:
            cols = self.schema.electrode_features(self.dominant_electrode)
            centre = means[:, cols].mean(axis=0)
            means[:, cols] = centre + self.dominance_factor * (means[:, cols] - centre)
        return means


# typical relative band power, theta-heavy and falling towards gamma
_BAND_LEVEL = np.array([12.0, 9.0, 6.0, 4.0, 2.5])


def default_class_means(separation: float = 0.3) -> np.ndarray:
    """Band baseline plus a per-feature cyclic class offset.

    Feature j ranks the four classes in the order rotated by j, so no single
    feature orders them the same way; adjacent classes sit ``separation`` apart.
    """
    means = np.empty((N_CLASSES, N_FEATURES))
    for c in range(N_CLASSES):
        for j in range(N_FEATURES):
            means[c, j] = _BAND_LEVEL[j % 5] + separation * (((c + j) % N_CLASSES) - 1.5)
    return means


def generate_synthetic(spec: SyntheticSpec | None = None, seed: int = 0) -> Dataset:
    spec = spec or SyntheticSpec()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    means = spec.effective_means()
    n = spec.samples_per_class
    labels = np.repeat(np.arange(N_CLASSES), n)
    noise = rng.normal(0.0, spec.noise_stddev, size=(N_CLASSES * n, N_FEATURES))
    return Dataset(means[labels] + noise, labels, spec.schema)
