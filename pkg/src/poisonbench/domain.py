"""Risk labels, the electrode x band feature layout, and the Dataset container."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

import numpy as np

N_CLASSES = 4
N_FEATURES = 25

DEFAULT_ELECTRODES = ("AF3", "AF4", "T7", "T8", "Pz")
DEFAULT_BANDS = ("Theta", "Alpha", "LowBeta", "HighBeta", "Gamma")


class LabelParseError(ValueError):
    pass


class RiskLabel(enum.IntEnum):
    """Risk-matrix class. The integer value is the canonical code."""

    HighRisk = 0
    MediumRisk = 1
    LowRisk = 2
    Normal = 3

    def render(self) -> str:
        return _RENDERED[self]

    def __str__(self) -> str:
        return self.render()


_RENDERED = {
    RiskLabel.HighRisk: "High-Risk",
    RiskLabel.MediumRisk: "Medium-Risk",
    RiskLabel.LowRisk: "Low-Risk",
    RiskLabel.Normal: "Normal",
}
_BY_KEY = {re.sub(r"[-_\s]", "", text).lower(): label for label, text in _RENDERED.items()}


def parse_label(text: str) -> RiskLabel:
    key = re.sub(r"[-_\s]", "", str(text)).lower()
    try:
        return _BY_KEY[key]
    except KeyError:
        accepted = ", ".join(_RENDERED.values())
        raise LabelParseError(f"unrecognized risk label {text!r}; expected one of {accepted}") from None


@dataclass(frozen=True)
class FeatureSchema:
    electrodes: tuple[str, ...] = DEFAULT_ELECTRODES
    bands: tuple[str, ...] = DEFAULT_BANDS

    def __post_init__(self):
        object.__setattr__(self, "electrodes", tuple(self.electrodes))
        object.__setattr__(self, "bands", tuple(self.bands))
        if len(self.electrodes) != 5 or len(self.bands) != 5:
            raise ValueError("schema needs exactly 5 electrodes and 5 bands")
        if len(set(self.electrodes)) != 5 or len(set(self.bands)) != 5:
            raise ValueError("electrode and band names must be unique")

    @property
    def n_features(self) -> int:
        return N_FEATURES

    def feature_location(self, index: int) -> tuple[str, str]:
        if not 0 <= index < N_FEATURES:
            raise IndexError(f"feature index {index} out of range 0..{N_FEATURES - 1}")
        return self.electrodes[index // 5], self.bands[index % 5]

    def feature_name(self, index: int) -> str:
        electrode, band = self.feature_location(index)
        return f"{electrode}_{band}"

    @property
    def feature_names(self) -> list[str]:
        return [self.feature_name(i) for i in range(N_FEATURES)]

    def electrode_features(self, electrode: str) -> list[int]:
        e = self.electrodes.index(electrode)
        return list(range(5 * e, 5 * e + 5))


def feature_location(index: int, schema: FeatureSchema | None = None) -> tuple[str, str]:
    return (schema or FeatureSchema()).feature_location(index)


@dataclass(frozen=True, eq=False)
class Dataset:
    """N x 25 band-power matrix with integer label codes.

    Arrays are copied and made read-only on construction.
    """

    features: np.ndarray
    labels: np.ndarray
    schema: FeatureSchema = field(default_factory=FeatureSchema)

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64, copy=True)
        y = np.array([int(v) for v in np.asarray(self.labels).ravel()], dtype=np.int64)
        if X.ndim != 2 or X.shape[1] != N_FEATURES:
            raise ValueError(f"features must be N x {N_FEATURES}, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if not np.all(np.isfinite(X)):
            raise ValueError("features contain NaN or infinite values")
        if y.size and (y.min() < 0 or y.max() >= N_CLASSES):
            raise ValueError("label codes must lie in 0..3")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return self.labels.shape[0]

    def subset(self, rows) -> Dataset:
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.features[rows], self.labels[rows], self.schema)

    def with_labels(self, labels) -> Dataset:
        return Dataset(self.features, labels, self.schema)

    def risk_labels(self) -> list[RiskLabel]:
        return [RiskLabel(int(v)) for v in self.labels]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=N_CLASSES)
