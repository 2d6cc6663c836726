"""Label-flipping poisoning of a training partition.

Two scenarios: ``random`` replaces each selected label with one of the three
other classes uniformly, ``targeted`` applies a fixed class-to-class map
(severity inversion by default). Features are never modified.
"""
from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .domain import N_CLASSES, Dataset, RiskLabel, parse_label


class PoisonConfigError(ValueError):
    pass


class Scenario(str, enum.Enum):
    RandomFlip = "random"
    TargetedFlip = "targeted"

    @classmethod
    def parse(cls, text: str) -> Scenario:
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("_", "").replace("-", "")
        for s in cls:
            if key in (s.value, s.name.lower()):
                return s
        raise PoisonConfigError(f"unknown poisoning scenario {text!r}; expected 'random' or 'targeted'")


# HighRisk <-> Normal, MediumRisk <-> LowRisk
SEVERITY_INVERSION = {
    RiskLabel.HighRisk: RiskLabel.Normal,
    RiskLabel.MediumRisk: RiskLabel.LowRisk,
    RiskLabel.LowRisk: RiskLabel.MediumRisk,
    RiskLabel.Normal: RiskLabel.HighRisk,
}


def normalize_mapping(mapping) -> dict[RiskLabel, RiskLabel]:
    """Accepts RiskLabel, int codes or label spellings on both sides."""

    def as_label(v):
        if isinstance(v, (int, np.integer)):
            return RiskLabel(int(v))
        return parse_label(v)

    out = {as_label(k): as_label(v) for k, v in dict(mapping).items()}
    missing = [lab.render() for lab in RiskLabel if lab not in out]
    if missing:
        raise PoisonConfigError(f"targeted mapping is not total; missing {missing}")
    fixed = [lab.render() for lab, to in out.items() if lab == to]
    if fixed:
        raise PoisonConfigError(f"targeted mapping has fixed points {fixed}")
    return out


@dataclass(frozen=True)
class PoisonConfig:
    scenario: Scenario = Scenario.RandomFlip
    rate: float = 0.0
    mapping: dict = field(default_factory=lambda: dict(SEVERITY_INVERSION))
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario.parse(self.scenario))
        if not 0.0 <= self.rate <= 1.0:
            raise PoisonConfigError(f"poisoning rate must be in [0, 1], got {self.rate}")
        object.__setattr__(self, "mapping", normalize_mapping(self.mapping))


@dataclass(frozen=True)
class FlipRecord:
    row_index: int
    original: RiskLabel
    flipped: RiskLabel

    def __post_init__(self):
        if self.original == self.flipped:
            raise ValueError("a flip must change the label")


def poison_count(n_train: int, rate: float) -> int:
    return int(math.floor(rate * n_train + 0.5))


def select_poison_indices(n_train: int, rate: float, seed: int) -> np.ndarray:
    """Sorted, distinct row indices; exactly round_half_up(rate * n_train) of them."""
    if n_train < 0:
        raise ValueError("n_train must be >= 0")
    if not 0.0 <= rate <= 1.0:
        raise PoisonConfigError(f"poisoning rate must be in [0, 1], got {rate}")
    k = poison_count(n_train, rate)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    return np.sort(rng.choice(n_train, size=k, replace=False)).astype(np.int64)


def _check_indices(n: int, indices) -> np.ndarray:
    idx = np.unique(np.asarray(indices, dtype=np.int64))
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise IndexError(f"poison index out of range for {n} training rows")
    return idx


def flip_random(train: Dataset, indices, seed: int) -> tuple[Dataset, list[FlipRecord]]:
    idx = _check_indices(len(train), indices)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
    # offset in 1..3 added mod 4 lands uniformly on the other three classes
    offsets = rng.integers(1, N_CLASSES, size=idx.size)
    labels = train.labels.copy()
    labels[idx] = (labels[idx] + offsets) % N_CLASSES
    return train.with_labels(labels), _records(train.labels, labels, idx)


def flip_targeted(train: Dataset, indices, mapping=None) -> tuple[Dataset, list[FlipRecord]]:
    m = normalize_mapping(SEVERITY_INVERSION if mapping is None else mapping)
    idx = _check_indices(len(train), indices)
    lookup = np.array([int(m[RiskLabel(c)]) for c in range(N_CLASSES)], dtype=np.int64)
    labels = train.labels.copy()
    labels[idx] = lookup[labels[idx]]
    return train.with_labels(labels), _records(train.labels, labels, idx)


def _records(before, after, idx) -> list[FlipRecord]:
    return [FlipRecord(int(i), RiskLabel(int(before[i])), RiskLabel(int(after[i]))) for i in idx]


def apply_poison(train: Dataset, config: PoisonConfig) -> tuple[Dataset, list[FlipRecord]]:
    idx = select_poison_indices(len(train), config.rate, config.seed)
    if config.scenario is Scenario.RandomFlip:
        return flip_random(train, idx, config.seed)
    return flip_targeted(train, idx, config.mapping)


def flip_digest(records: list[FlipRecord]) -> str:
    h = hashlib.sha256()
    for r in records:
        h.update(f"{r.row_index},{int(r.original)},{int(r.flipped)}\n".encode())
    return h.hexdigest()
