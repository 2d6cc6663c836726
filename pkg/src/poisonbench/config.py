"""Experiment configuration: YAML file plus CLI overrides.

Schema (every key optional; defaults shown)::

    seed: 0                      # master seed
    output: results
    jobs: 1                      # grid cells run in this many processes
    data:
      csv: null                  # path; when null the synthetic generator is used
      label_column: label
      electrodes: [AF3, AF4, T7, T8, Pz]
      synthetic:
        samples_per_class: 500
        noise_stddev: 1.0
        separation: 0.3          # ignored when class_means is given
        class_means: null        # 4 x 25 nested list
        dominant_electrode: Pz   # null disables
        dominance_factor: 3.0
        seed: null               # defaults to the master seed
    split:
      train_fraction: 0.8
      seed: null                 # defaults to the master seed
    attacks:
      scenarios: [random, targeted]
      rates: [0, 5, 25, 50, 75]  # percent of the training partition
      mapping: {High-Risk: Normal, Medium-Risk: Low-Risk, Low-Risk: Medium-Risk, Normal: High-Risk}
    models:
      adaboost: {n_rounds: 100, max_depth: 3, min_samples_split: 2}
      random_forest: {n_trees: 100, max_depth: null, min_samples_split: 2,
                      feature_subsample: sqrt, bootstrap: true}
    metrics:
      averaging: macro           # or weighted
    importance:
      repeats: 5
      dataset: test              # or train (the poisoned training partition)
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

import yaml

from .attacks import SEVERITY_INVERSION, Scenario, normalize_mapping
from .domain import DEFAULT_ELECTRODES, FeatureSchema
from .metrics import AVERAGING_MODES


class ConfigError(ValueError):
    pass


MODEL_NAMES = {"adaboost": "AdaBoost", "random_forest": "RandomForest"}

DEFAULTS = {
    "seed": 0,
    "output": "results",
    "jobs": 1,
    "data": {
        "csv": None,
        "label_column": "label",
        "electrodes": list(DEFAULT_ELECTRODES),
        "synthetic": {
            "samples_per_class": 500,
            "noise_stddev": 1.0,
            "separation": 0.3,
            "class_means": None,
            "dominant_electrode": "Pz",
            "dominance_factor": 3.0,
            "seed": None,
        },
    },
    "split": {"train_fraction": 0.8, "seed": None},
    "attacks": {
        "scenarios": ["random", "targeted"],
        "rates": [0, 5, 25, 50, 75],
        "mapping": {k.render(): v.render() for k, v in SEVERITY_INVERSION.items()},
    },
    "models": {
        "adaboost": {"n_rounds": 100, "max_depth": 3, "min_samples_split": 2},
        "random_forest": {
            "n_trees": 100,
            "max_depth": None,
            "min_samples_split": 2,
            "feature_subsample": "sqrt",
            "bootstrap": True,
        },
    },
    "metrics": {"averaging": "macro"},
    "importance": {"repeats": 5, "dataset": "test"},
}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in (override or {}).items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict) and key != "mapping":
            if value is None:
                value = {}
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where!r} must be a mapping")
            if key == "models":
                unknown = set(value) - set(MODEL_NAMES)
                if unknown:
                    raise ConfigError(f"unknown models {sorted(unknown)}; known: {sorted(MODEL_NAMES)}")
                out[key] = {m: _merge(base[key][m], value[m] or {}, f"{where}.{m}.") for m in value}
            else:
                out[key] = _merge(base[key], value, f"{where}.")
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    @property
    def output(self) -> Path:
        return Path(self.raw["output"])

    @property
    def jobs(self) -> int:
        return int(self.raw["jobs"])

    @property
    def rates(self) -> list[float]:
        return list(self.raw["attacks"]["rates"])

    @property
    def scenarios(self) -> list[Scenario]:
        return [Scenario.parse(s) for s in self.raw["attacks"]["scenarios"]]

    @property
    def models(self) -> list[str]:
        return list(self.raw["models"])

    @property
    def schema(self) -> FeatureSchema:
        return FeatureSchema(electrodes=tuple(self.raw["data"]["electrodes"]))

    def echo(self) -> str:
        return yaml.safe_dump(self.raw, sort_keys=False, default_flow_style=None)


def build_config(overrides: dict | None = None) -> ExperimentConfig:
    raw = _merge(DEFAULTS, overrides or {})
    _validate(raw)
    return ExperimentConfig(raw)


def load_config(path=None, **overrides) -> ExperimentConfig:
    data = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return build_config(data)


def _validate(raw: dict) -> None:
    rates = raw["attacks"]["rates"]
    try:
        rates = [float(r) for r in rates]
    except (TypeError, ValueError):
        raise ConfigError(f"attacks.rates must be numbers, got {rates!r}") from None
    if any(not 0 <= r <= 100 for r in rates):
        raise ConfigError(f"attacks.rates must lie in [0, 100] percent, got {rates}")
    if len(set(rates)) != len(rates):
        raise ConfigError(f"attacks.rates contains duplicates: {rates}")
    if 0.0 not in rates:
        rates.append(0.0)
    raw["attacks"]["rates"] = [int(r) if r == int(r) else r for r in sorted(rates)]

    scen = [Scenario.parse(s).value for s in raw["attacks"]["scenarios"]]
    if len(set(scen)) != len(scen):
        raise ConfigError("attacks.scenarios contains duplicates")
    raw["attacks"]["scenarios"] = scen
    normalize_mapping(raw["attacks"]["mapping"])

    if not raw["models"]:
        raise ConfigError("at least one model is required")
    if raw["metrics"]["averaging"] not in AVERAGING_MODES:
        raise ConfigError(f"metrics.averaging must be one of {AVERAGING_MODES}")
    imp = raw["importance"]
    if imp["repeats"] is None:
        imp["repeats"] = DEFAULTS["importance"]["repeats"]
    if int(imp["repeats"]) < 1:
        raise ConfigError("importance.repeats must be >= 1")
    if imp["dataset"] not in ("test", "train"):
        raise ConfigError("importance.dataset must be 'test' or 'train'")
    frac = raw["split"]["train_fraction"]
    if not 0 < float(frac) < 1:
        raise ConfigError("split.train_fraction must be in (0, 1)")
    if int(raw["jobs"]) < 1:
        raise ConfigError("jobs must be >= 1")
    try:
        FeatureSchema(electrodes=tuple(raw["data"]["electrodes"]))
    except ValueError as exc:
        raise ConfigError(f"data.electrodes: {exc}") from None
    for key in ("split", "data.synthetic"):
        node = raw
        for part in key.split("."):
            node = node[part]
        if node["seed"] is None:
            node["seed"] = raw["seed"]
