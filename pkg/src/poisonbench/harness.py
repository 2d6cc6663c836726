"""Models x scenarios x poisoning-rates sweep and its report files."""
from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attacks import FlipRecord, PoisonConfig, Scenario, apply_poison, flip_digest
from .config import MODEL_NAMES, ExperimentConfig
from .dataio import (
    SplitDataset,
    SyntheticSpec,
    default_class_means,
    generate_synthetic,
    load_dataset,
    stratified_split,
)
from .domain import Dataset
from .explain import ImportanceReport, permutation_importance
from .learners import TreeConfig, fit_adaboost, fit_forest
from .metrics import MetricsRow, evaluate

log = logging.getLogger(__name__)

BASELINE = "none"


class CellError(RuntimeError):
    pass


@dataclass(frozen=True)
class Cell:
    index: int
    model: str
    scenario: str
    rate: float  # percent

    @property
    def name(self) -> str:
        return f"{self.model}__{self.scenario}__{self.rate:g}"


@dataclass
class CellResult:
    cell: Cell
    metrics: MetricsRow
    importance: ImportanceReport
    flips: list[FlipRecord]
    model: object = field(default=None, repr=False)


@dataclass
class SweepReport:
    rows: list[MetricsRow]
    importances: list[ImportanceReport]
    cells: list[Cell]
    config_echo: str
    flip_digests: dict
    flips: dict = field(default_factory=dict, repr=False)
    models: dict = field(default_factory=dict, repr=False)
    test_digest: str = ""


def grid(cfg: ExperimentConfig) -> list[Cell]:
    """Rate 0 appears once per model (scenario ``none``), then every
    (scenario, rate > 0) pair; indices are fixed by this order."""
    cells = []
    for model in cfg.models:
        for rate in cfg.rates:
            if rate == 0:
                cells.append(Cell(len(cells), model, BASELINE, 0))
        for scenario in cfg.scenarios:
            for rate in cfg.rates:
                if rate > 0:
                    cells.append(Cell(len(cells), model, scenario.value, rate))
    return cells


def cell_seeds(master: int, index: int) -> dict[str, int]:
    poison, model, importance = np.random.SeedSequence(master, spawn_key=(index,)).generate_state(3)
    return {"poison": int(poison), "model": int(model), "importance": int(importance)}


def load_data(cfg: ExperimentConfig) -> Dataset:
    d = cfg.raw["data"]
    schema = cfg.schema
    if d["csv"]:
        return load_dataset(d["csv"], label_column=d["label_column"], schema=schema)
    s = d["synthetic"]
    means = s["class_means"]
    if means is None:
        means = default_class_means(float(s["separation"]))
    spec = SyntheticSpec(
        samples_per_class=int(s["samples_per_class"]),
        class_means=np.asarray(means, dtype=np.float64),
        noise_stddev=float(s["noise_stddev"]),
        dominant_electrode=s["dominant_electrode"],
        dominance_factor=float(s["dominance_factor"]),
        schema=schema,
    )
    return generate_synthetic(spec, int(s["seed"]))


def prepare(cfg: ExperimentConfig) -> SplitDataset:
    data = load_data(cfg)
    sp = cfg.raw["split"]
    return stratified_split(data, float(sp["train_fraction"]), int(sp["seed"]))


def fit_model(name: str, params: dict, train: Dataset, seed: int):
    if name == "adaboost":
        base = TreeConfig(max_depth=params["max_depth"], min_samples_split=params["min_samples_split"])
        return fit_adaboost(train, int(params["n_rounds"]), base, seed)
    if name == "random_forest":
        tc = TreeConfig(
            max_depth=params["max_depth"],
            min_samples_split=params["min_samples_split"],
            feature_subsample=params["feature_subsample"],
        )
        return fit_forest(train, int(params["n_trees"]), tc, seed, bootstrap=bool(params["bootstrap"]))
    raise ValueError(f"unknown model {name!r}")


def run_cell(cfg: ExperimentConfig, split: SplitDataset, cell: Cell, keep_model: bool = False) -> CellResult:
    try:
        seeds = cell_seeds(cfg.seed, cell.index)
        train, flips = split.train, []
        if cell.scenario != BASELINE:
            pc = PoisonConfig(
                scenario=Scenario.parse(cell.scenario),
                rate=cell.rate / 100.0,
                mapping=cfg.raw["attacks"]["mapping"],
                seed=seeds["poison"],
            )
            train, flips = apply_poison(split.train, pc)
        model = fit_model(cell.model, cfg.raw["models"][cell.model], train, seeds["model"])
        test = split.test
        row = evaluate(
            test.labels,
            model.predict_proba(test.features),
            MODEL_NAMES[cell.model],
            cell.scenario,
            cell.rate,
            cfg.raw["metrics"]["averaging"],
        )
        imp_cfg = cfg.raw["importance"]
        eval_set = test if imp_cfg["dataset"] == "test" else train
        importance = permutation_importance(
            model,
            eval_set,
            int(imp_cfg["repeats"]),
            seeds["importance"],
            context={"model": MODEL_NAMES[cell.model], "attack": cell.scenario, "rate": f"{cell.rate:g}"},
        )
    except Exception as exc:
        raise CellError(f"grid cell {cell.name} (#{cell.index}) failed: {exc}") from exc
    log.info("%s: accuracy %.2f%%", cell.name, row.accuracy)
    return CellResult(cell, row, importance, flips, model if keep_model else None)


def _run_cell_packed(args):
    return run_cell(*args)


def _row_key(cfg: ExperimentConfig, row: MetricsRow):
    models = [MODEL_NAMES[m] for m in cfg.models]
    scen = [BASELINE] + [s.value for s in cfg.scenarios]
    return models.index(row.model), scen.index(row.scenario), row.rate


def run_sweep(cfg: ExperimentConfig, jobs: int | None = None, keep_models: bool = False) -> SweepReport:
    """Split once, then poison/fit/evaluate/explain every grid cell.

    Per-cell seeds depend only on (master seed, cell index), so any ``jobs``
    value yields the same report.
    """
    split = prepare(cfg)
    cells = grid(cfg)
    jobs = cfg.jobs if jobs is None else jobs
    args = [(cfg, split, cell, keep_models) for cell in cells]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell_packed, args))
    else:
        results = [_run_cell_packed(a) for a in args]

    order = sorted(range(len(results)), key=lambda i: _row_key(cfg, results[i].metrics))
    results = [results[i] for i in order]
    test_digest = _array_digest(split.test.features, split.test.labels)
    return SweepReport(
        rows=[r.metrics for r in results],
        importances=[r.importance for r in results],
        cells=[r.cell for r in results],
        config_echo=cfg.echo(),
        flip_digests={
            r.cell.name: {"count": len(r.flips), "sha256": flip_digest(r.flips)}
            for r in results
            if r.cell.scenario != BASELINE
        },
        flips={r.cell.name: r.flips for r in results if r.cell.scenario != BASELINE},
        models={r.cell.name: r.model for r in results if r.model is not None},
        test_digest=test_digest,
    )


def _array_digest(*arrays) -> str:
    import hashlib

    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()


METRIC_COLUMNS = ["model", "scenario", "rate", "accuracy", "recall", "precision", "f1", "log_loss", "averaging"]


def _formatted(row: MetricsRow) -> dict:
    return {
        "model": row.model,
        "scenario": row.scenario,
        "rate": f"{row.rate:g}",
        "accuracy": f"{row.accuracy:.2f}",
        "recall": f"{row.recall:.2f}",
        "precision": f"{row.precision:.2f}",
        "f1": f"{row.f1:.2f}",
        "log_loss": f"{row.log_loss:.3f}",
        "averaging": row.averaging,
    }


def render_metrics_table(report: SweepReport, fmt: str = "csv") -> str:
    if not report.rows:
        raise ValueError("empty sweep report")
    records = [_formatted(r) for r in report.rows]
    if fmt == "csv":
        out = io.StringIO()
        w = csv.DictWriter(out, fieldnames=METRIC_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(records)
        return out.getvalue()
    if fmt == "json":
        return json.dumps({"rows": records, "flips": report.flip_digests}, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected csv or json")


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def electrode_summary_csv(report: SweepReport) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    schema = report.importances[0].schema
    w.writerow(["model", "attack", "rate"] + list(schema.electrodes))
    for cell, imp in zip(report.cells, report.importances):
        w.writerow([MODEL_NAMES[cell.model], cell.scenario, f"{cell.rate:g}"] + [repr(float(v)) for v in imp.electrode_scores])
    return out.getvalue()


def render_importance_report(report: SweepReport, out_dir) -> list[Path]:
    """Per-cell JSON + long CSV under importance/, plus importance/electrodes.csv."""
    if not report.importances:
        raise ValueError("empty sweep report")
    out_dir = Path(out_dir) / "importance"
    written = []
    for cell, imp in zip(report.cells, report.importances):
        for suffix, text in ((".json", imp.to_json()), (".csv", imp.to_csv())):
            p = out_dir / f"{cell.name}{suffix}"
            _write(p, text)
            written.append(p)
    p = out_dir / "electrodes.csv"
    _write(p, electrode_summary_csv(report))
    written.append(p)
    return written


def render_flips(report: SweepReport, out_dir) -> list[Path]:
    out_dir = Path(out_dir) / "flips"
    written = []
    for name, records in report.flips.items():
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["row_index", "original", "flipped"])
        for r in records:
            w.writerow([r.row_index, r.original.render(), r.flipped.render()])
        p = out_dir / f"{name}.csv"
        _write(p, out.getvalue())
        written.append(p)
    return written


def write_report(report: SweepReport, out_dir, fmt: str = "csv") -> list[Path]:
    out_dir = Path(out_dir)
    formats = ("csv", "json") if fmt == "both" else (fmt,)
    written = []
    for f in formats:
        p = out_dir / f"metrics.{f}"
        _write(p, render_metrics_table(report, f))
        written.append(p)
    written += render_importance_report(report, out_dir)
    written += render_flips(report, out_dir)
    p = out_dir / "config.echo"
    _write(p, report.config_echo)
    written.append(p)
    if report.models:
        for name, model in report.models.items():
            p = out_dir / "models" / f"{name}.json"
            _write(p, json.dumps(model.to_dict()) + "\n")
            written.append(p)
    return written
