import csv
import io
import json

import numpy as np
import pytest
import yaml

from poisonbench.cli import main
from poisonbench.config import ConfigError, build_config, load_config
from poisonbench.harness import (
    grid,
    prepare,
    render_importance_report,
    render_metrics_table,
    run_cell,
    run_sweep,
    write_report,
)
from poisonbench.metrics import MetricsRow

SMALL = {
    "data": {"synthetic": {"samples_per_class": 40}},
    "models": {
        "adaboost": {"n_rounds": 8},
        "random_forest": {"n_trees": 6},
    },
    "importance": {"repeats": 2},
}


@pytest.fixture(scope="module")
def small_cfg():
    return build_config(SMALL)


@pytest.fixture(scope="module")
def small_report(small_cfg):
    return run_sweep(small_cfg, jobs=1, keep_models=True)


def test_grid_arithmetic(small_cfg, small_report):
    cells = grid(small_cfg)
    assert len(cells) == 2 * (1 + 2 * 4) == 18
    assert len(small_report.rows) == 18
    assert [c.index for c in cells] == list(range(18))
    assert sum(1 for r in small_report.rows if r.scenario == "none") == 2


def test_row_order_is_model_scenario_rate(small_report):
    keys = [(r.model, r.scenario, r.rate) for r in small_report.rows]
    assert keys[:5] == [("AdaBoost", "none", 0), ("AdaBoost", "random", 5), ("AdaBoost", "random", 25),
                        ("AdaBoost", "random", 50), ("AdaBoost", "random", 75)]
    assert keys[9] == ("RandomForest", "none", 0)


def test_baseline_only_sweep():
    cfg = build_config({**SMALL, "attacks": {"rates": [0]}})
    report = run_sweep(cfg)
    assert [r.scenario for r in report.rows] == ["none", "none"]
    assert report.flip_digests == {} and report.flips == {}


def test_flip_counts_follow_rates(small_report):
    n_train = 4 * 32
    for name, digest in small_report.flip_digests.items():
        rate = float(name.rsplit("__", 1)[1])
        assert digest["count"] == int(np.floor(rate / 100 * n_train + 0.5))


def test_test_partition_is_never_poisoned(small_cfg):
    split = prepare(small_cfg)
    before = (split.test.features.tobytes(), split.test.labels.tobytes())
    for cell in grid(small_cfg)[:4]:
        run_cell(small_cfg, split, cell)
        assert (split.test.features.tobytes(), split.test.labels.tobytes()) == before
    assert prepare(small_cfg).test.labels.tobytes() == before[1]


def test_render_formats(small_report):
    text = render_metrics_table(small_report, "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows[0]["rate"] == "0" and rows[0]["scenario"] == "none"
    assert all(len(r["accuracy"].split(".")[1]) == 2 for r in rows)
    assert all(len(r["log_loss"].split(".")[1]) == 3 for r in rows)
    doc = json.loads(render_metrics_table(small_report, "json"))
    assert len(doc["rows"]) == 18
    assert render_metrics_table(small_report, "csv") == text
    with pytest.raises(ValueError):
        render_metrics_table(small_report, "xml")


def test_log_loss_rounds_to_three_decimals(small_report):
    row = MetricsRow("AdaBoost", "none", 0, 99.68, 99.67, 99.67, 99.66, 0.0171349, "macro")
    report = type(small_report)([row], [], [], "", {})
    line = render_metrics_table(report, "csv").splitlines()[1]
    assert line == "AdaBoost,none,0,99.68,99.67,99.67,99.66,0.017,macro"


def test_importance_files(small_report, tmp_path):
    written = render_importance_report(small_report, tmp_path)
    imp = tmp_path / "importance"
    assert len(list(imp.glob("*.json"))) == 18
    assert len(list(imp.glob("*__*.csv"))) == 18
    assert (imp / "electrodes.csv").exists()
    assert len(written) == 37
    summary = list(csv.DictReader((imp / "electrodes.csv").open()))
    assert len(summary) == 18
    for row in summary:
        name = f"{'adaboost' if row['model'] == 'AdaBoost' else 'random_forest'}__{row['attack']}__{row['rate']}"
        per_feature = list(csv.DictReader((imp / f"{name}.csv").open()))
        for e in ("AF3", "AF4", "T7", "T8", "Pz"):
            total = sum(float(r["mean"]) for r in per_feature if r["electrode"] == e)
            assert abs(total - float(row[e])) < 1e-12


def test_write_report_layout(small_report, tmp_path):
    write_report(small_report, tmp_path, "both")
    assert (tmp_path / "metrics.csv").exists() and (tmp_path / "metrics.json").exists()
    assert len(list((tmp_path / "flips").glob("*.csv"))) == 16
    assert len(list((tmp_path / "models").glob("*.json"))) == 18
    echo = yaml.safe_load((tmp_path / "config.echo").read_text())
    assert echo["importance"]["repeats"] == 2
    assert echo["split"]["seed"] == 0


def test_parallel_matches_serial(small_cfg, small_report):
    par = run_sweep(small_cfg, jobs=2)
    assert render_metrics_table(par) == render_metrics_table(small_report)
    assert [i.to_json() for i in par.importances] == [i.to_json() for i in small_report.importances]
    assert par.flip_digests == small_report.flip_digests


def test_config_validation():
    with pytest.raises(ConfigError, match="duplicates"):
        build_config({"attacks": {"rates": [0, 5, 5]}})
    with pytest.raises(ConfigError, match=r"\[0, 100\]"):
        build_config({"attacks": {"rates": [0, 120]}})
    with pytest.raises(ConfigError, match="unknown config key"):
        build_config({"modles": {}})
    with pytest.raises(ConfigError, match="unknown models"):
        build_config({"models": {"svm": {}}})
    with pytest.raises(ConfigError):
        build_config({"metrics": {"averaging": "micro"}})
    assert build_config({"attacks": {"rates": [25, 5]}}).rates == [0, 5, 25]


def test_importance_defaults_are_echoed():
    cfg = build_config({"importance": {"repeats": None}})
    assert cfg.raw["importance"]["repeats"] == 5
    assert "repeats: 5" in cfg.echo()


def test_yaml_config_and_overrides(tmp_path):
    p = tmp_path / "exp.yaml"
    p.write_text(yaml.safe_dump({**SMALL, "seed": 3, "attacks": {"scenarios": ["random"], "rates": [0, 50]}}))
    cfg = load_config(p, seed=11, output=str(tmp_path / "o"))
    assert cfg.seed == 11 and cfg.scenarios[0].value == "random"
    assert cfg.raw["data"]["synthetic"]["seed"] == 11
    bad = tmp_path / "bad.yaml"
    bad.write_text("- just\n- a list\n")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_cell_errors_name_the_cell(tmp_path):
    cfg = build_config({**SMALL, "data": {"csv": str(tmp_path / "missing.csv")}})
    with pytest.raises(FileNotFoundError):
        run_sweep(cfg)


def test_cli_sweep_is_byte_identical(tmp_path):
    cfgfile = tmp_path / "c.yaml"
    cfgfile.write_text(yaml.safe_dump({**SMALL, "attacks": {"rates": [0, 25]}}))
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["sweep", "--config", str(cfgfile), "--seed", "4", "--out", str(out), "--format", "both"]) == 0
        outs.append(out)
    files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file())
    assert files
    for rel in files:
        a, b = (outs[0] / rel).read_bytes(), (outs[1] / rel).read_bytes()
        if rel.name == "config.echo":
            # the echo records the (different) output directories
            a, b = (b"\n".join(l for l in x.splitlines() if not l.startswith(b"output:")) for x in (a, b))
        assert a == b, rel


def test_cli_generate_and_load(tmp_path):
    out = tmp_path / "syn.csv"
    assert main(["generate", "--out", str(out), "--samples-per-class", "6", "--seed", "2"]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 25 and lines[0].endswith(",label")
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump({**SMALL, "data": {"csv": str(out)}, "attacks": {"rates": [0]}}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "r")]) == 0


def test_cli_explain_matches_sweep_cell(tmp_path, capsys, small_report):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump(SMALL))
    assert main(["explain", "--config", str(cfg), "--model", "random_forest", "--scenario", "random",
                 "--rate", "25", "--out", str(tmp_path)]) == 0
    printed = capsys.readouterr().out.split()
    assert printed[0::2] == ["AF3", "AF4", "T7", "T8", "Pz"]
    got = (tmp_path / "importance" / "random_forest__random__25.json").read_text()
    ref = [i for c, i in zip(small_report.cells, small_report.importances) if c.name == "random_forest__random__25"][0]
    assert got == ref.to_json()


def test_cli_errors_exit_nonzero(tmp_path, capsys):
    assert main(["sweep", "--config", str(tmp_path / "nope.yaml")]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["explain", "--model", "adaboost", "--scenario", "random", "--rate", "0"]) == 1
