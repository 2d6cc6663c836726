import json

import numpy as np
import pytest

from poisonbench.domain import Dataset, FeatureSchema
from poisonbench.explain import ImportanceReport, aggregate_importance_by_electrode, permutation_importance
from poisonbench.learners import TreeConfig, fit_forest, fit_tree


class ConstantModel:
    def predict(self, X):
        return np.zeros(len(X), dtype=int)


def _one_feature_data(j=7, n=200, seed=0):
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 4
    X = rng.normal(size=(n, 25))
    X[:, j] = y * 3.0 + rng.normal(scale=0.1, size=n)
    return Dataset(X, y)


def test_constant_model_has_zero_importance():
    d = _one_feature_data()
    r = permutation_importance(ConstantModel(), d, repeats=3, seed=0)
    assert np.all(r.samples == 0.0)
    assert np.all(r.mean == 0.0)


def test_unused_feature_has_exactly_zero_importance():
    d = _one_feature_data(j=7)
    m = fit_tree(d, cfg=TreeConfig(max_depth=2))
    unused = set(range(25)) - m.used_features()
    r = permutation_importance(m, d, repeats=4, seed=1)
    assert unused
    for j in unused:
        assert np.all(r.samples[j] == 0.0)


def test_constant_column_has_exactly_zero_importance():
    d = _one_feature_data()
    X = np.array(d.features)
    X[:, 11] = 4.2
    d2 = Dataset(X, d.labels)
    m = fit_forest(d2, 20, seed=0)
    r = permutation_importance(m, d2, repeats=5, seed=2)
    assert np.all(r.samples[11] == 0.0)


def test_dominant_feature_ranks_first():
    d = _one_feature_data(j=13)
    m = fit_forest(d, 30, seed=0)
    r = permutation_importance(m, d, repeats=5, seed=3)
    assert r.ranking()[0] == 13
    assert r.mean[13] > 0


def test_input_is_untouched_and_deterministic():
    d = _one_feature_data()
    before = d.features.copy()
    m = fit_tree(d, cfg=TreeConfig(max_depth=3))
    a = permutation_importance(m, d, repeats=3, seed=9)
    b = permutation_importance(m, d, repeats=3, seed=9)
    assert np.array_equal(d.features, before)
    assert np.array_equal(a.samples, b.samples)
    assert a.std.tolist() == np.std(a.samples, axis=1).tolist()


def test_negative_importances_are_kept():
    rng = np.random.default_rng(4)
    d = Dataset(rng.normal(size=(60, 25)), rng.integers(0, 4, 60))
    m = fit_tree(d, cfg=TreeConfig(max_depth=6))
    test = Dataset(rng.normal(size=(60, 25)), rng.integers(0, 4, 60))
    r = permutation_importance(m, test, repeats=10, seed=0)
    assert r.samples.min() < 0


def test_errors():
    with pytest.raises(ValueError):
        permutation_importance(ConstantModel(), Dataset(np.zeros((0, 25)), []), 1)
    with pytest.raises(ValueError):
        permutation_importance(ConstantModel(), _one_feature_data(), 0)


def _report(mean):
    mean = np.asarray(mean, dtype=float)
    return ImportanceReport(mean, np.zeros_like(mean), mean[:, None], 1.0, 1, 0)


def test_uniform_importance_sums_per_electrode():
    scores = aggregate_importance_by_electrode(_report(np.full(25, 0.01)), FeatureSchema())
    assert np.allclose(scores, 0.05, atol=1e-15)


def test_last_electrode_only():
    mean = np.zeros(25)
    mean[20:] = [0.1, 0.2, 0.3, 0.05, 0.01]
    scores = aggregate_importance_by_electrode(_report(mean))
    assert scores[:4].tolist() == [0, 0, 0, 0] and scores[4] > 0


def test_electrode_sums_are_consistent():
    rng = np.random.default_rng(0)
    mean = rng.normal(size=25)
    r = _report(mean)
    scores = aggregate_importance_by_electrode(r)
    for e in range(5):
        assert abs(scores[e] - sum(mean[5 * e:5 * e + 5])) < 1e-12
    assert abs(scores.sum() - mean.sum()) < 1e-12


def test_feature_count_mismatch():
    with pytest.raises(ValueError):
        aggregate_importance_by_electrode(_report(np.zeros(24)))


def test_serialisations():
    d = _one_feature_data()
    m = fit_tree(d, cfg=TreeConfig(max_depth=2))
    r = permutation_importance(m, d, 2, 0, context={"model": "Tree", "attack": "none", "rate": "0"})
    doc = json.loads(r.to_json())
    assert len(doc["features"]) == 25 and doc["repeats"] == 2
    assert set(doc["electrodes"]) == set(FeatureSchema().electrodes)
    lines = r.to_csv().splitlines()
    assert lines[0] == "feature,electrode,band,mean,stddev,model,attack,rate"
    assert len(lines) == 26
    assert lines[1].startswith("AF3_Theta,AF3,Theta,")
