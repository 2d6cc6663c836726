import itertools

import numpy as np
import pytest

from poisonbench.domain import (
    DEFAULT_BANDS,
    Dataset,
    FeatureSchema,
    LabelParseError,
    RiskLabel,
    feature_location,
    parse_label,
)


def test_codes_are_a_bijection_onto_0_to_3():
    assert sorted(int(v) for v in RiskLabel) == [0, 1, 2, 3]
    assert [v.name for v in RiskLabel] == ["HighRisk", "MediumRisk", "LowRisk", "Normal"]


@pytest.mark.parametrize("label", list(RiskLabel))
def test_render_parse_round_trip(label):
    assert parse_label(label.render()) is label


@pytest.mark.parametrize(
    "text, expected",
    [("High-Risk", RiskLabel.HighRisk), ("normal", RiskLabel.Normal), ("Medium Risk", RiskLabel.MediumRisk)],
)
def test_parse_examples(text, expected):
    assert parse_label(text) is expected


def test_parse_tolerates_every_separator_and_case():
    for label, (a, b) in zip(RiskLabel, [("high", "risk"), ("medium", "risk"), ("low", "risk")]):
        for sep, ca, cb in itertools.product(["-", " ", "_", ""], [str.lower, str.upper, str.title], [str.lower, str.title]):
            assert parse_label(ca(a) + sep + cb(b)) is label


def test_parse_error_names_token_and_choices():
    with pytest.raises(LabelParseError) as err:
        parse_label("Severe")
    msg = str(err.value)
    assert "Severe" in msg
    for name in ("High-Risk", "Medium-Risk", "Low-Risk", "Normal"):
        assert name in msg


def test_feature_location_examples():
    schema = FeatureSchema()
    assert feature_location(0) == (schema.electrodes[0], "Theta")
    assert feature_location(24) == (schema.electrodes[4], "Gamma")
    assert feature_location(7) == (schema.electrodes[1], "LowBeta")


def test_feature_location_full_table_is_a_bijection():
    schema = FeatureSchema()
    table = [schema.feature_location(i) for i in range(25)]
    expected = [(e, b) for e in schema.electrodes for b in DEFAULT_BANDS]
    assert table == expected
    assert len(set(table)) == 25
    assert len(set(schema.feature_names)) == 25


@pytest.mark.parametrize("index", [-1, 25, 100])
def test_feature_location_bounds(index):
    with pytest.raises(IndexError):
        feature_location(index)


def test_custom_electrodes():
    schema = FeatureSchema(electrodes=("Fp1", "Fp2", "C3", "C4", "Oz"))
    assert schema.feature_location(21) == ("Oz", "Alpha")
    with pytest.raises(ValueError):
        FeatureSchema(electrodes=("A", "A", "B", "C", "D"))


def test_dataset_rejects_non_finite_and_mismatch():
    X = np.zeros((3, 25))
    Dataset(X, [0, 1, 2])
    with pytest.raises(ValueError, match="3 feature rows but 2 labels"):
        Dataset(X, [0, 1])
    for bad in (np.nan, np.inf, -np.inf):
        Xb = X.copy()
        Xb[1, 4] = bad
        with pytest.raises(ValueError, match="NaN or infinite"):
            Dataset(Xb, [0, 1, 2])


def test_dataset_is_immutable_copy():
    X = np.zeros((2, 25))
    d = Dataset(X, [0, 3])
    X[0, 0] = 5.0
    assert d.features[0, 0] == 0.0
    with pytest.raises(ValueError):
        d.features[0, 0] = 1.0
    assert d.risk_labels() == [RiskLabel.HighRisk, RiskLabel.Normal]
