from __future__ import annotations

import itertools

import numpy as np
import pytest

from arplan.errors import DataError
from arplan.ingest import KanoResponseRecord
from arplan.kano import (
    EVALUATION_MATRIX,
    KanoFractions,
    aggregate_fractions,
    classify_raw_response,
    compute_dissatisfaction,
    compute_satisfaction,
    feature_values,
    stakeholder_feature_values,
)

LIKE, MUST, NEUTRAL, LIVE, DISLIKE = range(5)


def onehot(j):
    v = [0.0] * 5
    v[j] = 1.0
    return v


def test_like_dislike_is_one_dimensional():
    assert classify_raw_response(onehot(LIKE), onehot(DISLIKE)) == KanoFractions(o=1.0)


def test_neutral_neutral_is_indifferent():
    assert classify_raw_response(onehot(NEUTRAL), onehot(NEUTRAL)) == KanoFractions(i=1.0)


def test_split_functional_answer():
    f = classify_raw_response([0.5, 0, 0.5, 0, 0], onehot(DISLIKE))
    assert f.o == pytest.approx(0.5, abs=1e-12)
    assert f.m == pytest.approx(0.5, abs=1e-12)
    assert f.a == f.i == f.r == f.q == 0


def test_evaluation_matrix_corners():
    # diagonal extremes are questionable, like/neutral attractive, neutral/dislike must-be
    assert EVALUATION_MATRIX[LIKE][LIKE] == "Q"
    assert EVALUATION_MATRIX[DISLIKE][DISLIKE] == "Q"
    assert EVALUATION_MATRIX[LIKE][NEUTRAL] == "A"
    assert EVALUATION_MATRIX[NEUTRAL][DISLIKE] == "M"
    assert EVALUATION_MATRIX[DISLIKE][LIKE] == "R"


def test_classification_mass_is_preserved():
    rng = np.random.default_rng(3)
    for _ in range(50):
        f = classify_raw_response(rng.dirichlet(np.ones(5)), rng.dirichlet(np.ones(5)))
        assert sum(f) == pytest.approx(1.0, abs=1e-12)


def test_classification_is_bilinear_in_cells():
    rng = np.random.default_rng(4)
    fd, dd = rng.dirichlet(np.ones(5)), rng.dirichlet(np.ones(5))
    expected = dict.fromkeys("AOMIRQ", 0.0)
    for i, j in itertools.product(range(5), repeat=2):
        expected[EVALUATION_MATRIX[i][j]] += fd[i] * dd[j]
    got = classify_raw_response(fd, dd)
    for cat, val in zip("AOMIRQ", got):
        assert val == pytest.approx(expected[cat], abs=1e-12)


def test_classify_rejects_bad_distributions():
    with pytest.raises(DataError):
        classify_raw_response([0.5] * 5, onehot(LIKE))
    with pytest.raises(DataError):
        classify_raw_response([1.0] * 4, onehot(LIKE))


def test_aggregate_single_is_identity():
    f = KanoFractions(0.1, 0.2, 0.3, 0.4)
    assert aggregate_fractions([f], [7]) == pytest.approx(f)


def test_aggregate_weighted():
    agg = aggregate_fractions([KanoFractions(a=1.0), KanoFractions(i=1.0)], [2, 1])
    assert agg.a == pytest.approx(2 / 3, abs=1e-12)
    assert agg.i == pytest.approx(1 / 3, abs=1e-12)


def test_aggregate_equal_weights_symmetry():
    agg = aggregate_fractions([KanoFractions(a=0.4, i=0.6), KanoFractions(a=0.6, i=0.4)], [1, 1])
    assert agg.a == pytest.approx(0.5, abs=1e-12)


def test_aggregate_errors():
    with pytest.raises(DataError):
        aggregate_fractions([], [])
    with pytest.raises(DataError):
        aggregate_fractions([KanoFractions(a=1.0)], [0])


@pytest.mark.parametrize(
    "f,s,ds",
    [
        (KanoFractions(a=0.5, o=0.25, m=0.25), 0.75, 0.5),
        (KanoFractions(i=1.0), 0.0, 0.0),
        (KanoFractions(0.2, 0.2, 0.2, 0.2, 0.2), 0.5, 0.5),
        (KanoFractions(a=1.0), 1.0, 0.0),
        (KanoFractions(m=1.0), 0.0, 1.0),
    ],
)
def test_satisfaction_dissatisfaction(f, s, ds):
    assert abs(compute_satisfaction(f) - s) <= 1e-9
    assert abs(compute_dissatisfaction(f) - ds) <= 1e-9


def test_scores_need_classifiable_mass():
    with pytest.raises(DataError, match="no classifiable"):
        compute_satisfaction(KanoFractions(r=0.5, q=0.5))


def test_validate():
    KanoFractions(a=1.0).validate()
    with pytest.raises(DataError):
        KanoFractions(a=0.5).validate()
    with pytest.raises(DataError):
        KanoFractions(a=1.5, o=-0.5).validate()


def test_feature_values_aggregate_before_scoring():
    # S of the mean differs from the mean of S here, so this pins the order
    responses = [
        KanoResponseRecord("S1", "F1", fractions=KanoFractions(a=0.5, r=0.5)),
        KanoResponseRecord("S2", "F1", fractions=KanoFractions(i=1.0)),
    ]
    (v,) = feature_values(responses, {"S1": 1, "S2": 1}, ["F1"]).values()
    assert v.satisfaction == pytest.approx(0.25 / 0.75, abs=1e-12)
    assert v.dissatisfaction == 0.0


def test_feature_values_missing_feature_named():
    responses = [KanoResponseRecord("S1", "F1", fractions=KanoFractions(a=1.0))]
    with pytest.raises(DataError, match="'F2'"):
        feature_values(responses, {"S1": 1}, ["F1", "F2"])


def test_raw_and_fraction_modes_agree():
    fd, dd = [0.5, 0, 0.5, 0, 0], onehot(DISLIKE)
    raw = [KanoResponseRecord("S1", "F1", functional=tuple(fd), dysfunctional=tuple(dd))]
    frac = [KanoResponseRecord("S1", "F1", fractions=KanoFractions(o=0.5, m=0.5))]
    assert feature_values(raw, {"S1": 1}, ["F1"]) == feature_values(frac, {"S1": 1}, ["F1"])


def test_stakeholder_values():
    responses = [
        KanoResponseRecord("S1", "F2", fractions=KanoFractions(a=1.0)),
        KanoResponseRecord("S2", "F1", fractions=KanoFractions(m=1.0)),
        KanoResponseRecord("S2", "F2", fractions=KanoFractions(r=1.0)),
    ]
    out = stakeholder_feature_values(responses, ["S1", "S2"], ["F1", "F2"])
    assert out["S1"] == {"F1": (0.0, 0.0), "F2": (1.0, 0.0)}
    assert out["S2"] == {"F1": (0.0, 1.0), "F2": (0.0, 0.0)}
    with pytest.raises(DataError, match="'S3'"):
        stakeholder_feature_values(responses, ["S3"], ["F1"])
