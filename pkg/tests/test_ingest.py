from __future__ import annotations

import json

import pytest

from arplan.errors import DataError
from arplan.ingest import (
    FeatureRecord,
    KanoResponseRecord,
    StakeholderRecord,
    combine_triangular_effort,
    format_features,
    format_kano_responses,
    format_stakeholders,
    parse_features,
    parse_kano_responses,
    parse_scenario,
    parse_stakeholders,
)
from arplan.kano import KanoFractions

FEAT_HEADER = "id,name,effort_opt,effort_ml,effort_pess\n"
FRAC_HEADER = "stakeholder_id,feature_id,a,o,m,i,r,q\n"
RAW_HEADER = "stakeholder_id,feature_id,f1,f2,f3,f4,f5,d1,d2,d3,d4,d5\n"


def test_feature_row_maps_fields():
    (rec,) = parse_features(FEAT_HEADER + "F1,Search,10,20,40\n")
    assert rec == FeatureRecord("F1", "Search", 10.0, 20.0, 40.0)


def test_feature_ordering_violation_names_row():
    with pytest.raises(DataError, match="row 2.*ordering"):
        parse_features(FEAT_HEADER + "F1,Search,40,20,10\n")


def test_duplicate_feature_id():
    with pytest.raises(DataError, match="row 3: duplicate id 'F1'"):
        parse_features(FEAT_HEADER + "F1,a,1,2,3\nF1,b,1,2,3\n")


@pytest.mark.parametrize("cell", ["abc", "nan", "inf"])
def test_feature_bad_number(cell):
    with pytest.raises(DataError, match="row 2"):
        parse_features(FEAT_HEADER + f"F1,a,{cell},2,3\n")


def test_missing_column():
    with pytest.raises(DataError, match="missing column"):
        parse_features("id,name,effort_opt\nF1,a,1\n")


def test_blank_lines_are_skipped():
    recs = parse_features(FEAT_HEADER + "F1,a,1,2,3\n\nF2,b,1,1,1\n")
    assert [r.id for r in recs] == ["F1", "F2"]


@pytest.mark.parametrize(
    "o,m,p,expected", [(10, 20, 40, 130 / 6), (15, 15, 15, 15.0), (0, 0, 0, 0.0)]
)
def test_pert_effort(o, m, p, expected):
    assert combine_triangular_effort(o, m, p) == pytest.approx(expected, abs=1e-12)
    assert FeatureRecord("F", "", o, m, p).effort == pytest.approx(expected, abs=1e-12)


def test_pert_rejects_unordered():
    with pytest.raises(DataError):
        combine_triangular_effort(3, 2, 1)


def test_stakeholder_rows():
    assert parse_stakeholders("id,weight\nS1,9\n") == [StakeholderRecord("S1", 9)]
    with pytest.raises(DataError, match="out of range"):
        parse_stakeholders("id,weight\nS2,0\n")
    with pytest.raises(DataError, match="integer"):
        parse_stakeholders("id,weight\nS2,2.5\n")


def test_empty_stakeholder_file():
    assert parse_stakeholders("") == []
    assert parse_stakeholders("id,weight\n") == []


def test_fractions_row():
    (rec,) = parse_kano_responses(FRAC_HEADER + "S1,F1,0.5,0.25,0.25,0,0,0\n", "fractions")
    assert rec.mode == "fractions"
    assert rec.fractions == KanoFractions(0.5, 0.25, 0.25, 0.0, 0.0, 0.0)


def test_fractions_not_normalized():
    with pytest.raises(DataError, match="not normalized"):
        parse_kano_responses(FRAC_HEADER + "S1,F1,0.5,0.2,0.2,0,0,0\n", "fractions")


def test_raw_row():
    (rec,) = parse_kano_responses(
        RAW_HEADER + "S1,F1,0.5,0,0.5,0,0,0,0,0,0,1\n", "raw"
    )
    assert rec.mode == "raw"
    assert rec.functional == (0.5, 0.0, 0.5, 0.0, 0.0)
    assert rec.dysfunctional == (0.0, 0.0, 0.0, 0.0, 1.0)


def test_raw_row_unnormalized():
    with pytest.raises(DataError, match="dysfunctional"):
        parse_kano_responses(RAW_HEADER + "S1,F1,1,0,0,0,0,0,0,0,0,0.5\n", "raw")


def test_unknown_ids_and_duplicates():
    text = FRAC_HEADER + "S1,F9,1,0,0,0,0,0\n"
    with pytest.raises(DataError, match="unknown feature id 'F9'"):
        parse_kano_responses(text, "fractions", ["S1"], ["F1"])
    with pytest.raises(DataError, match="unknown stakeholder id 'S1'"):
        parse_kano_responses(text, "fractions", ["S2"], ["F9"])
    dup = FRAC_HEADER + "S1,F1,1,0,0,0,0,0\nS1,F1,1,0,0,0,0,0\n"
    with pytest.raises(DataError, match="duplicate"):
        parse_kano_responses(dup, "fractions")


def test_unknown_mode():
    with pytest.raises(ValueError):
        parse_kano_responses(FRAC_HEADER, "likert")


def test_scenario_parse():
    sc = parse_scenario(json.dumps({"k": 2, "scenarios": [[1, 2], [3, 4]], "seed": 5, "note": "x"}))
    assert sc.k == 2 and sc.scenarios == ((1.0, 2.0), (3.0, 4.0))
    assert sc.seed == 5 and sc.lambda_steps == 101 and sc.extra == {"note": "x"}


@pytest.mark.parametrize(
    "doc",
    [
        "[1]",
        '{"scenarios": [[1]]}',
        '{"k": 0, "scenarios": [[1]]}',
        '{"k": 2, "scenarios": [[1]]}',
        '{"k": 1, "scenarios": [[-1]]}',
        '{"k": 1, "scenarios": [[1]], "w": [1, 0.5]}',
        '{"k": 1, "scenarios": [[1]], "z": [0.2, 1]}',
        '{"k": 1, "scenarios": [[1]], "lambda_steps": 1}',
        "{not json",
    ],
)
def test_scenario_rejects(doc):
    with pytest.raises(DataError):
        parse_scenario(doc)


def test_format_round_trip():
    feats = [FeatureRecord("F1", "Search, advanced", 1.5, 2.0, 3.25)]
    assert parse_features(format_features(feats)) == feats
    shs = [StakeholderRecord("S1", 3), StakeholderRecord("S2", 9)]
    assert parse_stakeholders(format_stakeholders(shs)) == shs
    frac = [KanoResponseRecord("S1", "F1", fractions=KanoFractions(0.1, 0.2, 0.3, 0.4, 0.0, 0.0))]
    assert parse_kano_responses(format_kano_responses(frac), "fractions") == frac
    raw = [KanoResponseRecord("S1", "F1", functional=(0.2, 0.2, 0.2, 0.2, 0.2), dysfunctional=(1.0, 0, 0, 0, 0))]
    assert parse_kano_responses(format_kano_responses(raw), "raw") == [
        KanoResponseRecord("S1", "F1", functional=(0.2, 0.2, 0.2, 0.2, 0.2), dysfunctional=(1.0, 0.0, 0.0, 0.0, 0.0))
    ]
