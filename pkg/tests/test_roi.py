from __future__ import annotations

import json

import pytest

from arplan.errors import DataError
from arplan.roi import CashflowSeries, npv, npv_added, parse_cashflows


def test_npv_examples():
    assert npv(CashflowSeries((100, 100, 100), 0.0)) == 300.0
    assert npv(CashflowSeries((50,), 0.37)) == 50.0
    # 100 + 100/1.1 + 100/1.21
    assert abs(npv(CashflowSeries((100, 100, 100), 0.1)) - 273.5537190082645) <= 1e-6


def test_npv_added_examples():
    s = CashflowSeries((100, 100, 100), 0.1)
    assert npv_added(s, s) == 0.0
    assert abs(npv_added(s, CashflowSeries((250,), 0.1)) - 23.5537) <= 1e-4
    assert npv_added(s, CashflowSeries((0, 0, 0), 0.1)) == npv(s)


def test_series_validation():
    with pytest.raises(DataError):
        CashflowSeries((1,), -1.0)
    with pytest.raises(DataError):
        CashflowSeries((float("nan"),), 0.1)


def test_parse_cashflows():
    (s,) = parse_cashflows('{"d": 0, "r": [100, 100, 100]}')
    assert npv(s) == 300.0
    a, b = parse_cashflows(json.dumps([{"d": 0.1, "r": [1, 2]}, {"d": 0.1, "r": [1]}]))
    assert b.r == (1.0,)


@pytest.mark.parametrize(
    "doc", ["{bad", "[]", '{"d": 0}', '{"d": 0, "r": 5}', '{"d": "x", "r": [1]}', '{"d": 0, "r": ["a"]}', "[1, 2, 3]"]
)
def test_parse_cashflows_rejects(doc):
    with pytest.raises(DataError):
        parse_cashflows(doc)
