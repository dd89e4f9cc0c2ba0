from __future__ import annotations

import numpy as np
import pytest
from statsmodels.stats import inter_rater

from arplan.analysis import (
    distance_matrix,
    dominated_fraction,
    dominates,
    fleiss_kappa,
    pareto_filter,
    plan_distance,
    rank_plans_per_stakeholder,
    stakeholder_objectives,
    top_choice_matrix,
    weakly_dominated_fraction,
)
from arplan.errors import DataError
from arplan.model import ReleasePlan


def test_dominates_examples():
    assert dominates((0.8, 0.3), (0.7, 0.4))
    assert not dominates((0.8, 0.5), (0.7, 0.4))
    assert not dominates((0.7, 0.4), (0.7, 0.4))
    assert dominates((0.7, 0.3), (0.7, 0.4))


def test_pareto_filter_examples():
    p, q = ReleasePlan((1,)), ReleasePlan((2,))
    assert pareto_filter([(p, (0.8, 0.3)), (q, (0.7, 0.4))]) == [(p, (0.8, 0.3))]
    assert pareto_filter([(q, (0.5, 0.5)), (p, (0.75, 0.8))]) == [(p, (0.75, 0.8)), (q, (0.5, 0.5))]
    assert pareto_filter([]) == []


def test_pareto_filter_keeps_ties_and_drops_equal_ts_worse_tds():
    a, b, c = ReleasePlan((1, 2)), ReleasePlan((2, 1)), ReleasePlan((2, 2))
    out = pareto_filter([(b, (0.5, 0.5)), (a, (0.5, 0.5)), (c, (0.5, 0.6))])
    assert out == [(a, (0.5, 0.5)), (b, (0.5, 0.5))]


def test_dominated_fraction_examples():
    front = [(0.8, 0.2)]
    assert dominated_fraction([(0.1, 0.9), (0.5, 0.5)], front) == 1.0
    assert dominated_fraction([(0.8, 0.2)], front) == 0.0
    assert weakly_dominated_fraction([(0.8, 0.2)], front) == 1.0
    assert dominated_fraction([(0.1, 0.9), (0.5, 0.5), (0.9, 0.1)], front) == pytest.approx(2 / 3, abs=1e-12)
    with pytest.raises(DataError):
        dominated_fraction([], front)
    with pytest.raises(DataError):
        weakly_dominated_fraction([], front)


def test_plan_distance_examples():
    assert plan_distance((1, 2, 3), (1, 2, 3)) == 0
    assert plan_distance(ReleasePlan((1, 2)), ReleasePlan((2, 2))) == 1
    assert plan_distance((1, 1, 1), (2, 3, 2)) == 3
    with pytest.raises(ValueError):
        plan_distance((1,), (1, 2))
    assert distance_matrix([ReleasePlan((1, 2)), ReleasePlan((2, 2))]) == [[0, 1], [1, 0]]


def test_stakeholder_prefers_plan_delivering_their_feature():
    values = {"S1": {"F1": (0.0, 0.0), "F2": (1.0, 0.0)}}
    plans = [ReleasePlan((1, 3)), ReleasePlan((2, 2)), ReleasePlan((3, 1))]
    w, z = (1.0, 0.5, 0.0), (0.0, 0.5, 1.0)
    r = rank_plans_per_stakeholder(plans, values, ["F1", "F2"], w, z)["S1"]
    assert r["top_ts"] == 2 and r["by_ts"] == [2, 1, 0]
    assert stakeholder_objectives(plans[1], values["S1"], ["F1", "F2"], w, z) == (0.5, 0.0)


def test_ranking_single_plan_and_identical_stakeholders():
    v = {"F1": (0.3, 0.6), "F2": (0.9, 0.1)}
    plans = [ReleasePlan((1, 2)), ReleasePlan((2, 1)), ReleasePlan((1, 1))]
    r = rank_plans_per_stakeholder(plans, {"A": v, "B": dict(v)}, ["F1", "F2"], (1, 0), (0, 1))
    assert r["A"]["by_ts"] == r["B"]["by_ts"] and r["A"]["by_tds"] == r["B"]["by_tds"]
    single = rank_plans_per_stakeholder(plans[:1], {"A": v, "B": v}, ["F1", "F2"], (1, 0), (0, 1))
    assert all(x["top_ts"] == x["top_tds"] == 0 for x in single.values())
    with pytest.raises(DataError):
        rank_plans_per_stakeholder([], {"A": v}, ["F1", "F2"], (1, 0), (0, 1))
    with pytest.raises(DataError):
        rank_plans_per_stakeholder(plans, {}, ["F1", "F2"], (1, 0), (0, 1))


def test_kappa_perfect_agreement():
    assert fleiss_kappa([["A"] * 5] * 4) == 1.0
    assert fleiss_kappa([["A", "A"], ["B", "B"], ["A", "A"]]) == 1.0


def test_kappa_hand_value():
    # P = (1 + 0)/2, Pe = (3/4)^2 + (1/4)^2 = 5/8, kappa = (1/2 - 5/8)/(3/8)
    assert fleiss_kappa([["A", "A"], ["A", "B"]]) == pytest.approx(-1 / 3, abs=1e-12)


def _statsmodels_kappa(matrix):
    codes = {c: i for i, c in enumerate(sorted({c for r in matrix for c in r}))}
    table, _ = inter_rater.aggregate_raters(np.array([[codes[c] for c in r] for r in matrix]))
    return inter_rater.fleiss_kappa(table, method="fleiss")


@pytest.mark.parametrize("seed", range(20))
def test_kappa_matches_statsmodels(seed):
    rng = np.random.default_rng(seed)
    n_sub, n_rat, n_cat = int(rng.integers(2, 30)), int(rng.integers(2, 12)), int(rng.integers(2, 5))
    matrix = rng.integers(0, n_cat, (n_sub, n_rat))
    # bias a few subjects towards agreement so kappa is not always ~0
    matrix[: n_sub // 2] = np.where(rng.random((n_sub // 2, n_rat)) < 0.7, 0, matrix[: n_sub // 2])
    rows = matrix.tolist()
    if len({c for r in rows for c in r}) < 2:
        pytest.skip("degenerate draw")
    assert fleiss_kappa(rows) == pytest.approx(_statsmodels_kappa(rows), abs=1e-12)


def test_kappa_input_checks():
    with pytest.raises(DataError):
        fleiss_kappa([])
    with pytest.raises(DataError):
        fleiss_kappa([["A"], ["B"]])
    with pytest.raises(DataError):
        fleiss_kappa([["A", "B"], ["A"]])


def test_top_choice_matrix_layout():
    rankings = {"A": {"top_ts": 0, "top_tds": 1}, "B": {"top_ts": 1, "top_tds": 1}}
    assert top_choice_matrix(rankings, 2) == [[1, 0], [0, 1], [0, 0], [1, 1]]
