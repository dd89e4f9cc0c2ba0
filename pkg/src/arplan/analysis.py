"""Dominance checks, Pareto filtering and plan comparison statistics.

Objective vectors are (TS, TDS): TS is maximised, TDS minimised.
"""

from __future__ import annotations

from collections import Counter
from typing import Hashable, Mapping, Sequence, TypeVar

import numpy as np

from .errors import DataError
from .model import ObjectiveVector, ReleasePlan

P = TypeVar("P")


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """True iff ``a`` is no worse than ``b`` on both criteria and better on one."""
    return a[0] >= b[0] and a[1] <= b[1] and (a[0] > b[0] or a[1] < b[1])


def weakly_dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    return a[0] >= b[0] and a[1] <= b[1]


def _front_key(item):
    plan, obj = item
    x = plan.x if isinstance(plan, ReleasePlan) else tuple(plan)
    return (-obj[0], obj[1], x)


def pareto_filter(items: Sequence[tuple[P, ObjectiveVector]]) -> list[tuple[P, ObjectiveVector]]:
    """Non-dominated subset, ordered by TS desc, TDS asc, then plan.

    Items with equal objective vectors are all kept.
    """
    ordered = sorted(items, key=_front_key)
    out = []
    best_tds = np.inf  # smallest TDS among items with strictly larger TS
    group_ts = None
    group_min = np.inf
    for plan, obj in ordered:
        ts, tds = obj[0], obj[1]
        if ts != group_ts:
            best_tds = min(best_tds, group_min)
            group_ts, group_min = ts, tds
        # within an equal-TS group the first item has the smallest TDS
        if tds < best_tds and tds == group_min:
            out.append((plan, obj))
    return out


def dominated_fraction(
    candidates: Sequence[ObjectiveVector], reference: Sequence[ObjectiveVector]
) -> float:
    """Share of candidates strictly dominated by at least one reference vector."""
    if not candidates:
        raise DataError("no candidates to compare")
    hit = sum(1 for c in candidates if any(dominates(r, c) for r in reference))
    return hit / len(candidates)


def weakly_dominated_fraction(
    candidates: Sequence[ObjectiveVector], reference: Sequence[ObjectiveVector]
) -> float:
    """Share of candidates dominated by, or equal to, some reference vector."""
    if not candidates:
        raise DataError("no candidates to compare")
    hit = sum(1 for c in candidates if any(weakly_dominates(r, c) for r in reference))
    return hit / len(candidates)


def plan_distance(a: ReleasePlan | Sequence[int], b: ReleasePlan | Sequence[int]) -> int:
    """Hamming distance between two assignment vectors."""
    xa, xb = tuple(a), tuple(b)
    if len(xa) != len(xb):
        raise ValueError("plans differ in length")
    return sum(1 for u, v in zip(xa, xb) if u != v)


def distance_matrix(plans: Sequence[ReleasePlan]) -> list[list[int]]:
    return [[plan_distance(a, b) for b in plans] for a in plans]


def stakeholder_objectives(
    plan: ReleasePlan | Sequence[int],
    values: Mapping[str, tuple[float, float]],
    feature_ids: Sequence[str],
    w: Sequence[float],
    z: Sequence[float],
) -> ObjectiveVector:
    ts = 0.0
    tds = 0.0
    for fid, r in zip(feature_ids, plan):
        s, ds = values[fid]
        ts += w[r - 1] * s
        tds += z[r - 1] * ds
    return ObjectiveVector(ts, tds)


def rank_plans_per_stakeholder(
    plans: Sequence[ReleasePlan],
    stakeholder_values: Mapping[str, Mapping[str, tuple[float, float]]],
    feature_ids: Sequence[str],
    w: Sequence[float],
    z: Sequence[float],
) -> dict[str, dict]:
    """Each stakeholder's view of the plans.

    For every stakeholder returns their (TS, TDS) per plan, plan indices
    ordered by TS (desc) and by TDS (asc), and the top choice under each
    criterion. Ties keep the input plan order.
    """
    if not plans:
        raise DataError("no plans to rank")
    if not stakeholder_values:
        raise DataError("no stakeholders to rank plans for")
    out = {}
    for sid, values in stakeholder_values.items():
        if not values:
            raise DataError(f"stakeholder {sid!r} has no responses")
        objs = [stakeholder_objectives(p, values, feature_ids, w, z) for p in plans]
        by_ts = sorted(range(len(plans)), key=lambda i: -objs[i].ts)
        by_tds = sorted(range(len(plans)), key=lambda i: objs[i].tds)
        out[sid] = {
            "objectives": objs,
            "by_ts": by_ts,
            "by_tds": by_tds,
            "top_ts": by_ts[0],
            "top_tds": by_tds[0],
        }
    return out


def fleiss_kappa(matrix: Sequence[Sequence[Hashable]]) -> float:
    """Fleiss' kappa for a subjects x raters matrix of categorical labels.

    When every rating falls into one category the chance agreement is 1 and
    the statistic is undefined; agreement is then perfect and 1.0 is returned.
    """
    rows = [list(r) for r in matrix]
    if not rows:
        raise DataError("need at least one subject")
    n_raters = len(rows[0])
    if n_raters < 2:
        raise DataError("need at least two raters")
    if any(len(r) != n_raters for r in rows):
        raise DataError("ratings matrix must be rectangular")
    categories = sorted({c for r in rows for c in r}, key=repr)
    col = {c: j for j, c in enumerate(categories)}
    counts = np.zeros((len(rows), len(categories)))
    for i, r in enumerate(rows):
        for label, n in Counter(r).items():
            counts[i, col[label]] = n
    n_sub = len(rows)
    p_j = counts.sum(axis=0) / (n_sub * n_raters)
    p_i = ((counts * counts).sum(axis=1) - n_raters) / (n_raters * (n_raters - 1))
    p_bar = p_i.mean()
    p_e = float((p_j * p_j).sum())
    if p_e >= 1.0:
        return 1.0
    return float((p_bar - p_e) / (1.0 - p_e))


def top_choice_matrix(rankings: Mapping[str, dict], n_plans: int) -> list[list[int]]:
    """Ratings matrix for kappa: one row per (plan, criterion), one column per
    stakeholder, cell 1 if that plan is the stakeholder's top choice under
    that criterion, else 0."""
    sids = list(rankings)
    rows = []
    for crit in ("top_ts", "top_tds"):
        for p in range(n_plans):
            rows.append([1 if rankings[s][crit] == p else 0 for s in sids])
    return rows
