"""Kano scoring: category fractions to satisfaction/dissatisfaction values."""

from __future__ import annotations

import math
from collections import defaultdict
from typing import TYPE_CHECKING, Iterable, Mapping, NamedTuple, Sequence

from .errors import DataError

if TYPE_CHECKING:
    from .ingest import KanoResponseRecord

ANSWERS = ("like", "must-be", "neutral", "live-with", "dislike")

# rows: functional answer, columns: dysfunctional answer, both in ANSWERS order
EVALUATION_MATRIX = (
    ("Q", "A", "A", "A", "O"),
    ("R", "I", "I", "I", "M"),
    ("R", "I", "I", "I", "M"),
    ("R", "I", "I", "I", "M"),
    ("R", "R", "R", "R", "Q"),
)

_TOL = 1e-6


class KanoFractions(NamedTuple):
    """Category proportions: Attractive, One-dimensional, Must-be,
    Indifferent, Reverse, Questionable."""

    a: float = 0.0
    o: float = 0.0
    m: float = 0.0
    i: float = 0.0
    r: float = 0.0
    q: float = 0.0

    def validate(self) -> "KanoFractions":
        if any(not (0.0 <= v <= 1.0) for v in self):
            raise DataError(f"Kano fractions must lie in [0, 1]: {tuple(self)}")
        if abs(math.fsum(self) - 1.0) > _TOL:
            raise DataError(f"Kano fractions must sum to 1: {tuple(self)}")
        return self


class FeatureValue(NamedTuple):
    satisfaction: float
    dissatisfaction: float


def classify_raw_response(
    functional: Sequence[float], dysfunctional: Sequence[float]
) -> KanoFractions:
    """Route every functional x dysfunctional answer pair through the
    evaluation matrix, weighting each cell by the product of the two
    answer shares."""
    if len(functional) != 5 or len(dysfunctional) != 5:
        raise DataError("raw Kano responses need 5 functional and 5 dysfunctional shares")
    for name, dist in (("functional", functional), ("dysfunctional", dysfunctional)):
        if any(v < 0 for v in dist) or abs(math.fsum(dist) - 1.0) > _TOL:
            raise DataError(f"{name} distribution is not normalized: {tuple(dist)}")
    acc: dict[str, float] = dict.fromkeys("AOMIRQ", 0.0)
    for fi, fw in enumerate(functional):
        if fw == 0:
            continue
        row = EVALUATION_MATRIX[fi]
        for di, dw in enumerate(dysfunctional):
            acc[row[di]] += fw * dw
    return KanoFractions(acc["A"], acc["O"], acc["M"], acc["I"], acc["R"], acc["Q"])


def aggregate_fractions(
    fractions: Sequence[KanoFractions], weights: Sequence[float]
) -> KanoFractions:
    """Weighted component-wise mean (weights normalized to sum 1)."""
    if not fractions:
        raise DataError("no responses to aggregate")
    if len(fractions) != len(weights):
        raise ValueError("fractions and weights differ in length")
    if any(w <= 0 for w in weights):
        raise DataError("stakeholder weights must be positive")
    total = math.fsum(weights)
    return KanoFractions(
        *(math.fsum(w * f[j] for f, w in zip(fractions, weights)) / total for j in range(6))
    )


def _classified_mass(f: KanoFractions) -> float:
    denom = f.a + f.o + f.i + f.m
    if denom <= 0:
        raise DataError("no classifiable responses (a+o+m+i = 0)")
    return denom


def compute_satisfaction(f: KanoFractions) -> float:
    return (f.a + f.o) / _classified_mass(f)


def compute_dissatisfaction(f: KanoFractions) -> float:
    return (f.m + f.o) / _classified_mass(f)


def feature_value(f: KanoFractions) -> FeatureValue:
    return FeatureValue(compute_satisfaction(f), compute_dissatisfaction(f))


def response_fractions(record: "KanoResponseRecord") -> KanoFractions:
    if record.fractions is not None:
        return record.fractions
    return classify_raw_response(record.functional, record.dysfunctional)


def feature_values(
    responses: Iterable["KanoResponseRecord"],
    weights: Mapping[str, float],
    feature_ids: Sequence[str],
) -> dict[str, FeatureValue]:
    """Stakeholder-weighted S/DS per feature.

    Fractions are aggregated across stakeholders first; the S/DS formulas are
    applied once to the aggregate.
    """
    by_feature: dict[str, list[tuple[KanoFractions, float]]] = defaultdict(list)
    for rec in responses:
        if rec.stakeholder_id not in weights:
            raise DataError(f"response references unknown stakeholder {rec.stakeholder_id!r}")
        by_feature[rec.feature_id].append((response_fractions(rec), weights[rec.stakeholder_id]))
    out = {}
    for fid in feature_ids:
        rows = by_feature.get(fid)
        if not rows:
            raise DataError(f"no Kano responses for feature {fid!r}")
        agg = aggregate_fractions([f for f, _ in rows], [w for _, w in rows])
        try:
            out[fid] = feature_value(agg)
        except DataError as exc:
            raise DataError(f"feature {fid!r}: {exc}") from None
    return out


def stakeholder_feature_values(
    responses: Iterable["KanoResponseRecord"],
    stakeholder_ids: Sequence[str],
    feature_ids: Sequence[str],
) -> dict[str, dict[str, FeatureValue]]:
    """S/DS per stakeholder, each computed from that stakeholder's answers alone.

    A feature the stakeholder did not rate (or rated only Reverse or
    Questionable) scores (0, 0) for them.
    """
    by_stakeholder: dict[str, dict[str, KanoFractions]] = defaultdict(dict)
    for rec in responses:
        by_stakeholder[rec.stakeholder_id][rec.feature_id] = response_fractions(rec)
    out = {}
    for sid in stakeholder_ids:
        answers = by_stakeholder.get(sid)
        if not answers:
            raise DataError(f"stakeholder {sid!r} has no Kano responses")
        values = {}
        for fid in feature_ids:
            f = answers.get(fid)
            if f is None or f.a + f.o + f.i + f.m <= 0:
                values[fid] = FeatureValue(0.0, 0.0)
            else:
                values[fid] = feature_value(f)
        out[sid] = values
    return out
