"""Readers for the CSV/JSON input formats.

All parsers take the file *contents* (a string) so they stay pure; the CLI
does the file I/O. Every rejected row is reported with its 1-based line
number (the header is line 1).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DataError
from .kano import KanoFractions

NORMALIZATION_TOL = 1e-6

FEATURE_COLUMNS = ("id", "name", "effort_opt", "effort_ml", "effort_pess")
STAKEHOLDER_COLUMNS = ("id", "weight")
KANO_FRACTION_COLUMNS = ("stakeholder_id", "feature_id", "a", "o", "m", "i", "r", "q")
KANO_RAW_COLUMNS = (
    ("stakeholder_id", "feature_id")
    + tuple(f"f{j}" for j in range(1, 6))
    + tuple(f"d{j}" for j in range(1, 6))
)


@dataclass(frozen=True)
class FeatureRecord:
    id: str
    name: str
    effort_optimistic: float
    effort_most_likely: float
    effort_pessimistic: float

    @property
    def effort(self) -> float:
        return combine_triangular_effort(
            self.effort_optimistic, self.effort_most_likely, self.effort_pessimistic
        )


@dataclass(frozen=True)
class StakeholderRecord:
    id: str
    weight: int


@dataclass(frozen=True)
class KanoResponseRecord:
    """One stakeholder's answer for one feature.

    Exactly one of ``fractions`` (fractions mode) or the pair
    ``functional``/``dysfunctional`` (raw mode) is populated.
    """

    stakeholder_id: str
    feature_id: str
    fractions: KanoFractions | None = None
    functional: tuple[float, ...] | None = None
    dysfunctional: tuple[float, ...] | None = None

    @property
    def mode(self) -> str:
        return "fractions" if self.fractions is not None else "raw"


@dataclass(frozen=True)
class ScenarioConfig:
    k: int
    scenarios: tuple[tuple[float, ...], ...]
    w: tuple[float, ...] | None = None
    z: tuple[float, ...] | None = None
    lambda_steps: int = 101
    seed: int = 0
    extra: dict = field(default_factory=dict, compare=False)


def combine_triangular_effort(o: float, m: float, p: float) -> float:
    """PERT mean of a three-point estimate: ``(o + 4m + p) / 6``."""
    if not (0 <= o <= m <= p):
        raise DataError(f"effort estimates must satisfy 0 <= o <= m <= p, got ({o}, {m}, {p})")
    return (o + 4.0 * m + p) / 6.0


def _rows(source: str, columns: Sequence[str], what: str) -> list[tuple[int, dict[str, str]]]:
    reader = csv.DictReader(io.StringIO(source))
    if reader.fieldnames is None:
        return []
    header = [h.strip() for h in reader.fieldnames]
    missing = [c for c in columns if c not in header]
    if missing:
        raise DataError(f"{what}: missing column(s) {', '.join(missing)}")
    reader.fieldnames = header
    out = []
    for row in reader:
        line = reader.line_num
        if all((v is None or not v.strip()) for v in row.values()):
            continue
        cells = {}
        for c in columns:
            v = row.get(c)
            if v is None:
                raise DataError(f"{what}: row {line}: missing value for {c!r}")
            cells[c] = v.strip()
        out.append((line, cells))
    return out


def _number(text: str, col: str, line: int, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{what}: row {line}: non-numeric {col} {text!r}") from None
    if not math.isfinite(value):
        raise DataError(f"{what}: row {line}: non-finite {col} {text!r}")
    return value


def parse_features(source: str) -> list[FeatureRecord]:
    what = "features"
    records: list[FeatureRecord] = []
    seen: set[str] = set()
    for line, row in _rows(source, FEATURE_COLUMNS, what):
        fid = row["id"]
        if not fid:
            raise DataError(f"{what}: row {line}: empty id")
        if fid in seen:
            raise DataError(f"{what}: row {line}: duplicate id {fid!r}")
        o, m, p = (_number(row[c], c, line, what) for c in FEATURE_COLUMNS[2:])
        if not (0 <= o <= m <= p):
            raise DataError(
                f"{what}: row {line}: effort ordering violation, need 0 <= opt <= ml <= pess"
            )
        seen.add(fid)
        records.append(FeatureRecord(fid, row["name"], o, m, p))
    return records


def parse_stakeholders(source: str) -> list[StakeholderRecord]:
    what = "stakeholders"
    records: list[StakeholderRecord] = []
    seen: set[str] = set()
    for line, row in _rows(source, STAKEHOLDER_COLUMNS, what):
        sid = row["id"]
        if not sid:
            raise DataError(f"{what}: row {line}: empty id")
        if sid in seen:
            raise DataError(f"{what}: row {line}: duplicate id {sid!r}")
        try:
            weight = int(row["weight"])
        except ValueError:
            raise DataError(f"{what}: row {line}: weight must be an integer, got {row['weight']!r}") from None
        if not 1 <= weight <= 9:
            raise DataError(f"{what}: row {line}: weight {weight} out of range [1, 9]")
        seen.add(sid)
        records.append(StakeholderRecord(sid, weight))
    return records


def _check_distribution(values: Sequence[float], label: str, line: int, what: str) -> None:
    if any(v < 0 or v > 1 for v in values):
        raise DataError(f"{what}: row {line}: {label} values must lie in [0, 1]")
    total = math.fsum(values)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise DataError(f"{what}: row {line}: {label} not normalized (sums to {total:.9g})")


def parse_kano_responses(
    source: str,
    mode: str = "fractions",
    stakeholder_ids: Iterable[str] | None = None,
    feature_ids: Iterable[str] | None = None,
) -> list[KanoResponseRecord]:
    """Parse a Kano response file in ``fractions`` or ``raw`` mode.

    When id collections are given, every row must reference a known
    stakeholder and feature.
    """
    if mode not in ("fractions", "raw"):
        raise ValueError(f"unknown kano mode {mode!r}")
    what = f"kano ({mode})"
    columns = KANO_FRACTION_COLUMNS if mode == "fractions" else KANO_RAW_COLUMNS
    known_s = set(stakeholder_ids) if stakeholder_ids is not None else None
    known_f = set(feature_ids) if feature_ids is not None else None
    records: list[KanoResponseRecord] = []
    seen: set[tuple[str, str]] = set()
    for line, row in _rows(source, columns, what):
        sid, fid = row["stakeholder_id"], row["feature_id"]
        if known_s is not None and sid not in known_s:
            raise DataError(f"{what}: row {line}: unknown stakeholder id {sid!r}")
        if known_f is not None and fid not in known_f:
            raise DataError(f"{what}: row {line}: unknown feature id {fid!r}")
        if (sid, fid) in seen:
            raise DataError(f"{what}: row {line}: duplicate response for ({sid}, {fid})")
        seen.add((sid, fid))
        values = [_number(row[c], c, line, what) for c in columns[2:]]
        if mode == "fractions":
            _check_distribution(values, "category fractions", line, what)
            records.append(KanoResponseRecord(sid, fid, fractions=KanoFractions(*values)))
        else:
            functional, dysfunctional = tuple(values[:5]), tuple(values[5:])
            _check_distribution(functional, "functional distribution", line, what)
            _check_distribution(dysfunctional, "dysfunctional distribution", line, what)
            records.append(
                KanoResponseRecord(sid, fid, functional=functional, dysfunctional=dysfunctional)
            )
    return records


def parse_scenario(source: str) -> ScenarioConfig:
    what = "scenario"
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise DataError(f"{what}: malformed JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise DataError(f"{what}: top level must be an object")
    try:
        k = doc["k"]
        scenarios = doc["scenarios"]
    except KeyError as exc:
        raise DataError(f"{what}: missing key {exc.args[0]!r}") from None
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise DataError(f"{what}: k must be an integer >= 1")
    if not isinstance(scenarios, list) or not scenarios:
        raise DataError(f"{what}: scenarios must be a non-empty list of capacity lists")
    caps = []
    for i, cap in enumerate(scenarios, 1):
        if not isinstance(cap, list) or len(cap) != k:
            raise DataError(f"{what}: scenario {i} must list exactly k={k} capacities")
        if any(not isinstance(c, (int, float)) or isinstance(c, bool) or c < 0 for c in cap):
            raise DataError(f"{what}: scenario {i} capacities must be numbers >= 0")
        caps.append(tuple(float(c) for c in cap))
    w = doc.get("w")
    z = doc.get("z")
    if w is not None:
        w = tuple(float(v) for v in w)
        _check_w(w, k, what)
    if z is not None:
        z = tuple(float(v) for v in z)
        _check_z(z, k, what)
    lambda_steps = doc.get("lambda_steps", 101)
    if not isinstance(lambda_steps, int) or lambda_steps < 2:
        raise DataError(f"{what}: lambda_steps must be an integer >= 2")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise DataError(f"{what}: seed must be an integer")
    known = {"k", "scenarios", "w", "z", "lambda_steps", "seed"}
    extra = {key: v for key, v in doc.items() if key not in known}
    return ScenarioConfig(k, tuple(caps), w, z, lambda_steps, seed, extra)


def _check_w(w: Sequence[float], k: int, what: str) -> None:
    if len(w) != k + 1:
        raise DataError(f"{what}: w must have k+1={k + 1} entries")
    if w[0] != 1 or w[-1] != 0 or any(a <= b for a, b in zip(w, w[1:])):
        raise DataError(f"{what}: w needs w(1)=1, w(K+1)=0 and strictly decreasing values")


def _check_z(z: Sequence[float], k: int, what: str) -> None:
    if len(z) != k + 1:
        raise DataError(f"{what}: z must have k+1={k + 1} entries")
    if z[0] != 0 or z[-1] != 1 or any(a >= b for a, b in zip(z, z[1:])):
        raise DataError(f"{what}: z needs z(1)=0, z(K+1)=1 and strictly increasing values")


def format_features(records: Sequence[FeatureRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FEATURE_COLUMNS)
    for r in records:
        writer.writerow(
            [r.id, r.name, repr(r.effort_optimistic), repr(r.effort_most_likely), repr(r.effort_pessimistic)]
        )
    return buf.getvalue()


def format_stakeholders(records: Sequence[StakeholderRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STAKEHOLDER_COLUMNS)
    for r in records:
        writer.writerow([r.id, r.weight])
    return buf.getvalue()


def format_kano_responses(records: Sequence[KanoResponseRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if records and records[0].mode == "raw":
        writer.writerow(KANO_RAW_COLUMNS)
        for r in records:
            writer.writerow([r.stakeholder_id, r.feature_id, *map(repr, r.functional), *map(repr, r.dysfunctional)])
    else:
        writer.writerow(KANO_FRACTION_COLUMNS)
        for r in records:
            writer.writerow([r.stakeholder_id, r.feature_id, *map(repr, r.fractions)])
    return buf.getvalue()
