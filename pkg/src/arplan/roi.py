"""Net present value of cashflow series and the NPV gained over a baseline."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DataError


@dataclass(frozen=True)
class CashflowSeries:
    """Net cashflow per period (``r[0]`` is undiscounted) and a per-period
    discount rate ``d > -1``."""

    r: tuple[float, ...]
    d: float

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(v) for v in self.r))
        object.__setattr__(self, "d", float(self.d))
        if not math.isfinite(self.d) or self.d <= -1:
            raise DataError(f"discount rate must be finite and > -1, got {self.d}")
        if not all(math.isfinite(v) for v in self.r):
            raise DataError("cashflows must be finite")


def npv(series: CashflowSeries) -> float:
    base = 1.0 + series.d
    return math.fsum(v / base**t for t, v in enumerate(series.r))


def npv_added(optimized: CashflowSeries, baseline: CashflowSeries) -> float:
    return npv(optimized) - npv(baseline)


def parse_cashflows(source: str) -> list[CashflowSeries]:
    """Read ``{"d": .., "r": [..]}`` or a list of one or two such objects
    (the second is the baseline)."""
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed ROI JSON ({exc})") from None
    docs: Sequence = doc if isinstance(doc, list) else [doc]
    if not 1 <= len(docs) <= 2:
        raise DataError("ROI input holds one series, or an optimized and a baseline series")
    out = []
    for item in docs:
        if not isinstance(item, dict) or "d" not in item or "r" not in item:
            raise DataError('each ROI series needs keys "d" and "r"')
        if not isinstance(item["r"], list):
            raise DataError('"r" must be a list of numbers')
        try:
            out.append(CashflowSeries(tuple(item["r"]), item["d"]))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DataError):
                raise
            raise DataError(f"invalid ROI series: {exc}") from None
    return out
