"""Release planning instances, plans and the two objectives.

Releases are numbered 1..K; K+1 means the feature is postponed. All sums
run over features in index order so that compiled kernels, which use the
same order, reproduce these numbers bit for bit.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ArpFeature:
    id: str
    satisfaction: float
    dissatisfaction: float
    effort: float

    def __post_init__(self):
        if not 0.0 <= self.satisfaction <= 1.0 or not 0.0 <= self.dissatisfaction <= 1.0:
            raise DataError(f"feature {self.id!r}: S and DS must lie in [0, 1]")
        if not self.effort >= 0.0:
            raise DataError(f"feature {self.id!r}: effort must be >= 0")


@dataclass(frozen=True)
class DiscountVectors:
    w: tuple[float, ...]
    z: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(float(v) for v in self.w))
        object.__setattr__(self, "z", tuple(float(v) for v in self.z))
        check_discounts(self.w, self.z)

    @property
    def releases(self) -> int:
        return len(self.w) - 1


def check_discounts(w: Sequence[float], z: Sequence[float]) -> None:
    """Raise unless w falls strictly from 1 to 0 and z rises strictly from 0 to 1."""
    if len(w) < 2 or len(w) != len(z):
        raise DataError("w and z need the same length K+1 >= 2")
    if w[0] != 1.0 or w[-1] != 0.0:
        raise DataError("w must start at 1 and end at 0")
    if z[0] != 0.0 or z[-1] != 1.0:
        raise DataError("z must start at 0 and end at 1")
    if any(a <= b for a, b in zip(w, w[1:])):
        raise DataError("w must be strictly decreasing")
    if any(a >= b for a, b in zip(z, z[1:])):
        raise DataError("z must be strictly increasing")


def default_discounts(k: int) -> DiscountVectors:
    """Linear discounts: w(r) = (K+1-r)/K and z(r) = (r-1)/K."""
    if k < 1:
        raise DataError("need at least one release")
    w = [(k + 1 - r) / k for r in range(1, k + 2)]
    z = [(r - 1) / k for r in range(1, k + 2)]
    z[-1] = 1.0
    return DiscountVectors(tuple(w), tuple(z))


@dataclass(frozen=True, order=True)
class ReleasePlan:
    x: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(v) for v in self.x))

    def __len__(self) -> int:
        return len(self.x)

    def __iter__(self):
        return iter(self.x)

    def __getitem__(self, i):
        return self.x[i]

    @classmethod
    def postponed(cls, n: int, k: int) -> "ReleasePlan":
        return cls((k + 1,) * n)


class ObjectiveVector(NamedTuple):
    ts: float
    tds: float


@dataclass(frozen=True)
class ArpInstance:
    """A release planning problem.

    ``precedences`` holds id pairs (a, b) meaning a ships in the same or an
    earlier release than b (a postponed feature forces b to be postponed).
    ``couplings`` holds id pairs that must share a release.
    """

    features: tuple[ArpFeature, ...]
    capacities: tuple[float, ...]
    discounts: DiscountVectors | None = None
    precedences: tuple[tuple[str, str], ...] = ()
    couplings: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "capacities", tuple(float(c) for c in self.capacities))
        object.__setattr__(self, "precedences", tuple(tuple(p) for p in self.precedences))
        object.__setattr__(self, "couplings", tuple(tuple(p) for p in self.couplings))
        if not self.capacities:
            raise DataError("need at least one release capacity")
        if any(not c >= 0 for c in self.capacities):
            raise DataError("capacities must be >= 0")
        if self.discounts is None:
            object.__setattr__(self, "discounts", default_discounts(len(self.capacities)))
        elif self.discounts.releases != len(self.capacities):
            raise DataError("discount vectors must have K+1 entries")
        ids = [f.id for f in self.features]
        if len(set(ids)) != len(ids):
            raise DataError("feature ids must be unique")
        index = {fid: n for n, fid in enumerate(ids)}
        for a, b in self.precedences + self.couplings:
            if a not in index or b not in index:
                raise DataError(f"dependency ({a}, {b}) references an unknown feature")
        graph = graphlib.TopologicalSorter()
        for a, b in self.precedences:
            graph.add(b, a)
        try:
            graph.prepare()
        except graphlib.CycleError as exc:
            raise DataError(f"precedence constraints contain a cycle: {exc.args[1]}") from None

    @classmethod
    def from_arrays(
        cls,
        satisfaction: Sequence[float],
        dissatisfaction: Sequence[float],
        effort: Sequence[float],
        capacities: Sequence[float],
        discounts: DiscountVectors | None = None,
        ids: Sequence[str] | None = None,
        **kwargs,
    ) -> "ArpInstance":
        n = len(effort)
        ids = ids or [f"F{j + 1}" for j in range(n)]
        feats = tuple(
            ArpFeature(ids[j], float(satisfaction[j]), float(dissatisfaction[j]), float(effort[j]))
            for j in range(n)
        )
        return cls(feats, tuple(capacities), discounts, **kwargs)

    @property
    def n(self) -> int:
        return len(self.features)

    @property
    def k(self) -> int:
        return len(self.capacities)

    @cached_property
    def index(self) -> dict[str, int]:
        return {f.id: n for n, f in enumerate(self.features)}

    @cached_property
    def precedence_index(self) -> tuple[tuple[int, int], ...]:
        return tuple((self.index[a], self.index[b]) for a, b in self.precedences)

    @cached_property
    def coupling_index(self) -> tuple[tuple[int, int], ...]:
        return tuple((self.index[a], self.index[b]) for a, b in self.couplings)

    @cached_property
    def efforts(self) -> np.ndarray:
        return np.array([f.effort for f in self.features], dtype=np.float64)

    @cached_property
    def satisfaction_table(self) -> np.ndarray:
        """N x (K+1) table of w(k) * S(n)."""
        w = np.asarray(self.discounts.w)
        s = np.array([f.satisfaction for f in self.features], dtype=np.float64)
        return np.ascontiguousarray(s[:, None] * w[None, :])

    @cached_property
    def dissatisfaction_table(self) -> np.ndarray:
        """N x (K+1) table of z(k) * DS(n)."""
        z = np.asarray(self.discounts.z)
        ds = np.array([f.dissatisfaction for f in self.features], dtype=np.float64)
        return np.ascontiguousarray(ds[:, None] * z[None, :])

    def with_capacities(self, capacities: Sequence[float]) -> "ArpInstance":
        discounts = self.discounts if len(capacities) == self.k else None
        return ArpInstance(self.features, tuple(capacities), discounts, self.precedences, self.couplings)


def _check_plan(instance: ArpInstance, plan: ReleasePlan | Sequence[int]) -> tuple[int, ...]:
    x = plan.x if isinstance(plan, ReleasePlan) else tuple(plan)
    if len(x) != instance.n:
        raise ValueError(f"plan has {len(x)} entries, instance has {instance.n} features")
    k = instance.k
    for v in x:
        if not 1 <= v <= k + 1:
            raise ValueError(f"release {v} outside 1..{k + 1}")
    return x


def release_loads(instance: ArpInstance, plan: ReleasePlan | Sequence[int]) -> list[float]:
    x = _check_plan(instance, plan)
    loads = [0.0] * instance.k
    for f, r in zip(instance.features, x):
        if r <= instance.k:
            loads[r - 1] += f.effort
    return loads


def dependencies_hold(instance: ArpInstance, x: Sequence[int]) -> bool:
    for a, b in instance.precedence_index:
        if x[a] > x[b]:
            return False
    for a, b in instance.coupling_index:
        if x[a] != x[b]:
            return False
    return True


def is_feasible(instance: ArpInstance, plan: ReleasePlan | Sequence[int]) -> bool:
    x = _check_plan(instance, plan)
    loads = release_loads(instance, x)
    if any(load > cap for load, cap in zip(loads, instance.capacities)):
        return False
    return dependencies_hold(instance, x)


def total_satisfaction(instance: ArpInstance, plan: ReleasePlan | Sequence[int]) -> float:
    x = _check_plan(instance, plan)
    w = instance.discounts.w
    ts = 0.0
    for f, r in zip(instance.features, x):
        ts += w[r - 1] * f.satisfaction
    return ts


def total_dissatisfaction(instance: ArpInstance, plan: ReleasePlan | Sequence[int]) -> float:
    x = _check_plan(instance, plan)
    z = instance.discounts.z
    tds = 0.0
    for f, r in zip(instance.features, x):
        tds += z[r - 1] * f.dissatisfaction
    return tds


def evaluate(instance: ArpInstance, plan: ReleasePlan | Sequence[int]) -> ObjectiveVector:
    return ObjectiveVector(total_satisfaction(instance, plan), total_dissatisfaction(instance, plan))


def scalarized(objectives: ObjectiveVector, lam: float) -> float:
    return lam * objectives[0] - (1.0 - lam) * objectives[1]
