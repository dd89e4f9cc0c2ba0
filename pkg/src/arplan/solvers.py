"""Plan generators: exact scalarized solves, the weighted-sum sweep, a
brute-force oracle, a greedy heuristic portfolio and random search."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .analysis import pareto_filter
from .errors import DataError, LimitError
from .model import ArpInstance, ObjectiveVector, ReleasePlan, evaluate, is_feasible

DEFAULT_NODE_LIMIT = 20_000_000
DEFAULT_ENUMERATION_CAP = 2_000_000


@dataclass(frozen=True)
class SweepConfig:
    lambdas: tuple[float, ...]
    node_limit: int = DEFAULT_NODE_LIMIT

    def __post_init__(self):
        lams = tuple(float(v) for v in self.lambdas)
        object.__setattr__(self, "lambdas", lams)
        if any(not 0.0 <= v <= 1.0 for v in lams):
            raise DataError("lambda grid values must lie in [0, 1]")
        if list(lams) != sorted(lams):
            raise DataError("lambda grid must be sorted")
        if 0.0 not in lams or 1.0 not in lams:
            raise DataError("lambda grid must contain 0 and 1")

    @classmethod
    def uniform(cls, steps: int = 101, node_limit: int = DEFAULT_NODE_LIMIT) -> "SweepConfig":
        if steps < 2:
            raise DataError("need at least two lambda steps")
        return cls(tuple(i / (steps - 1) for i in range(steps)), node_limit)


@dataclass(frozen=True)
class SolveResult:
    plan: ReleasePlan
    objectives: ObjectiveVector
    lam: float
    proven: bool = True
    lambdas: tuple[float, ...] = field(default=())
    nodes: int = 0

    def __post_init__(self):
        if not self.lambdas:
            object.__setattr__(self, "lambdas", (self.lam,))

    @property
    def status(self) -> str:
        return "optimal" if self.proven else "node-limit-hit"


# --------------------------------------------------------------- kernel input


def _dependency_csr(instance: ArpInstance):
    n = instance.n
    prec_adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for a, b in instance.precedence_index:
        prec_adj[a].append((b, 1))
        prec_adj[b].append((a, -1))
    coup_adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in instance.coupling_index:
        coup_adj[a].append(b)
        coup_adj[b].append(a)
    prec_ptr = np.cumsum([0] + [len(a) for a in prec_adj], dtype=np.int64)
    coup_ptr = np.cumsum([0] + [len(a) for a in coup_adj], dtype=np.int64)
    prec_other = np.array([o for adj in prec_adj for o, _ in adj] or [0], dtype=np.int64)
    prec_sign = np.array([s for adj in prec_adj for _, s in adj] or [0], dtype=np.int64)
    coup_other = np.array([o for adj in coup_adj for o in adj] or [0], dtype=np.int64)
    return prec_ptr, prec_other, prec_sign, coup_ptr, coup_other


def _density_order(gains: np.ndarray, eff: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(eff > 0, gains / np.where(eff > 0, eff, 1.0), np.where(gains > 0, np.inf, 0.0))
    return np.argsort(-ratio, kind="stable").astype(np.int64)


def _search(instance, tables, order, obj, thr, node_limit, kernels, incumbent=None):
    vals = np.ascontiguousarray(np.stack(tables))
    m_count, n, p = vals.shape
    k = p - 1
    eff = instance.efforts
    gains = np.maximum(vals[:, :, :k] - vals[:, :, k:], 0.0)
    pooled = gains.max(axis=2) if k else np.zeros((m_count, n))
    pooled_order = np.stack([_density_order(pooled[m], eff) for m in range(m_count)]) if n else np.zeros((m_count, 0), np.int64)
    rel_order = np.zeros((m_count, k, n), dtype=np.int64)
    for m in range(m_count):
        for r in range(k):
            rel_order[m, r] = _density_order(gains[m, :, r], eff)
    suffix = np.zeros((m_count, n + 1))
    for m in range(m_count):
        acc = 0.0
        for d in range(n - 1, -1, -1):
            acc = vals[m, order[d], k] + acc
            suffix[m, d] = acc
    caps = np.array(instance.capacities)
    # search-time capacity slack; leaves are re-checked exactly
    cap_slack = caps * (1.0 + 1e-12) + 1e-12
    return kernels.search(
        np.asarray(order, dtype=np.int64), eff, cap_slack, caps, vals, gains, pooled,
        pooled_order, rel_order, suffix, obj, np.asarray(thr, dtype=np.float64),
        *_dependency_csr(instance), int(node_limit), incumbent,
    )


def _density(gain: float, effort: float) -> float:
    if effort > 0:
        return gain / effort
    return math.inf if gain > 0 else 0.0


def _tolerance(table: np.ndarray) -> float:
    return 1e-12 * (1.0 + float(np.abs(table).max(axis=1).sum())) if table.size else 1e-12


def solve_scalarized(
    instance: ArpInstance,
    lam: float,
    node_limit: int = DEFAULT_NODE_LIMIT,
    backend: str | None = None,
) -> SolveResult:
    """Maximise lam*TS - (1-lam)*TDS exactly by branch-and-bound.

    Among optimal plans the lexicographically smallest assignment vector is
    returned. At lam = 1 (lam = 0) optimal plans are first narrowed to those
    with the smallest TDS (largest TS), so endpoint solutions are never
    weakly dominated.
    """
    if not 0.0 <= lam <= 1.0:
        raise DataError(f"lambda must lie in [0, 1], got {lam}")
    kernels = _backend.get(backend)
    n, k = instance.n, instance.k
    ts_tab = instance.satisfaction_table
    tds_tab = instance.dissatisfaction_table
    primary = lam * ts_tab - (1.0 - lam) * tds_tab
    secondary = None
    if lam == 1.0:
        secondary = -tds_tab
    elif lam == 0.0:
        secondary = ts_tab
    tables = [primary] if secondary is None else [primary, secondary]
    no_thr = [-math.inf] * len(tables)

    # branch on features by descending gain density of their best release
    gain = primary[:, 0] - primary[:, k] if n else np.zeros(0)
    by_density = sorted(range(n), key=lambda j: (-_density(gain[j], instance.features[j].effort), j))
    assign, best, status, nodes = _search(instance, tables, by_density, 0, no_thr, node_limit, kernels)
    total_nodes = nodes
    if status != 0:
        return _result(instance, assign, lam, False, total_nodes)

    thr = [best - _tolerance(primary)] + [-math.inf] * (len(tables) - 1)
    if secondary is not None:
        a2, best2, status2, nodes2 = _search(instance, tables, by_density, 1, thr, node_limit, kernels)
        total_nodes += nodes2
        if status2 != 0 or a2 is None:
            return _result(instance, assign, lam, True, total_nodes)
        assign = a2
        thr[1] = best2 - _tolerance(secondary)

    a3, _, status3, nodes3 = _search(instance, tables, by_density, -1, thr, node_limit, kernels, assign)
    total_nodes += nodes3
    if status3 == 0 and a3 is not None:
        assign = a3
    return _result(instance, assign, lam, True, total_nodes)


def _result(instance, assign, lam, proven, nodes) -> SolveResult:
    k = instance.k
    if assign is None:
        plan = ReleasePlan.postponed(instance.n, k)
    else:
        plan = ReleasePlan(tuple(int(a) + 1 for a in assign))
    if not is_feasible(instance, plan):  # pragma: no cover - guarded by the exact leaf check
        raise RuntimeError("solver produced an infeasible plan")
    return SolveResult(plan, evaluate(instance, plan), float(lam), proven, nodes=int(nodes))


def sweep_pareto(
    instance: ArpInstance,
    config: SweepConfig | None = None,
    threads: int = 1,
    backend: str | None = None,
) -> list[SolveResult]:
    """Solve every grid point, merge identical plans, keep the non-dominated ones."""
    config = config or SweepConfig.uniform()

    def one(lam):
        return solve_scalarized(instance, lam, config.node_limit, backend)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, config.lambdas))
    else:
        results = [one(lam) for lam in config.lambdas]

    merged: dict[ReleasePlan, SolveResult] = {}
    for res in results:
        prev = merged.get(res.plan)
        if prev is None:
            merged[res.plan] = res
        else:
            merged[res.plan] = SolveResult(
                prev.plan, prev.objectives, prev.lam, prev.proven and res.proven,
                prev.lambdas + (res.lam,), prev.nodes + res.nodes,
            )
    front = pareto_filter([(r.plan, r.objectives) for r in merged.values()])
    return [merged[plan] for plan, _ in front]


# ---------------------------------------------------------------- enumeration


@dataclass(frozen=True)
class EnumerationResult:
    front: list[tuple[ReleasePlan, ObjectiveVector]]
    scalarized_max: dict[float, float]
    feasible_count: int


def _check_enumeration_size(instance: ArpInstance, cap: int) -> None:
    size = (instance.k + 1) ** instance.n
    if size > cap:
        raise LimitError(
            f"instance too large to enumerate: (K+1)^N = {size} exceeds the cap of {cap}"
        )


def enumerate_plans(
    instance: ArpInstance,
    lambdas: Sequence[float] = (),
    cap: int = DEFAULT_ENUMERATION_CAP,
    backend: str | None = None,
) -> EnumerationResult:
    """Exhaustive enumeration of all feasible plans.

    Returns the exact Pareto front (every plan attaining a non-dominated
    objective vector) and, for each lambda, the largest value of
    lam*TS - (1-lam)*TDS over all feasible plans.
    """
    _check_enumeration_size(instance, cap)
    kernels = _backend.get(backend)
    eff = instance.efforts
    caps = np.array(instance.capacities)
    ts_tab = instance.satisfaction_table
    tds_tab = instance.dissatisfaction_table
    prec = np.array(instance.precedence_index, dtype=np.int64).reshape(-1, 2)
    coup = np.array(instance.coupling_index, dtype=np.int64).reshape(-1, 2)
    lambdas = [float(v) for v in lambdas]
    f_ts, f_tds, lam_max, feasible = kernels.enumerate_front(
        eff, caps, ts_tab, tds_tab, prec, coup, np.array(lambdas, dtype=np.float64)
    )
    codes = kernels.collect_ties(eff, caps, ts_tab, tds_tab, prec, coup, f_ts, f_tds)
    p = instance.k + 1
    members = []
    for code in codes.tolist():
        digits = []
        for _ in range(instance.n):
            code, d = divmod(code, p)
            digits.append(d + 1)
        plan = ReleasePlan(tuple(reversed(digits)))
        members.append((plan, evaluate(instance, plan)))
    front = pareto_filter(members)
    return EnumerationResult(front, dict(zip(lambdas, map(float, lam_max))), int(feasible))


def brute_force_front(
    instance: ArpInstance, cap: int = DEFAULT_ENUMERATION_CAP, backend: str | None = None
) -> list[tuple[ReleasePlan, ObjectiveVector]]:
    return enumerate_plans(instance, (), cap, backend).front


# ------------------------------------------------------------------ baselines


def _place_first_fit(instance: ArpInstance, sequence: Sequence[int]) -> ReleasePlan:
    """Put each feature, in sequence, into the earliest release it fits."""
    k = instance.k
    x = [k + 1] * instance.n
    loads = [0.0] * k
    placed_at: dict[int, int] = {}
    for step, j in enumerate(sequence):
        e = instance.features[j].effort
        for r in range(k):
            if loads[r] + e <= instance.capacities[r]:
                loads[r] += e
                x[j] = r + 1
                placed_at[j] = step
                break
    return ReleasePlan(tuple(_repair(instance, x, placed_at)))


def _repair(instance: ArpInstance, x: list[int], placed_at: dict[int, int]) -> list[int]:
    """Postpone features until the plan satisfies capacities and dependencies.

    Postponing only frees capacity, so the loop ends after at most N rounds.
    """
    k = instance.k
    while True:
        changed = False
        loads = [0.0] * k
        for f, r in zip(instance.features, x):
            if r <= k:
                loads[r - 1] += f.effort
        for r in range(k):
            if loads[r] > instance.capacities[r]:
                last = max((j for j in range(instance.n) if x[j] == r + 1), key=lambda j: placed_at.get(j, -1))
                x[last] = k + 1
                changed = True
        for a, b in instance.precedence_index:
            if x[a] > x[b]:
                x[b] = k + 1
                changed = True
        for a, b in instance.coupling_index:
            if x[a] != x[b]:
                x[a] = x[b] = k + 1
                changed = True
        if not changed:
            return x


def _safe_ratio(num: float, effort: float) -> float:
    if effort > 0:
        return num / effort
    return math.inf if num > 0 else 0.0


HEURISTICS: dict[str, Callable] = {
    "S": lambda f, w1: f.satisfaction,
    "DS": lambda f, w1: f.dissatisfaction,
    "S+DS": lambda f, w1: f.satisfaction + f.dissatisfaction,
    "S/effort": lambda f, w1: _safe_ratio(f.satisfaction, f.effort),
    "DS/effort": lambda f, w1: _safe_ratio(f.dissatisfaction, f.effort),
    "(S+DS)/effort": lambda f, w1: _safe_ratio(f.satisfaction + f.dissatisfaction, f.effort),
    "min-effort": lambda f, w1: -f.effort,
    "max(S*w1,DS)": lambda f, w1: max(f.satisfaction * w1, f.dissatisfaction),
}


def greedy_portfolio(instance: ArpInstance) -> list[tuple[str, ReleasePlan]]:
    """One first-fit plan per heuristic score (higher score placed first,
    ties by feature position)."""
    w1 = instance.discounts.w[0]
    out = []
    for name, score in HEURISTICS.items():
        seq = sorted(range(instance.n), key=lambda j: (-score(instance.features[j], w1), j))
        out.append((name, _place_first_fit(instance, seq)))
    return out


def random_search(instance: ArpInstance, n_samples: int, seed: int) -> list[ReleasePlan]:
    """Feasible plans from random feature orders placed first-fit."""
    if n_samples < 1:
        raise DataError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    return [_place_first_fit(instance, rng.permutation(instance.n).tolist()) for _ in range(n_samples)]
