"""Pure-Python/numpy kernels; the reference the Cython module must match.

Release indices inside the kernels are 0-based, with ``K`` (the number of
releases) standing for "postponed".

search()
    Depth-first branch-and-bound over features in a given visiting order.
    Children are tried release 0, 1, ..., K-1, then postponed. Capacity is
    pruned against ``cap_slack`` during the search; every leaf is
    re-checked against ``cap_exact`` with loads summed in feature-index
    order, which is how the model module sums them.

enumerate_front() / collect_ties()
    Exhaustive enumeration of all feasible assignments. Only prefixes that
    are already infeasible are cut; there is no bounding.
"""

from __future__ import annotations

import math

import numpy as np

NODE_LIMIT = 1
COMPLETE = 0

_CHUNK = 1 << 16


def _frac_knapsack(sorted_idx, gains, eff, assigned, capacity):
    total = 0.0
    for n in sorted_idx:
        if assigned[n] >= 0:
            continue
        g = gains[n]
        if g <= 0.0:
            break
        e = eff[n]
        if e <= capacity:
            total += g
            capacity -= e
        else:
            total += g * capacity / e
            break
    return total


def _lex_less(a, b):
    for u, v in zip(a, b):
        if u != v:
            return u < v
    return False


def search(order, eff, cap_slack, cap_exact, vals, gains, pooled, pooled_order, rel_order,
           suffix_post, obj, thr, prec_ptr, prec_other, prec_sign, coup_ptr, coup_other,
           node_limit, incumbent=None):
    """Branch-and-bound; see the module docstring.

    vals: (M, N, K+1) value tables; gains: (M, N, K) non-negative gain of
    each release over postponement; pooled: (M, N) best gain per feature;
    pooled_order / rel_order: feature indices sorted by gain density;
    suffix_post: (M, N+1) sums of postponed values over order[d:];
    obj: index of the table to maximise, or -1 to find the lexicographically
    smallest assignment (in feature-index order) meeting every threshold in
    ``thr``, starting from ``incumbent`` which must already qualify;
    prec_* / coup_*: CSR adjacency of the dependency constraints (sign +1: feature must not ship after
    ``other``; -1: must not ship before it).

    Returns (assign or None, best value, status, nodes).
    """
    m_count, n, p = vals.shape
    k = p - 1
    eff = [float(e) for e in eff]
    cap_slack = [float(c) for c in cap_slack]
    cap_exact = [float(c) for c in cap_exact]
    vals_l = vals.tolist()
    # gains_rel[m][r][j]: gain of feature j in release r
    gains_rel = np.ascontiguousarray(np.transpose(gains, (0, 2, 1))).tolist()
    pooled_l = pooled.tolist()
    pooled_order_l = pooled_order.tolist()
    rel_order_l = rel_order.tolist()
    suffix_l = suffix_post.tolist()
    thr = [float(t) for t in thr]
    order = [int(i) for i in order]
    prec_adj = [
        [(int(prec_other[e]), int(prec_sign[e])) for e in range(prec_ptr[j], prec_ptr[j + 1])]
        for j in range(n)
    ]
    coup_adj = [[int(coup_other[e]) for e in range(coup_ptr[j], coup_ptr[j + 1])] for j in range(n)]
    active = [m for m in range(m_count) if m == obj or thr[m] > -math.inf]

    assign = [-1] * n
    load = [0.0] * k
    partial = [0.0] * m_count
    state = {"best": -math.inf, "best_assign": None, "nodes": 0, "status": COMPLETE, "done": False}
    if obj < 0:
        state["best_assign"] = [int(v) for v in incumbent]
        state["best"] = 0.0

    def lex_prunable():
        # smallest completion puts every open feature into release 0
        inc = state["best_assign"]
        for j in range(n):
            a = assign[j]
            if a < 0:
                a = 0
            if a != inc[j]:
                return a > inc[j]
        return True

    def bound(m, depth):
        rem = [max(0.0, cap_slack[r] - load[r]) for r in range(k)]
        pooled_b = _frac_knapsack(pooled_order_l[m], pooled_l[m], eff, assign, sum(rem))
        per_rel = 0.0
        for r in range(k):
            per_rel += _frac_knapsack(rel_order_l[m][r], gains_rel[m][r], eff, assign, rem[r])
        return partial[m] + suffix_l[m][depth] + min(pooled_b, per_rel)

    def leaf():
        exact = [0.0] * k
        for j in range(n):
            r = assign[j]
            if r < k:
                exact[r] += eff[j]
        for r in range(k):
            if exact[r] > cap_exact[r]:
                return
        for m in range(m_count):
            if partial[m] < thr[m]:
                return
        if obj < 0:
            if _lex_less(assign, state["best_assign"]):
                state["best_assign"] = list(assign)
        elif partial[obj] > state["best"]:
            state["best"] = partial[obj]
            state["best_assign"] = list(assign)

    def deps_ok(j, r):
        for other, sign in prec_adj[j]:
            ro = assign[other]
            if ro < 0:
                continue
            if sign > 0 and r > ro:
                return False
            if sign < 0 and r < ro:
                return False
        for other in coup_adj[j]:
            ro = assign[other]
            if ro >= 0 and ro != r:
                return False
        return True

    def visit(depth):
        if state["done"]:
            return
        if depth == n:
            leaf()
            return
        j = order[depth]
        for r in range(p):
            if state["nodes"] >= node_limit:
                state["status"] = NODE_LIMIT
                state["done"] = True
                return
            if r < k and load[r] + eff[j] > cap_slack[r]:
                continue
            if not deps_ok(j, r):
                continue
            state["nodes"] += 1
            saved_load = load[r] if r < k else 0.0
            saved_partial = list(partial)
            assign[j] = r
            if r < k:
                load[r] = load[r] + eff[j]
            for m in range(m_count):
                partial[m] = partial[m] + vals_l[m][j][r]
            pruned = obj < 0 and lex_prunable()
            for m in ([] if pruned else active):
                b = bound(m, depth + 1)
                if b < thr[m] or (m == obj and b <= state["best"]):
                    pruned = True
                    break
            if not pruned:
                visit(depth + 1)
            assign[j] = -1
            if r < k:
                load[r] = saved_load
            partial[:] = saved_partial
            if state["done"]:
                return

    visit(0)
    best_assign = state["best_assign"]
    if best_assign is not None:
        best_assign = np.array(best_assign, dtype=np.int64)
    return best_assign, state["best"], state["status"], state["nodes"]


def _feasible_plans(eff, cap, ts_tab, tds_tab, prec, coup):
    """Yield (codes, ts, tds) batches covering every feasible plan.

    Plans grow one feature per level; a prefix is dropped as soon as it
    overloads a release or breaks a dependency between decided features.
    Batches that would get too wide are split and walked depth-first.
    """
    n, p = ts_tab.shape
    k = len(cap)
    checks = [[] for _ in range(n)]
    for a, b in prec:
        checks[max(a, b)].append((int(a), int(b), True))
    for a, b in coup:
        checks[max(a, b)].append((int(a), int(b), False))
    digit = np.arange(p, dtype=np.int64)

    def walk(level, codes, loads, ts, tds):
        while level < n:
            if len(codes) * p > _CHUNK and len(codes) > 1:
                half = len(codes) // 2
                for sl in (slice(0, half), slice(half, None)):
                    yield from walk(level, codes[sl], loads[sl], ts[sl], tds[sl])
                return
            rows = len(codes)
            d = np.tile(digit, rows)
            codes = np.repeat(codes, p) * p + d
            loads = np.repeat(loads, p, axis=0)
            ts = np.repeat(ts, p) + ts_tab[level, d]
            tds = np.repeat(tds, p) + tds_tab[level, d]
            ar = np.arange(len(codes))
            placed = d < k
            loads[ar[placed], d[placed]] += eff[level]
            ok = ~placed
            ok[placed] = loads[ar[placed], d[placed]] <= cap[d[placed]]
            for a, b, before in checks[level]:
                da = (codes // p ** (level - a)) % p
                db = (codes // p ** (level - b)) % p
                ok &= (da <= db) if before else (da == db)
            codes, loads, ts, tds = codes[ok], loads[ok], ts[ok], tds[ok]
            level += 1
            if not len(codes):
                return
        yield codes, ts, tds

    start = (np.zeros(1, dtype=np.int64), np.zeros((1, k)), np.zeros(1), np.zeros(1))
    yield from walk(0, *start)


def _merge_front(front_ts, front_tds, ts, tds):
    all_ts = np.concatenate([front_ts, ts])
    all_tds = np.concatenate([front_tds, tds])
    idx = np.lexsort((all_tds, -all_ts))
    s_ts, s_tds = all_ts[idx], all_tds[idx]
    prev_min = np.minimum.accumulate(np.concatenate([[np.inf], s_tds[:-1]]))
    keep = s_tds < prev_min
    s_ts, s_tds = s_ts[keep][::-1], s_tds[keep][::-1]
    return np.ascontiguousarray(s_ts), np.ascontiguousarray(s_tds)


def enumerate_front(eff, cap, ts_tab, tds_tab, prec, coup, lambdas):
    """Non-dominated (TS, TDS) values over all feasible plans.

    Returns (front_ts ascending, front_tds ascending, per-lambda maximum of
    lam*TS - (1-lam)*TDS, number of feasible plans).
    """
    n, p = ts_tab.shape
    lambdas = np.asarray(lambdas, dtype=np.float64)
    front_ts = np.empty(0)
    front_tds = np.empty(0)
    best = np.full(len(lambdas), -np.inf)
    feasible = 0
    if n == 0:
        return np.array([0.0]), np.array([0.0]), np.zeros(len(lambdas)), 1
    for _, ts, tds in _feasible_plans(eff, cap, ts_tab, tds_tab, prec, coup):
        feasible += len(ts)
        for li, lam in enumerate(lambdas):
            best[li] = max(best[li], float(np.max(lam * ts - (1.0 - lam) * tds)))
        front_ts, front_tds = _merge_front(front_ts, front_tds, ts, tds)
    return front_ts, front_tds, best, feasible


def collect_ties(eff, cap, ts_tab, tds_tab, prec, coup, front_ts, front_tds):
    """Codes of every feasible plan whose objective vector equals a front member."""
    n, p = ts_tab.shape
    if n == 0:
        return np.array([0], dtype=np.int64)
    out = []
    size = len(front_ts)
    for codes, ts, tds in _feasible_plans(eff, cap, ts_tab, tds_tab, prec, coup):
        i = np.minimum(np.searchsorted(front_ts, ts), size - 1)
        hit = (front_ts[i] == ts) & (front_tds[i] == tds)
        out.append(codes[hit])
    return np.concatenate(out) if out else np.empty(0, dtype=np.int64)
