"""Random instance generators and an independent brute-force oracle.

The oracle enumerates every assignment with itertools.product and scores it
straight from the raw S/DS/effort/discount arrays, so it shares no code with
the package kernels or the instance lookup tables.
"""

from __future__ import annotations

import itertools

import numpy as np

from arplan.model import ArpInstance, DiscountVectors


def random_discounts(rng: np.random.Generator, k: int) -> DiscountVectors:
    inner_w = sorted(rng.uniform(0.01, 0.99, k - 1), reverse=True)
    inner_z = sorted(rng.uniform(0.01, 0.99, k - 1))
    return DiscountVectors((1.0, *map(float, inner_w), 0.0), (0.0, *map(float, inner_z), 1.0))


def random_instance(
    rng: np.random.Generator,
    n_range=(4, 12),
    k_range=(1, 3),
    deps: bool = False,
    custom_discounts: bool = False,
) -> ArpInstance:
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    k = int(rng.integers(k_range[0], k_range[1] + 1))
    effort = rng.uniform(1.0, 50.0, n)
    s = rng.uniform(0.0, 1.0, n)
    ds = rng.uniform(0.0, 1.0, n)
    caps = rng.uniform(0.1, 0.6, k) * effort.sum()
    discounts = random_discounts(rng, k) if custom_discounts else None
    prec, coup = [], []
    if deps and n >= 2:
        ids = [f"F{j + 1}" for j in range(n)]
        for _ in range(int(rng.integers(0, 3))):
            a, b = sorted(rng.choice(n, 2, replace=False))
            prec.append((ids[a], ids[b]))  # a < b keeps the graph acyclic
        if rng.random() < 0.5:
            a, b = rng.choice(n, 2, replace=False)
            coup.append((ids[a], ids[b]))
    return ArpInstance.from_arrays(s, ds, effort, caps, discounts, precedences=prec, couplings=coup)


def oracle_plans(instance: ArpInstance):
    """Yield (x, ts, tds) for every feasible assignment."""
    feats = instance.features
    k = instance.k
    w, z = instance.discounts.w, instance.discounts.z
    pos = {f.id: j for j, f in enumerate(feats)}
    prec = [(pos[a], pos[b]) for a, b in instance.precedences]
    coup = [(pos[a], pos[b]) for a, b in instance.couplings]
    for x in itertools.product(range(1, k + 2), repeat=len(feats)):
        loads = [0.0] * k
        for f, r in zip(feats, x):
            if r <= k:
                loads[r - 1] += f.effort
        if any(load > cap for load, cap in zip(loads, instance.capacities)):
            continue
        if any(x[a] > x[b] for a, b in prec) or any(x[a] != x[b] for a, b in coup):
            continue
        ts = sum(w[r - 1] * f.satisfaction for f, r in zip(feats, x))
        tds = sum(z[r - 1] * f.dissatisfaction for f, r in zip(feats, x))
        yield x, ts, tds


def oracle_scalarized_max(instance: ArpInstance, lam: float) -> float:
    return max(lam * ts - (1 - lam) * tds for _, ts, tds in oracle_plans(instance))


def oracle_front(instance: ArpInstance) -> set[tuple[float, float]]:
    pts = {(ts, tds) for _, ts, tds in oracle_plans(instance)}
    return {
        p for p in pts
        if not any(q[0] >= p[0] and q[1] <= p[1] and q != p for q in pts)
    }


def two_feature_instance(**kw) -> ArpInstance:
    return ArpInstance.from_arrays([0.75, 0.5], [0.5, 0.8], [10.0, 20.0], [25.0], **kw)
