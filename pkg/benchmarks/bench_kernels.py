"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Both backends must return identical plans; the script checks that and
reports the best-of-N wall time per workload.
"""

from __future__ import annotations

import argparse
import sys
import time
from importlib import resources

import numpy as np

from arplan import _backend
from arplan.ingest import parse_features, parse_kano_responses, parse_stakeholders
from arplan.kano import feature_values
from arplan.model import ArpFeature, ArpInstance
from arplan.solvers import enumerate_plans, solve_scalarized


def bundled(capacity: float) -> ArpInstance:
    data = resources.files("arplan") / "data"
    feats = parse_features((data / "features.csv").read_text())
    shs = parse_stakeholders((data / "stakeholders.csv").read_text())
    resp = parse_kano_responses((data / "kano_fractions.csv").read_text(), "fractions")
    vals = feature_values(resp, {s.id: s.weight for s in shs}, [f.id for f in feats])
    return ArpInstance(
        tuple(ArpFeature(f.id, *vals[f.id], f.effort) for f in feats), (capacity, capacity)
    )


def random_instances(count: int, n: int, k: int, seed: int) -> list[ArpInstance]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        eff = rng.uniform(1, 50, n)
        out.append(ArpInstance.from_arrays(
            rng.random(n), rng.random(n), eff, rng.uniform(0.1, 0.6, k) * eff.sum()
        ))
    return out


def workloads(quick: bool):
    lams = [0.0, 0.25, 0.5, 0.75, 1.0]
    small = random_instances(10 if quick else 40, 10, 2, 1)
    yield "B&B, 10 features x 5 lambdas", lambda b: [
        solve_scalarized(i, lam, backend=b).plan for i in small for lam in lams
    ]
    enum_inst = random_instances(1, 9 if quick else 11, 2, 2)[0]
    yield f"enumeration, {enum_inst.n} features, K=2", lambda b: enumerate_plans(
        enum_inst, lams, cap=10**7, backend=b
    ).front
    for cap in (112.7, 367.4):
        inst = bundled(cap)
        yield f"B&B, bundled 36 features, cap {cap}", lambda b, inst=inst: [
            solve_scalarized(inst, lam, backend=b).plan for lam in lams[1:-1]
        ]


def best_of(fn, repeat: int):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args(argv)
    if _backend.BACKEND != "compiled":
        print("compiled kernels are not available; build the extension first", file=sys.stderr)
        return 1
    print(f"{'workload':42s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}")
    for name, fn in workloads(args.quick):
        tc, rc = best_of(lambda: fn("compiled"), args.repeat)
        tp, rp = best_of(lambda: fn("python"), 1)
        if rc != rp:
            print(f"{name}: backends disagree", file=sys.stderr)
            return 2
        print(f"{name:42s} {tc:9.4f}s {tp:9.3f}s {tp / tc:7.0f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
