"""Command-line entry point: ``arplan {solve,kano,roi,compare}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 work/size limit.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import analysis, kano, roi, solvers
from ._backend import BACKEND
from .errors import ArplanError, DataError
from .ingest import (
    ScenarioConfig,
    parse_features,
    parse_kano_responses,
    parse_scenario,
    parse_stakeholders,
)
from .model import ArpFeature, ArpInstance, DiscountVectors, evaluate

SCHEMA_VERSION = 1


class UsageError(ArplanError):
    exit_code = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _bundled(name: str) -> str:
    return str(resources.files("arplan") / "data" / name)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: cannot read ({exc.strerror})") from None


def _parse(path: str, parser, *args, **kwargs):
    try:
        return parser(_read(path), *args, **kwargs)
    except DataError as exc:
        if str(exc).startswith(path):
            raise
        raise DataError(f"{path}: {exc}") from None


# ---------------------------------------------------------------- data loading


def load_dataset(args) -> dict:
    features = _parse(args.features, parse_features)
    stakeholders = _parse(args.stakeholders, parse_stakeholders)
    feature_ids = [f.id for f in features]
    stakeholder_ids = [s.id for s in stakeholders]
    responses = _parse(
        args.kano, parse_kano_responses, args.kano_mode, stakeholder_ids, feature_ids
    )
    weights = {s.id: s.weight for s in stakeholders}
    if not stakeholders:
        raise DataError(f"{args.stakeholders}: no stakeholders to aggregate responses over")
    values = kano.feature_values(responses, weights, feature_ids)
    return {
        "features": features,
        "stakeholders": stakeholders,
        "responses": responses,
        "values": values,
    }


def _capacities(text: str) -> list[float]:
    try:
        caps = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--capacities expects comma-separated numbers, got {text!r}") from None
    if not caps or any(not math.isfinite(c) or c < 0 for c in caps):
        raise UsageError("--capacities needs finite values >= 0")
    return caps


def resolve_scenario(args) -> ScenarioConfig:
    if args.capacities is not None:
        caps = _capacities(args.capacities)
        base = _parse(args.scenario or _bundled("scenario.json"), parse_scenario)
        k = args.releases or (base.k if len(caps) == 1 else len(caps))
        if len(caps) == 1:
            caps = caps * k
        if len(caps) != k:
            raise UsageError(f"--capacities lists {len(caps)} values but K={k}")
        w = base.w if base.k == k else None
        z = base.z if base.k == k else None
        return ScenarioConfig(k, (tuple(caps),), w, z, base.lambda_steps, base.seed)
    scenario = _parse(args.scenario or _bundled("scenario.json"), parse_scenario)
    if args.releases is not None and args.releases != scenario.k:
        raise UsageError(f"--releases {args.releases} conflicts with k={scenario.k} in the scenario file")
    return scenario


# ------------------------------------------------------------------- solve


def _plan_entry(plan_id, plan, objectives, **extra) -> dict:
    return {"plan_id": plan_id, "x": list(plan.x), "ts": objectives.ts, "tds": objectives.tds, **extra}


def build_report(
    data: dict,
    scenario: ScenarioConfig,
    lambda_steps: int,
    seed: int,
    random_samples: int,
    threads: int = 1,
    node_limit: int = solvers.DEFAULT_NODE_LIMIT,
    timings: bool = False,
) -> dict:
    values = data["values"]
    feats = tuple(
        ArpFeature(f.id, values[f.id].satisfaction, values[f.id].dissatisfaction, f.effort)
        for f in data["features"]
    )
    feature_ids = [f.id for f in feats]
    discounts = None
    if scenario.w is not None or scenario.z is not None:
        from .model import default_discounts

        d = default_discounts(scenario.k)
        discounts = DiscountVectors(scenario.w or d.w, scenario.z or d.z)
    stakeholder_ids = [s.id for s in data["stakeholders"]]
    per_stakeholder = kano.stakeholder_feature_values(data["responses"], stakeholder_ids, feature_ids)
    sv = {sid: {fid: tuple(v) for fid, v in vals.items()} for sid, vals in per_stakeholder.items()}
    config = solvers.SweepConfig.uniform(lambda_steps, node_limit)

    report: dict = {"schema_version": SCHEMA_VERSION}
    scenarios = []
    clock = {}
    instance = None
    for si, caps in enumerate(scenario.scenarios, 1):
        sid = f"s{si}"
        instance = ArpInstance(feats, caps, discounts)
        t0 = time.perf_counter()
        front = solvers.sweep_pareto(instance, config, threads=threads)
        t1 = time.perf_counter()
        front_entries = []
        for pi, res in enumerate(front, 1):
            front_entries.append(
                _plan_entry(f"{sid}-p{pi:02d}", res.plan, res.objectives,
                            lambdas=list(res.lambdas), status=res.status)
            )
        front_objs = [r.objectives for r in front]

        heur = []
        for hi, (name, plan) in enumerate(solvers.greedy_portfolio(instance), 1):
            obj = evaluate(instance, plan)
            heur.append(_plan_entry(f"{sid}-h{hi}", plan, obj, heuristic=name,
                                    dominated=any(analysis.dominates(f, obj) for f in front_objs)))
        heur_objs = [(h["ts"], h["tds"]) for h in heur]

        rand = solvers.random_search(instance, random_samples, seed)
        rand_objs = [evaluate(instance, p) for p in rand]
        t2 = time.perf_counter()

        plans = [r.plan for r in front]
        ids = [e["plan_id"] for e in front_entries]
        rankings = analysis.rank_plans_per_stakeholder(
            plans, sv, feature_ids, instance.discounts.w, instance.discounts.z
        )
        top_ts = {s: ids[r["top_ts"]] for s, r in rankings.items()}
        top_tds = {s: ids[r["top_tds"]] for s, r in rankings.items()}
        kappa = None
        if len(rankings) >= 2:
            kappa = analysis.fleiss_kappa(analysis.top_choice_matrix(rankings, len(plans)))

        scenarios.append({
            "id": sid,
            "capacities": list(instance.capacities),
            "front": front_entries,
            "node_limit_hit": any(not r.proven for r in front),
            "heuristics": {
                "plans": heur,
                "dominated_fraction": analysis.dominated_fraction(heur_objs, front_objs),
            },
            "random": {
                "count": len(rand),
                "seed": seed,
                "dominated_fraction": analysis.dominated_fraction(rand_objs, front_objs),
                "weakly_dominated_fraction": analysis.weakly_dominated_fraction(rand_objs, front_objs),
                "best_ts": max(o.ts for o in rand_objs),
                "min_tds": min(o.tds for o in rand_objs),
                "mean_ts": math.fsum(o.ts for o in rand_objs) / len(rand_objs),
                "mean_tds": math.fsum(o.tds for o in rand_objs) / len(rand_objs),
            },
            "stakeholders": {
                "top_by_ts": top_ts,
                "top_by_tds": top_tds,
                "differing_top": [s for s in rankings if top_ts[s] != top_tds[s]],
                "distinct_top_ts": len(set(top_ts.values())),
                "distinct_top_tds": len(set(top_tds.values())),
            },
            "kappa": kappa,
            "diversity": {"plan_ids": ids, "hamming": analysis.distance_matrix(plans)},
        })
        clock[sid] = {"sweep_s": t1 - t0, "baselines_s": t2 - t1}

    report["instance"] = {
        "n_features": len(feats),
        "releases": scenario.k,
        "capacities": [list(map(float, caps)) for caps in scenario.scenarios],
        "w": list(instance.discounts.w),
        "z": list(instance.discounts.z),
        "features": [
            {"id": f.id, "S": f.satisfaction, "DS": f.dissatisfaction, "effort": f.effort} for f in feats
        ],
    }
    report["settings"] = {"lambda_steps": lambda_steps, "seed": seed, "random_samples": random_samples}
    report["scenarios"] = scenarios
    report["stakeholder_values"] = {
        sid: {fid: list(v) for fid, v in vals.items()} for sid, vals in sv.items()
    }
    if timings:
        report["timings"] = {"backend": BACKEND, "threads": threads, **clock}
    return report


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def render_text(report: dict) -> str:
    out = io.StringIO()
    inst = report["instance"]
    print(f"features: {inst['n_features']}  releases: {inst['releases']}", file=out)
    for sc in report["scenarios"]:
        caps = ", ".join(f"{c:g}" for c in sc["capacities"])
        print(f"\nscenario {sc['id']}  capacities [{caps}]", file=out)
        print(f"  trade-off plans: {len(sc['front'])}", file=out)
        for e in sc["front"]:
            lams = ",".join(f"{v:g}" for v in e["lambdas"])
            print(f"    {e['plan_id']}  TS={e['ts']:.4f}  TDS={e['tds']:.4f}  lambda={lams}", file=out)
        h = sc["heuristics"]
        print(f"  heuristic plans dominated: {h['dominated_fraction']:.1%}", file=out)
        r = sc["random"]
        print(f"  random plans dominated: {r['dominated_fraction']:.1%} "
              f"(weakly: {r['weakly_dominated_fraction']:.1%}) of {r['count']}", file=out)
        st = sc["stakeholders"]
        print(f"  distinct top choices: TS {st['distinct_top_ts']}, TDS {st['distinct_top_tds']}; "
              f"stakeholders whose top choice differs by criterion: {len(st['differing_top'])}", file=out)
        kappa = sc["kappa"]
        print(f"  Fleiss kappa: {'n/a' if kappa is None else f'{kappa:.4f}'}", file=out)
        if sc["node_limit_hit"]:
            print("  warning: node limit hit; some plans are not proven optimal", file=out)
    if "timings" in report:
        t = report["timings"]
        print(f"\nbackend {t['backend']}, threads {t['threads']}", file=out)
        for sc in report["scenarios"]:
            ts = t[sc["id"]]
            print(f"  {sc['id']}: sweep {ts['sweep_s']:.3f}s, baselines {ts['baselines_s']:.3f}s", file=out)
    return out.getvalue()


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    data = load_dataset(args)
    scenario = resolve_scenario(args)
    lambda_steps = args.lambda_steps or scenario.lambda_steps
    seed = args.seed if args.seed is not None else scenario.seed
    if lambda_steps < 2:
        raise UsageError("--lambda-steps must be >= 2")
    if args.random_samples < 1:
        raise UsageError("--random-samples must be >= 1")
    report = build_report(
        data, scenario, lambda_steps, seed, args.random_samples,
        threads=args.threads, node_limit=args.node_limit, timings=args.timings,
    )
    _emit(dump_report(report) if args.format == "json" else render_text(report), args.out)
    return 0


# -------------------------------------------------------------------- kano


def cmd_kano(args) -> int:
    data = load_dataset(args)
    buf = io.StringIO()
    buf.write("feature_id,S,DS\n")
    for f in data["features"]:
        v = data["values"][f.id]
        buf.write(f"{f.id},{v.satisfaction!r},{v.dissatisfaction!r}\n")
    _emit(buf.getvalue(), args.out)
    return 0


# --------------------------------------------------------------------- roi


def cmd_roi(args) -> int:
    series = _parse(args.input, roi.parse_cashflows)
    result = {"npv": roi.npv(series[0])}
    if len(series) == 2:
        result["npv_baseline"] = roi.npv(series[1])
        result["npv_added"] = roi.npv_added(series[0], series[1])
    if args.format == "json":
        text = json.dumps(result, indent=2) + "\n"
    else:
        text = f"NPV {result['npv']:.4f}\n"
        if "npv_added" in result:
            text += f"NPV_baseline {result['npv_baseline']:.4f}\nNPV_Added {result['npv_added']:.4f}\n"
    _emit(text, args.out)
    return 0


# ----------------------------------------------------------------- compare


def compare_plans(report: dict, plan_ids: Sequence[str] | None) -> dict:
    from .model import ReleasePlan

    catalogue = {}
    for sc in report.get("scenarios", []):
        for e in sc["front"] + sc["heuristics"]["plans"]:
            catalogue[e["plan_id"]] = e
    if not plan_ids:
        scs = report.get("scenarios", [])
        plan_ids = [e["plan_id"] for e in scs[0]["front"]] if scs else []
    unknown = [p for p in plan_ids if p not in catalogue]
    if unknown:
        raise DataError(f"unknown plan id(s): {', '.join(unknown)}")
    if not plan_ids:
        raise DataError("no plans to compare")
    sv = report.get("stakeholder_values") or {}
    if not sv:
        raise DataError("report has no stakeholders to compare plans for")
    inst = report["instance"]
    feature_ids = [f["id"] for f in inst["features"]]
    plans = [ReleasePlan(tuple(catalogue[p]["x"])) for p in plan_ids]
    values = {sid: {fid: tuple(v) for fid, v in vals.items()} for sid, vals in sv.items()}
    rankings = analysis.rank_plans_per_stakeholder(plans, values, feature_ids, inst["w"], inst["z"])
    rows = {}
    for sid, r in rankings.items():
        rows[sid] = {
            "objectives": {pid: {"ts": o.ts, "tds": o.tds} for pid, o in zip(plan_ids, r["objectives"])},
            "top_ts": plan_ids[r["top_ts"]],
            "top_tds": plan_ids[r["top_tds"]],
        }
    kappa = None
    if len(rankings) >= 2:
        kappa = analysis.fleiss_kappa(analysis.top_choice_matrix(rankings, len(plans)))
    return {"plans": list(plan_ids), "stakeholders": rows, "kappa": kappa}


def cmd_compare(args) -> int:
    try:
        report = json.loads(_read(args.report))
    except json.JSONDecodeError as exc:
        raise DataError(f"{args.report}: malformed report JSON ({exc})") from None
    ids = [p.strip() for p in args.plans.split(",") if p.strip()] if args.plans else None
    result = compare_plans(report, ids)
    if args.format == "json":
        text = json.dumps(result, indent=2) + "\n"
    else:
        buf = io.StringIO()
        head = ["stakeholder"] + [f"{p}:TS" for p in result["plans"]] + [f"{p}:TDS" for p in result["plans"]]
        print(",".join(head + ["top_ts", "top_tds"]), file=buf)
        for sid, row in result["stakeholders"].items():
            cells = [f"{row['objectives'][p]['ts']:.4f}" for p in result["plans"]]
            cells += [f"{row['objectives'][p]['tds']:.4f}" for p in result["plans"]]
            print(",".join([sid, *cells, row["top_ts"], row["top_tds"]]), file=buf)
        kappa = result["kappa"]
        print(f"kappa,{'n/a' if kappa is None else repr(kappa)}", file=buf)
        text = buf.getvalue()
    _emit(text, args.out)
    return 0


# ------------------------------------------------------------------ parser


def _data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--features", default=_bundled("features.csv"))
    p.add_argument("--stakeholders", default=_bundled("stakeholders.csv"))
    p.add_argument("--kano", default=None, help="Kano responses (default: bundled file for the mode)")
    p.add_argument("--kano-mode", choices=("raw", "fractions"), default="fractions")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="arplan", description="Asymmetric release planning toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="compute trade-off fronts, baselines and stakeholder views")
    _data_flags(p)
    p.add_argument("--scenario", default=None, help="scenario JSON (default: bundled)")
    p.add_argument("--releases", type=int, default=None, metavar="K")
    p.add_argument("--capacities", default=None, help="comma list of per-release capacities")
    p.add_argument("--lambda-steps", type=int, default=None, metavar="N")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--random-samples", type=int, default=1000, metavar="N")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--node-limit", type=int, default=solvers.DEFAULT_NODE_LIMIT)
    p.add_argument("--timings", action="store_true", help="add wall-clock timings to the report")
    p.add_argument("--out", default=None, metavar="PATH")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("kano", help="per-feature S/DS table")
    _data_flags(p)
    p.add_argument("--out", default=None, metavar="PATH")
    p.set_defaults(func=cmd_kano)

    p = sub.add_parser("roi", help="net present value and NPV added over a baseline")
    p.add_argument("input", help='JSON {"d": .., "r": [..]} or a list of two such series')
    p.add_argument("--out", default=None, metavar="PATH")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_roi)

    p = sub.add_parser("compare", help="per-stakeholder comparison of plans in a report")
    p.add_argument("report")
    p.add_argument("--plans", default=None, help="comma list of plan ids (default: first scenario's front)")
    p.add_argument("--out", default=None, metavar="PATH")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "kano", "unset") is None:
            args.kano = _bundled("kano_raw.csv" if args.kano_mode == "raw" else "kano_fractions.csv")
        return args.func(args)
    except ArplanError as exc:
        print(f"arplan: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
