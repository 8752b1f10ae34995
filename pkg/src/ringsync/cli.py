"""Command-line front end: generate, schedule, simulate, and report.

File formats are versioned JSON (instances, schedules, summaries) and
line-delimited JSON for traces.  All randomness flows from explicit seeds,
so a pipeline re-run with the same arguments is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import generator
from .commgraph import edge_key, max_bipartite_subgraph, max_synch_subgraph
from .errors import InvalidInstanceError, RingsyncError
from .geometry import Circle, ClosedPath, Point2
from .instance import Instance
from .metrics import TABLE_HEADER, aggregate, report as metrics_report
from .scheduler import (SectionPlan, Schedule, assign_section_times,
                        schedule_general, schedule_opposite_directions,
                        schedule_same_direction, verify_schedule)
from .simulator import (SimConfig, Strategy, Trace, TraceEvent, parse_strategy,
                        resolve_root, run)

FORMAT_VERSION = 1
OUTPUT_DIR_ENV = "RINGSYNC_OUTPUT_DIR"


# ---------------------------------------------------------------------------
# Serialization

def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _out_path(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def instance_to_json(inst: Instance) -> dict:
    doc = {"format_version": FORMAT_VERSION, "mode": inst.mode,
           "label": inst.label, "meta": inst.meta}
    if inst.mode == "circle":
        doc["circles"] = [[c.center.x, c.center.y, c.radius] for c in inst.circles]
        doc["comm_range"] = inst.comm_range
    else:
        doc["paths"] = [p.vertices.tolist() for p in inst.paths]
        doc["ranges"] = list(inst.ranges)
    return doc


def instance_from_json(doc: dict) -> Instance:
    if doc.get("format_version") != FORMAT_VERSION:
        raise InvalidInstanceError(
            f"unsupported instance format_version {doc.get('format_version')!r}")
    if doc["mode"] == "circle":
        circles = [Circle(Point2(x, y), radius) for x, y, radius in doc["circles"]]
        return Instance(mode="circle", circles=circles,
                        comm_range=doc["comm_range"],
                        label=doc.get("label", ""), meta=doc.get("meta", {}))
    paths = [ClosedPath(np.array(v)) for v in doc["paths"]]
    return Instance(mode="path", paths=paths, ranges=doc["ranges"],
                    label=doc.get("label", ""), meta=doc.get("meta", {}))


def schedule_to_json(sched: Schedule, retained_edges, dropped,
                     plan: SectionPlan | None = None) -> dict:
    doc = {"format_version": FORMAT_VERSION, "mode": sched.mode,
           "period": sched.period, "starts": list(sched.starts),
           "dirs": list(sched.dirs),
           "retained_edges": [list(e) for e in sorted(retained_edges)],
           "dropped_edges": {k: [list(e) for e in sorted(v)]
                             for k, v in dropped.items()}}
    if sched.epochs is not None:
        doc["epochs"] = [{str(nb): t for nb, t in ep.items()}
                         for ep in sched.epochs]
    if plan is not None:
        doc["plan"] = {"period": plan.period,
                       "link_order": {str(i): nbs for i, nbs in plan.link_order.items()},
                       "times": {str(i): ts for i, ts in plan.times.items()},
                       "section_lengths": None if plan.section_lengths is None else
                       {str(i): ls for i, ls in plan.section_lengths.items()}}
    return doc


def schedule_from_json(doc: dict) -> tuple[Schedule, list, SectionPlan | None]:
    if doc.get("format_version") != FORMAT_VERSION:
        raise InvalidInstanceError(
            f"unsupported schedule format_version {doc.get('format_version')!r}")
    epochs = None
    if "epochs" in doc:
        epochs = [{int(nb): t for nb, t in ep.items()} for ep in doc["epochs"]]
    sched = Schedule(mode=doc["mode"], period=doc["period"],
                     starts=doc["starts"], dirs=doc["dirs"], epochs=epochs)
    retained = [tuple(e) for e in doc["retained_edges"]]
    plan = None
    if doc.get("plan"):
        p = doc["plan"]
        plan = SectionPlan(
            period=p["period"],
            link_order={int(i): nbs for i, nbs in p["link_order"].items()},
            times={int(i): ts for i, ts in p["times"].items()},
            section_lengths=None if p["section_lengths"] is None else
            {int(i): ls for i, ls in p["section_lengths"].items()})
    return sched, retained, plan


def trace_to_lines(trace: Trace) -> list[str]:
    header = {"format_version": FORMAT_VERSION, "type": "header",
              "n": trace.n, "period": trace.period, "horizon": trace.horizon,
              "strategy": trace.strategy, "seed": trace.seed,
              "initial_occupancy": trace.initial_occupancy,
              "survivors": trace.survivors}
    lines = [_dumps(header)]
    for e in trace.events:
        lines.append(_dumps({"type": "event", "time": e.time, "kind": e.kind,
                             "agents": e.agents, "trajs": e.trajs,
                             "location": e.location, "msg": e.msg}))
    return lines


def trace_from_lines(lines) -> Trace:
    head = json.loads(lines[0])
    if head.get("format_version") != FORMAT_VERSION:
        raise InvalidInstanceError(
            f"unsupported trace format_version {head.get('format_version')!r}")
    trace = Trace(n=head["n"], period=head["period"], horizon=head["horizon"],
                  strategy=head["strategy"], seed=head["seed"],
                  initial_occupancy=head["initial_occupancy"],
                  survivors=head["survivors"])
    for line in lines[1:]:
        if not line.strip():
            continue
        d = json.loads(line)
        trace.events.append(TraceEvent(time=d["time"], kind=d["kind"],
                                       agents=d["agents"], trajs=d["trajs"],
                                       location=d["location"], msg=d["msg"]))
    return trace


def _write_json(path: str, doc: dict) -> None:
    with open(_out_path(path), "w", encoding="utf-8") as f:
        f.write(_dumps(doc) + "\n")


def _read_json(path: str) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


# ---------------------------------------------------------------------------
# Subcommands

def cmd_generate(args) -> int:
    if args.grid:
        rows, _, cols = args.grid.partition("x")
        inst = generator.grid(int(rows), int(cols),
                              spacing=args.spacing, r=args.range)
    elif args.random is not None:
        inst = generator.random_connected(args.random, r=args.range,
                                          seed=args.seed)
    else:
        inst = generator.preset(args.preset)
    generator.validate_instance(inst)
    g = inst.graph()
    _write_json(args.output, instance_to_json(inst))
    print(f"{inst.label or 'instance'}: {g.n} nodes, {len(g.edges)} edges "
          f"-> {args.output}")
    return 0


def cmd_schedule(args) -> int:
    inst = instance_from_json(_read_json(args.instance))
    period = args.period if args.period is not None else inst.meta.get("period", 1.0)
    g = inst.graph()
    gb = max_bipartite_subgraph(g)
    odd_dropped = sorted(set(g.edges) - set(gb.edges))
    plan = None
    if inst.mode == "path":
        plan = assign_section_times(gb, period=period)
        sched = schedule_general(gb, plan)
        retained = sorted(gb.edges)
        dropped = {"odd-cycle": odd_dropped, "infeasible-cycle": []}
    else:
        gs = max_synch_subgraph(gb) if args.mode != "same" else gb
        cycle_dropped = sorted(set(gb.edges) - set(gs.edges))
        if args.mode == "same":
            sched = schedule_same_direction(gs, period=period)
        else:
            sched = schedule_opposite_directions(gs, period=period)
        retained = sorted(gs.edges)
        dropped = {"odd-cycle": odd_dropped, "infeasible-cycle": cycle_dropped}
    sub = g.subgraph(retained)
    rep = verify_schedule(sub, sched)
    if not rep.all_synchronized:
        raise RingsyncError("schedule failed verification on retained edges")
    _write_json(args.output, schedule_to_json(sched, retained, dropped, plan))
    n_drop = len(odd_dropped) + len(dropped["infeasible-cycle"])
    reasons = []
    if odd_dropped:
        reasons.append(f"{len(odd_dropped)} odd cycle")
    if dropped["infeasible-cycle"]:
        reasons.append(f"{len(dropped['infeasible-cycle'])} infeasible cycle")
    note = f" ({', '.join(reasons)})" if reasons else ""
    print(f"{sched.mode}: {len(retained)} edges synchronized, "
          f"{n_drop} dropped{note} -> {args.output}")
    if len(retained) == sub.n - 1:
        print("retained subgraph is a tree")
    return 0


def _resolve_failures(args, inst: Instance, n: int) -> list:
    if args.fail_at:
        out = []
        for part in args.fail_at.split(","):
            agent, _, t = part.partition(":")
            out.append((int(agent), float(t) if t else 0.0))
        return out
    if args.fail_whites:
        whites = inst.meta.get("whites")
        if whites is None:
            raise InvalidInstanceError("instance has no white agent list")
        return [(w, 0.0) for w in whites]
    if args.fail:
        rng = np.random.default_rng(args.fail_seed)
        agents = rng.choice(n, size=args.fail, replace=False)
        return [(int(a), 0.0) for a in sorted(agents)]
    return []


def cmd_simulate(args) -> int:
    inst = instance_from_json(_read_json(args.instance))
    sched, retained, _ = schedule_from_json(_read_json(args.schedule))
    g = inst.graph().subgraph(retained)
    strategy = parse_strategy(args.strategy)
    if strategy.kind == "dfs":
        strategy = Strategy("dfs", root=resolve_root(strategy, inst))
    failures = _resolve_failures(args, inst, g.n)
    seeds = ([int(s) for s in args.seed_list.split(",")] if args.seed_list
             else list(range(args.seeds)))
    outdir = _out_path(args.output)
    os.makedirs(outdir, exist_ok=True)
    for seed in seeds:
        config = SimConfig(horizon=args.horizon, strategy=strategy, seed=seed,
                           failures=failures,
                           emission_period=args.emission_period)
        trace = run(inst, sched, config, graph=g)
        with open(os.path.join(outdir, f"trace-{seed}.jsonl"), "w",
                  encoding="utf-8") as f:
            f.write("\n".join(trace_to_lines(trace)) + "\n")
    print(f"wrote {len(seeds)} trace(s) to {outdir}")
    return 0


def cmd_report(args) -> int:
    files = sorted(f for f in os.listdir(args.traces)
                   if f.startswith("trace-") and f.endswith(".jsonl"))
    if not files:
        raise InvalidInstanceError(f"no trace files in {args.traces!r}")
    reports = []
    for name in files:
        with open(os.path.join(args.traces, name), encoding="utf-8") as f:
            reports.append(metrics_report(trace_from_lines(f.readlines())))
    agg = aggregate(reports)
    label = args.label or os.path.basename(os.path.normpath(args.traces))
    print(TABLE_HEADER)
    print(agg.row(label))
    if args.output:
        def as_doc(r):
            return {"broadcast_time": ("inf" if math.isinf(r.broadcast_time)
                                       else r.broadcast_time),
                    "abandoned_time": r.abandoned_time,
                    "starvation_time": r.starvation_time,
                    "completed_tours": r.completed_tours,
                    "starvation_proven": r.starvation_proven,
                    "potentially_starving": r.potentially_starving}
        _write_json(args.output,
                    {"format_version": FORMAT_VERSION, "label": label,
                     "aggregate": as_doc(agg),
                     "per_seed": [as_doc(r) for r in reports]})
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ringsync",
                                 description="Trajectory synchronization toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="produce an instance file")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--grid", metavar="RxC")
    src.add_argument("--random", type=int, metavar="N")
    src.add_argument("--preset", metavar="NAME")
    g.add_argument("--spacing", type=float, default=2.4)
    g.add_argument("--range", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default="instance.json")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("schedule", help="compute a synchronized schedule")
    s.add_argument("-i", "--instance", required=True)
    s.add_argument("--mode", choices=["opposite", "same"], default="opposite")
    s.add_argument("--period", type=float, default=None)
    s.add_argument("-o", "--output", default="schedule.json")
    s.set_defaults(func=cmd_schedule)

    m = sub.add_parser("simulate", help="run seeded simulations")
    m.add_argument("-i", "--instance", required=True)
    m.add_argument("-s", "--schedule", required=True)
    m.add_argument("--horizon", type=float, required=True)
    m.add_argument("--strategy", default="alw",
                   help="alw | rand:<p> | dfs:<root> | dfs:topleft")
    m.add_argument("--seeds", type=int, default=1, help="run seeds 0..N-1")
    m.add_argument("--seed-list", default=None, help="explicit seeds, comma separated")
    m.add_argument("--fail", type=int, default=0, help="fail this many random agents at t=0")
    m.add_argument("--fail-seed", type=int, default=0)
    m.add_argument("--fail-at", default=None, help="explicit failures agent:time,...")
    m.add_argument("--fail-whites", action="store_true",
                   help="fail the instance's marked white agents at t=0")
    m.add_argument("--emission-period", type=float, default=None)
    m.add_argument("-o", "--output", default="traces")
    m.set_defaults(func=cmd_simulate)

    r = sub.add_parser("report", help="aggregate traces into a metrics table")
    r.add_argument("-t", "--traces", required=True)
    r.add_argument("--label", default=None)
    r.add_argument("-o", "--output", default=None)
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RingsyncError, OSError, ValueError) as exc:
        sys.stderr.write(_dumps({"error": type(exc).__name__,
                                 "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
