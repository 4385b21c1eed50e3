"""Command-line entry point: ``walkcount <subcommand> ...``.

CSV outputs: ``walk`` prints ids separated by spaces; ``profile`` prints
``rank,degree`` rows; ``intersect`` prints ``pair,count,running_mean``;
``run`` with format csv writes ``kind,replication,seed,value,steps,
in_target,mean,std,success_fraction`` (one summary row last).
The full output layout is described in ``schema/experiment_output.json``.
Set WALKCOUNT_ORACLE_CAP to change the vertex cap of exact computations.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .estimators import (
    InsufficientIntersectionsError,
    estimate_edges_burnin,
    estimate_vertices_general,
    estimate_vertices_regular,
)
from .experiment import (
    ConfigError,
    VersionMismatchError,
    _auto_t,
    reproduce,
    resolve_burn_in,
    run_experiment,
)
from .generators import FAMILIES, GenerationError, GenSpec, parse_params
from .graph import GraphError, read_graph_file, write_graph_file
from .intersections import sample_intersections
from .oracle import (
    OracleError,
    expected_L,
    expected_weighted_intersections,
    l2_distance_sq,
    mixing_time_from,
    spectral_summary,
    verify_bounds,
)
from .seeding import RNG_NAME, make_rng
from .stopping import RoundBudgetExceeded, pipeline_edges_then_mixing, selfstop_edges, selfstop_mixing
from .walks import compute_profile, simulate_lazy_walk, simulate_lazy_walk_batch


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _graph(args):
    return read_graph_file(args.graph)


def cmd_generate(args):
    g = GenSpec(args.family, parse_params(args.params), args.seed).build()
    if args.out:
        write_graph_file(g, args.out)
    else:
        sys.stdout.write(g.serialize())


def cmd_walk(args):
    tr = simulate_lazy_walk(_graph(args), args.start, args.steps, args.seed)
    print(" ".join(map(str, tr.steps.tolist())))


def cmd_profile(args):
    g = _graph(args)
    traces = simulate_lazy_walk_batch(g, args.start, args.steps, args.walks, args.seed)
    sys.stdout.write(compute_profile(traces, g).to_csv())


def cmd_intersect(args):
    g = _graph(args)
    burn = resolve_burn_in(g, args.burn_in)
    vals = sample_intersections(g, args.start, args.t, args.pairs, make_rng(args.seed),
                                weighted=args.weighted, burn_in=burn)
    running = np.cumsum(vals) / np.arange(1, len(vals) + 1)
    print("pair,count,running_mean")
    for i, (v, r) in enumerate(zip(vals.tolist(), running.tolist())):
        print(f"{i},{v!r},{r!r}")


def cmd_estimate(args):
    g = _graph(args)
    if args.command == "estimate-vertices-general":
        if args.m_hat is None:
            raise ConfigError("--m-hat is required")
        res = estimate_vertices_general(g, args.start, args.m_hat, resolve_burn_in(g, args.burn_in or "auto"),
                                        int(args.t), args.seed)
    elif args.command == "estimate-vertices":
        res = estimate_vertices_regular(g, args.start, _auto_t(g, args.command, args.t), args.k, args.seed)
    else:
        res = estimate_edges_burnin(g, args.start, _auto_t(g, args.command, args.t), args.k,
                                    resolve_burn_in(g, args.burn_in), args.seed)
    out = res.to_dict()
    out["rng"] = RNG_NAME
    _emit(out)


def _tau(g, value):
    return spectral_summary(g, with_t_unif=False).t_rel if value == "auto" else float(value)


def cmd_selfstop_edges(args):
    g = _graph(args)
    val, log = selfstop_edges(g, args.start, _tau(g, args.tau), args.eps, args.k, args.seed, args.max_q)
    _emit({"value": val, "log": log.to_dict()})


def cmd_selfstop_mixing(args):
    g = _graph(args)
    val, log = selfstop_mixing(g, args.start, args.m, args.delta, args.eps, args.c, args.seed, args.max_q)
    _emit({"value": val, "log": log.to_dict()})


def cmd_pipeline(args):
    g = _graph(args)
    m_hat, t_hat, le, lm = pipeline_edges_then_mixing(
        g, args.start, _tau(g, args.tau), args.delta, args.eps, args.k, args.c, args.seed, args.max_q,
        refine_K=args.refine_k,
    )
    _emit({"m_hat": m_hat, "t_hat": t_hat, "edges_log": le.to_dict(), "mixing_log": lm.to_dict()})


def cmd_oracle(args):
    g = _graph(args)
    s = spectral_summary(g)
    out = {"spectral": s.to_dict(), "n": g.vertex_count, "m": g.edge_count}
    if args.t is not None:
        t = args.t
        out["expectations"] = {
            "t": t,
            "weighted_intersections": expected_weighted_intersections(g, args.start, t),
            "weighted_intersections_return_form": expected_weighted_intersections(g, args.start, t, "return"),
            "L": expected_L(g, args.start, t),
            "l2_distance_sq": l2_distance_sq(g, args.start, t),
        }
    if args.delta is not None:
        out["mixing_time_from"] = {"delta": args.delta, "t": mixing_time_from(g, args.start, args.delta)}
    if args.sweep:
        out["bounds"] = verify_bounds(g).to_dict()
    _emit(out)


def cmd_reproduce(args):
    path = Path(args.record)
    doc = json.loads(path.read_text())
    res = reproduce(doc, base=path.parent)
    _emit({"ok": res.ok, "divergent_field": res.divergent_field, "message": res.message})
    return 0 if res.ok else 3


def cmd_run(args):
    path = Path(args.config)
    config = json.loads(path.read_text())
    if args.out:
        config.setdefault("output", {})["path"] = str(Path(args.out).resolve())
    doc = run_experiment(config, base=path.parent)
    if not config.get("output"):
        _emit(doc)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="walkcount", description=__doc__.split("\n")[0],
        epilog="\n".join(__doc__.split("\n")[2:]), formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_cmd(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--graph", required=True, help="edge-list file")
        sp.add_argument("--start", type=int, default=0)
        sp.add_argument("--seed", type=int, default=0)
        sp.set_defaults(func=fn)
        return sp

    sp = sub.add_parser("generate", help="write a generated graph as an edge list")
    sp.add_argument("--family", required=True, choices=sorted(FAMILIES))
    sp.add_argument("--params", default="", help="e.g. k=8,ell=5")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_generate)

    sp = graph_cmd("walk", cmd_walk, "simulate one lazy walk")
    sp.add_argument("--steps", type=int, required=True)

    sp = graph_cmd("profile", cmd_profile, "rank/degree profile of lazy walks")
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--walks", type=int, default=1)

    sp = graph_cmd("intersect", cmd_intersect, "per-pair intersection counts as CSV")
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--pairs", type=int, default=1000)
    sp.add_argument("--weighted", action="store_true")
    sp.add_argument("--burn-in", default=None, help="integer, or 'auto' for the oracle t_unif")

    for name in ("estimate-edges", "estimate-vertices", "estimate-vertices-general"):
        sp = graph_cmd(name, cmd_estimate, f"{name} estimator (JSON)")
        sp.add_argument("--t", default="auto", help="horizon, or 'auto' for the oracle-based threshold")
        sp.add_argument("--k", type=int, default=400)
        sp.add_argument("--burn-in", default=None)
        sp.add_argument("--m-hat", type=float, default=None)

    sp = graph_cmd("selfstop-edges", cmd_selfstop_edges, "self-stopping edge count search")
    sp.add_argument("--tau", default="auto", help="upper bound on t_rel, or 'auto'")
    sp.add_argument("--eps", type=float, default=0.2)
    sp.add_argument("--k", type=int, default=32)
    sp.add_argument("--max-q", type=int, default=60)

    sp = graph_cmd("selfstop-mixing", cmd_selfstop_mixing, "self-stopping l2 mixing time search")
    sp.add_argument("--m", type=float, required=True)
    sp.add_argument("--delta", type=float, default=0.5)
    sp.add_argument("--eps", type=float, default=0.2)
    sp.add_argument("--c", type=float, default=4.0)
    sp.add_argument("--max-q", type=int, default=60)

    sp = graph_cmd("pipeline-edges-then-mixing", cmd_pipeline,
                   "edge search, refined edge estimate, then mixing search with that estimate")
    sp.add_argument("--refine-k", type=int, default=100)
    sp.add_argument("--tau", default="auto")
    sp.add_argument("--delta", type=float, default=0.5)
    sp.add_argument("--eps", type=float, default=0.2)
    sp.add_argument("--k", type=int, default=32)
    sp.add_argument("--c", type=float, default=4.0)
    sp.add_argument("--max-q", type=int, default=60)

    sp = graph_cmd("oracle", cmd_oracle, "exact spectral quantities and bound checks (JSON)")
    sp.add_argument("--t", type=int)
    sp.add_argument("--sweep", action="store_true")
    sp.add_argument("--delta", type=float)

    sp = sub.add_parser("run", help="run a JSON experiment config")
    sp.add_argument("config")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("reproduce", help="re-run a recorded experiment and compare bit-exactly")
    sp.add_argument("record")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args) or 0
    except (GraphError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VersionMismatchError as exc:
        print(f"version error: {exc}", file=sys.stderr)
        return 4
    except (OracleError, GenerationError, RoundBudgetExceeded, InsufficientIntersectionsError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
