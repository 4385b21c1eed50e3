"""Replicated, reproducible experiment runs driven by a JSON config.

Config layout::

    {
      "graph": {"file": "g.txt"}  |  {"family": "barbell", "params": {...}, "seed": 0},
      "operation": "estimate-edges",
      "params": {"start": 0, "t": "auto", "K": 400},
      "seed": 1,
      "replications": 100,
      "target": {"truth": "m", "rel_tol": 0.5}   # or {"interval": [lo, hi]}
      "output": {"path": "out.json", "format": "json"}
    }

Replicate i runs with ``derive_seed(seed, i)``. The output document holds
the config, its hash, one record per replicate and a summary; wall-clock
time goes to a separate ``<path>.meta.json`` so the main file is
byte-for-byte reproducible.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .estimators import (
    edges_horizon,
    estimate_edges_burnin,
    estimate_vertices_general,
    estimate_vertices_regular,
    mean_degree_horizon,
    vertices_regular_horizon,
)
from .generators import GenSpec
from .graph import Graph, min_degree, read_graph_file
from .intersections import sample_intersections
from .oracle import oracle_cap, spectral_summary, verify_bounds
from .seeding import RNG_NAME, derive_seed, make_rng
from .stopping import pipeline_edges_then_mixing, selfstop_edges, selfstop_mixing

SCHEMA_VERSION = 1
CSV_COLUMNS = ["kind", "replication", "seed", "value", "steps", "in_target", "mean", "std", "success_fraction"]


class ConfigError(ValueError):
    pass


class VersionMismatchError(RuntimeError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def load_config_graph(spec: dict, base: Path | None = None) -> Graph:
    if "file" in spec:
        path = Path(spec["file"])
        if base is not None and not path.is_absolute():
            path = base / path
        return read_graph_file(path)
    if "family" in spec:
        return GenSpec(spec["family"], dict(spec.get("params", {})), int(spec.get("seed", 0))).build()
    raise ConfigError("graph must give either 'file' or 'family'")


def resolve_burn_in(g: Graph, value) -> int:
    """``"auto"`` -> oracle t_unif (only below the oracle cap); ints pass through."""
    if value in (None, 0, "0"):
        return 0
    if value == "auto":
        if g.vertex_count > oracle_cap():
            raise ConfigError(
                f"burn_in='auto' needs the oracle, which is capped at {oracle_cap()} vertices; pass an integer"
            )
        return spectral_summary(g).t_unif
    return int(value)


def _auto_t(g: Graph, op: str, value):
    if value != "auto":
        return int(value)
    s = spectral_summary(g, with_t_unif=False)
    if op == "estimate-vertices":
        return vertices_regular_horizon(s.t_rel, g.vertex_count)
    return edges_horizon(s.t_rel, g.edge_count, min_degree(g))


def _auto_tau(g: Graph, value) -> float:
    return spectral_summary(g, with_t_unif=False).t_rel if value == "auto" else float(value)


# --- operations: (graph, params, seed) -> record --------------------------


def _op_estimate(op):
    def run(g, p, seed):
        x, K = int(p.get("start", 0)), int(p.get("K", 400))
        t = _auto_t(g, op, p.get("t", "auto"))
        if op == "estimate-vertices":
            r = estimate_vertices_regular(g, x, t, K, seed)
        else:
            r = estimate_edges_burnin(g, x, t, K, resolve_burn_in(g, p.get("burn_in", 0)), seed)
        return {"value": r.value, "steps": r.diagnostics["steps"], "t": t,
                "mean_intersections": r.diagnostics["mean_intersections"]}
    return run


def _op_vertices_general(g, p, seed):
    x = int(p.get("start", 0))
    burn = resolve_burn_in(g, p.get("burn_in", "auto"))
    t = p.get("t", "auto")
    if t == "auto":
        t = mean_degree_horizon(g, spectral_summary(g).t_rel, float(p.get("eps", 0.1)))
    m_hat = p.get("m_hat", "true")
    m_hat = g.edge_count if m_hat == "true" else float(m_hat)
    r = estimate_vertices_general(g, x, m_hat, burn, int(t), seed)
    return {"value": r.value, "steps": r.diagnostics["steps"], "t": int(t)}


def _op_selfstop_edges(g, p, seed):
    val, log = selfstop_edges(
        g, int(p.get("start", 0)), _auto_tau(g, p.get("tau", "auto")), float(p.get("eps", 0.2)),
        int(p.get("K", 32)), seed,
    )
    return {"value": val, "steps": log.total_steps, "rounds": len(log.rounds)}


def _op_selfstop_mixing(g, p, seed):
    m = p.get("m", "true")
    m = g.edge_count if m == "true" else float(m)
    val, log = selfstop_mixing(
        g, int(p.get("start", 0)), m, float(p.get("delta", 0.5)), float(p.get("eps", 0.2)),
        float(p.get("C", 4.0)), seed,
    )
    return {"value": val, "steps": log.total_steps, "rounds": len(log.rounds)}


def _op_pipeline(g, p, seed):
    m_hat, t_hat, le, lm = pipeline_edges_then_mixing(
        g, int(p.get("start", 0)), _auto_tau(g, p.get("tau", "auto")), float(p.get("delta", 0.5)),
        float(p.get("eps", 0.2)), int(p.get("K", 32)), float(p.get("C", 4.0)), seed,
        refine_K=int(p.get("refine_K", 100)),
    )
    return {"value": t_hat, "m_hat": m_hat, "steps": le.total_steps + lm.total_steps}


def _op_intersect(g, p, seed):
    t, pairs = int(p["t"]), int(p.get("pairs", 1000))
    burn = resolve_burn_in(g, p.get("burn_in", 0))
    vals = sample_intersections(g, int(p.get("start", 0)), t, pairs, make_rng(seed),
                                weighted=bool(p.get("weighted", True)), burn_in=burn)
    return {"value": float(np.mean(vals)), "steps": 2 * pairs * (burn + t)}


def _op_oracle(g, p, seed):
    rep = verify_bounds(g)
    return {"value": float(rep.all_passed), "steps": 0, "summary": rep.summary(),
            "fitted_constants": rep.fitted_constants}


OPERATIONS = {
    "estimate-edges": _op_estimate("estimate-edges"),
    "estimate-edges-burnin": _op_estimate("estimate-edges-burnin"),
    "estimate-vertices": _op_estimate("estimate-vertices"),
    "estimate-vertices-general": _op_vertices_general,
    "selfstop-edges": _op_selfstop_edges,
    "selfstop-mixing": _op_selfstop_mixing,
    "pipeline-edges-then-mixing": _op_pipeline,
    "intersect": _op_intersect,
    "oracle": _op_oracle,
}


def _target_interval(g: Graph, target: dict | None):
    if not target:
        return None
    if "interval" in target:
        lo, hi = target["interval"]
        return float(lo), float(hi)
    truth = target["truth"]
    truth = {"m": g.edge_count, "n": g.vertex_count}.get(truth, truth)
    tol = float(target.get("rel_tol", 0.5))
    return float(truth) * (1 - tol), float(truth) * (1 + tol)


def _validate(config: dict) -> None:
    for key in ("graph", "operation"):
        if key not in config:
            raise ConfigError(f"config missing required key {key!r}")
    if config["operation"] not in OPERATIONS:
        raise ConfigError(f"unknown operation {config['operation']!r}; choose from {sorted(OPERATIONS)}")
    if int(config.get("replications", 1)) < 1:
        raise ConfigError("replications must be >= 1")


def execute(config: dict, base: Path | None = None) -> dict:
    """Run the experiment and return the (deterministic) output document."""
    _validate(config)
    g = load_config_graph(config["graph"], base)
    op = OPERATIONS[config["operation"]]
    params = dict(config.get("params", {}))
    master = int(config.get("seed", 0))
    interval = _target_interval(g, config.get("target"))
    records = []
    for i in range(int(config.get("replications", 1))):
        s = derive_seed(master, i)
        rec = {"replication": i, "seed": s, **op(g, params, s)}
        if interval is not None:
            rec["in_target"] = bool(interval[0] <= rec["value"] <= interval[1])
        records.append(rec)
    values = np.array([r["value"] for r in records], dtype=float)
    summary = {
        "replications": len(records),
        "mean": float(values.mean()),
        "std": float(values.std(ddof=1)) if len(values) > 1 else 0.0,
        "total_steps": int(sum(r["steps"] for r in records)),
    }
    if interval is not None:
        summary["target_interval"] = list(interval)
        summary["success_fraction"] = float(np.mean([r["in_target"] for r in records]))
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "rng": RNG_NAME,
        "config": config,
        "config_hash": config_hash(config),
        "graph": {"n": g.vertex_count, "m": g.edge_count, "fingerprint": g.fingerprint},
        "records": records,
        "summary": summary,
    }


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ConfigError(f"unknown output format {fmt!r}")
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in doc["records"]:
        w.writerow({"kind": "record", **r})
    s = doc["summary"]
    w.writerow({"kind": "summary", "steps": s["total_steps"], "mean": s["mean"], "std": s["std"],
                "success_fraction": s.get("success_fraction", "")})
    return buf.getvalue()


def run_experiment(config: dict, base: Path | None = None) -> dict:
    """Execute ``config`` and write its outputs if ``config["output"]`` is set.

    JSON output is one document. CSV output writes the rows to ``path`` and
    the full document to ``path + ".json"`` (what :func:`reproduce` reads).
    """
    start = time.time()
    doc = execute(config, base)
    out = config.get("output")
    if out:
        path = Path(out["path"])
        if base is not None and not path.is_absolute():
            path = base / path
        fmt = out.get("format", "json")
        path.write_text(render(doc, fmt))
        if fmt == "csv":
            Path(str(path) + ".json").write_text(render(doc, "json"))
        meta = {"wall_clock_seconds": time.time() - start, "finished_at": time.time(),
                "config_hash": doc["config_hash"]}
        Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return doc


@dataclass
class ReproduceResult:
    ok: bool
    divergent_field: str | None = None
    message: str = ""


def _first_divergence(a, b, path="") -> str | None:
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b)):
            if k not in a or k not in b:
                return f"{path}.{k}".lstrip(".")
            d = _first_divergence(a[k], b[k], f"{path}.{k}")
            if d:
                return d
        return None
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return f"{path}[len]".lstrip(".")
        for i, (x, y) in enumerate(zip(a, b)):
            d = _first_divergence(x, y, f"{path}[{i}]")
            if d:
                return d
        return None
    same = a == b or (isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b))
    return None if same else path.lstrip(".")


def reproduce(doc: dict, base: Path | None = None) -> ReproduceResult:
    """Re-run a recorded experiment and require bit-identical statistics."""
    if doc.get("schema_version") != SCHEMA_VERSION or doc.get("artifact_version") != __version__:
        raise VersionMismatchError(
            f"record made by schema {doc.get('schema_version')} / version {doc.get('artifact_version')}; "
            f"this is schema {SCHEMA_VERSION} / version {__version__}"
        )
    if config_hash(doc["config"]) != doc.get("config_hash"):
        return ReproduceResult(False, "config_hash", "config does not match its recorded hash")
    fresh = execute(doc["config"], base)
    for key in ("graph", "records", "summary"):
        d = _first_divergence(doc.get(key), fresh[key], key)
        if d:
            return ReproduceResult(False, d, f"first divergent field: {d}")
    return ReproduceResult(True, None, "statistics match bit-exactly")
