"""Command-line front end for the verification suites.

Every subcommand resolves its configuration as built-in defaults, then an
optional ``--config`` JSON file, then explicit flags, runs, and writes
``<out>/<subcommand>.{json,csv[,svg]}``.  Exit status is 0 when every
verdict holds, 1 when any verdict fails and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import sampling
from .bodies import Cube, CrossPolytope, DoubleCone, VPolytope
from .dvoretzky import (
    ReductionParams,
    ReductionWitness,
    eq2_chain_check,
    mean_norm,
    normalize_for_mean_bound,
    polarity_discrepancy,
    projection_ratios,
    reduce_nonsymmetric,
)
from .ellipsoids import ball_distance, mvee, verify_ball_certificate
from .errors import ConvexSandwichError, PreconditionError
from .reports import RUNTIME_KEY, emit_reports
from .sampling import child_seeds, haar_subspace, parallel_map, rng_for
from .shapes import (
    as_vpolytope,
    parse_body,
    planted_ball_instance,
    planted_cross_instance,
)
from .symmetrization import (
    intersection_identity_report,
    lemma3_instance,
    lemma3_verify,
    random_double_cone,
)

USAGE_ERROR = 2

COMMON_DEFAULTS = {"seed": 42, "out": "out", "format": ["json", "csv"]}


class UsageError(Exception):
    pass


# -- subcommand runners: cfg -> dict(results, summary, passed, ...) --------


def run_verify_lemma3(cfg):
    dim = cfg["dim"]

    def one(job):
        i, ss = job
        rng = rng_for(ss)
        L, T = lemma3_instance(dim, rng)
        r = lemma3_verify(L, T)
        return {"instance": i, "dim": dim, **r.to_json()}

    rows = parallel_map(one, enumerate(child_seeds(cfg["seed"], cfg["instances"])))
    deltas = [r["delta"] for r in rows]
    worst = min((min(r["inner_margin"], r["outer_margin"]) for r in rows), default=None)
    summary = {"instances": len(rows), "failures": sum(not r["verdict"] for r in rows),
               "max_delta": max(deltas, default=None), "worst_margin": worst}
    return {"results": rows, "summary": summary, "passed": summary["failures"] == 0}


def _cone_from_spec(spec, seed):
    name, _, arg = spec.partition(":")
    if name == "random-cone":
        return random_double_cone(int(arg), rng_for(seed))
    body = parse_body(spec)
    if not isinstance(body, DoubleCone):
        raise UsageError(f"{spec!r} is not a double cone (use b1cone:m or random-cone:m)")
    return body


def run_section_identity(cfg):
    T = _cone_from_spec(cfg["body"], cfg["seed"])
    rep = intersection_identity_report(T, cfg["delta"], cfg["grid"])
    rows = [{"lambda": h, "lhs_scale": a, "rhs_scale": b, "discrepancy": abs(a - b)}
            for h, a, b in zip(rep.heights, rep.lhs_scales, rep.rhs_scales)]
    summary = {k: v for k, v in rep.to_json().items()
               if k not in ("heights", "lhs_scales", "rhs_scales")}
    return {"results": rows, "summary": summary, "passed": rep.passed}


def run_eq2_chain(cfg):
    L = normalize_for_mean_bound(as_vpolytope(parse_body(cfg["body"])))
    rep = eq2_chain_check(L, cfg["alpha"], cfg["samples"], cfg["seed"])
    return {"results": [rep.to_json()], "summary": {}, "passed": rep.passed}


def run_mvee(cfg):
    P = as_vpolytope(parse_body(cfg["input"]))
    E = mvee(P.vertices, tol=cfg["tol"])
    levels = E.level(P.vertices)
    row = {"center": E.center, "shape": E.shape, "radii": E.radii,
           "radius": float(E.radii.max()), "max_level": float(levels.max())}
    return {"results": [row], "summary": {}, "passed": bool(levels.max() <= 1 + 1e-9)}


def run_ball_distance(cfg):
    P = as_vpolytope(parse_body(cfg["input"]))
    lam, cert = ball_distance(P)
    ok, m_in, m_out = verify_ball_certificate(P, cert)
    row = {"lambda": lam, "certificate": cert.to_json(),
           "inner_margin": m_in, "outer_margin": m_out, "verified": ok}
    return {"results": [row], "summary": {}, "passed": ok}


def run_mean_norm(cfg):
    est = mean_norm(parse_body(cfg["body"]), cfg["samples"], cfg["seed"])
    return {"results": [est.to_json()], "summary": {}, "passed": est.mean > 0}


_FAMILIES = {"cube": Cube, "crosspolytope": CrossPolytope}


def run_dvoretzky_scan(cfg):
    if cfg["family"] not in _FAMILIES:
        raise UsageError(f"unknown body family {cfg['family']!r}")
    rows, stats = [], []
    seeds = child_seeds(cfg["seed"], len(cfg["dims"]))
    for d, ss in zip(cfg["dims"], seeds):
        _, ratios = projection_ratios(_FAMILIES[cfg["family"]](d), cfg["m"], cfg["trials"],
                                      ss, cfg["samples"])
        rows.extend({"d": d, "m": cfg["m"], "trial": t, "ratio": r} for t, r in enumerate(ratios))
        stats.append({"d": d, "median_ratio": float(np.median(ratios)), "best_ratio": min(ratios)})
    medians = [s["median_ratio"] for s in stats]
    trend = all(a > b for a, b in zip(medians, medians[1:]))
    return {"results": rows, "summary": {"per_dimension": stats, "median_decreasing": trend},
            "passed": trend, "csv_columns": ["d", "m", "trial", "ratio"],
            "svg_points": [(r["d"], r["ratio"]) for r in rows]}


def run_reduce(cfg):
    rng = rng_for(cfg["seed"])
    if cfg["planted"] == "cross":
        K, H, _ = planted_cross_instance(rng)
        witness = ReductionWitness(H, "CrossPolytope")
    elif cfg["planted"] == "ball":
        K, H = planted_ball_instance(rng)
        witness = ReductionWitness(H, "Ball")
    else:
        if not cfg["input"] or not cfg["witness"]:
            raise UsageError("reduce needs --planted or both --input and --witness")
        K = as_vpolytope(parse_body(cfg["input"]))
        with _open(cfg["witness"]) as fh:
            witness = ReductionWitness.from_json(json.load(fh))
    params = ReductionParams(alpha=cfg["alpha"], k=cfg["k"], trials=cfg["trials"],
                             n_samples=cfg["samples"], seed=cfg["seed"])
    try:
        out = reduce_nonsymmetric(K, witness, params)
    except PreconditionError as exc:
        row = {"case_tag": witness.case_tag, "error": str(exc), "verdict": False}
        return {"results": [row], "summary": {}, "passed": False}
    row = {**out.to_json(), "verdict": True}
    summary = {"lambda": out.lam, "threshold": cfg["threshold"],
               "within_threshold": out.lam <= cfg["threshold"]}
    return {"results": [row], "summary": summary, "passed": True}


def run_polarity_check(cfg):
    d, m = cfg["dim"], cfg["m"]
    fixed = as_vpolytope(parse_body(cfg["input"])) if cfg["input"] else None
    if fixed is not None:
        d = fixed.dim

    def one(job):
        i, ss = job
        body_seed, sub_seed, sample_seed = ss.spawn(3)
        if fixed is None:
            rng = rng_for(body_seed)
            V = rng.standard_normal((2 * d + 4, d))
            K = VPolytope(np.vstack([V, -V]) if i % 2 else V - V.mean(axis=0))
        else:
            K = fixed
        S = haar_subspace(d, m, sub_seed)
        g, s = polarity_discrepancy(K, S, cfg["samples"], sample_seed)
        return {"pair": i, "gauge_error": g, "support_error": s,
                "verdict": g <= cfg["tol"] and s <= cfg["tol"]}

    rows = parallel_map(one, enumerate(child_seeds(cfg["seed"], cfg["pairs"])))
    return {"results": rows, "summary": {"failures": sum(not r["verdict"] for r in rows)},
            "passed": all(r["verdict"] for r in rows)}


def _open(path):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"file not found: {path}")
    return p.open()


def _ints(text):
    return [int(x) for x in text.split(",") if x]


COMMANDS = {
    "verify-lemma3": (run_verify_lemma3, {"dim": 3, "instances": 200}),
    "section-identity": (run_section_identity, {"delta": 1.25, "grid": 16, "body": "b1cone:3"}),
    "eq2-chain": (run_eq2_chain, {"body": "ball-ngon:64", "alpha": 0.01, "samples": 100_000}),
    "mvee": (run_mvee, {"input": "cube:2", "tol": 1e-7}),
    "ball-distance": (run_ball_distance, {"input": "cube:2"}),
    "mean-norm": (run_mean_norm, {"body": "crosspolytope:2", "samples": 100_000}),
    "dvoretzky-scan": (run_dvoretzky_scan, {"family": "cube", "dims": [4, 8, 16], "m": 2,
                                             "trials": 200, "samples": 2000}),
    "reduce": (run_reduce, {"planted": None, "input": None, "witness": None, "alpha": 0.5,
                            "k": None, "trials": 50, "samples": 20_000, "threshold": 1.1}),
    "polarity-check": (run_polarity_check, {"dim": 4, "m": 2, "pairs": 20, "samples": 500,
                                            "input": None, "tol": 1e-8}),
}

_FLAGS = {
    "dim": int, "instances": int, "delta": float, "grid": int, "body": str, "alpha": float,
    "samples": int, "input": str, "tol": float, "family": str, "dims": _ints, "m": int,
    "trials": int, "planted": str, "witness": str, "k": int, "threshold": float, "pairs": int,
}
_POSITIVE = ("dim", "instances", "grid", "samples", "m", "trials", "pairs", "k")


def build_parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int)
    common.add_argument("--out")
    common.add_argument("--config", help="JSON file with parameter values; flags override it")
    common.add_argument("--threads", type=int, help=f"worker threads (else ${sampling.THREADS_ENV})")
    common.add_argument("--format", type=lambda s: s.split(","),
                        help="comma-separated subset of json,csv,svg")
    parser = argparse.ArgumentParser(prog="convexsandwich", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, defaults) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], argument_default=argparse.SUPPRESS)
        for key in defaults:
            kwargs = {"type": _FLAGS[key]}
            if key == "planted":
                kwargs["choices"] = ["cross", "ball"]
            p.add_argument("--" + key.replace("_", "-"), dest=key, **kwargs)
    return parser


def resolve_config(command, flags):
    cfg = {**COMMON_DEFAULTS, **COMMANDS[command][1]}
    if "config" in flags:
        with _open(flags["config"]) as fh:
            try:
                from_file = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"malformed config {flags['config']}: {exc}") from exc
        if not isinstance(from_file, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(from_file) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(from_file)
    cfg.update({k: v for k, v in flags.items() if k in cfg})
    if not isinstance(cfg["seed"], int) or not 0 <= cfg["seed"] < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    for key in _POSITIVE:
        value = cfg.get(key)
        if value is not None and (not isinstance(value, int) or value < 1):
            raise UsageError(f"{key} must be a positive integer")
    if "dims" in cfg and (not cfg["dims"] or min(cfg["dims"]) < 1):
        raise UsageError("dims must be a non-empty list of positive integers")
    bad = set(cfg["format"]) - {"json", "csv", "svg"}
    if bad:
        raise UsageError(f"unknown report formats: {sorted(bad)}")
    return cfg


def run(command, cfg, threads=None):
    """Run one subcommand; returns the report dict."""
    sampling.set_workers(threads)
    start = time.perf_counter()
    try:
        outcome = COMMANDS[command][0](cfg)
    finally:
        sampling.set_workers(None)
    report = {
        "command": command,
        "config": cfg,
        "results": outcome["results"],
        "summary": outcome["summary"],
        "passed": bool(outcome["passed"]),
        RUNTIME_KEY: {"wall_clock_seconds": time.perf_counter() - start,
                      "threads": threads or sampling.workers()},
    }
    return report, outcome


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code else 0
    flags = {k: v for k, v in vars(ns).items() if k != "command"}
    threads = flags.pop("threads", None)
    if threads is not None and threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return USAGE_ERROR
    try:
        cfg = resolve_config(ns.command, flags)
        report, outcome = run(ns.command, cfg, threads)
        paths = emit_reports(report, cfg["format"], cfg["out"],
                             csv_columns=outcome.get("csv_columns"),
                             svg_points=outcome.get("svg_points"))
    except (UsageError, FileNotFoundError, OSError, ConvexSandwichError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    status = "PASS" if report["passed"] else "FAIL"
    print(f"{ns.command}: {status} ({', '.join(str(p) for p in paths)})")
    return 0 if report["passed"] else 1


cli_dispatch = main

if __name__ == "__main__":
    sys.exit(main())
