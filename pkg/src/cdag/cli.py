"""Command-line interface: ``simulate``, ``estimate``, ``csep``, ``benchmark``,
``misspec``.

Exit codes: 0 success, 1 input error (including bad flags), 2 numeric error.
Every command prints a one-line JSON metadata block (version, seed, config,
output paths) unless ``--quiet`` is given; nothing in any output depends on
wall-clock time, so reruns with the same seed are byte-identical.

Node syntax on the command line is ``v<i>`` / ``w<i>`` with 1-based indices;
graph JSON files use 0-based indices.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .errors import InputError, NumericError
from .evaluation import run_benchmark, run_misspec_sweep
from .graphs import Cdag, Dag, NodeRef
from .scoring import GPriorConfig, read_dataset_csv, write_dataset_csv
from .search import estimate_with_result
from .separation import Query, c_separated
from .simulate import SimConfig, simulate

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's default 2
        raise InputError(message)


def _parse_node(token: str) -> NodeRef:
    token = token.strip()
    if len(token) < 2 or token[0] not in ("v", "w"):
        raise InputError(f"bad node {token!r}: expected v<i> or w<i> (1-based)")
    try:
        index = int(token[1:])
    except ValueError as exc:
        raise InputError(f"bad node {token!r}: expected v<i> or w<i>") from exc
    if index < 1:
        raise InputError(f"bad node {token!r}: CLI node indices are 1-based")
    return NodeRef(token[0], index - 1)


def _parse_node_set(text: str) -> frozenset[NodeRef]:
    text = text.strip()
    if not text:
        return frozenset()
    return frozenset(_parse_node(tok) for tok in text.split(","))


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InputError(f"bad float list {text!r}") from exc


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InputError(f"bad int list {text!r}") from exc


def _parse_g(text: str) -> float | None:
    if text.strip().lower() == "n":
        return None
    try:
        value = float(text)
    except ValueError as exc:
        raise InputError(f"--g must be 'n' or a positive float, got {text!r}") from exc
    return value


def _load_graph(path: str) -> Dag:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read graph file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    return Dag.from_json_dict(data)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _meta(args, command: str, config: dict, outputs: dict) -> None:
    if args.quiet:
        return
    block = {
        "command": command,
        "version": __version__,
        "seed": getattr(args, "seed", None),
        "config": config,
        "outputs": outputs,
    }
    print(json.dumps(block, sort_keys=True))


def _cmd_simulate(args) -> int:
    cfg = SimConfig(
        p=args.p,
        n=args.n,
        theta=args.theta,
        edge_prob=args.edge_prob,
        coef_low=args.coef_low,
        coef_high=args.coef_high,
        noise_sd=args.noise_sd,
        misspec_prob=args.misspec_prob,
        seed=args.seed,
    )
    data, truth = simulate(cfg)
    write_dataset_csv(data, args.out_data)
    truth_payload = {
        "g": truth.g.to_json_dict(),
        "g_prime": truth.g_prime.to_json_dict(),
        "misspec": [list(e) for e in sorted(truth.misspec_edges)],
        "meta": {"version": __version__, "seed": args.seed, "config": _simconfig_dict(cfg)},
    }
    _write_json(args.out_truth, truth_payload)
    _meta(args, "simulate", _simconfig_dict(cfg),
          {"data": args.out_data, "truth": args.out_truth})
    return 0


def _simconfig_dict(cfg: SimConfig) -> dict:
    return {
        "p": cfg.p,
        "n": cfg.n,
        "theta": cfg.theta,
        "edge_prob": cfg.resolved_edge_prob(),
        "coef_low": cfg.coef_low,
        "coef_high": cfg.coef_high,
        "noise_sd": cfg.noise_sd,
        "misspec_prob": cfg.misspec_prob,
        "seed": cfg.seed,
    }


def _cmd_estimate(args) -> int:
    data = read_dataset_csv(args.data)
    gcfg = GPriorConfig(g=_parse_g(args.g), max_parents=args.max_parents)
    mode = args.mode.lower()
    graph, result = estimate_with_result(
        data, mode, gcfg, restarts=args.restarts, seed=args.seed
    )
    config = {
        "mode": mode,
        "max_parents": gcfg.max_parents,
        "g": "n" if gcfg.g is None else gcfg.g,
        "restarts": args.restarts,
        "method": result.method,
        "optimal": result.optimal,
    }
    payload = dict(graph.to_json_dict())
    payload["meta"] = {"version": __version__, "seed": args.seed, "config": config,
                       "log_score": result.log_score}
    _write_json(args.out, payload)
    _meta(args, "estimate", config, {"graph": args.out})
    print(f"log score: {format(result.log_score, '.17g')}")
    return 0


def _cmd_csep(args) -> int:
    graph = _load_graph(args.graph)
    query = Query(
        a=_parse_node_set(args.a),
        b=_parse_node_set(args.b),
        c=_parse_node_set(args.c),
    )
    answer = c_separated(Cdag(graph), query)
    _meta(args, "csep", {"graph": args.graph, "a": args.a, "b": args.b, "c": args.c}, {})
    print(f"separated: {str(answer).lower()}")
    return 0


def _cmd_benchmark(args) -> int:
    thetas = _parse_floats(args.theta)
    ps = _parse_ints(args.p)
    ns = _parse_ints(args.n)
    gcfg = GPriorConfig(g=_parse_g(args.g), max_parents=args.max_parents)
    report = run_benchmark(
        thetas,
        ps,
        ns,
        replicates=args.reps,
        seed=args.seed,
        cfg=gcfg,
        misspec_prob=args.misspec_prob,
        restarts=args.restarts,
        threads=args.threads,
    )
    config = {
        "theta": thetas,
        "p": ps,
        "n": ns,
        "reps": args.reps,
        "misspec_prob": args.misspec_prob,
        "max_parents": gcfg.max_parents,
        "g": "n" if gcfg.g is None else gcfg.g,
        "restarts": args.restarts,
    }
    meta_line = json.dumps(
        {"version": __version__, "seed": args.seed, "config": config}, sort_keys=True
    )
    report.write_csv(args.out, meta=meta_line)
    _meta(args, "benchmark", config, {"report": args.out})
    return 0


def _cmd_misspec(args) -> int:
    probs = _parse_floats(args.probs)
    gcfg = GPriorConfig(g=_parse_g(args.g), max_parents=args.max_parents)
    report = run_misspec_sweep(
        probs,
        replicates=args.reps,
        seed=args.seed,
        p=args.p,
        n=args.n,
        theta=args.theta,
        cfg=gcfg,
        restarts=args.restarts,
        threads=args.threads,
    )
    config = {
        "probs": probs,
        "p": args.p,
        "n": args.n,
        "theta": args.theta,
        "reps": args.reps,
        "max_parents": gcfg.max_parents,
        "g": "n" if gcfg.g is None else gcfg.g,
        "restarts": args.restarts,
    }
    meta_line = json.dumps(
        {"version": __version__, "seed": args.seed, "config": config}, sort_keys=True
    )
    report.write_csv(args.out, meta=meta_line)
    _meta(args, "misspec", config, {"report": args.out})
    return 0


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for benchmarks (default: all cores)")
    common.add_argument("--quiet", action="store_true", help="suppress the metadata block")

    parser = _Parser(prog="cdag", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", parents=[common],
                        help="draw a dataset and ground truth from the SEM")
    ps.add_argument("--p", type=int, required=True, help="number of primary variables")
    ps.add_argument("--n", type=int, required=True, help="number of observations")
    ps.add_argument("--theta", type=float, default=0.0,
                    help="secondary-dependence strength in [0, 1]")
    ps.add_argument("--edge-prob", type=float, default=None,
                    help="edge probability (default 2/(p-1))")
    ps.add_argument("--coef-low", type=float, default=0.5)
    ps.add_argument("--coef-high", type=float, default=1.5)
    ps.add_argument("--noise-sd", type=float, default=1.0)
    ps.add_argument("--misspec-prob", type=float, default=0.0,
                    help="per-edge probability of a misspecified X_i -> Y_j edge")
    ps.add_argument("--out-data", required=True, help="output CSV (y1..yp,x1..xp)")
    ps.add_argument("--out-truth", required=True, help="output truth JSON")
    ps.set_defaults(func=_cmd_simulate)

    pe = sub.add_parser("estimate", parents=[common],
                        help="MAP structure estimate from a dataset CSV")
    pe.add_argument("--data", required=True, help="dataset CSV (y1..yp[,x1..xp])")
    pe.add_argument("--mode", required=True, choices=["cdag", "dag", "dag2"],
                    help="estimator: cdag (uses x, enforces structure), "
                         "dag (y only), dag2 (all 2p columns, primary subgraph)")
    pe.add_argument("--max-parents", type=int, default=5, help="parent-set cap (default 5)")
    pe.add_argument("--g", default="n", help="g-prior scale: 'n' or a positive float")
    pe.add_argument("--restarts", type=int, default=20,
                    help="greedy restarts when dag2 exceeds the exact limit")
    pe.add_argument("--out", required=True, help="output graph JSON")
    pe.set_defaults(func=_cmd_estimate)

    pc = sub.add_parser("csep", parents=[common],
                        help="c-separation query on a graph JSON file")
    pc.add_argument("--graph", required=True, help="graph JSON ({'p': int, 'edges': [[i,j],..]})")
    pc.add_argument("--a", required=True, help="comma list of nodes, e.g. v3 or v1,w2 (1-based)")
    pc.add_argument("--b", required=True, help="comma list of nodes")
    pc.add_argument("--c", default="", help="comma list of conditioning nodes (may be empty)")
    pc.set_defaults(func=_cmd_csep)

    pb = sub.add_parser("benchmark", parents=[common],
                        help="mean SHD per estimator over a (theta, p, n) grid")
    pb.add_argument("--theta", default="0,0.5,0.99", help="comma list of theta values")
    pb.add_argument("--p", default="5,10,15", help="comma list of primary counts")
    pb.add_argument("--n", default="10,100,1000", help="comma list of sample sizes")
    pb.add_argument("--reps", type=int, default=10, help="replicates per cell (default 10)")
    pb.add_argument("--misspec-prob", type=float, default=0.0)
    pb.add_argument("--max-parents", type=int, default=5)
    pb.add_argument("--g", default="n")
    pb.add_argument("--restarts", type=int, default=20)
    pb.add_argument("--out", required=True, help="output CSV")
    pb.set_defaults(func=_cmd_benchmark)

    pm = sub.add_parser("misspec", parents=[common],
                        help="mean SHD as the misspecified-edge probability varies")
    pm.add_argument("--probs", default="0,0.25,0.5,0.75,1", help="comma list of probabilities")
    pm.add_argument("--p", type=int, default=15)
    pm.add_argument("--n", type=int, default=1000)
    pm.add_argument("--theta", type=float, default=0.0)
    pm.add_argument("--reps", type=int, default=10)
    pm.add_argument("--max-parents", type=int, default=5)
    pm.add_argument("--g", default="n")
    pm.add_argument("--restarts", type=int, default=20)
    pm.add_argument("--out", required=True, help="output CSV")
    pm.set_defaults(func=_cmd_misspec)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"cdag: input error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"cdag: numeric error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
