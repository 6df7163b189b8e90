"""Command-line surface.

Results go to stdout as one JSON object; --trace streams growth events to
stderr as JSON lines. Exit codes: 0 ok, 2 infeasible, 3 numeric failure,
4 bad input (including unparseable flags, which argparse would otherwise
report with its own status 2).
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .applications import (parse_tree_doc, set_cover_instance,
                           solve_gst_online)
from .baselines import offline_solve
from .covering_lp import current_solution, dual_certificate, new_lp_solver, \
    process_row
from .covering_lp_box import dual_certificate_box, new_lp_box_solver, \
    process_row_box
from .covering_sdp import dual_certificate as sdp_dual_certificate
from .covering_sdp import (current_solution as sdp_current_solution,
                           new_sdp_solver, process_matrix)
from .errors import (EmptyRow, ExponentOverflow, Infeasible,
                     MalformedDocument, NoFeasibleSolution, NoProgress,
                     NotConverged, PdlaError, PhaseRestartLimit,
                     UncoverableElement, UnscalableRow)
from .experiments import ExperimentConfig, ingest_edge_list, run_experiment
from .instances import (SolverParams, make_lp_instance, parse_advice,
                        parse_lp_instance, parse_sdp_instance,
                        validate_advice)

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_NUMERIC = 3
EXIT_BAD_INPUT = 4

_INFEASIBLE = (Infeasible, NoFeasibleSolution, UncoverableElement,
               UnscalableRow)
_NUMERIC = (NotConverged, ExponentOverflow, NoProgress, PhaseRestartLimit)


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, which collides with the
    # infeasible code; reroute to the bad-input code.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _load_advice(args, n, boxed):
    if args.advice is None:
        if args.lam is not None:
            raise MalformedDocument("--lambda requires --advice")
        return None
    adv = parse_advice(_read(args.advice), n, boxed)
    if args.lam is not None:
        adv = validate_advice(adv.x_prime, args.lam, n, boxed)
    return adv


def _emit_trace(state) -> None:
    for entry in state.trace:
        print(json.dumps(entry), file=sys.stderr)


def _lp_result(state, cert) -> dict:
    x = current_solution(state)
    return {
        "x": [float(v) for v in x],
        "objective": float(state.c @ x),
        "alpha_history": state.alpha_history,
        "violations": state.violations_seen,
        "iterations": state.iterations,
        "phases": len(state.alpha_history),
        "dual": {"scale": cert.scale, "objective": cert.objective},
    }


def _cmd_solve_lp(args) -> int:
    inst = parse_lp_instance(_read(args.instance))
    if args.boxed and not inst.boxed:
        inst = make_lp_instance(inst.n, inst.c, inst.rows, boxed=True)
    adv = _load_advice(args, inst.n, inst.boxed)
    params = SolverParams(trace=args.trace)
    if inst.boxed:
        st = new_lp_box_solver(inst.n, inst.c, advice=adv, params=params)
        for row in inst.rows:
            process_row_box(st, row)
        cert = dual_certificate_box(st)
    else:
        st = new_lp_solver(inst.n, inst.c, advice=adv, params=params)
        for row in inst.rows:
            process_row(st, row)
        cert = dual_certificate(st)
    if args.trace:
        _emit_trace(st)
    print(json.dumps(_lp_result(st, cert)))
    return EXIT_OK


def _cmd_solve_sdp(args) -> int:
    inst = parse_sdp_instance(_read(args.instance))
    if args.boxed:
        inst.boxed = True
    adv = _load_advice(args, inst.n, inst.boxed)
    params = SolverParams(trace=args.trace)
    st = new_sdp_solver(inst, advice=adv, params=params)
    for B in inst.B_stream:
        process_matrix(st, B)
    cert = sdp_dual_certificate(st)
    x = sdp_current_solution(st)
    if args.trace:
        _emit_trace(st)
    print(json.dumps({
        "x": [float(v) for v in x],
        "objective": float(st.c @ x),
        "alpha_history": st.alpha_history,
        "violations": st.violations_seen,
        "iterations": st.iterations,
        "phases": len(st.alpha_history),
        "dual": {"scale": cert.scale, "objective": cert.objective},
    }))
    return EXIT_OK


def _cmd_set_cover(args) -> int:
    system = ingest_edge_list(args.graph, cost_seed=args.cost_seed,
                              cost_scale=args.cost_scale)
    inst = set_cover_instance(system)
    adv = _load_advice(args, inst.n, True)
    params = SolverParams(trace=args.trace)
    st = new_lp_box_solver(inst.n, inst.c, advice=adv, params=params)
    for row in inst.rows:
        process_row_box(st, row)
    cert = dual_certificate_box(st)
    if args.trace:
        _emit_trace(st)
    print(json.dumps(_lp_result(st, cert)))
    return EXIT_OK


def _cmd_gst(args) -> int:
    doc = json.loads(_read(args.tree))
    tree, groups = parse_tree_doc(doc)
    if args.groups is not None:
        groups = json.loads(_read(args.groups))
        if not isinstance(groups, list):
            raise MalformedDocument("groups file must hold a list of lists")
    n_edges = len(tree.edges)
    adv = _load_advice(args, n_edges, True)
    x, st = solve_gst_online(tree, groups, advice=adv,
                             params=SolverParams(trace=args.trace))
    if args.trace:
        _emit_trace(st)
    costs = np.array([c for (_, _, c) in tree.edges])
    print(json.dumps({
        "x": [float(v) for v in x],
        "objective": float(costs @ x),
        "alpha_history": st.alpha_history,
        "violations": st.violations_seen,
        "iterations": st.iterations,
        "phases": len(st.alpha_history),
    }))
    return EXIT_OK


_KIND_NAMES = {"lambda-sweep": "LambdaSweep", "corruption": "CorruptionSweep",
               "drift": "BatchDrift", "graphs": "GraphSequence"}


def _cmd_experiment(args) -> int:
    doc = json.loads(_read(args.config)) if args.config else {}
    if not isinstance(doc, dict):
        raise MalformedDocument("config must be a JSON object")
    doc["kind"] = _KIND_NAMES[args.kind]
    if args.out is not None:
        doc["out"] = args.out
    if args.full:
        doc["full"] = True
    cfg = ExperimentConfig.from_doc(doc)
    rows = run_experiment(cfg)
    print(json.dumps({"kind": cfg.kind, "rows": len(rows), "out": cfg.out}))
    return EXIT_OK


def _cmd_offline(args) -> int:
    inst = parse_lp_instance(_read(args.instance))
    cert = offline_solve(inst, eps=args.eps)
    print(json.dumps(cert.to_doc()))
    return EXIT_OK


def _add_advice_flags(sub) -> None:
    sub.add_argument("--advice", help="advice JSON file")
    sub.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="override the advice file's confidence")
    sub.add_argument("--trace", action="store_true",
                     help="stream growth events to stderr as JSON lines")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pdla",
                     description="Streaming covering LP/SDP solvers with "
                                 "advice, baselines, and experiments.")
    subs = parser.add_subparsers(dest="command", required=True,
                                 parser_class=_Parser)

    sp = subs.add_parser("solve-lp", help="run the covering LP solver")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--boxed", action="store_true",
                    help="force box constraints on an unboxed document")
    _add_advice_flags(sp)
    sp.set_defaults(func=_cmd_solve_lp)

    sp = subs.add_parser("solve-sdp", help="run the covering SDP solver")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--boxed", action="store_true")
    _add_advice_flags(sp)
    sp.set_defaults(func=_cmd_solve_sdp)

    sp = subs.add_parser("set-cover", help="vertex-cover-as-set-cover stream")
    sp.add_argument("--graph", required=True, help="edge list file")
    sp.add_argument("--cost-seed", type=int, default=0)
    sp.add_argument("--cost-scale", type=float, default=10.0)
    _add_advice_flags(sp)
    sp.set_defaults(func=_cmd_set_cover)

    sp = subs.add_parser("gst", help="group Steiner tree on a tree")
    sp.add_argument("--tree", required=True, help="tree JSON file")
    sp.add_argument("--groups", help="optional groups JSON file override")
    _add_advice_flags(sp)
    sp.set_defaults(func=_cmd_gst)

    sp = subs.add_parser("experiment", help="run a seeded experiment grid")
    sp.add_argument("kind", choices=sorted(_KIND_NAMES))
    sp.add_argument("--config", help="JSON config file")
    sp.add_argument("--out", help="CSV output path")
    sp.add_argument("--full", action="store_true",
                    help="keep every graph snapshot instead of the two "
                         "smallest")
    sp.set_defaults(func=_cmd_experiment)

    sp = subs.add_parser("offline", help="near-optimal offline certificate")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--eps", type=float, default=1e-6)
    sp.set_defaults(func=_cmd_offline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INFEASIBLE as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except _NUMERIC as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (MalformedDocument, EmptyRow, PdlaError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (OSError, json.JSONDecodeError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
