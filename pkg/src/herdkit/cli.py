"""Command-line interface.

Every subcommand prints one JSON report and exits with 0 (Herdable),
1 (NotHerdable), 2 (Unknown), 3 (error) or 64 (usage error).  Node and
column indices in reports are 1-based.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Callable

from . import __version__
from .errors import ArgumentError, HerdkitError
from .herding import synthesize_plan
from .io import dumps_report, load_system, make_report, parse_diagonal_pair
from .leaders import layer_blocks, prop2_check, prop3_check, reduction_report, validate_assumption1
from .linalg import controllability_matrix, permute, resolve_eps
from .oracle import Status, herdable
from .trees import DiagonalPair, diagonal_pair_herdable, prop5_check, prop6_check, prop7_check, select_leader, validate_tree
from .unisign import greedy_check

EXIT = {Status.HERDABLE.value: 0, Status.NOT_HERDABLE.value: 1, Status.UNKNOWN.value: 2}
EXIT_ERROR = 3
EXIT_USAGE = 64
SYSTEM_SUFFIXES = (".json", ".edges")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _one_based(xs):
    return [x + 1 for x in xs]


def _trace_1based(trace):
    return [
        {"columns": _one_based(s["columns"]), "direction": s["direction"], "rows": _one_based(s["rows"])}
        for s in trace
    ]


def _verdict_report(v, **extra):
    """Report for a verdict whose node indices are already in caller order."""
    details = dict(v.details)
    if "trace" in details:
        details["trace"] = _trace_1based(details["trace"])
    if "violating_pair" in details:
        details["violating_pair"] = _one_based(details["violating_pair"])
    if "uncovered_rows" in details:
        details["uncovered_rows"] = _one_based(details["uncovered_rows"])
    if "classes" in details:
        details["classes"] = [_one_based(c) for c in details["classes"]]
    details.update(extra)
    return make_report(v.status, details, certificate=v.certificate, witness=v.witness)


def _leaders_first(desc):
    """Permutation putting the leaders (in listed order) ahead of the followers."""
    leaders = list(desc.leader_set())
    rest = [v for v in range(desc.n) if v not in set(leaders)]
    perm = leaders + rest
    return perm, permute(desc.A, perm, perm)


def cmd_check(desc, args):
    v = herdable(desc.A, desc.input_matrix(), args.eps)
    return _verdict_report(v, check="oracle")


def cmd_greedy(desc, args):
    R = controllability_matrix(desc.A, desc.input_matrix(), desc.n)
    return _verdict_report(greedy_check(R, args.eps))


def cmd_reduce(desc, args):
    perm, A = _leaders_first(desc)
    m = len(desc.leader_set())
    rep = reduction_report(A, m, args.eps)
    full = rep["full"]
    details = {
        "followers": _one_based(perm[m:]),
        "A22": rep["A22"],
        "A21": rep["A21"],
        "reduced_status": rep["reduced_status"],
        "statuses_agree": rep["statuses_agree"],
        "images_coincide": rep["images_coincide"],
    }
    witness = None
    if full.witness is not None:
        witness = [None] * desc.n
        for i, p in enumerate(perm):
            witness[p] = full.witness[i]
    return make_report(full.status, details, certificate=full.certificate, witness=witness)


def cmd_layers(desc, args):
    perm, A = _leaders_first(desc)
    m = len(desc.leader_set())
    S = validate_assumption1(A, m, args.eps)
    caller = [perm[p] for p in S.perm]
    layers = [_one_based(sorted(caller[i] for i in layer)) for layer in S.layers.layers]
    v = prop2_check(S, args.eps)
    if not v.is_herdable:
        v = prop3_check(S, args.eps)
    details = {
        "leaders": _one_based(perm[:m]),
        "layers": layers,
        "sizes": list(S.layers.sizes),
        "depth": S.layers.depth,
        "phi": layer_blocks(S, args.eps, strict=False),
        "check": v.details.get("check"),
    }
    if "failing_layer" in v.details:
        details["failing_layer"] = v.details["failing_layer"]
    return make_report(v.status, details, certificate=v.certificate)


def cmd_tree_leader(desc, args):
    found = select_leader(desc.A, args.eps)
    if found is None:
        return make_report(Status.UNKNOWN, {"check": "tree_leader_selection", "leader": None})
    leader, v = found
    details = {"check": "tree_leader_selection", "leader": leader + 1, "edge_signs": v.details.get("edge_signs")}
    return make_report(v.status, details, certificate=v.certificate)


def cmd_tree_check(desc, args):
    leaders = desc.leader_set()
    if len(leaders) != 1:
        raise ArgumentError(f"tree-check needs exactly one leader, got {len(leaders)}")
    T = validate_tree(desc.A, leaders[0], args.eps)
    if T.depth == 1:
        v = prop6_check(T, args.eps)
    elif T.depth == 2:
        v = prop7_check(T, args.eps)
    else:
        v = prop5_check(T, args.eps)
    return _verdict_report(v, depth=T.depth, leader=leaders[0] + 1)


def _floats(text: str, name: str):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise ArgumentError(f"{name} must be comma-separated numbers") from exc


def cmd_simulate(desc, args):
    x0 = [0] * desc.n if args.x0 is None else _floats(args.x0, "--x0")
    x0 = [int(x) if float(x).is_integer() else x for x in x0]
    if len(x0) != desc.n:
        raise ArgumentError(f"--x0 needs {desc.n} values, got {len(x0)}")
    B = desc.input_matrix()
    v = herdable(desc.A, B, args.eps)
    if not v.is_herdable:
        return _verdict_report(v, check="herding_plan")
    h = int(args.h) if float(args.h).is_integer() else args.h
    plan = synthesize_plan(desc.A, B, x0, h, args.eps, certificate=v.certificate)
    details = {
        "check": "herding_plan",
        "horizon": plan.final_time,
        "alpha": plan.alpha,
        "h": plan.h,
        "inputs": plan.inputs,
        "final_state": plan.final_state,
        "meets_threshold": plan.meets_threshold(),
    }
    return make_report(v.status, details, certificate=v.certificate)


def cmd_diag(path, args):
    with open(path, "rb") as fh:
        lam, gam = parse_diagonal_pair(fh.read())
    v = diagonal_pair_herdable(DiagonalPair(lam, gam, args.eps), args.eps)
    details = dict(v.details)
    if "violating_pair" in details:
        details["violating_pair"] = _one_based(details["violating_pair"])
    if "groups" in details:
        details["groups"] = [_one_based(g) for g in details["groups"]]
    return make_report(v.status, details, certificate=v.certificate, witness=v.witness)


COMMANDS: dict[str, tuple[Callable, str]] = {
    "check": (cmd_check, "exact herdability verdict with certificate or witness"),
    "greedy": (cmd_greedy, "greedy unisigned-column elimination on R(A, B)"),
    "reduce": (cmd_reduce, "follower reduction and equivalence report"),
    "layers": (cmd_layers, "follower layers by distance and layered sign checks"),
    "tree-leader": (cmd_tree_leader, "pick a leader that makes a tree herdable"),
    "tree-check": (cmd_tree_check, "herdability of a tree with one leader"),
    "simulate": (cmd_simulate, "input sequence driving every state above h"),
    "diag": (cmd_diag, "diagonal pair {lambda, gamma} test"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="herdkit", description="Decide and certify herdability of linear systems.")
    p.add_argument("--version", action="version", version=f"herdkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=help_)
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("path", nargs="?", help="system file (.json or edge list)")
        src.add_argument("--batch", metavar="DIR", help="process every system file in DIR, in sorted order")
        if name != "diag":
            sp.add_argument("--format", choices=("json", "edges"), help="input format (default: by extension)")
        sp.add_argument("--eps", type=float, default=None, help="zero tolerance (default: HERD_EPS or 1e-9)")
        if name == "simulate":
            sp.add_argument("--x0", help="initial state, comma separated (default: zeros)")
            sp.add_argument("--h", type=float, default=1.0, help="threshold (default: 1)")
    return p


def _run_one(path: str, args) -> tuple[dict, int]:
    fn, _ = COMMANDS[args.command]
    try:
        if args.command == "diag":
            report = fn(path, args)
        else:
            report = fn(load_system(path, args.format), args)
        return report, EXIT[str(report["status"])]
    except (HerdkitError, OSError) as exc:
        report = make_report("Error", {"error": type(exc).__name__, "message": str(exc)})
        return report, EXIT_ERROR


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.eps = resolve_eps(args.eps)
    except HerdkitError as exc:
        print(f"herdkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.eps < 0:
        print("herdkit: --eps must be nonnegative", file=sys.stderr)
        return EXIT_USAGE

    if args.batch is None:
        report, code = _run_one(args.path, args)
        if code == EXIT_ERROR:
            print(f"herdkit: {report['details']['message']}", file=sys.stderr)
        sys.stdout.write(dumps_report(report))
        return code

    if not os.path.isdir(args.batch):
        print(f"herdkit: {args.batch} is not a directory", file=sys.stderr)
        return EXIT_USAGE
    names = sorted(f for f in os.listdir(args.batch) if f.endswith(SYSTEM_SUFFIXES))
    results, code = [], 0
    for name in names:
        report, c = _run_one(os.path.join(args.batch, name), args)
        results.append({"file": name, "exit_code": c, "report": report})
        code = max(code, c)
    sys.stdout.write(dumps_report({"schema": "herdkit/1", "batch": results}))
    return code


if __name__ == "__main__":
    sys.exit(main())
