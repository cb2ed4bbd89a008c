"""Command-line front end."""

import argparse
import sys
from pathlib import Path

from .engine import (
    BnConversionError,
    PairOrder,
    RunConfig,
    Trace,
    TraceFormatError,
    fci_to_bn,
    run_ci,
    run_fci,
)
from .fixtures import FIXTURES, fixture
from .fuzz import fuzz
from .graph_core import (
    GraphError,
    build_including_path_graph,
    dag_to_dot,
    ipg_to_dot,
    network_to_text,
    parse_network,
)
from .poipg import Poipg
from .verify import (
    bn_equivalence_check,
    diff_vs_true_ipg,
    violations_to_json,
    violations_to_text,
)

OK, FINDINGS, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _load_graph(args):
    if args.graph is None and args.fixture is None:
        raise UsageError("give --graph FILE or --fixture NAME")
    dag = None
    if args.graph is not None:
        dag = parse_network(_read(args.graph))
    if args.fixture is not None:
        fix = fixture(args.fixture)
        if dag is not None and network_to_text(dag) != network_to_text(fix):
            raise UsageError(f"{args.graph} does not match fixture {args.fixture}")
        dag = fix
    return dag


def _pair(text):
    parts = text.split(",")
    if len(parts) != 2 or not all(parts) or parts[0] == parts[1]:
        raise argparse.ArgumentTypeError(f"expected A,B, got {text!r}")
    return tuple(parts)


def _config(args):
    try:
        order = PairOrder.parse(args.order, first=tuple(args.first))
        return RunConfig(
            pds_variant=args.pds,
            stage_c=args.stage_c,
            removal_policy=args.removal,
            pair_order=order,
            separable_cap=args.cap,
            allow_unsound=args.allow_unsound,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _run(dag, args):
    if args.ci:
        return run_ci(dag)
    return run_fci(dag, _config(args))


def _load_trace(path):
    text = _read(path)
    if text.lstrip().startswith("{"):
        return Trace.from_jsonl(text)
    return Trace.from_text(text)


def _load_result_graph(args, dag):
    """The derived graph for diff/verify-bn: a file, a trace, or a fresh run."""
    if args.input is not None:
        return Poipg.from_text(_read(args.input), nodes=dag.sorted_visible())
    if args.trace is not None:
        return _load_trace(args.trace).replay()
    return _run(dag, args).poipg


# -- subcommands -------------------------------------------------------------


def cmd_run(args):
    dag = _load_graph(args)
    result = _run(dag, args)
    trace = result.trace.to_jsonl() if args.json else result.trace.to_text()
    if args.trace is not None:
        _emit(trace, args.trace)
        _emit(result.poipg.to_text(), args.out)
    elif args.out is not None:
        sys.stdout.write(trace)
        _emit(result.poipg.to_text(), args.out)
    else:
        sys.stdout.write(trace)
        sys.stdout.write("Output:\n" + result.poipg.to_text())
    return OK


def cmd_trace(args):
    _emit(_load_trace(args.file).replay().to_text(), args.out)
    return OK


def cmd_diff(args):
    dag = _load_graph(args)
    report = diff_vs_true_ipg(_load_result_graph(args, dag), build_including_path_graph(dag))
    _emit(report.to_json() if args.json else report.to_text(), args.out)
    return OK if report.is_empty() else FINDINGS


def _query(text):
    pair, _, cond = text.partition("|")
    a, b = _pair(pair)
    return a, b, frozenset(c for c in cond.split(",") if c)


def cmd_verify_bn(args):
    dag = _load_graph(args)
    bn = fci_to_bn(_load_result_graph(args, dag))
    violations = bn_equivalence_check(
        bn, dag, max_cond=args.max_cond, queries=args.query or None
    )
    if args.json:
        text = violations_to_json(violations)
    else:
        text = violations_to_text(violations)
        text += f"Violated constraints: {len(bn.violated_constraints)}\n"
        text += "".join(f"  constraint {l} {m} {r}\n" for l, m, r in bn.violated_constraints)
    _emit(text, args.out)
    return FINDINGS if violations or bn.violated_constraints else OK


def cmd_export_dot(args):
    if args.input is not None:
        _emit(Poipg.from_text(_read(args.input)).to_dot(), args.out)
        return OK
    dag = _load_graph(args)
    if args.what == "dag":
        text = dag_to_dot(dag)
    elif args.what == "ipg":
        text = ipg_to_dot(build_including_path_graph(dag))
    else:
        text = _run(dag, args).poipg.to_dot()
    _emit(text, args.out)
    return OK


def cmd_fuzz(args):
    if args.iters < 0:
        raise UsageError("--iters must be non-negative")
    if not 0.0 <= args.edge_prob <= 1.0:
        raise UsageError("--edge-prob must lie in [0, 1]")
    report = fuzz(args.seed, args.iters, edge_prob=args.edge_prob)
    _emit(report.to_text(), args.out)
    return FINDINGS if report.findings else OK


# -- parser ------------------------------------------------------------------


def _add_graph(p):
    p.add_argument("--graph", metavar="FILE", help="network file")
    p.add_argument("--fixture", choices=sorted(FIXTURES), help="built-in network")


def _add_run_flags(p):
    p.add_argument("--pds", choices=["x", "xprime", "xdoubleprime"], default="x")
    p.add_argument("--stage-c", choices=["colliders", "constraints"], default="colliders")
    p.add_argument("--removal", choices=["immediate", "deferred", "rerun"], default="immediate")
    p.add_argument("--order", default="lex", help="lex, reverse or seeded:N")
    p.add_argument(
        "--first", type=_pair, action="append", default=[], metavar="A,B",
        help="visit this pair before all others (repeatable)",
    )
    p.add_argument("--cap", type=int, help="bound the rule-2 separator search")
    p.add_argument("--ci", action="store_true", help="run CI instead of FCI")
    p.add_argument(
        "--allow-unsound", action="store_true",
        help="permit constraint stage C with a Possible-D-Sep other than xdoubleprime",
    )


def build_parser():
    parser = argparse.ArgumentParser(prog="fcirepair")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run FCI or CI and print the trace")
    _add_graph(p)
    _add_run_flags(p)
    p.add_argument("--out", metavar="FILE", help="write the final graph here")
    p.add_argument("--trace", metavar="FILE", help="write the trace here")
    p.add_argument("--json", action="store_true", help="JSON-lines trace")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("trace", help="replay a saved trace")
    p.add_argument("file")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_trace)

    for name, func, extra in (
        ("diff", cmd_diff, "compare with the true including path graph"),
        ("verify-bn", cmd_verify_bn, "convert to a belief network and check independences"),
    ):
        p = sub.add_parser(name, help=extra)
        _add_graph(p)
        _add_run_flags(p)
        p.add_argument("--input", metavar="FILE", help="derived graph text")
        p.add_argument("--trace", metavar="FILE", help="derive the graph by replaying this trace")
        p.add_argument("--out", metavar="FILE")
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)
        if name == "verify-bn":
            p.add_argument("--max-cond", type=int, default=2)
            p.add_argument(
                "--query", type=_query, action="append", default=[], metavar="A,B|S1,S2",
                help="check only these triples (repeatable)",
            )

    p = sub.add_parser("export-dot", help="write a graph in DOT format")
    _add_graph(p)
    _add_run_flags(p)
    p.add_argument("--what", choices=["dag", "ipg", "poipg"], default="dag")
    p.add_argument("--input", metavar="FILE", help="graph text to export instead")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("fuzz", help="differential test on random latent DAGs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--edge-prob", type=float, default=0.3)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except BnConversionError as exc:
        print(f"fcirepair {args.command}: cannot build belief network: {exc}", file=sys.stderr)
    except (UsageError, GraphError, TraceFormatError) as exc:
        print(f"fcirepair {args.command}: error: {exc}", file=sys.stderr)
    return USAGE
