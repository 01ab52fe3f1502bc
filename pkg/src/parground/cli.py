"""Command-line entry point.

Four subcommands: ``ground`` (instantiate a program file), ``gen``
(emit a benchmark instance), ``oracle`` (brute-force answer sets of a
desk-scale program), and ``bench`` (timing/efficiency harness).

Exit codes: 0 on success, 1 for input errors (syntax, arity, safety,
unreadable files, bad generator parameters), 2 when a configured
resource cap is exceeded.  Diagnostics go to stderr; payload output
goes to stdout or the ``-o`` file.
"""
from __future__ import annotations

import argparse
import json
import sys

from .bench import DEFAULT_RUNS, run_bench
from .depgraph import compute_components, dot_condensation
from .engine import (
    GroundingLimitError,
    SchedulerConfig,
    ground_program,
    parse_levels,
)
from .generators import generate_instance
from .oracle import DEFAULT_ENUM_CAP, OracleCapError, answer_sets
from .parser import (
    ArityError,
    ParseError,
    SafetyError,
    SyntaxParseError,
    parse_program,
    render_ground_program,
)


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _diagnose(exc: ParseError) -> str:
    if isinstance(exc, SafetyError):
        kind = "safety error"
    elif isinstance(exc, ArityError):
        kind = "arity error"
    elif isinstance(exc, SyntaxParseError):
        kind = "syntax error"
    else:
        kind = "parse error"
    return "%s: %s" % (kind, exc)


def _levels_flag(text: str) -> frozenset[str]:
    try:
        return parse_levels(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected a comma-separated list of integers, got %r" % text
        ) from None


def _parse_file(path: str) -> tuple[int, "object"]:
    try:
        text = _read_source(path)
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1, None
    try:
        return 0, parse_program(text, filename=path)
    except ParseError as exc:
        print(_diagnose(exc), file=sys.stderr)
        return 1, None


# -- ground -----------------------------------------------------------------


def cmd_ground(args: argparse.Namespace) -> int:
    code, program = _parse_file(args.file)
    if code:
        return code

    if args.dump_deps:
        _write_output(dot_condensation(compute_components(program)), args.output)
        return 0

    config = SchedulerConfig(
        workers=args.threads,
        levels=args.levels,
        w_seq=args.w_seq,
        w_hard=args.w_hard,
        split_factor=args.split_factor,
        max_ground=args.max_ground,
        collect_stats=args.stats is not None,
    )
    try:
        result = ground_program(program, config)
    except GroundingLimitError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2

    edb = program.edb if args.include_edb else ()
    _write_output(render_ground_program(result.pi, edb), args.output)
    if args.stats is not None:
        with open(args.stats, "w", encoding="utf-8") as handle:
            json.dump(result.stats.to_dict(), handle, indent=2)
            handle.write("\n")
    return 0


# -- gen ----------------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    params: dict = {}
    if args.problem in ("threecol", "nqueens"):
        params["n"] = args.n
    elif args.problem == "reach":
        params["levels"] = args.levels
        params["siblings"] = args.siblings
    else:  # hampath
        params.update(n=args.n, seed=args.seed, degree=args.degree)
    try:
        text = generate_instance(args.problem, **params)
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    _write_output(text, args.output)
    return 0


# -- oracle --------------------------------------------------------------------


def cmd_oracle(args: argparse.Namespace) -> int:
    code, program = _parse_file(args.file)
    if code:
        return code
    try:
        families = answer_sets(program, enum_cap=args.cap)
    except OracleCapError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    lines = sorted(
        "{%s}" % ", ".join(sorted(str(atom) for atom in family))
        for family in families
    )
    _write_output("".join(line + "\n" for line in lines), args.output)
    return 0


# -- bench ----------------------------------------------------------------------


_BENCH_DEFAULT_SIZES = {
    "threecol": [10],
    "nqueens": [8],
    "reach": [5],
    "hampath": [30],
}


def cmd_bench(args: argparse.Namespace) -> int:
    family = args.family
    sizes = args.levels_list if family == "reach" and args.levels_list else args.sizes
    if not sizes:
        sizes = _BENCH_DEFAULT_SIZES[family]
    if family == "reach":
        param_sets = [
            {"levels": value, "siblings": args.siblings} for value in sizes
        ]
    elif family == "hampath":
        param_sets = [
            {"n": value, "seed": args.seed, "degree": args.degree}
            for value in sizes
        ]
    else:
        param_sets = [{"n": value} for value in sizes]
    try:
        report = run_bench(
            family,
            param_sets,
            threads_list=args.threads_list,
            levels=args.levels,
            runs=args.runs,
            w_seq=args.w_seq,
            w_hard=args.w_hard,
            split_factor=args.split_factor,
            max_ground=args.max_ground,
        )
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except GroundingLimitError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        sys.stdout.write(report.render_table())
    return 0


# -- argument wiring ---------------------------------------------------------------


_DEFAULTS = SchedulerConfig()


def _add_grounder_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threads", type=int, default=1, metavar="N",
        help="worker thread count (default 1: strictly serial)",
    )
    parser.add_argument(
        "--levels", type=_levels_flag, default=frozenset("crs"), metavar="SPEC",
        help="parallelism levels to enable: any of c,r,s (e.g. 'c,r,s', "
        "'rs', or 'none'; default all; irrelevant with --threads 1)",
    )
    _add_tuning_flags(parser)


def _add_tuning_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--w-seq", type=int, default=_DEFAULTS.w_seq, metavar="N",
        help="work threshold below which a rule is never split "
        "(default %d)" % _DEFAULTS.w_seq,
    )
    parser.add_argument(
        "--w-hard", type=int, default=_DEFAULTS.w_hard, metavar="N",
        help="work threshold beyond which split tails are re-cut into "
        "single-atom splits (default %d)" % _DEFAULTS.w_hard,
    )
    parser.add_argument(
        "--split-factor", type=int, default=_DEFAULTS.split_factor,
        metavar="K", help="request K*threads splits per heavy rule (default %d)"
        % _DEFAULTS.split_factor,
    )
    parser.add_argument(
        "--max-ground", type=int, default=_DEFAULTS.max_ground,
        metavar="N", help="abort once the ground program exceeds N rules "
        "(default %d)" % _DEFAULTS.max_ground,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parground",
        description="Parallel grounder for disjunctive logic programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ground = sub.add_parser("ground", help="instantiate a program file")
    ground.add_argument("file", help="program file ('-' for stdin)")
    ground.add_argument("-o", "--output", metavar="PATH", default=None)
    ground.add_argument(
        "--stats", metavar="PATH", default=None,
        help="write run statistics as JSON to PATH",
    )
    ground.add_argument(
        "--include-edb", action="store_true",
        help="also render the input facts as ground rules",
    )
    ground.add_argument(
        "--dump-deps", action="store_true",
        help="print the component dependency DAG as DOT and exit",
    )
    _add_grounder_flags(ground)
    ground.set_defaults(func=cmd_ground)

    gen = sub.add_parser("gen", help="emit a benchmark instance")
    gsub = gen.add_subparsers(dest="problem", required=True)
    g3 = gsub.add_parser("threecol", help="3-coloring of a triangular grid")
    g3.add_argument("--n", type=int, default=5, help="grid side (default 5)")
    gq = gsub.add_parser("nqueens", help="n-queens")
    gq.add_argument("--n", type=int, default=8, help="board size (default 8)")
    gr = gsub.add_parser("reach", help="reachability on a complete tree")
    gr.add_argument("--levels", type=int, default=5, help="tree levels (default 5)")
    gr.add_argument("--siblings", type=int, default=2, help="children per node (default 2)")
    gh = gsub.add_parser("hampath", help="Hamiltonian path on a random digraph")
    gh.add_argument("--n", type=int, default=20, help="node count (default 20)")
    gh.add_argument("--seed", type=int, default=1, help="RNG seed (default 1)")
    gh.add_argument("--degree", type=int, default=3, help="out-degree (default 3)")
    for p in (g3, gq, gr, gh):
        p.add_argument("-o", "--output", metavar="PATH", default=None)
        p.set_defaults(func=cmd_gen)

    oracle = sub.add_parser(
        "oracle", help="brute-force reference semantics (desk scale)"
    )
    osub = oracle.add_subparsers(dest="oracle_command", required=True)
    ans = osub.add_parser(
        "answersets", help="print one answer set per line, atoms sorted"
    )
    ans.add_argument("file", help="program file ('-' for stdin)")
    ans.add_argument(
        "--cap", type=int, default=DEFAULT_ENUM_CAP,
        help="candidate-interpretation cap (default %d)" % DEFAULT_ENUM_CAP,
    )
    ans.add_argument("-o", "--output", metavar="PATH", default=None)
    ans.set_defaults(func=cmd_oracle)

    bench = sub.add_parser("bench", help="timing and efficiency harness")
    bench.add_argument(
        "family", choices=("threecol", "nqueens", "reach", "hampath")
    )
    bench.add_argument(
        "--sizes", type=_int_list, default=None, metavar="LIST",
        help="comma-separated instance sizes",
    )
    bench.add_argument(
        "--levels-list", type=_int_list, default=None, metavar="LIST",
        help="tree-levels values for the reach family (alias of --sizes)",
    )
    bench.add_argument(
        "--siblings", type=int, default=2,
        help="children per node for reach instances (default 2)",
    )
    bench.add_argument("--seed", type=int, default=1)
    bench.add_argument("--degree", type=int, default=3)
    bench.add_argument(
        "--threads-list", type=_int_list, default=[1, 2, 4], metavar="LIST",
        help="worker counts to measure (default 1,2,4)",
    )
    bench.add_argument(
        "--levels", type=_levels_flag, default=frozenset("crs"), metavar="SPEC",
        help="parallelism levels for the parallel runs (default all)",
    )
    bench.add_argument(
        "--runs", type=int, default=DEFAULT_RUNS,
        help="timed repetitions per configuration (default %d)" % DEFAULT_RUNS,
    )
    bench.add_argument(
        "--json", action="store_true", help="emit the report as JSON"
    )
    _add_tuning_flags(bench)
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
