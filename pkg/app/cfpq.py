"""Command-line frontend of the path query engine.

Answers go to standard output (TSV or one path per line); diagnostics go to standard error
through the application logger. Exit status 0 means the query was answered, 1 that no path
matched or verification failed, 2 that the input was unusable.
"""

import argparse
import sys
from datetime import datetime
from pathlib import Path

import pandas as pd

from app.bench import records_frame, records_tsv, run_test
from app.database import BenchDb
from app.logger_config import setup_logger
from app.query_config import BENCH_TESTS, DEFAULT_JOBS, DEFAULT_MAX_LEN, DEFAULT_MAX_PATHS, BenchSettings, EnumerationLimits
from app.utils import export_filename
from engine.annotated import build_annotated, enumerate_paths, minimize_explicit
from engine.errors import CfpqError, GrammarSyntaxError, NoPathError
from engine.generators import gen_cycle, gen_double_cycle, gen_social_network
from engine.grammar import Grammar
from engine.graph import Graph, load_graph, serialize_graph
from engine.oracle import brute_min_costs, compare_with_oracle
from engine.presets import PRESETS, preset_grammar
from engine.recognizer import AnnotatedSymbol, eval_boolean, eval_relational, recognize
from engine.shortest import minimize
from engine.singlepath import minimize_annotated, shortest_path

EXIT_OK = 0
EXIT_NO_PATH = 1
EXIT_INPUT_ERROR = 2

DEFAULT_BOUND = 8
RUN_COLUMNS = ["id", "test", "started", "finished", "exported"]
STATS_HEADER = "domain\tmax_cost\tsum_costs"

logger = setup_logger()


def _add_grammar_args(parser: argparse.ArgumentParser, start: bool = True) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("-g", "--grammar", type=Path, help="Grammar file.")
    source.add_argument("-p", "--preset", choices=list(PRESETS), help="Built-in grammar.")
    if start:
        parser.add_argument("-s", "--start", help="Start nonterminal (a preset has its own default).")


def _add_graph_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-d", "--graph", required=True, help="Graph file in TSV, or '-' for standard input.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfpath",
        description="Evaluate context-free path queries over edge-labeled graphs.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    # `oracle` stays out of the listing
    commands = parser.add_subparsers(dest="command", required=True, metavar="{query,gen,bench,runs,verify,minimize}")

    query = commands.add_parser("query", help="Evaluate a query under one semantics.")
    query.add_argument("semantics", choices=["boolean", "pairs", "allpaths", "shortest"])
    _add_grammar_args(query)
    _add_graph_args(query)
    query.add_argument("--from", dest="source", help="Source node (allpaths, shortest).")
    query.add_argument("--to", dest="target", help="Target node (allpaths, shortest).")
    query.add_argument("--max-paths", type=int, default=DEFAULT_MAX_PATHS, help="Paths to report (allpaths).")
    query.add_argument("--max-len", type=int, default=DEFAULT_MAX_LEN, help="Longest path to report (allpaths).")
    query.add_argument(
        "--explicit", action="store_true", help="Minimize the materialized annotated grammar (shortest)."
    )
    query.add_argument("--costs", action="store_true", help="Add the minimum path length to every pair (pairs).")
    query.add_argument(
        "--stats",
        action="store_true",
        help="Write the size, largest cost and total cost of the minimizing set instead (pairs, shortest).",
    )

    gen = commands.add_parser("gen", help="Write a generated graph as TSV.")
    kinds = gen.add_subparsers(dest="kind", required=True)
    cycle = kinds.add_parser("cycle", help="A directed cycle.")
    cycle.add_argument("size", type=int)
    cycle.add_argument("label", nargs="?", default="s")
    double = kinds.add_parser("double-cycle", help="Two cycles sharing one node.")
    double.add_argument("u", type=int)
    double.add_argument("v", type=int)
    double.add_argument("label1", nargs="?", default="s1")
    double.add_argument("label2", nargs="?", default="s2")
    kinds.add_parser("social", help="The six-person friendship network.")

    bench = commands.add_parser("bench", help="Run a benchmark test and write its records as TSV.")
    bench.add_argument("test", type=int, choices=BENCH_TESTS)
    bench.add_argument("sizes", type=int, nargs="+", help="Graph sizes.")
    bench.add_argument("--jobs", type=int, default=DEFAULT_JOBS, help="Worker processes.")
    bench.add_argument("--record", action="store_true", help="Store the run in the benchmark database.")
    bench.add_argument("--export-dir", type=Path, help="Also write the records to a TSV file in this directory.")

    runs = commands.add_parser("runs", help="List the benchmark runs in the database as TSV.")
    runs.add_argument("--delete", type=int, metavar="ID", help="Delete this run and its records instead.")

    verify = commands.add_parser("verify", help="Cross-check the engine against brute force on one instance.")
    _add_grammar_args(verify, start=False)
    _add_graph_args(verify)
    verify.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="Longest path the brute force explores.")
    verify.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    minimize_cmd = commands.add_parser("minimize", help="Write the minimizing set of a grammar as TSV.")
    _add_grammar_args(minimize_cmd)

    oracle = commands.add_parser("oracle")
    _add_grammar_args(oracle, start=False)
    _add_graph_args(oracle)
    oracle.add_argument("--bound", type=int, default=DEFAULT_BOUND)

    return parser


def _read_text(source: str | Path) -> str:
    if str(source) == "-":
        return sys.stdin.read()
    return Path(source).read_text(encoding="utf-8")


def _load_grammar(args: argparse.Namespace) -> tuple[Grammar, str | None]:
    """The grammar named on the command line and the start nonterminal, if one is known."""
    start = getattr(args, "start", None)
    if args.preset:
        g, default_start = preset_grammar(args.preset)
        return g, start or default_start
    g = Grammar.from_text(_read_text(args.grammar), visible=[start] if start else None)
    return g, start


def _require_start(start: str | None) -> str:
    if start is None:
        error_msg = "A start nonterminal is required with a grammar file (-s)"
        logger.error(error_msg)
        raise ValueError(error_msg)
    return start


def _require_endpoints(args: argparse.Namespace) -> tuple[str, str]:
    if args.source is None or args.target is None:
        error_msg = f"{args.semantics} queries need both --from and --to"
        logger.error(error_msg)
        raise ValueError(error_msg)
    return args.source, args.target


def _print_stats(args: argparse.Namespace, g: Grammar, a: str, graph: Graph) -> int:
    if args.semantics not in ("pairs", "shortest"):
        error_msg = f"--stats applies to pairs and shortest queries, not {args.semantics}"
        logger.error(error_msg)
        raise ValueError(error_msg)
    g.index_of(a)
    ms = minimize_explicit(g, graph) if args.explicit else minimize_annotated(g, graph)
    print(STATS_HEADER)
    print("\t".join(str(value) for value in ms.stats()))
    return EXIT_OK


def cmd_query(
args: argparse.Namespace) -> int:
    g, start = _load_grammar(args)
    a = _require_start(start)
    graph = load_graph(_read_text(args.graph))

    if args.stats:
        return _print_stats(args, g, a, graph)
    if args.semantics == "boolean":
        print("true" if eval_boolean(g, a, graph) else "false")
    elif args.semantics == "pairs":
        if args.costs:
            for m, n, cost in minimize_annotated(g, graph).pairs(a):
                print(f"{m}\t{n}\t{cost}")
        else:
            for m, n in eval_relational(g, a, graph):
                print(f"{m}\t{n}")
    elif args.semantics == "allpaths":
        m, n = _require_endpoints(args)
        graph.index_of(m)
        graph.index_of(n)
        limits = EnumerationLimits(args.max_paths, args.max_len)
        paths = enumerate_paths(build_annotated(g, graph), AnnotatedSymbol(a, m, n), limits.max_paths, limits.max_len)
        if not paths:
            logger.debug("No path of at most %d edges matches %s from %s to %s", limits.max_len, a, m, n)
            return EXIT_NO_PATH
        for path in paths:
            print(path)
    else:
        m, n = _require_endpoints(args)
        ms = minimize_explicit(g, graph) if args.explicit else None
        print(shortest_path(g, a, graph, m, n, ms))
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "cycle":
        graph = gen_cycle(args.size, args.label)
    elif args.kind == "double-cycle":
        graph = gen_double_cycle(args.u, args.v, args.label1, args.label2)
    else:
        graph = gen_social_network()
    sys.stdout.write(serialize_graph(graph))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    settings = BenchSettings(args.test, args.sizes, args.jobs)
    records = run_test(settings)
    sys.stdout.write(records_tsv(records))

    run_id = None
    db = None
    if args.record:
        db = BenchDb(logger=logger)
        run_id = db.start_run(settings.test)
        for record in records:
            db.write_record(record)
        db.finish_run()

    if args.export_dir:
        args.export_dir.mkdir(parents=True, exist_ok=True)
        if db is not None and run_id is not None:
            if db.export_run(run_id, args.export_dir) is None:
                return EXIT_INPUT_ERROR
        else:
            target = args.export_dir / export_filename(f"bench-{settings.test}", datetime.now())
            records_frame(records).to_csv(target, sep="\t", index=False)
            logger.debug("Exported bench records to %s", target)
    return EXIT_OK


def cmd_runs(args: argparse.Namespace) -> int:
    db = BenchDb(logger=logger)
    if args.delete is not None:
        return EXIT_OK if db.delete_run(args.delete) else EXIT_INPUT_ERROR
    pd.DataFrame(db.get_runs(), columns=RUN_COLUMNS).to_csv(sys.stdout, sep="\t", index=False)
    return EXIT_OK


def _verify(
g: Grammar, graph: Graph, bound: int, inject_fault: bool) -> list[str]:
    reach = recognize(g, graph)
    ms = minimize_annotated(g, graph)
    if inject_fault and len(ms):
        first = next(ms.symbols())
        ms.override_cost(first, ms.cost(first) + 1)

    mismatches = compare_with_oracle(g, graph, bound, reach, ms)

    explicit = minimize_explicit(g, graph)
    for symbol, cost in explicit.costs().items():
        if symbol not in ms:
            mismatches.append(f"{symbol}: costed {cost} by the explicit pipeline only")
        elif ms.cost(symbol) != cost:
            mismatches.append(f"{symbol}: cost {ms.cost(symbol)} but the explicit pipeline finds {cost}")
    mismatches.extend(build_annotated(g, graph).check_bounds())
    return mismatches


def cmd_verify(args: argparse.Namespace) -> int:
    g, _ = _load_grammar(args)
    graph = load_graph(_read_text(args.graph))
    mismatches = _verify(g, graph, args.bound, args.inject_fault)
    if mismatches:
        logger.warning("Verification failed with %d mismatch(es)", len(mismatches))
        print(mismatches[0])
        return EXIT_NO_PATH
    print(f"ok\t{len(recognize(g, graph))} triples agree up to {args.bound} edges")
    return EXIT_OK


def cmd_minimize(args: argparse.Namespace) -> int:
    g, _ = _load_grammar(args)
    sys.stdout.write(minimize(g).to_tsv())
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    g, _ = _load_grammar(args)
    graph = load_graph(_read_text(args.graph))
    costs = brute_min_costs(g, graph, args.bound)

    def order(symbol: AnnotatedSymbol) -> tuple[int, int, int]:
        return g.index_of(symbol.nonterminal), graph.index_of(symbol.source), graph.index_of(symbol.target)

    for symbol in sorted(costs, key=order):
        print(f"{symbol.nonterminal}\t{symbol.source}\t{symbol.target}\t{costs[symbol]}")
    return EXIT_OK


COMMANDS = {
    "query": cmd_query,
    "gen": cmd_gen,
    "bench": cmd_bench,
    "runs": cmd_runs,
    "verify": cmd_verify,
    "minimize": cmd_minimize,
    "oracle": cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    """Runs one command and returns its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_OK if err.code == 0 else EXIT_INPUT_ERROR

    try:
        return COMMANDS[args.command](args)
    except NoPathError:
        return EXIT_NO_PATH
    except GrammarSyntaxError as err:
        logger.error("Grammar %s", err)
        return EXIT_INPUT_ERROR
    except CfpqError as err:
        # already logged where it was raised
        logger.debug("Input rejected: %s", err)
        return EXIT_INPUT_ERROR
    except ValueError as err:
        logger.debug("Invalid parameters: %s", err)
        return EXIT_INPUT_ERROR
    except OSError as err:
        logger.error("Cannot read input: %s", err)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
