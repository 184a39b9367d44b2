"""
Benchmark harness for the three cycle experiments.

1. q1 (linear) against q2 (ambiguous), both the positive closure of "s", on a cycle.
2. q1 against the finite language {s s s} on a cycle.
3. The matched grammar s1^k s2^k on a double cycle of about `size` nodes, where the
   longest minimum-length path is also derived.

Each (query, size) cell minimizes the annotated grammar once and then derives the longest
minimum-length path of the query's start nonterminal. Cells are independent, so `jobs > 1`
spreads them over worker processes.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from math import gcd

import pandas as pd

from app.logger_config import setup_logger
from app.query_config import BenchSettings
from engine.generators import gen_cycle, gen_double_cycle
from engine.graph import Graph
from engine.presets import preset_grammar
from engine.singlepath import minimize_annotated

logger = setup_logger()

# test id -> presets it compares
BENCH_QUERIES: dict[int, tuple[str, ...]] = {
    1: ("q1", "q2"),
    2: ("q1", "sss"),
    3: ("matched",),
}


@dataclass(frozen=True)
class BenchRecord:
    """
    One measured (query, size) cell.

    Attributes:
        test (int): The benchmark test id.
        query (str): The grammar preset.
        nodes (int): Nodes in the graph.
        edges (int): Edges in the graph.
        nonterminals (int): Nonterminals of the normalized grammar.
        output (int): Sum of minimum path lengths over every costed triple.
        max (int): Largest minimum path length over every costed triple.
        paths (int): Number of costed triples.
        minimize_ns (int): Wall time of the minimization.
        produce_ns (int): Wall time spent deriving the longest path of the start nonterminal.
        path_length (int): Edges on that path, 0 when the start nonterminal matches nothing.
    """

    test: int
    query: str
    nodes: int
    edges: int
    nonterminals: int
    output: int
    max: int
    paths: int
    minimize_ns: int
    produce_ns: int
    path_length: int


def double_cycle_split(size: int) -> tuple[int, int]:
    """Coprime cycle lengths (u, v) whose double cycle has `size` nodes.

    Starts from the most even split and grows `u` until the lengths are coprime.
    """
    if size < 1:
        error_msg = f"Graph size must be positive, got {size}"
        logger.error(error_msg)
        raise ValueError(error_msg)
    u = (size + 2) // 2
    while gcd(u, size + 1 - u) != 1:
        u += 1
    return u, size + 1 - u


def bench_graph(test: int, size: int) -> Graph:
    if test == 3:
        return gen_double_cycle(*double_cycle_split(size))
    return gen_cycle(size)


def run_cell(test: int, query: str, size: int) -> BenchRecord:
    """Measures one preset on the graph of one test and size."""
    g, start = preset_grammar(query)
    graph = bench_graph(test, size)

    began = time.perf_counter_ns()
    ms = minimize_annotated(g, graph)
    minimize_ns = time.perf_counter_ns() - began

    paths, max_cost, output = ms.stats()

    path_length = 0
    began = time.perf_counter_ns()
    longest = ms.longest(start)
    if longest is not None:
        path_length = len(ms.path(longest))
    produce_ns = time.perf_counter_ns() - began

    logger.debug("Bench cell test=%d query=%s size=%d: %d triples in %d ns", test, query, size, paths, minimize_ns)
    return BenchRecord(
        test=test,
        query=query,
        nodes=len(graph.nodes),
        edges=len(graph.edges),
        nonterminals=len(g.nonterminals),
        output=output,
        max=max_cost,
        paths=paths,
        minimize_ns=minimize_ns,
        produce_ns=produce_ns,
        path_length=path_length,
    )


def _run_cell_args(args: tuple[int, str, int]) -> BenchRecord:
    return run_cell(*args)


def run_test(settings: BenchSettings) -> list[BenchRecord]:
    """Runs every cell of a test, sizes outermost, in a stable order whatever `jobs` is."""
    cells = [(settings.test, query, size) for size in settings.sizes for query in BENCH_QUERIES[settings.test]]
    logger.debug("Running bench test %d: %d cells on %d worker(s)", settings.test, len(cells), settings.jobs)
    if settings.jobs == 1 or len(cells) < 2:
        return [run_cell(*cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=settings.jobs) as pool:
        return list(pool.map(_run_cell_args, cells))


def records_frame(records: list[BenchRecord]) -> pd.DataFrame:
    """The records as a DataFrame with one column per `BenchRecord` field."""
    columns = list(BenchRecord.__dataclass_fields__)
    return pd.DataFrame([asdict(record) for record in records], columns=columns)


def records_tsv(records: list[BenchRecord]) -> str:
    return records_frame(records).to_csv(sep="\t", index=False)
