"""
Brute-force reference answers for tests and for `cfpq verify`.

Nothing here shares code with the recognizer or the minimizers: paths are enumerated
outright, strings are found by searching sentential forms, and bounded path languages are
computed one length at a time.
"""

from collections import defaultdict, deque
from collections.abc import Iterable, Sequence

from app.logger_config import setup_logger
from engine.grammar import Grammar
from engine.graph import Graph, Path
from engine.recognizer import AnnotatedSymbol, ReachSet
from engine.singlepath import AnnotatedMinimizingSet

logger = setup_logger()


def enum_paths(graph: Graph, m: str, bound: int, target: str | None = None) -> list[Path]:
    """Every path from `m` with at most `bound` edges, breadth first.

    Args:
        target (str | None): Keep only paths ending there.

    Raises:
        UnknownNodeError: If `m` is not a node of the graph.
    """
    graph.index_of(m)
    found: list[Path] = []
    layer = [Path((m,))]
    for depth in range(bound + 1):
        found.extend(path for path in layer if target is None or path.target == target)
        if depth == bound:
            break
        layer = [
            Path(path.nodes + (edge.target,), path.labels + (edge.label,))
            for path in layer
            for edge in graph.out_edges(path.target)
        ]
    return found


class TraceDerivers:
    """Nonterminals deriving each trace, memoized on every substring seen."""

    def __init__(self, grammar: Grammar) -> None:
        self.grammar = grammar
        self._memo: dict[tuple[str, ...], frozenset[str]] = {}

    def __call__(self, trace: Sequence[str]) -> frozenset[str]:
        trace = tuple(trace)
        if not trace:
            return frozenset()
        if trace in self._memo:
            return self._memo[trace]
        if len(trace) == 1:
            heads = frozenset(rule.head for rule in self.grammar.rules_for_label(trace[0]))
        else:
            found: set[str] = set()
            for split in range(1, len(trace)):
                left, right = self(trace[:split]), self(trace[split:])
                if left and right:
                    found.update(
                        rule.head for rule in self.grammar.binary_rules if rule.body[0] in left and rule.body[1] in right
                    )
            heads = frozenset(found)
        self._memo[trace] = heads
        return heads


def accepting_paths(g: Grammar, a: str, graph: Graph, m: str, bound: int, target: str | None = None) -> list[Path]:
    """Paths from `m` of at most `bound` edges whose trace `a` derives, breadth first."""
    derivers = TraceDerivers(g)
    return [path for path in enum_paths(graph, m, bound, target) if a in derivers(path.labels)]


def bounded_triples(g: Grammar, graph: Graph, bound: int) -> list[set[tuple[str, str, str]]]:
    """Path languages by length: entry `k` holds every (a, m, n) such that some path of exactly
    `k` edges from m to n has a trace `a` derives (entry 0 is always empty).
    """
    by_length: list[set[tuple[str, str, str]]] = [set() for _ in range(bound + 1)]
    if bound < 1:
        return by_length
    for rule in g.terminal_rules:
        for edge in graph.edges:
            if edge.label == rule.label:
                by_length[1].add((rule.head, edge.source, edge.target))

    for length in range(2, bound + 1):
        for split in range(1, length):
            # (nonterminal, source) -> targets, for the right-hand side
            right_index: dict[tuple[str, str], set[str]] = defaultdict(set)
            for b, source, target in by_length[length - split]:
                right_index[(b, source)].add(target)
            for b, m, o in by_length[split]:
                for rule in g.rules_with_first(b):
                    for n in right_index.get((rule.body[1], o), ()):
                        by_length[length].add((rule.head, m, n))
    return by_length


def brute_min_costs(g: Grammar, graph: Graph, bound: int) -> dict[AnnotatedSymbol, int]:
    """Minimum matching path length of every triple that has one within `bound` edges."""
    costs: dict[AnnotatedSymbol, int] = {}
    for length, triples in enumerate(bounded_triples(g, graph, bound)):
        for triple in triples:
            costs.setdefault(AnnotatedSymbol(*triple), length)
    return costs


def brute_min_path(g: Grammar, a: str, graph: Graph, m: str, n: str, bound: int) -> int | None:
    """Length of a shortest path from `m` to `n` with a trace `a` derives, if one has at most
    `bound` edges.
    """
    g.index_of(a)
    graph.index_of(m)
    graph.index_of(n)
    for length, triples in enumerate(bounded_triples(g, graph, bound)):
        if (a, m, n) in triples:
            return length
    return None


def brute_min_string(g: Grammar, a: str, bound: int) -> int | None:
    """Length of a shortest string `a` derives, if one has at most `bound` terminals.

    Searches leftmost sentential forms. In CNF these are always a run of terminals followed
    by nonterminals, so a form is kept as (terminal count, nonterminal suffix); forms whose
    length already exceeds `bound` are dropped.
    """
    g.index_of(a)
    start = (0, (a,))
    seen = {start}
    queue = deque([start])
    best: int | None = None
    while queue:
        spelled, suffix = queue.popleft()
        if not suffix:
            best = spelled if best is None else min(best, spelled)
            continue
        head, rest = suffix[0], suffix[1:]
        for rule in g.rules_for(head):
            if rule.is_terminal:
                state = (spelled + 1, rest)
            else:
                state = (spelled, rule.body + rest)
            if state[0] + len(state[1]) <= bound and state not in seen:
                seen.add(state)
                queue.append(state)
    return best


def compare_with_oracle(
    g: Grammar,
    graph: Graph,
    bound: int,
    reach: ReachSet | Iterable[AnnotatedSymbol],
    ms: AnnotatedMinimizingSet,
) -> list[str]:
    """Cross-checks recognizer and minimizer output against bounded path languages.

    Every triple with a matching path of at most `bound` edges must be recognized and costed
    with exactly that minimum; every recognized triple must be costed; every costed triple
    whose cost is within `bound` must be confirmed by the oracle.

    Returns:
        list[str]: One line per mismatch; empty when everything agrees.
    """
    expected = brute_min_costs(g, graph, bound)
    recognized = {AnnotatedSymbol(*symbol) for symbol in reach}
    costed = ms.costs()
    mismatches: list[str] = []

    for symbol, length in expected.items():
        if symbol not in recognized:
            mismatches.append(f"{symbol}: path of length {length} exists but was not recognized")
        if symbol not in costed:
            mismatches.append(f"{symbol}: path of length {length} exists but has no cost")
        elif costed[symbol] != length:
            mismatches.append(f"{symbol}: cost {costed[symbol]} but shortest path has length {length}")

    for symbol in recognized.difference(costed):
        mismatches.append(f"{symbol}: recognized but has no cost")
    for symbol in set(costed).difference(recognized):
        mismatches.append(f"{symbol}: costed but not recognized")
    for symbol, cost in costed.items():
        if cost <= bound and symbol not in expected:
            mismatches.append(f"{symbol}: cost {cost} but no path of that length exists")

    if mismatches:
        logger.debug("Oracle comparison found %d mismatches, first: %s", len(mismatches), mismatches[0])
    return mismatches
