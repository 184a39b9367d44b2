"""
Single-path query evaluation: minimum-length paths.

`minimize_annotated` runs the minimizing-set construction directly on a CNF grammar and a
graph, deriving the triples <a,m,n> and their rules in place instead of building the
annotated grammar first. Triples are packed into integers `(a * |V| + m) * |V| + n`; the
join on the sibling of a binary rule goes through adjacency lists keyed by
(nonterminal, node) that grow as triples are first costed.
"""

from collections import defaultdict
from collections.abc import Iterator

from app.logger_config import setup_logger
from engine.errors import NoPathError
from engine.grammar import Grammar
from engine.graph import Edge, Graph, Path
from engine.recognizer import AnnotatedRule, AnnotatedSymbol
from engine.shortest import MinPriorityQueue

logger = setup_logger()

TERMINAL = -1


class AnnotatedMinimizingSet:
    """Costs and chosen rules of the annotated grammar over a grammar and a graph.

    A choice is `(rule_index, middle)`: `rule_index` points into `grammar.rules` and
    `middle` is the split node index of a binary rule, or `TERMINAL`.

    Attributes:
        grammar (Grammar): The plain grammar.
        graph (Graph): The graph.
        seen_rules (frozenset[AnnotatedRule] | None): Every annotated rule met while
            minimizing, when bookkeeping was requested.
    """

    def __init__(
        self,
        grammar: Grammar,
        graph: Graph,
        cost: dict[int, int],
        choice: dict[int, tuple[int, int]],
        seen_rules: frozenset[AnnotatedRule] | None = None,
    ) -> None:
        self.grammar = grammar
        self.graph = graph
        self.seen_rules = seen_rules
        self._size = len(graph.nodes)
        self._cost = cost
        self._choice = choice

    def __len__(self) -> int:
        return len(self._cost)

    def __contains__(self, item: object) -> bool:
        key = self._key_or_none(item)
        return key is not None and key in self._cost

    def __repr__(self) -> str:
        return f"AnnotatedMinimizingSet({len(self._cost)} triples)"

    def pack(self, a: int, m: int, n: int) -> int:
        return (a * self._size + m) * self._size + n

    def unpack(self, key: int) -> tuple[int, int, int]:
        rest, n = divmod(key, self._size)
        a, m = divmod(rest, self._size)
        return a, m, n

    def _key_or_none(self, item: object) -> int | None:
        if not isinstance(item, tuple) or len(item) != 3:
            return None
        nonterminal, source, target = item
        if nonterminal not in self.grammar or source not in self.graph or target not in self.graph:
            return None
        return self.pack(
            self.grammar.index_of(nonterminal), self.graph.index_of(source), self.graph.index_of(target)
        )

    def symbol_of(self, key: int) -> AnnotatedSymbol:
        a, m, n = self.unpack(key)
        nodes = self.graph.nodes
        return AnnotatedSymbol(self.grammar.nonterminals[a], nodes[m], nodes[n])

    def key_of(self, symbol: AnnotatedSymbol) -> int:
        """Packed key of a triple in the domain.

        Raises:
            NoPathError: If no path from the source to the target has a trace in the
                nonterminal's language.
        """
        key = self._key_or_none(symbol)
        if key is None or key not in self._cost:
            error_msg = f"No path matches {AnnotatedSymbol(*symbol)}"
            logger.error(error_msg)
            raise NoPathError(error_msg)
        return key

    def cost(self, symbol: AnnotatedSymbol) -> int:
        """Length of a shortest matching path; raises NoPathError outside the domain."""
        return self._cost[self.key_of(symbol)]

    def cost_of_key(self, key: int) -> int:
        return self._cost[key]

    def rule(self, symbol: AnnotatedSymbol) -> AnnotatedRule:
        """The chosen annotated rule of a triple in the domain."""
        return self._rule_of_key(self.key_of(symbol))

    def _rule_of_key(self, key: int) -> AnnotatedRule:
        return self.annotated_rule(key, *self._choice[key])

    def annotated_rule(self, key: int, rule_index: int, middle: int) -> AnnotatedRule:
        """The annotated rule that applies grammar rule `rule_index` to triple `key`, split at `middle`."""
        rule = self.grammar.rules[rule_index]
        head = self.symbol_of(key)
        if middle == TERMINAL:
            return AnnotatedRule(head, (rule.label,))
        mid = self.graph.nodes[middle]
        return AnnotatedRule(
            head,
            (AnnotatedSymbol(rule.body[0], head.source, mid), AnnotatedSymbol(rule.body[1], mid, head.target)),
        )

    def keys(self) -> list[int]:
        return sorted(self._cost)

    def symbols(self) -> Iterator[AnnotatedSymbol]:
        """Triples of the domain grouped by nonterminal (grammar order), pairs in node order."""
        for key in self.keys():
            yield self.symbol_of(key)

    def costs(self) -> dict[AnnotatedSymbol, int]:
        return {self.symbol_of(key): self._cost[key] for key in self.keys()}

    def pairs(self, nonterminal: str) -> list[tuple[str, str, int]]:
        """(source, target, cost) for every pair of `nonterminal`, in node order."""
        a = self.grammar.index_of(nonterminal)
        low, high = self.pack(a, 0, 0), self.pack(a + 1, 0, 0)
        nodes = self.graph.nodes
        found = []
        for key in sorted(k for k in self._cost if low <= k < high):
            _, m, n = self.unpack(key)
            found.append((nodes[m], nodes[n], self._cost[key]))
        return found

    def stats(self) -> tuple[int, int, int]:
        """Domain size, largest cost and sum of costs over all triples."""
        return len(self._cost), max(self._cost.values(), default=0), sum(self._cost.values())

    def longest(self, nonterminal: str) -> AnnotatedSymbol | None:
        """The triple of `nonterminal` with the largest cost; the first in node order wins ties."""
        best: tuple[int, int] | None = None
        a = self.grammar.index_of(nonterminal)
        for key, cost in self._cost.items():
            if key // (self._size * self._size) == a and (best is None or (-cost, key) < best):
                best = (-cost, key)
        return None if best is None else self.symbol_of(best[1])

    def iter_path_edges(self, symbol: AnnotatedSymbol) -> Iterator[Edge]:
        """Streams the edges of the path the chosen rules spell from `symbol`, left to right."""
        nodes = self.graph.nodes
        rules = self.grammar.rules
        bodies = {
            i: (self.grammar.index_of(rule.body[0]), self.grammar.index_of(rule.body[1]))
            for i, rule in enumerate(rules)
            if not rule.is_terminal
        }
        stack = [self.key_of(symbol)]
        while stack:
            key = stack.pop()
            rule_index, middle = self._choice[key]
            _, m, n = self.unpack(key)
            if middle == TERMINAL:
                yield Edge(nodes[m], rules[rule_index].label, nodes[n])
                continue
            left, right = bodies[rule_index]
            stack.append(self.pack(right, middle, n))
            stack.append(self.pack(left, m, middle))

    def path(self, symbol: AnnotatedSymbol) -> Path:
        """A minimum-length path for a triple in the domain.

        Raises:
            NoPathError: If the triple is outside the domain.
        """
        return Path.from_edges(symbol.source, self.iter_path_edges(symbol))

    def override_cost(self, symbol: AnnotatedSymbol, cost: int) -> None:
        """Replaces a recorded cost. Only used to check that verification notices."""
        key = self.key_of(symbol)
        logger.warning("Overriding cost of %s: %d -> %d", self.symbol_of(key), self._cost[key], cost)
        self._cost[key] = cost


def minimize_annotated(g: Grammar, graph: Graph, bookkeeping: bool = False) -> AnnotatedMinimizingSet:
    """Constructs a minimizing set for the annotated grammar over `g` and `graph` in place.

    Terminal rules are joined with matching edges at cost 1. Each extracted triple
    <a,m,n> relaxes `<c,m,o> -> <a,m,n> <b,n,o>` for every rule `c -> a b` and every costed
    <b,n,o>, and symmetrically `<c,o,n> -> <b,o,m> <a,m,n>` for `c -> b a`. Costs only move
    on a strictly smaller total. Equal priorities are extracted in packed-key order.

    Args:
        g (Grammar): A CNF grammar.
        graph (Graph): The graph.
        bookkeeping (bool): Also record every annotated rule met, in `seen_rules`.

    Returns:
        AnnotatedMinimizingSet: Every triple with a matching path, costed with the length of
        a shortest one.
    """
    size = len(graph.nodes)
    index = {name: i for i, name in enumerate(g.nonterminals)}
    cost: dict[int, int] = {}
    choice: dict[int, tuple[int, int]] = {}
    # (nonterminal * |V| + node) -> costed targets / sources
    targets: dict[int, list[int]] = defaultdict(list)
    sources: dict[int, list[int]] = defaultdict(list)
    queue: MinPriorityQueue[int] = MinPriorityQueue()
    seen: set[tuple[int, int, int]] | None = set() if bookkeeping else None

    for rule_index, rule in enumerate(g.rules):
        if not rule.is_terminal:
            continue
        a = index[rule.head]
        for m, n in graph.indexed_edges(rule.label):
            key = (a * size + m) * size + n
            if seen is not None:
                seen.add((key, rule_index, TERMINAL))
            if key not in cost:
                cost[key], choice[key] = 1, (rule_index, TERMINAL)
                targets[a * size + m].append(n)
                sources[a * size + n].append(m)
                queue.insert(key, 1)

    as_first: dict[int, list[tuple[int, int, int]]] = defaultdict(list)
    as_second: dict[int, list[tuple[int, int, int]]] = defaultdict(list)
    for rule_index, rule in enumerate(g.rules):
        if rule.is_terminal:
            continue
        head, left, right = index[rule.head], index[rule.body[0]], index[rule.body[1]]
        as_first[left].append((head, right, rule_index))
        as_second[right].append((head, left, rule_index))

    def produce(d: int, u: int, w: int, rule_index: int, middle: int, total: int) -> None:
        key = (d * size + u) * size + w
        if seen is not None:
            seen.add((key, rule_index, middle))
        if key not in cost:
            cost[key], choice[key] = total, (rule_index, middle)
            targets[d * size + u].append(w)
            sources[d * size + w].append(u)
            queue.insert(key, total)
        elif cost[key] > total:
            cost[key], choice[key] = total, (rule_index, middle)
            queue.decrease_key(key, total)

    extracted = 0
    while queue:
        key, priority = queue.extract_min()
        extracted += 1
        rest, n = divmod(key, size)
        a, m = divmod(rest, size)
        # c -> a b with <b,n,o> costed; the list may grow while iterating, new entries are costed too
        for c, b, rule_index in as_first.get(a, ()):
            for o in targets.get(b * size + n, ()):
                produce(c, m, o, rule_index, n, priority + cost[(b * size + n) * size + o])
        # c -> b a with <b,o,m> costed
        for c, b, rule_index in as_second.get(a, ()):
            for o in sources.get(b * size + m, ()):
                produce(c, o, n, rule_index, m, cost[(b * size + o) * size + m] + priority)

    seen_rules = None
    if seen is not None:
        ms = AnnotatedMinimizingSet(g, graph, cost, choice)
        seen_rules = frozenset(ms.annotated_rule(key, rule_index, middle) for key, rule_index, middle in seen)
    logger.debug("Minimized annotated grammar over %r and %r: %d triples extracted", g, graph, extracted)
    return AnnotatedMinimizingSet(g, graph, cost, choice, seen_rules)


def shortest_path(
    g: Grammar, a: str, graph: Graph, m: str, n: str, ms: AnnotatedMinimizingSet | None = None
) -> Path:
    """A minimum-length path from `m` to `n` whose trace is in `L(G;a)`.

    Args:
        ms (AnnotatedMinimizingSet | None): A set already computed for `g` and `graph`.

    Raises:
        UnknownNonterminalError: If `a` is not declared by the grammar.
        UnknownNodeError: If `m` or `n` is not a node of the graph.
        NoPathError: If no such path exists.
    """
    g.index_of(a)
    graph.index_of(m)
    graph.index_of(n)
    ms = ms if ms is not None else minimize_annotated(g, graph)
    return ms.path(AnnotatedSymbol(a, m, n))


def shortest_path_all_pairs(
    g: Grammar, a: str, graph: Graph, ms: AnnotatedMinimizingSet | None = None
) -> Iterator[tuple[str, str, Path]]:
    """Streams one minimum-length path per matching pair, pairs in node order."""
    ms = ms if ms is not None else minimize_annotated(g, graph)
    for source, target, _ in ms.pairs(a):
        yield source, target, ms.path(AnnotatedSymbol(a, source, target))
