"""
Relational and boolean query evaluation.

`recognize` computes every annotated nonterminal <a,m,n> whose language `L(G;a)` shares a
string with the traces of paths from m to n. It is a bottom-up worklist closure: triples
for terminal rules are seeded from matching edges, then every new triple is joined with the
triples already found on either side of each binary rule until nothing new appears.
"""

from collections import defaultdict, deque
from collections.abc import Iterator
from typing import NamedTuple

from app.logger_config import setup_logger
from engine.grammar import Grammar
from engine.graph import Graph

logger = setup_logger()


class AnnotatedSymbol(NamedTuple):
    """The triple <nonterminal, source, target>."""

    nonterminal: str
    source: str
    target: str

    def __str__(self) -> str:
        return f"<{self.nonterminal},{self.source},{self.target}>"


class AnnotatedRule(NamedTuple):
    """`<a,m,n> -> label` or `<a,m,n> -> <b,m,o> <c,o,n>`."""

    head: AnnotatedSymbol
    body: tuple[AnnotatedSymbol, AnnotatedSymbol] | tuple[str]

    @property
    def is_terminal(self) -> bool:
        return len(self.body) == 1

    @property
    def label(self) -> str:
        return self.body[0] if isinstance(self.body[0], str) else ""

    def __str__(self) -> str:
        if self.is_terminal:
            return f'{self.head} -> "{self.body[0]}"'
        return f"{self.head} -> {self.body[0]} {self.body[1]}"


class ReachSet:
    """The set of derivable triples, stored as packed integer keys.

    A triple (a, m, n) of dense indexes is packed as `(a * |V| + m) * |V| + n`. Next to the
    key set the class keeps, per nonterminal, the pairs in insertion order plus the two
    adjacency indexes the closure joins on: targets by (a, source) and sources by (a, target).

    Attributes:
        grammar (Grammar): The grammar whose nonterminals index the first dimension.
        graph (Graph): The graph whose nodes index the other two.
    """

    def __init__(self, grammar: Grammar, graph: Graph) -> None:
        self.grammar = grammar
        self.graph = graph
        self._size = len(graph.nodes)
        self._keys: set[int] = set()
        self._pairs: dict[int, list[tuple[int, int]]] = defaultdict(list)
        self._targets: dict[tuple[int, int], list[int]] = defaultdict(list)
        self._sources: dict[tuple[int, int], list[int]] = defaultdict(list)

    def pack(self, a: int, m: int, n: int) -> int:
        return (a * self._size + m) * self._size + n

    def add(self, a: int, m: int, n: int) -> bool:
        """Adds a triple of dense indexes; returns False if it was already present."""
        key = self.pack(a, m, n)
        if key in self._keys:
            return False
        self._keys.add(key)
        self._pairs[a].append((m, n))
        self._targets[(a, m)].append(n)
        self._sources[(a, n)].append(m)
        return True

    def contains(self, a: int, m: int, n: int) -> bool:
        return self.pack(a, m, n) in self._keys

    def targets_from(self, a: int, m: int) -> tuple[int, ...]:
        return tuple(self._targets.get((a, m), ()))

    def sources_to(self, a: int, n: int) -> tuple[int, ...]:
        return tuple(self._sources.get((a, n), ()))

    def index_pairs(self, a: int) -> list[tuple[int, int]]:
        """Pairs of nonterminal index `a`, sorted by node index."""
        return sorted(self._pairs.get(a, ()))

    def pairs(self, nonterminal: str) -> list[tuple[str, str]]:
        """(source, target) node pairs of `nonterminal`, sorted in node order.

        Raises:
            UnknownNonterminalError: If the grammar does not declare the nonterminal.
        """
        nodes = self.graph.nodes
        return [(nodes[m], nodes[n]) for m, n in self.index_pairs(self.grammar.index_of(nonterminal))]

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, item: object) -> bool:
        if not isinstance(item, tuple) or len(item) != 3:
            return False
        nonterminal, source, target = item
        if nonterminal not in self.grammar or source not in self.graph or target not in self.graph:
            return False
        return self.contains(
            self.grammar.index_of(nonterminal), self.graph.index_of(source), self.graph.index_of(target)
        )

    def __iter__(self) -> Iterator[AnnotatedSymbol]:
        """Triples grouped by nonterminal (grammar order), pairs in node order."""
        nodes = self.graph.nodes
        for a, name in enumerate(self.grammar.nonterminals):
            for m, n in self.index_pairs(a):
                yield AnnotatedSymbol(name, nodes[m], nodes[n])

    def __repr__(self) -> str:
        return f"ReachSet({len(self._keys)} triples)"


def recognize(g: Grammar, graph: Graph) -> ReachSet:
    """Computes all triples <a,m,n> with a non-empty intersection of `L(G;a)` and `L(Graph;m,n)`.

    Args:
        g (Grammar): A CNF grammar.
        graph (Graph): The graph to evaluate on.

    Returns:
        ReachSet: Exactly the triples with a matching path.
    """
    reach = ReachSet(g, graph)
    queue: deque[tuple[int, int, int]] = deque()

    for rule in g.terminal_rules:
        a = g.index_of(rule.head)
        for m, n in graph.indexed_edges(rule.label):
            if reach.add(a, m, n):
                queue.append((a, m, n))
    seeded = len(reach)

    first_rules = {
        a: [(g.index_of(rule.head), g.index_of(rule.body[1])) for rule in g.rules_with_first(name)]
        for a, name in enumerate(g.nonterminals)
    }
    second_rules = {
        a: [(g.index_of(rule.head), g.index_of(rule.body[0])) for rule in g.rules_with_second(name)]
        for a, name in enumerate(g.nonterminals)
    }

    while queue:
        a, m, n = queue.popleft()
        # c -> a b: <a,m,n> <b,n,o> gives <c,m,o>
        for c, b in first_rules[a]:
            for o in reach.targets_from(b, n):
                if reach.add(c, m, o):
                    queue.append((c, m, o))
        # c -> b a: <b,l,m> <a,m,n> gives <c,l,n>
        for c, b in second_rules[a]:
            for source in reach.sources_to(b, m):
                if reach.add(c, source, n):
                    queue.append((c, source, n))

    logger.debug("Recognized %d triples (%d seeded) over %r and %r", len(reach), seeded, g, graph)
    return reach


def eval_relational(g: Grammar, a: str, graph: Graph) -> list[tuple[str, str]]:
    """Node pairs (m, n) connected by a path whose trace is in `L(G;a)`, sorted in node order.

    Raises:
        UnknownNonterminalError: If `a` is not declared by the grammar.
    """
    g.index_of(a)
    return recognize(g, graph).pairs(a)


def eval_boolean(g: Grammar, a: str, graph: Graph) -> bool:
    """True iff some pair of nodes is connected by a path whose trace is in `L(G;a)`.

    Raises:
        UnknownNonterminalError: If `a` is not declared by the grammar.
    """
    return bool(eval_relational(g, a, graph))
