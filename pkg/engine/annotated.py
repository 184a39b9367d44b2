"""
The annotated grammar over a grammar and a graph, and all-path query evaluation.

The annotated grammar has a nonterminal <a,m,n> for every triple found by the recognizer
and the rules `<a,m,n> -> label` for every rule `a -> label` and edge (m, label, n), and
`<a,m,n> -> <b,m,o> <c,o,n>` for every rule `a -> b c` whose body triples both exist. Its
derivations spell exactly the paths from m to n whose trace is in `L(G;a)`.

Binary rules are not stored: they are produced per head from the recognizer's adjacency
indexes, and only `materialize()` lists them all.
"""

from collections import deque
from collections.abc import Iterator
from dataclasses import dataclass, field
from functools import cached_property
from heapq import heapify, heappop, heappush
from itertools import count, islice

from app.logger_config import setup_logger
from engine.errors import NoPathError, NotDerivableError
from engine.grammar import Grammar, Rule
from engine.graph import Graph, Path, validate_path
from engine.recognizer import AnnotatedRule, AnnotatedSymbol, ReachSet, recognize
from engine.shortest import minimize
from engine.singlepath import TERMINAL, AnnotatedMinimizingSet, minimize_annotated

logger = setup_logger()


class AnnotatedGrammar:
    """The annotated grammar over (grammar, graph).

    Attributes:
        grammar (Grammar): The plain CNF grammar.
        graph (Graph): The graph.
        reach (ReachSet): The annotated nonterminals.
    """

    def __init__(self, grammar: Grammar, graph: Graph, reach: ReachSet) -> None:
        self.grammar = grammar
        self.graph = graph
        self.reach = reach
        self._rules_for: dict[AnnotatedSymbol, tuple[AnnotatedRule, ...]] = {}

    def __len__(self) -> int:
        return len(self.reach)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.reach

    def __iter__(self) -> Iterator[AnnotatedSymbol]:
        return iter(self.reach)

    def __repr__(self) -> str:
        return f"AnnotatedGrammar({len(self.reach)} nonterminals)"

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.grammar.alphabet

    def rules_for(self, head: AnnotatedSymbol) -> tuple[AnnotatedRule, ...]:
        """Rules of one annotated nonterminal: grammar rule order, then split node order."""
        head = AnnotatedSymbol(*head)
        if head in self._rules_for:
            return self._rules_for[head]
        if head not in self.reach:
            return ()
        g, graph = self.grammar, self.graph
        m, n = graph.index_of(head.source), graph.index_of(head.target)
        rules: list[AnnotatedRule] = []
        for rule in g.rules_for(head.nonterminal):
            if rule.is_terminal:
                if graph.has_edge(head.source, rule.label, head.target):
                    rules.append(AnnotatedRule(head, (rule.label,)))
                continue
            left, right = rule.body
            b, c = g.index_of(left), g.index_of(right)
            for o in sorted(self.reach.targets_from(b, m)):
                if self.reach.contains(c, o, n):
                    middle = graph.nodes[o]
                    rules.append(
                        AnnotatedRule(
                            head, (AnnotatedSymbol(left, head.source, middle), AnnotatedSymbol(right, middle, head.target))
                        )
                    )
        found = tuple(rules)
        self._rules_for[head] = found
        return found

    @property
    def terminal_rules(self) -> tuple[AnnotatedRule, ...]:
        nodes = self.graph.nodes
        return tuple(
            AnnotatedRule(AnnotatedSymbol(rule.head, nodes[m], nodes[n]), (rule.label,))
            for rule in self.grammar.terminal_rules
            for m, n in self.graph.indexed_edges(rule.label)
        )

    @property
    def binary_rules(self) -> tuple[AnnotatedRule, ...]:
        return tuple(rule for head in self.reach for rule in self.rules_for(head) if not rule.is_terminal)

    def materialize(self) -> tuple[AnnotatedRule, ...]:
        """All annotated rules: terminal rules first, then binary rules by head."""
        return self.terminal_rules + self.binary_rules

    def size_bounds(self) -> tuple[int, int]:
        """Upper bounds on the number of annotated nonterminals and rules.

        `|N| * |V|^2` nonterminals and `|P| * |V|^3 + min(|N|, |P|) * |E|` rules.
        """
        g, graph = self.grammar, self.graph
        size = len(graph.nodes)
        return (
            len(g.nonterminals) * size**2,
            len(g.rules) * size**3 + min(len(g.nonterminals), len(g.rules)) * len(graph.edges),
        )

    def check_bounds(self) -> list[str]:
        """Violations of `size_bounds()`; empty when both hold."""
        max_symbols, max_rules = self.size_bounds()
        violations = []
        if len(self.reach) > max_symbols:
            violations.append(f"{len(self.reach)} annotated nonterminals exceed {max_symbols}")
        rule_count = len(self.materialize())
        if rule_count > max_rules:
            violations.append(f"{rule_count} annotated rules exceed {max_rules}")
        return violations

    def as_plain_grammar(self) -> tuple[Grammar, dict[str, AnnotatedSymbol]]:
        """The annotated grammar as an ordinary grammar over names like `<q,Alice,Bob>`.

        Returns:
            tuple[Grammar, dict[str, AnnotatedSymbol]]: The grammar and the map from each
            generated name back to its triple.
        """
        names: dict[AnnotatedSymbol, str] = {}
        back: dict[str, AnnotatedSymbol] = {}
        for symbol in self.reach:
            name = str(symbol)
            while name in back:
                name += "~"
            names[symbol] = name
            back[name] = symbol
        rules = [
            Rule(names[rule.head], (rule.label,))
            if rule.is_terminal
            else Rule(names[rule.head], (names[rule.body[0]], names[rule.body[1]]))
            for rule in self.materialize()
        ]
        return Grammar(back, self.grammar.alphabet, rules), back

    @cached_property
    def minimizing_set(self) -> AnnotatedMinimizingSet:
        """Shortest completion lengths of every annotated nonterminal."""
        return minimize_annotated(self.grammar, self.graph)


def build_annotated(g: Grammar, graph: Graph) -> AnnotatedGrammar:
    """Constructs the annotated grammar over `g` and `graph`.

    Args:
        g (Grammar): A CNF grammar.
        graph (Graph): The graph.

    Returns:
        AnnotatedGrammar: Rules are produced on demand; call `materialize()` to list them.
    """
    annotated = AnnotatedGrammar(g, graph, recognize(g, graph))
    logger.debug("Built %r over %r and %r", annotated, g, graph)
    return annotated


def minimize_explicit(g: Grammar, graph: Graph) -> AnnotatedMinimizingSet:
    """Minimizes the materialized annotated grammar as an ordinary grammar.

    Produces the same costs as `minimize_annotated`, but pays for building and storing every
    annotated rule first.
    """
    annotated = build_annotated(g, graph)
    plain, back = annotated.as_plain_grammar()
    ms = minimize(plain)

    size = len(graph.nodes)
    rule_index = {rule: i for i, rule in enumerate(g.rules)}
    cost: dict[int, int] = {}
    choice: dict[int, tuple[int, int]] = {}
    for name, plain_rule in ms.rules.items():
        symbol = back[name]
        key = (g.index_of(symbol.nonterminal) * size + graph.index_of(symbol.source)) * size + graph.index_of(
            symbol.target
        )
        cost[key] = ms.costs[name]
        if plain_rule.is_terminal:
            choice[key] = (rule_index[Rule(symbol.nonterminal, (plain_rule.label,))], TERMINAL)
        else:
            left, right = back[plain_rule.body[0]], back[plain_rule.body[1]]
            original = Rule(symbol.nonterminal, (left.nonterminal, right.nonterminal))
            choice[key] = (rule_index[original], graph.index_of(left.target))
    return AnnotatedMinimizingSet(g, graph, cost, choice)


_Item = tuple[AnnotatedRule, int, int]


@dataclass(eq=False)
class _Column:
    """Earley items of the annotated grammar after reading one path prefix.

    Attributes:
        history (tuple[_Column, ...]): Columns of the shorter prefixes, oldest first.
        waiting (dict): Items whose dot stands before each annotated nonterminal.
        need (dict): Fewest edges left to finish the start once a nonterminal predicted here completes.
        scans (list[AnnotatedRule]): Terminal rules that can read the next edge.
        accepted (bool): Whether the prefix is itself a path derived from the start.
    """

    history: tuple["_Column", ...]
    waiting: dict[AnnotatedSymbol, list[_Item]] = field(default_factory=dict)
    need: dict[AnnotatedSymbol, int] = field(default_factory=dict)
    scans: list[AnnotatedRule] = field(default_factory=list)
    accepted: bool = False

    def remaining(self) -> int | None:
        """Fewest edges that still have to follow this prefix, None if it leads nowhere."""
        if self.accepted:
            return 0
        return min((1 + self.need[rule.head] for rule in self.scans), default=None)


class PathEnumerator:
    """Iterates the paths an annotated nonterminal derives, shortest first.

    Best-first search over path prefixes. Each prefix carries the Earley column of the
    annotated grammar after reading it, so every prefix is visited once however ambiguous
    the grammar is. Its priority is the prefix length plus the fewest edges any completion
    still needs, which follows from the minimum costs of the pending nonterminals and never
    decreases along an extension. Completed paths of one length are collected and released
    sorted by node index sequence (then labels) once nothing of that length can still
    complete.

    Not safe to share between threads while iterating.
    """

    def __init__(self, annotated: AnnotatedGrammar, start: AnnotatedSymbol, max_len: int) -> None:
        if start not in annotated:
            error_msg = f"No path matches {AnnotatedSymbol(*start)}"
            logger.error(error_msg)
            raise NoPathError(error_msg)
        self.annotated = annotated
        self.start = AnnotatedSymbol(*start)
        self.max_len = max_len
        self._paths = self._search()

    def __iter__(self) -> "PathEnumerator":
        return self

    def __next__(self) -> Path:
        return next(self._paths)

    def _column(self, history: tuple[_Column, ...], seeds: list[_Item]) -> _Column:
        """Closes the seed items under prediction and completion."""
        k = len(history)
        column = _Column(history)
        predicted: set[AnnotatedSymbol] = set()
        agenda = deque(seeds)
        if not history:
            predicted.add(self.start)
            agenda.extend((rule, 0, 0) for rule in self.annotated.rules_for(self.start))
        seen: set[_Item] = set()
        while agenda:
            item = agenda.popleft()
            if item in seen:
                continue
            seen.add(item)
            rule, dot, origin = item
            if dot == len(rule.body):
                if origin == 0 and rule.head == self.start:
                    column.accepted = True
                for parent, parent_dot, parent_origin in history[origin].waiting.get(rule.head, ()):
                    agenda.append((parent, parent_dot + 1, parent_origin))
            elif rule.is_terminal:
                column.scans.append(rule)
            else:
                symbol = rule.body[dot]
                column.waiting.setdefault(symbol, []).append(item)
                if symbol not in predicted:
                    predicted.add(symbol)
                    agenda.extend((child, 0, k) for child in self.annotated.rules_for(symbol))
        self._settle_need(column, k)
        return column

    def _settle_need(self, column: _Column, k: int) -> None:
        """Shortest completion costs for the nonterminals predicted in column `k`."""
        cost = self.annotated.minimizing_set.cost
        need = column.need
        local: dict[AnnotatedSymbol, list[tuple[AnnotatedSymbol, int]]] = {}
        best: dict[AnnotatedSymbol, int] = {self.start: 0} if k == 0 else {}
        for symbol, items in column.waiting.items():
            for rule, dot, origin in items:
                after = cost(rule.body[1]) if dot == 0 else 0
                if origin < k:
                    total = after + column.history[origin].need[rule.head]
                    if total < best.get(symbol, total + 1):
                        best[symbol] = total
                else:
                    local.setdefault(rule.head, []).append((symbol, after))

        heap = [(total, next(self._tie), symbol) for symbol, total in best.items()]
        heapify(heap)
        while heap:
            total, _, symbol = heappop(heap)
            if symbol in need:
                continue
            need[symbol] = total
            for child, after in local.get(symbol, ()):
                if child not in need and total + after < best.get(child, total + after + 1):
                    best[child] = total + after
                    heappush(heap, (total + after, next(self._tie), child))

    def _search(self) -> Iterator[Path]:
        self._tie = count()
        heap: list[tuple[int, int, tuple[str, ...], tuple[str, ...], _Column]] = []

        def push(nodes: tuple[str, ...], labels: tuple[str, ...], column: _Column) -> None:
            remaining = column.remaining()
            if remaining is not None and len(labels) + remaining <= self.max_len:
                heappush(heap, (len(labels) + remaining, next(self._tie), nodes, labels, column))

        push((self.start.source,), (), self._column((), []))
        bucket: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
        bucket_length = 0
        expanded = 0

        while heap:
            priority, _, nodes, labels, column = heappop(heap)
            if bucket and priority > bucket_length:
                yield from self._release(bucket, self.annotated.graph)
                bucket = []
            if column.accepted:
                bucket_length = priority
                bucket.append((nodes, labels))
            if len(labels) == self.max_len:
                continue

            expanded += 1
            history = column.history + (column,)
            steps: dict[tuple[str, str], list[_Item]] = {}
            for rule in column.scans:
                steps.setdefault((rule.label, rule.head.target), []).append((rule, 1, len(labels)))
            for (label, target), seeds in steps.items():
                push(nodes + (target,), labels + (label,), self._column(history, seeds))

        yield from self._release(bucket, self.annotated.graph)
        logger.debug("Enumeration from %s expanded %d prefixes", self.start, expanded)

    @staticmethod
    def _release(
        bucket: list[tuple[tuple[str, ...], tuple[str, ...]]], graph: Graph
    ) -> Iterator[Path]:
        def order(item: tuple[tuple[str, ...], tuple[str, ...]]) -> tuple[list[int], tuple[str, ...]]:
            return [graph.index_of(node) for node in item[0]], item[1]

        for nodes, labels in sorted(set(bucket), key=order):
            yield Path(nodes, labels)


def enumerate_paths(annotated: AnnotatedGrammar, start: AnnotatedSymbol, max_paths: int, max_len: int) -> list[Path]:
    """Up to `max_paths` paths derived from `start`, of at most `max_len` edges.

    Paths come in nondecreasing length, ties ordered by node index sequence.

    Raises:
        NoPathError: If `start` is not an annotated nonterminal.
    """
    return list(islice(PathEnumerator(annotated, start, max_len), max(max_paths, 0)))


@dataclass(frozen=True)
class DerivationNode:
    """One rule application of a derivation tree; leaves are terminal rules."""

    rule: AnnotatedRule
    children: tuple["DerivationNode", ...] = ()

    @property
    def symbol(self) -> AnnotatedSymbol:
        return self.rule.head

    def leaves(self) -> list[AnnotatedRule]:
        """Terminal rules, left to right."""
        found: list[AnnotatedRule] = []
        stack: list[DerivationNode] = [self]
        while stack:
            node = stack.pop()
            if node.rule.is_terminal:
                found.append(node.rule)
            else:
                stack.extend(reversed(node.children))
        return found

    def path(self) -> Path:
        leaves = self.leaves()
        return Path.from_edges(
            self.symbol.source, ((leaf.head.source, leaf.label, leaf.head.target) for leaf in leaves)
        )


def derive_specific_path(annotated: AnnotatedGrammar, start: AnnotatedSymbol, p: Path) -> DerivationNode:
    """Derives path `p` from `start` in the annotated grammar.

    A CYK parse of the trace where each span (i, j) stands for the nodes at positions i and
    j of the path; among alternatives the first split point, then the first grammar rule,
    is kept.

    Raises:
        NotDerivableError: If `p` does not run from `start.source` to `start.target`, is not
            a path of the graph, or its trace is not in the language of the nonterminal.
    """
    start = AnnotatedSymbol(*start)
    g = annotated.grammar
    if (p.source, p.target) != (start.source, start.target):
        error_msg = f"Path {p} does not run from {start.source} to {start.target}"
        logger.error(error_msg)
        raise NotDerivableError(error_msg)
    if not validate_path(annotated.graph, p):
        error_msg = f"{p} is not a path of the graph"
        logger.error(error_msg)
        raise NotDerivableError(error_msg)

    size = len(p)
    # spans[i][j]: head -> backpointer (split, rule), None for terminal rules
    spans: list[list[dict[str, tuple[int, Rule] | None]]] = [[{} for _ in range(size + 1)] for _ in range(size + 1)]
    for i, label in enumerate(p.labels):
        for rule in g.rules_for_label(label):
            spans[i][i + 1].setdefault(rule.head, None)
    for length in range(2, size + 1):
        for i in range(size - length + 1):
            j = i + length
            cell = spans[i][j]
            for k in range(i + 1, j):
                left, right = spans[i][k], spans[k][j]
                if not left or not right:
                    continue
                for rule in g.binary_rules:
                    if rule.body[0] in left and rule.body[1] in right:
                        cell.setdefault(rule.head, (k, rule))

    if size == 0 or start.nonterminal not in spans[0][size]:
        error_msg = f"{p} is not derivable from {start}"
        logger.error(error_msg)
        raise NotDerivableError(error_msg)

    def build(head: str, i: int, j: int) -> DerivationNode:
        symbol = AnnotatedSymbol(head, p.nodes[i], p.nodes[j])
        pointer = spans[i][j][head]
        if pointer is None:
            return DerivationNode(AnnotatedRule(symbol, (p.labels[i],)))
        k, rule = pointer
        left, right = rule.body
        children = (build(left, i, k), build(right, k, j))
        return DerivationNode(AnnotatedRule(symbol, (children[0].symbol, children[1].symbol)), children)

    return build(start.nonterminal, 0, size)
