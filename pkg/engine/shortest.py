"""
Minimum-length strings of a context-free grammar.

`minimize` builds a minimizing set: one chosen rule per derivable nonterminal, such that
expanding the chosen rules from `a` spells a shortest string of `L(G;a)`. Costs settle in
the order of a min-priority queue, the way Dijkstra settles distances, with a binary rule
`c -> a b` relaxing `c` to `cost[a] + cost[b]` once both sides are costed.
"""

from collections.abc import Hashable, Iterator, Mapping
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Generic, TypeVar

from app.logger_config import setup_logger
from engine.errors import NotDerivableError
from engine.grammar import Grammar, Rule

logger = setup_logger()

K = TypeVar("K", bound=Hashable)


class MinPriorityQueue(Generic[K]):
    """A binary heap with lazy deletion.

    `decrease_key` pushes a second entry instead of sifting the old one; entries whose
    priority no longer matches the live priority of their key are skipped on extraction.
    Equal priorities come out in key order, so keys must be mutually comparable.

    In debug runs (`__debug__`) the queue asserts that extracted priorities never decrease
    and that no key is inserted twice.
    """

    def __init__(self) -> None:
        self._heap: list[tuple[int, K]] = []
        self._live: dict[K, int] = {}
        self._extracted: set[K] = set()
        self._last: int | None = None

    def __len__(self) -> int:
        return len(self._live)

    def __bool__(self) -> bool:
        return bool(self._live)

    def __contains__(self, key: object) -> bool:
        return key in self._live

    def insert(self, key: K, priority: int) -> None:
        assert key not in self._live and key not in self._extracted, f"{key!r} inserted twice"
        self._live[key] = priority
        heappush(self._heap, (priority, key))

    def decrease_key(self, key: K, priority: int) -> None:
        assert self._live.get(key, priority + 1) > priority, f"{key!r} is not queued above {priority}"
        self._live[key] = priority
        heappush(self._heap, (priority, key))

    def extract_min(self) -> tuple[K, int]:
        """Removes and returns the key with the smallest live priority.

        Raises:
            IndexError: If the queue is empty.
        """
        while self._heap:
            priority, key = heappop(self._heap)
            if self._live.get(key) != priority:
                continue  # stale
            del self._live[key]
            if __debug__:
                assert self._last is None or priority >= self._last, "extracted priorities decreased"
                self._extracted.add(key)
                self._last = priority
            return key, priority
        raise IndexError("extract_min from an empty queue")


@dataclass(frozen=True)
class MinimizingSet:
    """A chosen rule and a cost per nonterminal.

    Produced by `minimize`, but any mapping can be wrapped (for example a hand-written set
    fed to `check_minimizing`).

    Attributes:
        costs (Mapping[str, int]): Length of the string each head expands to.
        rules (Mapping[str, Rule]): The chosen rule of each head.
    """

    costs: Mapping[str, int] = field(default_factory=dict)
    rules: Mapping[str, Rule] = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, choices: Mapping[str, tuple[Rule, int]]) -> "MinimizingSet":
        return cls({head: cost for head, (_, cost) in choices.items()}, {head: rule for head, (rule, _) in choices.items()})

    def __contains__(self, nonterminal: object) -> bool:
        return nonterminal in self.costs

    def __len__(self) -> int:
        return len(self.costs)

    @property
    def domain(self) -> tuple[str, ...]:
        return tuple(self.costs)

    def cost(self, nonterminal: str) -> int:
        """Raises NotDerivableError if the nonterminal is outside the domain."""
        try:
            return self.costs[nonterminal]
        except KeyError:
            error_msg = f"{nonterminal} derives no string"
            logger.error(error_msg)
            raise NotDerivableError(error_msg) from None

    def rule(self, nonterminal: str) -> Rule:
        self.cost(nonterminal)
        return self.rules[nonterminal]

    def stats(self) -> tuple[int, int, int]:
        """Domain size, largest cost and sum of costs."""
        return len(self.costs), max(self.costs.values(), default=0), sum(self.costs.values())

    def to_tsv(self) -> str:
        """`head <tab> cost <tab> chosen rule`, one line per head."""
        return "".join(f"{head}\t{cost}\t{self.rules[head]}\n" for head, cost in self.costs.items())


def minimize(g: Grammar) -> MinimizingSet:
    """Constructs a minimizing set of production rules.

    Terminal rules seed their heads at cost 1 in grammar order. Each extracted nonterminal
    relaxes every binary rule that has it in either body position and a costed sibling; a
    head's rule only changes on a strictly smaller cost, so the first rule reaching a cost
    wins ties.

    Args:
        g (Grammar): A CNF grammar.

    Returns:
        MinimizingSet: Exactly the nonterminals with a non-empty language, in grammar order,
        each with its minimum string length.
    """
    index = {name: i for i, name in enumerate(g.nonterminals)}
    cost: dict[int, int] = {}
    chosen: dict[int, Rule] = {}
    queue: MinPriorityQueue[int] = MinPriorityQueue()

    for rule in g.terminal_rules:
        a = index[rule.head]
        if a not in cost:
            cost[a], chosen[a] = 1, rule
            queue.insert(a, 1)

    # per body symbol: (head, sibling, rule)
    as_first: dict[int, list[tuple[int, int, Rule]]] = {i: [] for i in range(len(index))}
    as_second: dict[int, list[tuple[int, int, Rule]]] = {i: [] for i in range(len(index))}
    for rule in g.binary_rules:
        left, right = index[rule.body[0]], index[rule.body[1]]
        as_first[left].append((index[rule.head], right, rule))
        as_second[right].append((index[rule.head], left, rule))

    def produce(head: int, rule: Rule, total: int) -> None:
        if head not in cost:
            cost[head], chosen[head] = total, rule
            queue.insert(head, total)
        elif cost[head] > total:
            cost[head], chosen[head] = total, rule
            queue.decrease_key(head, total)

    extracted = 0
    while queue:
        a, _ = queue.extract_min()
        extracted += 1
        for head, sibling, rule in as_first[a]:
            if sibling in cost:
                produce(head, rule, cost[a] + cost[sibling])
        for head, sibling, rule in as_second[a]:
            if sibling in cost:
                produce(head, rule, cost[sibling] + cost[a])

    names = g.nonterminals
    ordered = sorted(cost)
    logger.debug("Minimized %r: %d of %d nonterminals derivable", g, extracted, len(names))
    return MinimizingSet({names[a]: cost[a] for a in ordered}, {names[a]: chosen[a] for a in ordered})


def iter_min_string(g: Grammar, ms: MinimizingSet, a: str) -> Iterator[str]:
    """Streams the terminals of the string `a` expands to under the chosen rules.

    Raises:
        UnknownNonterminalError: If the grammar does not declare `a`.
        NotDerivableError: If `a` is outside the domain, or the chosen rules do not expand
            `a` into exactly `cost[a]` terminals.
    """
    g.index_of(a)
    expected = ms.cost(a)
    emitted = 0
    stack = [a]
    while stack:
        rule = ms.rule(stack.pop())
        if rule.is_terminal:
            emitted += 1
            if emitted > expected:
                break
            yield rule.label
        else:
            stack.append(rule.body[1])
            stack.append(rule.body[0])
    if emitted != expected:
        error_msg = f"Chosen rules for {a} do not spell a string of length {expected}"
        logger.error(error_msg)
        raise NotDerivableError(error_msg)


def derive_min_string(g: Grammar, ms: MinimizingSet, a: str) -> tuple[str, ...]:
    """A minimum-length string of `L(G;a)`, as a tuple of terminals.

    Raises:
        NotDerivableError: If `a` is outside the domain of `ms`.
    """
    return tuple(iter_min_string(g, ms, a))


def _min_lengths(g: Grammar) -> dict[str, int]:
    """Minimum string lengths by plain fixpoint iteration, no queue involved."""
    lengths: dict[str, int] = {}
    changed = True
    while changed:
        changed = False
        for rule in g.rules:
            if rule.is_terminal:
                candidate = 1
            elif rule.body[0] in lengths and rule.body[1] in lengths:
                candidate = lengths[rule.body[0]] + lengths[rule.body[1]]
            else:
                continue
            if candidate < lengths.get(rule.head, candidate + 1):
                lengths[rule.head] = candidate
                changed = True
    return lengths


def _recursive_heads(ms: MinimizingSet) -> list[str]:
    """Heads lying on a cycle of the head -> body-head graph of the chosen rules."""
    white, grey, black = 0, 1, 2
    color = dict.fromkeys(ms.rules, white)
    cyclic: list[str] = []
    for root in ms.rules:
        if color[root] != white:
            continue
        color[root] = grey
        stack: list[tuple[str, Iterator[str]]] = [(root, iter(_children(ms, root)))]
        while stack:
            head, children = stack[-1]
            child = next(children, None)
            if child is None:
                color[head] = black
                stack.pop()
            elif color.get(child) == grey:
                cyclic.append(child)
            elif color.get(child) == white:
                color[child] = grey
                stack.append((child, iter(_children(ms, child))))
    return list(dict.fromkeys(cyclic))


def _children(ms: MinimizingSet, head: str) -> tuple[str, ...]:
    rule = ms.rules[head]
    return () if rule.is_terminal else rule.body


def check_minimizing(g: Grammar, ms: MinimizingSet) -> list[str]:
    """Checks a rule/cost mapping against the properties of a minimizing set.

    Checks that each chosen rule belongs to the grammar and has the right head, that binary
    bodies are in the domain, that the chosen rules are non-recursive, that costs add up
    (terminal rules cost 1, binary rules cost the sum of strictly smaller sides) and that
    every cost equals the minimum string length found by an independent fixpoint.

    Returns:
        list[str]: One line per violation; empty when the set is minimizing.
    """
    violations: list[str] = []
    known = set(g.rules)

    if set(ms.costs) != set(ms.rules):
        violations.append("costs and chosen rules cover different heads")
    for head, rule in ms.rules.items():
        if rule.head != head:
            violations.append(f"{head}: chosen rule {rule} has another head")
        if rule not in known:
            violations.append(f"{head}: chosen rule {rule} is not a grammar rule")
        if not rule.is_terminal:
            missing = [name for name in rule.body if name not in ms.rules]
            if missing:
                violations.append(f"{head}: body symbols {', '.join(missing)} have no chosen rule")

    for head in _recursive_heads(ms):
        violations.append(f"{head}: chosen rules are recursive through {head}")

    for head, rule in ms.rules.items():
        cost = ms.costs.get(head)
        if cost is None:
            continue
        if rule.is_terminal:
            if cost != 1:
                violations.append(f"{head}: terminal rule costs 1, recorded {cost}")
            continue
        left, right = (ms.costs.get(name) for name in rule.body)
        if left is None or right is None:
            continue
        if cost != left + right:
            violations.append(f"{head}: cost {cost} differs from {left} + {right}")
        if not (cost > left and cost > right):
            violations.append(f"{head}: cost {cost} is not larger than both sides ({left}, {right})")

    lengths = _min_lengths(g)
    for head in g.nonterminals:
        if head in lengths and head not in ms.costs:
            violations.append(f"{head}: derivable (minimum length {lengths[head]}) but not in the set")
        elif head in ms.costs and head not in lengths:
            violations.append(f"{head}: in the set but derives no string")
        elif head in ms.costs and ms.costs[head] != lengths[head]:
            violations.append(f"{head}: cost {ms.costs[head]} but minimum length is {lengths[head]}")

    for violation in violations:
        logger.debug("Minimizing check: %s", violation)
    return violations

