"""
Context-free grammars for path queries.

A grammar document is parsed into a `RawGrammar` (unrestricted bodies, possibly empty),
normalized into a Chomsky-Normal-Form `Grammar` and queried with a CYK membership check
that the rest of the engine uses as its reference for `a =>* w`.

File format, one rule per line:

    # comment
    q -> "parentOf" q "childOf" | "parentOf" "childOf"

Each line is read with `nltk.CFG.fromstring`. Terminals are quoted (double or single quotes),
bare tokens are nonterminals, `|` separates alternatives and an alternative that is empty
(or the single token `ε`) derives the empty string.
"""

import re
from collections import defaultdict, deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from nltk import CFG
from nltk.grammar import Production, is_nonterminal

from app.logger_config import setup_logger
from engine.errors import EpsilonLanguageError, GrammarSyntaxError, SymbolConflictError, UnknownNonterminalError

logger = setup_logger()

EPSILON = "ε"
BINARIZE_PREFIX = "_b"
LIFT_PREFIX = "_t"

_UNSAFE_NAME_CHARS = re.compile(r"\W")


@dataclass(frozen=True)
class Symbol:
    """A grammar symbol: a terminal (edge label) or a nonterminal."""

    name: str
    terminal: bool = False

    def __str__(self) -> str:
        return f'"{self.name}"' if self.terminal else self.name


@dataclass(frozen=True)
class Rule:
    """A CNF production rule: `head -> "label"` or `head -> left right`."""

    head: str
    body: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.body) not in (1, 2):
            raise ValueError(f"CNF rule body must have one terminal or two nonterminals, got {self.body!r}")

    @property
    def is_terminal(self) -> bool:
        return len(self.body) == 1

    @property
    def label(self) -> str:
        """The terminal of a terminal rule."""
        return self.body[0]

    def __str__(self) -> str:
        if self.is_terminal:
            return f'{self.head} -> "{self.body[0]}"'
        return f"{self.head} -> {self.body[0]} {self.body[1]}"


@dataclass(frozen=True)
class RawRule:
    """A rule as written in a grammar document, before normalization."""

    head: str
    body: tuple[Symbol, ...]
    line: int = 0

    def __str__(self) -> str:
        return f"{self.head} -> {' '.join(str(s) for s in self.body) or EPSILON}"


@dataclass(frozen=True)
class RawGrammar:
    """Rules in unrestricted form, in file order."""

    rules: tuple[RawRule, ...] = ()

    @property
    def nonterminals(self) -> tuple[str, ...]:
        """Nonterminals in order of first appearance (heads and bodies)."""
        seen: dict[str, None] = {}
        for rule in self.rules:
            seen.setdefault(rule.head)
            for symbol in rule.body:
                if not symbol.terminal:
                    seen.setdefault(symbol.name)
        return tuple(seen)

    @property
    def alphabet(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for rule in self.rules:
            for symbol in rule.body:
                if symbol.terminal:
                    seen.setdefault(symbol.name)
        return tuple(seen)


class Grammar:
    """An immutable context-free grammar in Chomsky Normal Form (without ε).

    Rule order is kept exactly as given; downstream algorithms use it to break ties, so two
    grammars with the same rules in a different order may choose different witnesses.

    Attributes:
        nonterminals (tuple[str, ...]): Declared nonterminals; position = dense index.
        alphabet (tuple[str, ...]): Declared terminals.
        rules (tuple[Rule, ...]): Production rules, duplicates removed, order preserved.
        diagnostics (tuple[str, ...]): Warnings collected while normalizing.
    """

    def __init__(
        self,
        nonterminals: Iterable[str],
        alphabet: Iterable[str],
        rules: Iterable[Rule],
        diagnostics: Iterable[str] = (),
    ) -> None:
        self.nonterminals: tuple[str, ...] = tuple(dict.fromkeys(nonterminals))
        self.alphabet: tuple[str, ...] = tuple(dict.fromkeys(alphabet))
        self.rules: tuple[Rule, ...] = tuple(dict.fromkeys(rules))
        self.diagnostics: tuple[str, ...] = tuple(diagnostics)

        self._index: dict[str, int] = {name: i for i, name in enumerate(self.nonterminals)}
        clash = set(self._index).intersection(self.alphabet)
        if clash:
            error_msg = f"Symbols used as both terminal and nonterminal: {', '.join(sorted(clash))}"
            logger.error(error_msg)
            raise SymbolConflictError(error_msg)

        labels = set(self.alphabet)
        by_label: dict[str, list[Rule]] = defaultdict(list)
        by_first: dict[str, list[Rule]] = defaultdict(list)
        by_second: dict[str, list[Rule]] = defaultdict(list)
        by_head: dict[str, list[Rule]] = defaultdict(list)
        for rule in self.rules:
            if rule.head not in self._index:
                raise ValueError(f"Undeclared nonterminal in rule {rule}")
            if rule.is_terminal:
                if rule.label not in labels:
                    raise ValueError(f"Undeclared terminal in rule {rule}")
                by_label[rule.label].append(rule)
            else:
                left, right = rule.body
                if left not in self._index or right not in self._index:
                    raise ValueError(f"Undeclared nonterminal in rule {rule}")
                by_first[left].append(rule)
                by_second[right].append(rule)
            by_head[rule.head].append(rule)

        self._by_label = {k: tuple(v) for k, v in by_label.items()}
        self._by_first = {k: tuple(v) for k, v in by_first.items()}
        self._by_second = {k: tuple(v) for k, v in by_second.items()}
        self._by_head = {k: tuple(v) for k, v in by_head.items()}

    @classmethod
    def from_rules(cls, rules: Iterable[Rule]) -> "Grammar":
        """Builds a grammar declaring exactly the symbols its rules mention, in order of appearance."""
        rules = tuple(rules)
        nonterminals: dict[str, None] = {}
        alphabet: dict[str, None] = {}
        for rule in rules:
            nonterminals.setdefault(rule.head)
            if rule.is_terminal:
                alphabet.setdefault(rule.label)
            else:
                for name in rule.body:
                    nonterminals.setdefault(name)
        return cls(nonterminals, alphabet, rules)

    @classmethod
    def from_text(cls, text: str, visible: Iterable[str] | None = None) -> "Grammar":
        """Parses and normalizes a grammar document in one step."""
        return normalize_to_cnf(parse_grammar(text), visible=visible)

    def __len__(self) -> int:
        return len(self.rules)

    def __contains__(self, nonterminal: object) -> bool:
        return nonterminal in self._index

    def __repr__(self) -> str:
        return f"Grammar({len(self.nonterminals)} nonterminals, {len(self.alphabet)} terminals, {len(self.rules)} rules)"

    def index_of(self, nonterminal: str) -> int:
        """Returns the dense index of a nonterminal.

        Raises:
            UnknownNonterminalError: If the grammar does not declare it.
        """
        try:
            return self._index[nonterminal]
        except KeyError:
            error_msg = f"Unknown nonterminal: {nonterminal}"
            logger.error(error_msg)
            raise UnknownNonterminalError(error_msg) from None

    @property
    def terminal_rules(self) -> tuple[Rule, ...]:
        return tuple(rule for rule in self.rules if rule.is_terminal)

    @property
    def binary_rules(self) -> tuple[Rule, ...]:
        return tuple(rule for rule in self.rules if not rule.is_terminal)

    def rules_for_label(self, label: str) -> tuple[Rule, ...]:
        """Terminal rules `a -> label`."""
        return self._by_label.get(label, ())

    def rules_with_first(self, nonterminal: str) -> tuple[Rule, ...]:
        """Binary rules `c -> nonterminal b`."""
        return self._by_first.get(nonterminal, ())

    def rules_with_second(self, nonterminal: str) -> tuple[Rule, ...]:
        """Binary rules `c -> b nonterminal`."""
        return self._by_second.get(nonterminal, ())

    def rules_for(self, head: str) -> tuple[Rule, ...]:
        return self._by_head.get(head, ())

    def serialize(self) -> str:
        """Renders the grammar in the grammar file format, one rule per line."""
        return "".join(f"{rule}\n" for rule in self.rules)


def _read_line(line: str, line_no: int) -> list[Production]:
    """Reads the productions of one rule line with nltk's CFG reader."""
    try:
        return CFG.fromstring(line).productions()
    except ValueError as e:
        # nltk reports "Unable to parse line 1: <line>" followed by the reason
        reason = str(e).splitlines()[-1]
        raise GrammarSyntaxError(reason, line_no) from None


def parse_grammar(text: str) -> RawGrammar:
    """Parses a grammar document into raw rules, in file order.

    Each line is read by `nltk.CFG.fromstring`; alternatives separated by `|` become
    separate rules, left to right. Everything after a `#` is a comment. Nonterminal names
    follow nltk's convention (word characters, then also `/^<>-`).

    Args:
        text (str): The UTF-8 grammar document.

    Returns:
        RawGrammar: All rules of the document (possibly none).

    Raises:
        GrammarSyntaxError: On malformed lines, with the line number.
        SymbolConflictError: If a token is used both quoted and bare.
    """
    rules: list[RawRule] = []
    terminals: dict[str, int] = {}
    nonterminals: dict[str, int] = {}

    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.partition("#")[0].strip()
        if not line:
            continue
        for production in _read_line(line, line_no):
            head = production.lhs().symbol()
            if head == EPSILON:
                raise GrammarSyntaxError(f"{EPSILON} cannot be a rule head", line_no)
            nonterminals.setdefault(head, line_no)

            rhs = production.rhs()
            if any(is_nonterminal(item) and item.symbol() == EPSILON for item in rhs):
                if len(rhs) > 1:
                    raise GrammarSyntaxError(f"{EPSILON} must stand alone in an alternative", line_no)
                rhs = ()
            body = []
            for item in rhs:
                if is_nonterminal(item):
                    nonterminals.setdefault(item.symbol(), line_no)
                    body.append(Symbol(item.symbol()))
                    continue
                if not item:
                    raise GrammarSyntaxError("empty terminal", line_no)
                if any(char.isspace() or char in "\"'" for char in item):
                    raise GrammarSyntaxError(f"terminal {item!r} contains whitespace or a quote", line_no)
                terminals.setdefault(item, line_no)
                body.append(Symbol(item, terminal=True))
            rules.append(RawRule(head, tuple(body), line_no))

    clash = set(terminals).intersection(nonterminals)
    if clash:
        name = min(clash, key=lambda token: max(terminals[token], nonterminals[token]))
        error_msg = f"line {max(terminals[name], nonterminals[name])}: '{name}' is used as both terminal and nonterminal"
        logger.error(error_msg)
        raise SymbolConflictError(error_msg)

    logger.debug("Parsed %d raw rules", len(rules))
    return RawGrammar(tuple(rules))


class _FreshNames:
    """Deterministic fresh nonterminal names that avoid every name already in use."""

    def __init__(self, taken: Iterable[str]) -> None:
        self.taken = set(taken)
        self.created: list[str] = []
        self._counter = 0
        self._lifted: dict[str, str] = {}

    def _claim(self, name: str) -> str:
        self.taken.add(name)
        self.created.append(name)
        return name

    def binarized(self) -> str:
        while True:
            self._counter += 1
            name = f"{BINARIZE_PREFIX}{self._counter}"
            if name not in self.taken:
                return self._claim(name)

    def lifted(self, label: str) -> tuple[str, bool]:
        """Returns the nonterminal standing for `label` and whether it was just created."""
        if label in self._lifted:
            return self._lifted[label], False
        name = LIFT_PREFIX + _UNSAFE_NAME_CHARS.sub("_", label)
        while name in self.taken:
            name += "_"
        self._lifted[label] = self._claim(name)
        return name, True


def _nullable(rules: Sequence[tuple[str, tuple[Symbol, ...]]]) -> set[str]:
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for head, body in rules:
            if head not in nullable and all(not s.terminal and s.name in nullable for s in body):
                nullable.add(head)
                changed = True
    return nullable


def _productive(rules: Iterable[Rule]) -> set[str]:
    rules = tuple(rules)
    productive = {rule.head for rule in rules if rule.is_terminal}
    changed = True
    while changed:
        changed = False
        for rule in rules:
            if rule.head not in productive and not rule.is_terminal and set(rule.body) <= productive:
                productive.add(rule.head)
                changed = True
    return productive


def normalize_to_cnf(raw: RawGrammar, visible: Iterable[str] | None = None) -> Grammar:
    """Normalizes raw rules into an ε-free Chomsky-Normal-Form grammar.

    For every original nonterminal `a`, the language of `a` is preserved minus the empty
    string. Terminals inside longer bodies are lifted to `_t<label>` nonterminals (characters
    that cannot appear in a nonterminal name become `_`), long
    bodies are split with `_b<k>` nonterminals, nullable symbols are eliminated and unit
    rules are inlined. Generated rules keep the position of the rule they came from.

    Args:
        raw (RawGrammar): Parsed rules.
        visible (Iterable[str] | None): Nonterminals that will be queried. If one of them
            derives only the empty string, its language would silently become empty, so
            this is reported as an error instead of a diagnostic.

    Returns:
        Grammar: The normalized grammar; nullable nonterminals are listed in `diagnostics`.

    Raises:
        EpsilonLanguageError: If a visible nonterminal derives only ε.
    """
    original = raw.nonterminals
    fresh = _FreshNames(original + raw.alphabet)

    # Lift terminals out of long bodies and binarize.
    staged: list[tuple[str, tuple[Symbol, ...]]] = []
    for rule in raw.rules:
        body = rule.body
        if len(body) >= 2:
            lifted_body = []
            for symbol in body:
                if symbol.terminal:
                    name, created = fresh.lifted(symbol.name)
                    if created:
                        staged.append((name, (symbol,)))
                    lifted_body.append(Symbol(name))
                else:
                    lifted_body.append(symbol)
            body = tuple(lifted_body)
        head = rule.head
        while len(body) > 2:
            link = fresh.binarized()
            staged.append((head, (body[0], Symbol(link))))
            head, body = link, body[1:]
        staged.append((head, body))

    # Eliminate ε bodies.
    nullable = _nullable(staged)
    without_epsilon: dict[tuple[str, tuple[Symbol, ...]], None] = {}
    for head, body in staged:
        if not body:
            continue
        without_epsilon.setdefault((head, body))
        if len(body) == 2:
            left, right = body
            if left.name in nullable:
                without_epsilon.setdefault((head, (right,)))
            if right.name in nullable:
                without_epsilon.setdefault((head, (left,)))

    # Inline unit rules.
    all_nonterminals = original + tuple(fresh.created)
    units: dict[str, list[str]] = defaultdict(list)
    for head, body in without_epsilon:
        if len(body) == 1 and not body[0].terminal and body[0].name != head:
            units[head].append(body[0].name)
    closure: dict[str, set[str]] = {}
    for name in all_nonterminals:
        reached = {name}
        queue = deque([name])
        while queue:
            for target in units.get(queue.popleft(), ()):
                if target not in reached:
                    reached.add(target)
                    queue.append(target)
        closure[name] = reached
    inherits: dict[str, list[str]] = defaultdict(list)
    for name in all_nonterminals:
        for target in sorted(closure[name] - {name}, key=all_nonterminals.index):
            inherits[target].append(name)

    rules: dict[Rule, None] = {}
    for head, body in without_epsilon:
        if len(body) == 1 and not body[0].terminal:
            continue
        cnf_body = tuple(symbol.name for symbol in body)
        rules.setdefault(Rule(head, cnf_body))
        for heir in inherits.get(head, ()):
            rules.setdefault(Rule(heir, cnf_body))

    diagnostics: list[str] = []
    nullable_original = [name for name in original if name in nullable]
    if nullable_original:
        message = f"Nullable nonterminals (ε is never part of an answer): {', '.join(nullable_original)}"
        logger.warning(message)
        diagnostics.append(message)

    productive = _productive(rules)
    epsilon_only = [name for name in original if name in nullable and name not in productive]
    queried = set(visible or ())
    rejected = [name for name in epsilon_only if name in queried]
    if rejected:
        error_msg = f"Nonterminals derive only the empty string: {', '.join(rejected)}"
        logger.error(error_msg)
        raise EpsilonLanguageError(error_msg)
    for name in epsilon_only:
        message = f"Nonterminal {name} derives only ε; its language is empty"
        logger.warning(message)
        diagnostics.append(message)

    grammar = Grammar(all_nonterminals, raw.alphabet, rules, diagnostics)
    logger.debug("Normalized %d raw rules into %r", len(raw.rules), grammar)
    return grammar


def cyk_member(grammar: Grammar, nonterminal: str, word: Sequence[str] | str) -> bool:
    """Decides `nonterminal =>* word` with the Cocke-Younger-Kasami table.

    Args:
        grammar (Grammar): A CNF grammar.
        nonterminal (str): The nonterminal to test.
        word (Sequence[str] | str): Terminals; a string is split on whitespace.

    Returns:
        bool: True iff the word is in the nonterminal's language. The empty word is never
        a member.

    Raises:
        UnknownNonterminalError: If the nonterminal is not declared.
    """
    grammar.index_of(nonterminal)
    word = word.split() if isinstance(word, str) else list(word)
    size = len(word)
    if size == 0:
        return False

    # table[i][length - 1]: nonterminals deriving word[i:i + length]
    table: list[list[set[str]]] = [[set() for _ in range(size - i)] for i in range(size)]
    for i, label in enumerate(word):
        table[i][0] = {rule.head for rule in grammar.rules_for_label(label)}

    for length in range(2, size + 1):
        for i in range(size - length + 1):
            cell = table[i][length - 1]
            for split in range(1, length):
                left = table[i][split - 1]
                right = table[i + split][length - split - 1]
                if not left or not right:
                    continue
                for first in left:
                    for rule in grammar.rules_with_first(first):
                        if rule.body[1] in right:
                            cell.add(rule.head)
    return nonterminal in table[0][size - 1]
