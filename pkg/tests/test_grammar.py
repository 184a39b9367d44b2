"""Tests for grammar parsing, CNF normalization and CYK membership."""

import itertools
import random
import unittest
from unittest.mock import MagicMock, patch

from engine.errors import EpsilonLanguageError, GrammarSyntaxError, SymbolConflictError, UnknownNonterminalError
from engine.grammar import Grammar, RawGrammar, Rule, cyk_member, normalize_to_cnf, parse_grammar
from engine.presets import SAME_GENERATION, SOCIAL


class TestParseGrammar(unittest.TestCase):
    """Reading grammar documents into raw rules."""

    def test_alternatives_become_rules_in_order(self) -> None:
        """Each alternative of a line is a separate rule, left to right."""
        raw = parse_grammar(SAME_GENERATION)
        self.assertEqual([str(rule) for rule in raw.rules], ['q -> "parentOf" q "childOf"', 'q -> "parentOf" "childOf"'])
        self.assertEqual(raw.nonterminals, ("q",))
        self.assertEqual(raw.alphabet, ("parentOf", "childOf"))

    def test_comments_and_blank_lines_are_ignored(self) -> None:
        raw = parse_grammar('# header\n\nq -> "a"  # trailing\n')
        self.assertEqual(len(raw.rules), 1)
        self.assertEqual(raw.rules[0].line, 3)

    def test_empty_alternative_and_epsilon_token(self) -> None:
        """An empty alternative and `ε` both denote the empty body."""
        raw = parse_grammar('s -> "a" s | \nt -> ε\n')
        self.assertEqual([rule.body for rule in raw.rules[1:]], [(), ()])

    def test_nonterminal_names(self) -> None:
        raw = parse_grammar("q -> a q_tail\nq_tail -> q b-2\n")
        self.assertEqual(raw.nonterminals, ("q", "a", "q_tail", "b-2"))

    def test_missing_arrow_reports_line(self) -> None:
        with self.assertRaises(GrammarSyntaxError) as ctx:
            parse_grammar('q -> "a"\nq "b"\n')
        self.assertEqual(ctx.exception.line, 2)

    def test_unterminated_terminal(self) -> None:
        with self.assertRaises(GrammarSyntaxError) as ctx:
            parse_grammar('q -> "abc\n')
        self.assertEqual(ctx.exception.line, 1)
        self.assertIn("Unterminated", str(ctx.exception))

    def test_empty_terminal(self) -> None:
        with self.assertRaises(GrammarSyntaxError):
            parse_grammar('q -> ""\n')

    def test_epsilon_must_stand_alone(self) -> None:
        with self.assertRaises(GrammarSyntaxError):
            parse_grammar('q -> ε "a"\n')

    def test_second_arrow_in_body(self) -> None:
        with self.assertRaises(GrammarSyntaxError):
            parse_grammar("q -> a -> b\n")

    def test_token_used_as_terminal_and_nonterminal(self) -> None:
        with patch("engine.grammar.logger", MagicMock()) as mock_logger:
            with self.assertRaises(SymbolConflictError):
                parse_grammar('q -> "a" a\na -> "x"\n')
            mock_logger.error.assert_called_once()

    def test_single_quoted_terminals(self) -> None:
        raw = parse_grammar("q -> 'a' q | 'a'\n")
        self.assertEqual(raw.alphabet, ("a",))
        self.assertEqual(str(raw.rules[0]), 'q -> "a" q')

    def test_terminal_with_quote_or_space(self) -> None:
        for text in ("q -> 'a\"b'\n", 'q -> "a b"\n'):
            with self.subTest(text=text), self.assertRaises(GrammarSyntaxError):
                parse_grammar(text)


class TestNormalizeToCnf(unittest.TestCase):
    """Normalization keeps every language, minus the empty string."""

    def test_cnf_input_is_unchanged(self) -> None:
        g = Grammar.from_text(SOCIAL)
        self.assertEqual(g.nonterminals, ("q",))
        self.assertEqual(g.rules, (Rule("q", ("friendOf",)), Rule("q", ("q", "q"))))
        self.assertEqual(g.diagnostics, ())

    def test_long_bodies_are_lifted_and_binarized(self) -> None:
        g = Grammar.from_text(SAME_GENERATION)
        self.assertEqual(g.nonterminals[0], "q")
        for rule in g.rules:
            if rule.is_terminal:
                self.assertIn(rule.label, g.alphabet)
            else:
                self.assertTrue(all(name in g for name in rule.body))
        self.assertTrue(cyk_member(g, "q", "parentOf childOf"))
        self.assertTrue(cyk_member(g, "q", "parentOf parentOf childOf childOf"))
        self.assertFalse(cyk_member(g, "q", "parentOf childOf childOf"))
        self.assertFalse(cyk_member(g, "q", "childOf parentOf"))

    def test_fresh_names_avoid_existing_ones(self) -> None:
        g = Grammar.from_text('_b1 -> "x"\n_ta -> "y"\nq -> "a" "b" "c"\n')
        self.assertEqual(len(set(g.nonterminals)), len(g.nonterminals))
        self.assertTrue(cyk_member(g, "q", "a b c"))
        self.assertTrue(cyk_member(g, "_b1", "x"))
        self.assertFalse(cyk_member(g, "_b1", "b c"))

    def test_nullable_nonterminals_are_eliminated(self) -> None:
        """`s -> "a" s "b" | ε` keeps every a^k b^k with k >= 1."""
        g = Grammar.from_text('s -> "a" s "b" | ε\n')
        self.assertTrue(cyk_member(g, "s", "a b"))
        self.assertTrue(cyk_member(g, "s", "a a b b"))
        self.assertFalse(cyk_member(g, "s", "a a b"))
        self.assertFalse(cyk_member(g, "s", ""))
        self.assertEqual(len(g.diagnostics), 1)
        self.assertIn("Nullable", g.diagnostics[0])

    def test_unit_rules_are_inlined(self) -> None:
        g = Grammar.from_text('s -> t\nt -> u | "y"\nu -> "x"\n')
        self.assertTrue(cyk_member(g, "s", "x"))
        self.assertTrue(cyk_member(g, "s", "y"))
        self.assertTrue(all(rule.is_terminal or len(rule.body) == 2 for rule in g.rules))

    def test_epsilon_only_nonterminal_is_an_error_when_queried(self) -> None:
        raw = parse_grammar('e -> ε\nq -> "a"\n')
        with self.assertRaises(EpsilonLanguageError):
            normalize_to_cnf(raw, visible=["e"])

    def test_epsilon_only_nonterminal_is_a_diagnostic_otherwise(self) -> None:
        g = normalize_to_cnf(parse_grammar('e -> ε\nq -> "a"\n'), visible=["q"])
        self.assertTrue(any("derives only" in message for message in g.diagnostics))
        self.assertTrue(cyk_member(g, "q", "a"))

    def test_serialize_reads_back_to_the_same_rules(self) -> None:
        g = Grammar.from_text(SAME_GENERATION)
        self.assertEqual(Grammar.from_text(g.serialize()).rules, g.rules)

    def test_lifted_names_of_unusual_labels(self) -> None:
        """Labels with characters a nonterminal name cannot hold still serialize to a valid grammar."""
        g = Grammar.from_text('q -> "a|b" "c" | "a_b" "c"\n')
        self.assertEqual(len(set(g.nonterminals)), len(g.nonterminals))
        self.assertTrue(cyk_member(g, "q", ["a|b", "c"]))
        self.assertTrue(cyk_member(g, "q", ["a_b", "c"]))
        self.assertFalse(cyk_member(g, "q", ["a", "c"]))
        self.assertEqual(Grammar.from_text(g.serialize()).rules, g.rules)


class TestGrammar(unittest.TestCase):
    """Indexes and lookups of a normalized grammar."""

    def setUp(self) -> None:
        self.g = Grammar.from_text('q -> a b | b a\na -> "x"\nb -> "y"\n')

    def test_lookups(self) -> None:
        self.assertEqual(self.g.index_of("b"), 2)
        self.assertEqual(self.g.rules_for_label("x"), (Rule("a", ("x",)),))
        self.assertEqual(self.g.rules_with_first("a"), (Rule("q", ("a", "b")),))
        self.assertEqual(self.g.rules_with_second("a"), (Rule("q", ("b", "a")),))
        self.assertEqual(len(self.g.rules_for("q")), 2)
        self.assertEqual(len(self.g.terminal_rules), 2)
        self.assertEqual(len(self.g.binary_rules), 2)
        self.assertIn("q", self.g)
        self.assertNotIn("x", self.g)

    def test_unknown_nonterminal(self) -> None:
        with self.assertRaises(UnknownNonterminalError):
            self.g.index_of("nope")
        # it is also a KeyError for callers treating the grammar as a mapping
        with self.assertRaises(KeyError):
            cyk_member(self.g, "nope", "x")

    def test_from_rules_collects_symbols(self) -> None:
        g = Grammar.from_rules([Rule("q", ("q", "r")), Rule("r", ("z",))])
        self.assertEqual(g.nonterminals, ("q", "r"))
        self.assertEqual(g.alphabet, ("z",))

    def test_symbol_clash_is_rejected(self) -> None:
        with self.assertRaises(SymbolConflictError):
            Grammar(["q", "x"], ["x"], [Rule("q", ("x",))])

    def test_rule_bodies_are_cnf(self) -> None:
        with self.assertRaises(ValueError):
            Rule("q", ("a", "b", "c"))


def _random_grammar_text(rng: random.Random) -> str:
    """Rules over s, t, u and the labels a, b, with bodies of length 0 to 3."""
    lines = []
    for _ in range(rng.randint(1, 6)):
        body = [rng.choice(['"a"', '"b"', "s", "t", "u"]) for _ in range(rng.randint(0, 3))]
        lines.append(f"{rng.choice('stu')} -> {' '.join(body)}")
    return "\n".join(lines) + "\n"


def _raw_words(raw: RawGrammar, max_len: int) -> dict[str, set[tuple[str, ...]]]:
    """Words of length 1 to max_len each nonterminal rewrites to, by rewriting the raw rules."""
    words: dict[str, set[tuple[str, ...]]] = {name: set() for name in raw.nonterminals}
    with_empty = {name: {()} if any(rule.head == name and not rule.body for rule in raw.rules) else set() for name in words}
    changed = True
    while changed:
        changed = False
        for rule in raw.rules:
            partial: set[tuple[str, ...]] = {()}
            for symbol in rule.body:
                options = {(symbol.name,)} if symbol.terminal else words[symbol.name] | with_empty[symbol.name]
                partial = {w + o for w in partial for o in options if len(w) + len(o) <= max_len}
            new = {w for w in partial if w} - words[rule.head]
            if new:
                words[rule.head] |= new
                changed = True
            if () in partial and () not in with_empty[rule.head]:
                with_empty[rule.head].add(())
                changed = True
    return words


class TestRandomGrammars(unittest.TestCase):
    """Seeded random grammars checked against plain rewriting."""

    def test_normalization_keeps_every_language(self) -> None:
        rng = random.Random(7)
        max_len = 4
        all_words = [w for n in range(1, max_len + 1) for w in itertools.product("ab", repeat=n)]
        with patch("engine.grammar.logger", MagicMock()):
            for case in range(40):
                text = _random_grammar_text(rng)
                raw = parse_grammar(text)
                g = normalize_to_cnf(raw)
                expected = _raw_words(raw, max_len)
                with self.subTest(case=case, grammar=text):
                    for name in raw.nonterminals:
                        derived = {w for w in all_words if cyk_member(g, name, w)}
                        self.assertEqual(derived, expected[name], name)

    def test_normalization_is_deterministic(self) -> None:
        rng = random.Random(11)
        with patch("engine.grammar.logger", MagicMock()):
            for case in range(40):
                text = _random_grammar_text(rng)
                with self.subTest(case=case, grammar=text):
                    first = Grammar.from_text(text)
                    self.assertEqual(Grammar.from_text(text).serialize(), first.serialize())
                    self.assertEqual(Grammar.from_text(first.serialize()).rules, first.rules)


class TestCykMember(unittest.TestCase):
    def test_social_closure(self) -> None:
        g = Grammar.from_text(SOCIAL)
        for length in range(1, 6):
            self.assertTrue(cyk_member(g, "q", ["friendOf"] * length))
        self.assertFalse(cyk_member(g, "q", []))
        self.assertFalse(cyk_member(g, "q", ["friendOf", "knows"]))


if __name__ == "__main__":
    unittest.main()
