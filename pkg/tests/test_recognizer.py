"""Tests for relational and boolean query evaluation."""

import random
import unittest

from engine.errors import UnknownNonterminalError
from engine.generators import gen_cycle, gen_double_cycle, gen_social_network
from engine.grammar import Grammar, Rule
from engine.graph import Graph
from engine.presets import MATCHED, SAME_GENERATION, SOCIAL
from engine.recognizer import AnnotatedRule, AnnotatedSymbol, ReachSet, eval_boolean, eval_relational, recognize

SOCIAL_PAIRS = [
    ("Alice", "Bob"),
    ("Alice", "Craig"),
    ("Alice", "Dan"),
    ("Alice", "Eve"),
    ("Bob", "Dan"),
    ("Bob", "Eve"),
    ("Craig", "Eve"),
    ("Dan", "Eve"),
]


class TestEvalRelational(unittest.TestCase):
    """Pairs of nodes connected by a matching path."""

    def test_social_network(self) -> None:
        """Everyone reachable by one or more friendOf edges, in node order."""
        pairs = eval_relational(Grammar.from_text(SOCIAL), "q", gen_social_network())
        self.assertEqual(pairs, SOCIAL_PAIRS)

    def test_same_generation(self) -> None:
        graph = Graph(
            [
                ("root", "parentOf", "kid1"),
                ("root", "parentOf", "kid2"),
                ("kid1", "parentOf", "grandkid"),
                ("kid1", "childOf", "root"),
                ("kid2", "childOf", "root"),
                ("grandkid", "childOf", "kid1"),
            ]
        )
        pairs = eval_relational(Grammar.from_text(SAME_GENERATION), "q", graph)
        self.assertEqual(pairs, [("root", "root"), ("kid1", "kid1")])

    def test_matched_on_double_cycle(self) -> None:
        """s1^k s2^k closes at c once k is a multiple of both cycle lengths."""
        reach = recognize(Grammar.from_text(MATCHED), gen_double_cycle(3, 2))
        self.assertIn(("q", "c", "c"), reach)
        self.assertIn(("q", "m1", "c"), reach)
        self.assertNotIn(("q", "n1", "c"), reach)

    def test_cycle_closure(self) -> None:
        pairs = eval_relational(Grammar.from_text(SOCIAL.replace("friendOf", "s")), "q", gen_cycle(3))
        self.assertEqual(len(pairs), 9)

    def test_unknown_nonterminal(self) -> None:
        with self.assertRaises(UnknownNonterminalError):
            eval_relational(Grammar.from_text(SOCIAL), "p", gen_social_network())


class TestEvalBoolean(unittest.TestCase):
    def test_true_and_false(self) -> None:
        g = Grammar.from_text(SOCIAL)
        self.assertTrue(eval_boolean(g, "q", gen_social_network()))
        self.assertFalse(eval_boolean(g, "q", Graph([("x", "knows", "y")])))
        self.assertFalse(eval_boolean(g, "q", Graph()))


class TestReachSet(unittest.TestCase):
    """The packed triple store."""

    def setUp(self) -> None:
        self.g = Grammar.from_text('q -> a b\na -> "x"\nb -> "y"\n')
        self.graph = Graph([("u", "x", "v"), ("v", "y", "w")])
        self.reach = ReachSet(self.g, self.graph)

    def test_add_is_idempotent(self) -> None:
        self.assertTrue(self.reach.add(1, 0, 1))
        self.assertFalse(self.reach.add(1, 0, 1))
        self.assertEqual(len(self.reach), 1)
        self.assertTrue(self.reach.contains(1, 0, 1))
        self.assertEqual(self.reach.targets_from(1, 0), (1,))
        self.assertEqual(self.reach.sources_to(1, 1), (0,))

    def test_contains_by_name(self) -> None:
        self.reach.add(1, 0, 1)
        self.assertIn(("a", "u", "v"), self.reach)
        self.assertIn(AnnotatedSymbol("a", "u", "v"), self.reach)
        self.assertNotIn(("a", "u", "nowhere"), self.reach)
        self.assertNotIn(("z", "u", "v"), self.reach)
        self.assertNotIn("a", self.reach)

    def test_recognize_iterates_in_grammar_then_node_order(self) -> None:
        reach = recognize(self.g, self.graph)
        self.assertEqual(
            list(reach),
            [AnnotatedSymbol("q", "u", "w"), AnnotatedSymbol("a", "u", "v"), AnnotatedSymbol("b", "v", "w")],
        )
        self.assertEqual(reach.pairs("q"), [("u", "w")])


class TestAnnotatedValues(unittest.TestCase):
    def test_rendering(self) -> None:
        head = AnnotatedSymbol("q", "Alice", "Eve")
        left, right = AnnotatedSymbol("q", "Alice", "Craig"), AnnotatedSymbol("q", "Craig", "Eve")
        self.assertEqual(str(head), "<q,Alice,Eve>")
        self.assertEqual(str(AnnotatedRule(head, (left, right))), "<q,Alice,Eve> -> <q,Alice,Craig> <q,Craig,Eve>")
        terminal = AnnotatedRule(left, ("friendOf",))
        self.assertTrue(terminal.is_terminal)
        self.assertEqual(terminal.label, "friendOf")
        self.assertEqual(str(terminal), '<q,Alice,Craig> -> "friendOf"')


class TestMonotonicity(unittest.TestCase):
    def test_adding_an_edge_keeps_every_triple(self) -> None:
        rng = random.Random(5)
        names = ["A", "B", "C"]
        for case in range(40):
            rules = [Rule(rng.choice(names), (rng.choice("xy"),)) for _ in range(rng.randint(1, 3))]
            rules += [Rule(rng.choice(names), (rng.choice(names), rng.choice(names))) for _ in range(rng.randint(0, 4))]
            g = Grammar.from_rules(rules)
            nodes = [f"v{i}" for i in range(4)]
            edges = [(rng.choice(nodes), rng.choice("xy"), rng.choice(nodes)) for _ in range(rng.randint(0, 6))]
            extra = (rng.choice(nodes), rng.choice("xy"), rng.choice(nodes))
            with self.subTest(case=case, grammar=g.serialize(), edges=edges, extra=extra):
                before = set(recognize(g, Graph(edges, nodes)))
                after = set(recognize(g, Graph(edges + [extra], nodes)))
                self.assertLessEqual(before, after)


if __name__ == "__main__":
    unittest.main()
