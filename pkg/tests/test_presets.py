"""Tests for the named grammars and the worst-case grammar families."""

import unittest
from unittest.mock import MagicMock, patch

from engine.grammar import cyk_member
from engine.presets import (
    PRESETS,
    chain_text,
    cycle_lower_bound_grammar,
    double_cycle_grammar,
    double_cycle_text,
    preset_grammar,
)
from engine.shortest import minimize


class TestPresetGrammar(unittest.TestCase):
    def setUp(self) -> None:
        self.logger_patch = patch("engine.presets.logger", MagicMock())
        self.mock_logger = self.logger_patch.start()

    def tearDown(self) -> None:
        self.logger_patch.stop()
        return super().tearDown()

    def test_every_preset_normalizes(self) -> None:
        """Each preset keeps its start nonterminal and derives at least one string."""
        for name in PRESETS:
            with self.subTest(name=name):
                g, start = preset_grammar(name)
                self.assertIn(start, g)
                self.assertIn(start, minimize(g))

    def test_languages(self) -> None:
        cases = [
            ("q1", "s s s", True),
            ("q2", "s", True),
            ("sss", "s s s", True),
            ("sss", "s s", False),
            ("matched", "s1 s1 s2 s2", True),
            ("matched", "s1 s2 s2", False),
            ("same-generation", "parentOf parentOf childOf childOf", True),
        ]
        for name, word, expected in cases:
            with self.subTest(name=name, word=word):
                g, start = preset_grammar(name)
                self.assertEqual(cyk_member(g, start, word), expected)

    def test_unknown_preset(self) -> None:
        with self.assertRaises(ValueError):
            preset_grammar("nope")
        self.mock_logger.error.assert_called_once()


class TestFamilies(unittest.TestCase):
    def test_chain_text(self) -> None:
        self.assertEqual(chain_text(3), 'a0 -> "s"\na1 -> a0 a0\na2 -> a1 a1\n')

    def test_cycle_lower_bound_derives_longer_runs(self) -> None:
        g = cycle_lower_bound_grammar(3)
        self.assertFalse(cyk_member(g, "a2", ["s"] * 3))
        self.assertTrue(cyk_member(g, "a2", ["s"] * 4))
        self.assertTrue(cyk_member(g, "a2", ["s"] * 5))

    def test_double_cycle_depth(self) -> None:
        self.assertNotIn("b1", double_cycle_text(0))
        g = double_cycle_grammar(2)
        self.assertEqual(minimize(g).cost("b2"), 8)
        self.assertTrue(cyk_member(g, "a", "s1 s1 s2 s2"))

    def test_invalid_sizes(self) -> None:
        with patch("engine.presets.logger", MagicMock()):
            with self.assertRaises(ValueError):
                chain_text(0)
            with self.assertRaises(ValueError):
                double_cycle_text(-1)


if __name__ == "__main__":
    unittest.main()
