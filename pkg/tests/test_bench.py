"""Tests for the benchmark harness. The full-size cells of test 1 take minutes and only run
when CFPQ_SLOW_TESTS is set."""

import os
import unittest
from dataclasses import replace
from unittest.mock import MagicMock, patch

from app.bench import BENCH_QUERIES, BenchRecord, bench_graph, double_cycle_split, records_tsv, run_cell, run_test
from app.query_config import BenchSettings
from engine.presets import preset_grammar
from engine.singlepath import minimize_annotated

SLOW = bool(os.environ.get("CFPQ_SLOW_TESTS"))


def without_times(records: list[BenchRecord]) -> list[BenchRecord]:
    return [replace(record, minimize_ns=0, produce_ns=0) for record in records]


class TestDoubleCycleSplit(unittest.TestCase):
    def test_splits(self) -> None:
        expected = {1: (1, 1), 4: (3, 2), 5: (5, 1), 6: (4, 3), 250: (126, 125)}
        for size, split in expected.items():
            with self.subTest(size=size):
                self.assertEqual(double_cycle_split(size), split)
                u, v = split
                self.assertEqual(len(bench_graph(3, size).nodes), u + v - 1)

    def test_invalid_size(self) -> None:
        with patch("app.bench.logger", MagicMock()):
            with self.assertRaises(ValueError):
                double_cycle_split(0)


class TestRunCell(unittest.TestCase):
    """Statistics over every costed triple of each cell."""

    def test_linear_closure(self) -> None:
        """q1 on an n-cycle: n^2 + n triples, costs summing to n^2 (n+1) / 2 + n."""
        record = run_cell(1, "q1", 20)
        self.assertEqual((record.nodes, record.edges, record.nonterminals), (20, 20, 2))
        self.assertEqual((record.paths, record.max, record.output), (420, 20, 4220))
        self.assertEqual(record.path_length, 20)

    def test_ambiguous_closure(self) -> None:
        record = run_cell(1, "q2", 12)
        self.assertEqual((record.nonterminals, record.paths, record.max, record.output), (1, 144, 12, 936))
        self.assertEqual(record.path_length, 12)

    def test_finite_language(self) -> None:
        record = run_cell(2, "sss", 250)
        self.assertEqual((record.paths, record.max, record.output), (750, 3, 1500))
        self.assertEqual(record.path_length, 3)

    def test_double_cycle_small(self) -> None:
        record = run_cell(3, "matched", 4)
        self.assertEqual((record.nodes, record.edges, record.nonterminals), (4, 5, 4))
        self.assertEqual(record.path_length, 12)

    def test_double_cycle_full_size(self) -> None:
        """The longest path on 250 nodes reads 15750 s1 labels, then 15750 s2 labels."""
        record = run_cell(3, "matched", 250)
        self.assertEqual((record.nodes, record.edges, record.nonterminals), (250, 251, 4))
        self.assertEqual((record.paths, record.max), (31751, 31501))
        self.assertEqual(record.path_length, 31500)
        self.assertGreater(record.minimize_ns, 0)

    @unittest.skipUnless(SLOW, "set CFPQ_SLOW_TESTS to run full-size cycle cells")
    def test_closures_full_size(self) -> None:
        q1 = run_cell(1, "q1", 250)
        self.assertEqual((q1.paths, q1.max, q1.output), (62750, 250, 7844000))
        q2 = run_cell(1, "q2", 125)
        self.assertEqual((q2.paths, q2.output), (15625, 984375))

    @unittest.skipUnless(SLOW, "set CFPQ_SLOW_TESTS to run full-size cycle cells")
    def test_linear_grammar_minimizes_faster(self) -> None:
        q1 = run_cell(1, "q1", 375)
        q2 = run_cell(1, "q2", 375)
        self.assertLess(q1.minimize_ns, q2.minimize_ns)

    def test_closures_have_the_same_costs(self) -> None:
        """q1 and q2 describe the same language, so every pair costs the same under both."""
        (g1, start1), (g2, start2) = preset_grammar("q1"), preset_grammar("q2")
        for size in range(1, 11):
            with self.subTest(size=size):
                graph = bench_graph(1, size)
                costs = minimize_annotated(g1, graph).pairs(start1)
                self.assertEqual(len(costs), size * size)
                self.assertEqual(minimize_annotated(g2, graph).pairs(start2), costs)


class TestRunTest(unittest.TestCase):
    def test_cell_order(self) -> None:
        records = run_test(BenchSettings(test=2, sizes=[5, 3]))
        self.assertEqual([(r.nodes, r.query) for r in records], [(5, "q1"), (5, "sss"), (3, "q1"), (3, "sss")])
        self.assertEqual(BENCH_QUERIES[2], ("q1", "sss"))

    def test_workers_give_the_same_records(self) -> None:
        settings = BenchSettings(test=1, sizes=[4, 6])
        serial = run_test(settings)
        parallel = run_test(BenchSettings(test=1, sizes=[4, 6], jobs=2))
        self.assertEqual(without_times(parallel), without_times(serial))

    def test_tsv_header(self) -> None:
        lines = records_tsv(run_test(BenchSettings(test=3, sizes=[4]))).splitlines()
        self.assertEqual(
            lines[0],
            "test\tquery\tnodes\tedges\tnonterminals\toutput\tmax\tpaths\tminimize_ns\tproduce_ns\tpath_length",
        )
        self.assertEqual(len(lines), 2)
        self.assertTrue(lines[1].startswith("3\tmatched\t4\t5\t4\t"))


if __name__ == "__main__":
    unittest.main()
