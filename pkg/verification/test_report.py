"""
Unit tests for verification reports.
"""

import logging
import os
import sys
import tempfile
import unittest
from fractions import Fraction

# Add parent directory to path to enable imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cyclo.number import CycNum
from verification.report import (BUDGET, FAIL, PASS, CaseRecord, Report, failing_ids,
                                 load_report, to_jsonable)


def record(case_id, status=PASS, seconds=0.1, suite="zw"):
    return CaseRecord(case_id, suite, {"p": 3}, status, "1", "1", "", seconds)


class TestReport(unittest.TestCase):
    """Test cases for Report."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Status Tests ====================

    def test_empty_report(self):
        """Test that no cases is a pass with exit code 0."""
        report = Report({"primes": []})
        self.assertTrue(report.passed)
        self.assertEqual(report.exit_code, 0)
        self.assertEqual(report.summary(), {})
        self.assertIn("No cases.", report.format_text())

    def test_failure_sets_exit_code(self):
        """Test that one mismatch gives exit code 1 and is listed."""
        report = Report({}, [record("zw/b"), record("zw/a", FAIL)])
        self.assertEqual(report.exit_code, 1)
        self.assertIn("[fail] zw/a", report.format_text())

    def test_budget_is_not_a_failure(self):
        """Test that budget skips keep the run green."""
        report = Report({}, [record("zw/a", BUDGET)])
        self.assertTrue(report.passed)
        self.assertEqual(report.counts()["zw"][BUDGET], 1)

    def test_records_sorted(self):
        """Test assembly order does not matter."""
        report = Report({}, [record("zw/c"), record("gauss-norm/a", suite="gauss-norm"),
                             record("zw/a")])
        self.assertEqual([r.case_id for r in report.records], ["gauss-norm/a", "zw/a", "zw/c"])

    # ==================== Summary Tests ====================

    def test_timing_summary(self):
        """Test mean, max and p90 per suite."""
        report = Report({}, [record(f"zw/{i}", seconds=float(i)) for i in range(1, 11)])
        summary = report.summary()["zw"]
        self.assertEqual(summary["cases"], 10)
        self.assertAlmostEqual(summary["mean_seconds"], 5.5)
        self.assertAlmostEqual(summary["max_seconds"], 10.0)
        self.assertAlmostEqual(summary["p90_seconds"], 9.1)

    def test_digest_ignores_timing(self):
        """Test that two runs differing only in timings hash equally."""
        fast = Report({"primes": [3]}, [record("zw/a", seconds=0.01)])
        slow = Report({"primes": [3]}, [record("zw/a", seconds=5.0)])
        self.assertEqual(fast.digest(), slow.digest())
        self.assertNotEqual(fast.digest(), Report({"primes": [5]}, fast.records).digest())

    # ==================== Output Tests ====================

    def test_write_and_load(self):
        """Test the JSON file carries metadata, the hash and the failing ids."""
        report = Report({"primes": [3]}, [record("zw/a"), record("zw/b", FAIL)])
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "nested", "report.json")
            report.write(path)
            data = load_report(path)
        self.assertEqual(data["sha256"], report.digest())
        self.assertIn("version", data["artifact"])
        self.assertEqual(data["spec"], {"primes": [3]})
        self.assertEqual(failing_ids(data), ["zw/b"])

    def test_to_jsonable(self):
        """Test CycNum and Fraction conversion inside containers."""
        value = to_jsonable({"x": [CycNum.zeta(4), Fraction(1, 3)], 2: None})
        self.assertEqual(value["x"][0], CycNum.zeta(4).to_json())
        self.assertEqual(value["x"][1], "1/3")
        self.assertIsNone(value["2"])


if __name__ == '__main__':
    unittest.main(verbosity=2)
