"""
Unit tests for the verification runner: case enumeration, suites and explain.
"""

import logging
import os
import sys
import unittest

# Add parent directory to path to enable imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import config
from verification.report import BUDGET, PASS
from verification.runner import UnknownCase, build_cases, coset_budget, explain, run_suite
from verification.sweep import SweepSpec


def small_spec(**kwargs):
    """Q_3, unramified characters only, two alpha values and one twist."""
    defaults = {"primes": [3], "quad_types": ["split"], "conductor_max": 0,
                "alpha_values": ["1", "-1"], "psi_twists": [1]}
    defaults.update(kwargs)
    return SweepSpec(**defaults)


class TestCaseEnumeration(unittest.TestCase):
    """Test cases for build_cases."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    def test_zw_count(self):
        """Test split and inert Q_3 with conductor up to 1 give at least 16 cases."""
        cases = build_cases(SweepSpec(primes=[3], suites=["zw"]))
        self.assertGreaterEqual(len(cases), 16)
        ids = [c.case_id for c in cases]
        self.assertEqual(ids, sorted(ids))
        self.assertEqual(len(ids), len(set(ids)))

    def test_empty_primes(self):
        """Test that an empty prime list gives no cases."""
        self.assertEqual(build_cases(SweepSpec(suites=["zw", "qsharp", "qexp-laws"])), [])

    def test_non_unit_alpha_skipped(self):
        """Test alpha = 3 is not a unit at 3."""
        self.assertEqual(build_cases(small_spec(alpha_values=["3"])), [])

    def test_split_only_suites(self):
        """Test that rcirc and qsharp ignore inert places."""
        cases = build_cases(small_spec(quad_types=["inert"], suites=["rcirc", "qsharp"]))
        self.assertEqual(cases, [])

    def test_pairs(self):
        """Test two characters give three unordered pairs per alpha."""
        cases = build_cases(small_spec(suites=["rcirc"]))
        self.assertEqual(len(cases), 6)


class TestSuites(unittest.TestCase):
    """Test cases running each suite on small sweeps."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    def assertAllPass(self, report):
        bad = [(r.case_id, r.status, r.note) for r in report.records if r.status != PASS]
        self.assertEqual(bad, [])
        self.assertEqual(report.exit_code, 0)

    # ==================== Local Integral Tests ====================

    def test_zw_suite(self):
        """Test closed form against the oracle on Q_3 with conductor up to 1."""
        report = run_suite(SweepSpec(primes=[3], suites=["zw"]), threads=2)
        self.assertGreaterEqual(len(report.records), 16)
        self.assertAllPass(report)

    def test_gauss_and_exceptional(self):
        """Test the Gauss sum norms and the exceptional dichotomy over Q_5."""
        spec = SweepSpec(primes=[5], quad_types=["split"], alpha_values=["1", "-1"],
                         suites=["gauss-norm", "exceptional"])
        report = run_suite(spec)
        self.assertIn("gauss-norm", report.counts())
        self.assertAllPass(report)

    def test_toric_suites(self):
        """Test R_circ, Q_sharp and the single-variable toric factors over Q_3."""
        report = run_suite(small_spec(suites=["rcirc", "qsharp", "toric-factor"]))
        self.assertEqual(set(report.counts()), {"rcirc", "qsharp", "toric-factor"})
        self.assertAllPass(report)

    # ==================== Eisenstein Tests ====================

    def test_eisenstein_suites(self):
        """Test the Whittaker dichotomy and the derivative kernel at 3 and 5."""
        spec = SweepSpec(primes=[3, 5], suites=["eis-dichotomy", "dkernel"])
        report = run_suite(spec)
        self.assertEqual(report.counts()["eis-dichotomy"][PASS], 28)
        self.assertEqual(report.counts()["dkernel"][PASS], 12)
        fits = [r for r in report.records if r.case_id.endswith("vol-fit")]
        self.assertEqual(len(fits), 2)
        self.assertTrue(all("fitted vol(E^1) = 1" in r.note for r in fits))
        self.assertAllPass(report)

    def test_kernel_and_theta(self):
        """Test kernel vanishing for a <= 6 and the two theta traversals."""
        spec = SweepSpec(suites=["kernel-vanishing", "theta"], kernel_bound=6, theta_bound=40)
        report = run_suite(spec)
        self.assertEqual(report.counts()["kernel-vanishing"][PASS], 6)
        self.assertEqual(report.counts()["theta"][PASS], 4)
        self.assertAllPass(report)

    def test_qexp_laws(self):
        """Test the randomized q-expansion laws at 3 and 5."""
        report = run_suite(SweepSpec(primes=[3, 5], suites=["qexp-laws"], random_cases=16))
        self.assertEqual(len(report.records), 16)
        self.assertAllPass(report)

    # ==================== Runner Tests ====================

    def test_deterministic(self):
        """Test that two runs hash equally."""
        spec = small_spec(suites=["zw", "qexp-laws"], random_cases=4)
        self.assertEqual(run_suite(spec).digest(), run_suite(spec, threads=1).digest())

    def test_budget(self):
        """Test that a tiny budget marks cases as skipped and is restored afterwards."""
        saved = config.MAX_COSETS_PER_INTEGRAL
        report = run_suite(small_spec(budget=1))
        self.assertTrue(all(r.status == BUDGET for r in report.records))
        self.assertEqual(report.exit_code, 0)
        self.assertEqual(config.MAX_COSETS_PER_INTEGRAL, saved)

    def test_coset_budget_zero(self):
        """Test that budget 0 keeps the configured cap."""
        saved = config.MAX_COSETS_PER_INTEGRAL
        with coset_budget(0):
            self.assertEqual(config.MAX_COSETS_PER_INTEGRAL, saved)


class TestExplain(unittest.TestCase):
    """Test cases for explain."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    def test_zw_case(self):
        """Test the branch formula and the annulus breakdown."""
        text = explain("zw/p3-split/chi=unr(-1)/alpha=1/psi=1", small_spec())
        self.assertIn("unramified branch", text)
        self.assertIn("oracle annuli:", text)
        self.assertIn("status: pass", text)

    def test_qsharp_case(self):
        """Test that every Iwahori term is listed."""
        spec = small_spec(suites=["qsharp"])
        text = explain("qsharp/p3-split/chi=unr(-1),unr(-1)/alpha=1/psi=1", spec)
        self.assertIn("Q(1,1) =", text)
        self.assertIn("Q(2,8) =", text)
        self.assertIn("R_circ_product = 27/8", text)

    def test_unknown_case(self):
        """Test that ids outside the sweep are rejected."""
        with self.assertRaises(UnknownCase):
            explain("zw/p7-split/chi=1/alpha=1/psi=1", small_spec())


if __name__ == '__main__':
    unittest.main(verbosity=2)
