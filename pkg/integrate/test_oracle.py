"""
Unit tests for the brute-force integration oracle.
"""

import logging
import os
import random
import sys
import unittest
from fractions import Fraction

# Add parent directory to path to enable imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cyclo.number import CycNum
from integrate.oracle import (BudgetExceeded, IntegrandSpec, RatioOne, TailContractViolation,
                              annulus_values, integrate_annuli, integrate_with_tail,
                              tail_truncation_error, verify_local_constancy)
from local.characters import enumerate_characters, eval_mul, quadratic_character
from local.cosets import ADDITIVE, AddChar, MULTIPLICATIVE, PAdicCoset, eval_add
from local.datum import LocalDatum, SIDE_F


def geometric_integrand(ratio):
    """Integrand equal to ratio^v(t)."""
    return lambda x: Fraction(ratio) ** x.valuation


class TestIntegrateAnnuli(unittest.TestCase):
    """Test cases for finite annulus sums."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)
        self.d5 = LocalDatum(5, "split")
        self.d3 = LocalDatum(3, "split")

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Value Tests ====================

    def test_volume_of_units(self):
        """Test vol(Z_p^x, d^x t) = 1."""
        spec = IntegrandSpec(lambda x: 1, 1, SIDE_F, MULTIPLICATIVE, self.d5)
        self.assertEqual(integrate_annuli(spec, 0, 0), 1)

    def test_additive_character_one_over_five(self):
        """Test the d^x integral of psi_1 over 5^-1 Z_5^x is -1/4."""
        psi = AddChar(5)
        spec = IntegrandSpec(lambda x: eval_add(psi, x), 1, SIDE_F, MULTIPLICATIVE, self.d5)
        self.assertEqual(integrate_annuli(spec, -1, -1), Fraction(-1, 4))

    def test_primitive_sum_vanishes(self):
        """Test the d^x integral of psi_1 over 3^-2 Z_3^x is 0."""
        psi = AddChar(3)
        spec = IntegrandSpec(lambda x: eval_add(psi, x), 2, SIDE_F, MULTIPLICATIVE, self.d3)
        self.assertEqual(integrate_annuli(spec, -2, -2), 0)

    def test_additivity(self):
        """Test [a, b] + (b, c] = [a, c]."""
        psi = AddChar(5)
        chi = quadratic_character(self.d5)
        spec = IntegrandSpec(lambda x: eval_add(psi, x) * eval_mul(chi, x), 1, SIDE_F,
                             MULTIPLICATIVE, self.d5, additive_depth=0)
        whole = integrate_annuli(spec, -3, 2)
        self.assertEqual(integrate_annuli(spec, -3, 0) + integrate_annuli(spec, 1, 2), whole)
        self.assertEqual(sum(annulus_values(spec, -3, 2).values(), CycNum(0)), whole)

    def test_measure_normalizations(self):
        """Test that additive and d^x results differ by |varpi|^n (1 - 1/q)."""
        chi = quadratic_character(self.d5)
        for n in (-1, 0, 2):
            mult = IntegrandSpec(lambda x: 1 + eval_mul(chi, x), 1, SIDE_F, MULTIPLICATIVE, self.d5)
            add = IntegrandSpec(lambda x: 1 + eval_mul(chi, x), 1, SIDE_F, ADDITIVE, self.d5)
            self.assertEqual(integrate_annuli(add, n, n),
                             integrate_annuli(mult, n, n) * Fraction(5) ** (-n) * Fraction(4, 5))

    def test_budget(self):
        """Test that exceeding the coset budget raises BudgetExceeded."""
        spec = IntegrandSpec(lambda x: 1, 1, SIDE_F, MULTIPLICATIVE, self.d5, max_cosets=3)
        with self.assertRaises(BudgetExceeded):
            integrate_annuli(spec, 0, 0)

    def test_bad_range(self):
        """Test that n_min > n_max is rejected."""
        spec = IntegrandSpec(lambda x: 1, 1, SIDE_F, MULTIPLICATIVE, self.d5)
        with self.assertRaises(ValueError):
            integrate_annuli(spec, 2, 1)


class TestIntegrateWithTail(unittest.TestCase):
    """Test cases for geometric tails."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)
        self.d3 = LocalDatum(3, "split")

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Tail Tests ====================

    def test_ratio_one_ninth(self):
        """Test c = 1, r = 1/9 gives 9/8."""
        spec = IntegrandSpec(geometric_integrand(Fraction(1, 9)), 1, SIDE_F, MULTIPLICATIVE, self.d3)
        self.assertEqual(integrate_with_tail(spec, 0, 0, Fraction(1, 9), "unramified"),
                         Fraction(9, 8))

    def test_ratio_minus_one_third(self):
        """Test c = 1, r = -1/3 gives 3/4."""
        spec = IntegrandSpec(geometric_integrand(Fraction(-1, 3)), 1, SIDE_F, MULTIPLICATIVE, self.d3)
        self.assertEqual(integrate_with_tail(spec, 0, 0, Fraction(-1, 3)), Fraction(3, 4))

    def test_finite_part_plus_tail(self):
        """Test a finite part below tail_start."""
        spec = IntegrandSpec(geometric_integrand(Fraction(1, 9)), 1, SIDE_F, MULTIPLICATIVE, self.d3)
        # 81 + 9 + 9/8
        self.assertEqual(integrate_with_tail(spec, -2, 0, Fraction(1, 9)), Fraction(729, 8))

    def test_budget_covers_whole_call(self):
        """Test that the finite part, tail annulus and spot check share one coset budget."""
        tight = IntegrandSpec(geometric_integrand(Fraction(1, 9)), 1, SIDE_F, MULTIPLICATIVE,
                              self.d3, max_cosets=7)
        with self.assertRaises(BudgetExceeded):
            integrate_with_tail(tight, -2, 0, Fraction(1, 9), spot_check=True)
        enough = IntegrandSpec(geometric_integrand(Fraction(1, 9)), 1, SIDE_F, MULTIPLICATIVE,
                               self.d3, max_cosets=8)
        self.assertEqual(integrate_with_tail(enough, -2, 0, Fraction(1, 9), spot_check=True),
                         Fraction(729, 8))
        self.assertEqual(integrate_with_tail(tight, -2, 0, Fraction(1, 9), spot_check=False),
                         Fraction(729, 8))

    def test_vanishing_tail(self):
        """Test that a zero tail leaves the finite sum (even with ratio 1)."""
        spec = IntegrandSpec(lambda x: 1 if x.valuation < 2 else 0, 1, SIDE_F,
                             MULTIPLICATIVE, self.d3)
        self.assertEqual(integrate_with_tail(spec, 0, 2, 1), 2)

    def test_ratio_one(self):
        """Test that ratio 1 with a nonzero constant raises RatioOne."""
        spec = IntegrandSpec(lambda x: 1, 1, SIDE_F, MULTIPLICATIVE, self.d3)
        with self.assertRaises(RatioOne):
            integrate_with_tail(spec, 0, 0, 1)

    def test_contract_violation(self):
        """Test that a wrong declared ratio is caught by the spot check."""
        spec = IntegrandSpec(geometric_integrand(Fraction(1, 9)), 1, SIDE_F, MULTIPLICATIVE, self.d3)
        with self.assertRaises(TailContractViolation):
            integrate_with_tail(spec, 0, 0, Fraction(1, 3), spot_check=True)
        self.assertEqual(integrate_with_tail(spec, 0, 0, Fraction(1, 3), spot_check=False),
                         Fraction(3, 2))

    def test_truncation_error(self):
        """Test the archimedean truncation check on random (c, r)."""
        rng = random.Random(3)
        for _ in range(20):
            c = CycNum.root_of_unity(Fraction(rng.randint(0, 11), 12), rng.randint(1, 5))
            r = CycNum.root_of_unity(Fraction(rng.randint(0, 11), 12), Fraction(1, rng.randint(3, 9)))
            self.assertLess(tail_truncation_error(c, r), 1e-12)


class TestLocalConstancy(unittest.TestCase):
    """Test cases for verify_local_constancy."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)
        self.d5 = LocalDatum(5, "split")

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Aliasing Tests ====================

    def test_conductor_one_at_precision_one(self):
        """Test that chi of conductor 1 declared at N = 1 passes."""
        chi = quadratic_character(self.d5)
        spec = IntegrandSpec(lambda x: eval_mul(chi, x), 1, SIDE_F, MULTIPLICATIVE, self.d5)
        self.assertTrue(verify_local_constancy(spec, valuations=(-1, 0, 1)))

    def test_conductor_two_at_precision_one(self):
        """Test that chi of conductor 2 declared at N = 1 is detected."""
        chi = enumerate_characters(self.d5, SIDE_F, 2)[0]
        spec = IntegrandSpec(lambda x: eval_mul(chi, x), 1, SIDE_F, MULTIPLICATIVE, self.d5)
        self.assertFalse(verify_local_constancy(spec))

    def test_conductor_two_with_careless_evaluator(self):
        """Test aliasing detection for an evaluator that ignores the declared precision."""
        chi = enumerate_characters(self.d5, SIDE_F, 2)[0]

        def careless(x):
            # reads the representative as if it were exact
            return chi.unit_value(x.unit) if x.precision >= 1 else CycNum(1)
        spec = IntegrandSpec(careless, 1, SIDE_F, MULTIPLICATIVE, self.d5)
        self.assertFalse(verify_local_constancy(spec, samples=10))

    def test_psi_of_inverse(self):
        """Test psi(1/t) on the annulus n = -2 at N = 2."""
        psi = AddChar(5)

        def evaluator(x):
            inverse = PAdicCoset(self.d5, SIDE_F, -x.valuation,
                                 pow(x.unit, -1, 5 ** x.precision), x.precision)
            return eval_add(psi, inverse)
        spec = IntegrandSpec(evaluator, 2, SIDE_F, MULTIPLICATIVE, self.d5)
        self.assertTrue(verify_local_constancy(spec, valuations=(-2,)))


if __name__ == '__main__':
    unittest.main(verbosity=2)
