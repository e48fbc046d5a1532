"""
Unit tests for ReducedQExpansion, geometric tails and the norm.
"""

import logging
import math
import os
import sys
import unittest
from fractions import Fraction

# Add parent directory to path to enable imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cyclo.number import CycNum
from qexp.expansion import (CentralCharacter, GeometricTail, ReducedQExpansion, qexp_norm,
                            split_index)


class TestReducedQExpansion(unittest.TestCase):
    """Test cases for ReducedQExpansion construction and arithmetic."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Index Tests ====================

    def test_split_index(self):
        """Test a = a0 p^s with a0 prime to p."""
        self.assertEqual(split_index(Fraction(18, 5), 3), (Fraction(2, 5), 2))
        self.assertEqual(split_index(Fraction(1, 9), 3), (Fraction(1), -2))
        with self.assertRaises(ValueError):
            split_index(Fraction(-1), 3)

    def test_invalid_arguments(self):
        """Test the checks on p, the level and the character."""
        with self.assertRaises(ValueError):
            ReducedQExpansion(4)
        with self.assertRaises(ValueError):
            ReducedQExpansion(3, level=6)
        with self.assertRaises(ValueError):
            CentralCharacter({4: -1})
        with self.assertRaises(ValueError):
            ReducedQExpansion(3, tails={3: GeometricTail(0, ((1, 1),))})

    def test_zero_coefficients_dropped(self):
        """Test that zero values are never stored."""
        W = ReducedQExpansion(3, {1: 0, 2: 1}, {"0": 0})
        self.assertEqual(list(W.coefficients), [Fraction(2)])
        self.assertEqual(W.constant_terms, {})

    # ==================== Tail Tests ====================

    def test_tail_values(self):
        """Test the comb W_{3^s} = (-1)^s read through coefficient()."""
        W = ReducedQExpansion.geometric_line(3, 1, [(1, -1)])
        self.assertEqual([W.coefficient(3 ** s) for s in range(4)], [1, -1, 1, -1])
        self.assertEqual(W.coefficient(Fraction(1, 3)), 0)
        self.assertEqual(W.coefficient(2), 0)

    def test_equal_ratios_merge(self):
        """Test that components with the same ratio are combined."""
        tail = GeometricTail(0, ((1, 2), (3, 2), (1, 5), (-1, 5)))
        self.assertEqual(tail.components, ((CycNum(4), CycNum(2)),))

    def test_representations_compare_equal(self):
        """Test a tail against the same family split into a head and a later tail."""
        W = ReducedQExpansion.geometric_line(3, 1, [(1, 2)])
        V = ReducedQExpansion(3, {1: 1}, tails={1: GeometricTail(1, ((2, 2),))})
        self.assertEqual(W, V)
        self.assertNotEqual(W, ReducedQExpansion.geometric_line(3, 1, [(1, 2)], start=1))

    def test_explicit_value_on_tail(self):
        """Test that an explicit coefficient on a tailed line adds to the tail."""
        W = ReducedQExpansion.delta(3, 9) + ReducedQExpansion.geometric_line(3, 1, [(1, -1)])
        self.assertEqual(W.coefficient(9), 2)
        self.assertEqual(W.coefficient(27), -1)
        self.assertEqual(W.coefficient(1), 1)

    def test_linear_structure(self):
        """Test that W - W = 0 and scaling multiplies every coefficient."""
        W = ReducedQExpansion(5, {1: 1, Fraction(2, 5): Fraction(1, 3)}, {"0": 2},
                              tails={3: GeometricTail(1, ((1, 5),))})
        self.assertTrue((W - W).is_zero())
        doubled = 2 * W
        self.assertEqual(doubled.coefficient(75), 10)
        self.assertEqual(doubled.constant_term(), 4)

    def test_window(self):
        """Test the window of a tailed line with a head below the start."""
        W = ReducedQExpansion(3, {Fraction(1, 3): 5}, tails={1: GeometricTail(1, ((1, 3),))})
        self.assertEqual(W.window(), [Fraction(1, 3), Fraction(1), Fraction(3)])

    # ==================== Serialization Tests ====================

    def test_json_is_byte_stable(self):
        """Test that dumping a loaded expansion reproduces the same text."""
        omega = CentralCharacter({3: CycNum.zeta(4), 5: -1})
        W = ReducedQExpansion(3, {Fraction(7, 2): Fraction(-2, 9), 1: CycNum.zeta(3)},
                              {"0": 1, "c1": Fraction(1, 2)}, level=5, omega=omega,
                              tails={2: GeometricTail(0, ((1, CycNum.zeta(3)), (1, 3)))})
        text = W.dumps()
        again = ReducedQExpansion.loads(text)
        self.assertEqual(again.dumps(), text)
        self.assertEqual(again, W)


class TestQExpNorm(unittest.TestCase):
    """Test cases for qexp_norm."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Finite Tests ====================

    def test_zero(self):
        """Test ||0|| = 0."""
        self.assertEqual(qexp_norm(ReducedQExpansion.zero(3)), 0)

    def test_single_coefficient(self):
        """Test ||p^2|| = p^-2."""
        self.assertEqual(qexp_norm(ReducedQExpansion.delta(3, 5, 9)), Fraction(1, 9))

    def test_sup(self):
        """Test that {1, 1/p} has norm p."""
        W = ReducedQExpansion(3, {1: 1, 2: Fraction(1, 3)})
        self.assertEqual(qexp_norm(W), 3)

    def test_constant_term_counts(self):
        """Test that W_0 enters the sup."""
        W = ReducedQExpansion(3, {1: 9}, {"0": Fraction(1, 3)})
        self.assertEqual(qexp_norm(W), 3)

    # ==================== Tail Tests ====================

    def test_root_of_unity_comb(self):
        """Test that a comb of cube roots of unity has norm 1."""
        W = ReducedQExpansion.geometric_line(3, 1, [(1, CycNum.zeta(3))])
        self.assertEqual(qexp_norm(W), 1)

    def test_contracting_tail(self):
        """Test that the head of a contracting tail carries the sup."""
        W = ReducedQExpansion.geometric_line(3, 1, [(3, 3)])
        self.assertEqual(qexp_norm(W), Fraction(1, 3))

    def test_cancelling_head(self):
        """Test 1 - 3^s: zero at s = 0, unit afterwards."""
        W = ReducedQExpansion.geometric_line(3, 1, [(1, 1), (-1, 3)])
        self.assertEqual(qexp_norm(W), 1)

    def test_growing_tail(self):
        """Test that ratio 1/p gives an unbounded family."""
        W = ReducedQExpansion.geometric_line(3, 1, [(1, Fraction(1, 3))])
        self.assertEqual(qexp_norm(W), math.inf)


if __name__ == '__main__':
    unittest.main(verbosity=2)
