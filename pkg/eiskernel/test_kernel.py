"""
Unit tests for kernel coefficient assembly and the incoherence witness.
"""

import logging
import os
import sys
import unittest
from fractions import Fraction

# Add parent directory to path to enable imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from eiskernel.kernel import (BoundTooSmall, INF, MissingLocalDatum, c_U_constant,
                              eisenstein_coefficient, incoherence_witness, kernel_coefficient,
                              kernel_table)
from eiskernel.theta import ThetaLattice


# The dyadic place of Q(i) has no local model; record its value at represented a
DYADIC = {2: Fraction(1)}


class TestIncoherenceWitness(unittest.TestCase):
    """Test cases for incoherence_witness."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)
        self.gauss = ThetaLattice(-4)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Archimedean Flip Tests ====================

    def test_three_is_not_a_norm(self):
        """Test a = 3, u = 1 over Q(i) fails at the inert prime 3."""
        self.assertEqual(incoherence_witness(self.gauss, 3, 1, 10, flip_place=INF), 3)

    def test_norm_everywhere(self):
        """Test a = u: only the archimedean flip fails."""
        self.assertEqual(incoherence_witness(self.gauss, 1, 1, 10, flip_place=INF), INF)
        self.assertEqual(incoherence_witness(self.gauss, 7, 7, 10, flip_place=INF), INF)

    def test_two(self):
        """Test a = 2 is a norm at every finite place of Q(i)."""
        self.assertEqual(incoherence_witness(self.gauss, 2, 1, 10, flip_place=INF), INF)

    # ==================== Finite Flip Tests ====================

    def test_finite_flip(self):
        """Test that flipping at 3 moves the failure of a = 3 to the dyadic place."""
        self.assertEqual(incoherence_witness(self.gauss, 3, 1, 10, flip_place=3), 2)
        self.assertEqual(incoherence_witness(self.gauss, 1, 1, 10, flip_place=3), 3)

    def test_coherent(self):
        """Test that coherent data has no witness for a norm."""
        self.assertIsNone(incoherence_witness(self.gauss, 5, 1, 10, flip_place=None))
        self.assertEqual(incoherence_witness(self.gauss, 3, 1, 10, flip_place=None), 3)

    def test_bound_too_small(self):
        """Test that the bound must cover the primes of a u D."""
        with self.assertRaises(BoundTooSmall):
            incoherence_witness(self.gauss, 13, 1, 10, flip_place=INF)

    def test_split_flip_rejected(self):
        """Test that the flip place must be non-split."""
        with self.assertRaises(ValueError):
            incoherence_witness(self.gauss, 1, 1, 10, flip_place=5)

    def test_zero_rejected(self):
        """Test that a = 0 is refused."""
        with self.assertRaises(ValueError):
            incoherence_witness(self.gauss, 0, 1, 10)


class TestKernelCoefficient(unittest.TestCase):
    """Test cases for kernel_coefficient."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)
        self.gauss = ThetaLattice(-4)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Coherent Tests ====================

    def test_c_U(self):
        """Test c_U = 1/2 for F = Q with [O_F^x : mu^2] = 2."""
        self.assertEqual(c_U_constant(), Fraction(1, 2))
        self.assertEqual(c_U_constant(1), 1)

    def test_eisenstein_coefficients(self):
        """Test E_a(1) for small a over Q(i)."""
        values = [eisenstein_coefficient(self.gauss, DYADIC, a, 1, flip_place=None)
                  for a in range(1, 6)]
        self.assertEqual(values, [2, 2, 0, 2, 4])

    def test_coherent_values(self):
        """Test assembled coefficients for coherent data."""
        self.assertEqual(kernel_coefficient(self.gauss, DYADIC, 1, [1], flip_place=None), 1)
        self.assertEqual(kernel_coefficient(self.gauss, DYADIC, 3, [1], flip_place=None), 8)
        self.assertEqual(kernel_coefficient(self.gauss, DYADIC, 5, [1], flip_place=None), 10)

    def test_character_point(self):
        """Test X_5 = -1 kills the split contribution 1 + X at a = 5."""
        value = kernel_coefficient(self.gauss, DYADIC, 5, [1], chi_point={5: -1},
                                   flip_place=None)
        self.assertEqual(value, 8)

    def test_constant_term_flagged(self):
        """Test that a = 0 is not assembled."""
        self.assertIsNone(kernel_coefficient(self.gauss, DYADIC, 0, [1]))

    def test_missing_local_datum(self):
        """Test that the dyadic place of Q(i) needs a supplied model."""
        with self.assertRaises(MissingLocalDatum):
            kernel_coefficient(self.gauss, {}, 1, [1], flip_place=None)

    # ==================== Incoherent Tests ====================

    def test_incoherent_vanishing(self):
        """Test every coefficient 1 <= a <= 50 vanishes at the trivial character."""
        for a in range(1, 51):
            witness = incoherence_witness(self.gauss, a, 1, 60, flip_place=3)
            self.assertIsInstance(witness, int, f"a={a}")
            self.assertEqual(kernel_coefficient(self.gauss, DYADIC, a, [1], flip_place=3), 0,
                             f"a={a}")

    def test_incoherent_term_vanishes_at_flip(self):
        """Test E_1(1) = 0 through the computed Whittaker value at the flipped place."""
        self.assertEqual(eisenstein_coefficient(self.gauss, DYADIC, 1, 1, flip_place=3), 0)

    def test_fully_computable_field(self):
        """Test Q(sqrt(-7)), where every local model is supported."""
        lat = ThetaLattice(-7)
        for a in range(1, 16):
            self.assertEqual(kernel_coefficient(lat, {}, a, [1], flip_place=3), 0, f"a={a}")
        self.assertNotEqual(kernel_coefficient(lat, {}, 2, [1], flip_place=None), 0)

    def test_kernel_table(self):
        """Test the table rows and their witnesses."""
        rows = kernel_table(self.gauss, DYADIC, [0, 1, 3], [1], flip_place=3, prime_bound=20)
        self.assertEqual(rows[0].to_dict()["display"], "constant term")
        self.assertEqual([row.witness for row in rows], [None, 3, 2])
        self.assertTrue(all(row.value == 0 for row in rows[1:]))


if __name__ == '__main__':
    unittest.main(verbosity=2)
