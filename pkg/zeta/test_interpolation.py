"""
Unit tests for the interpolation factor and the R-circ product formula.
"""

import logging
import os
import sys
import unittest
from fractions import Fraction

# Add parent directory to path to enable imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cyclo.number import CycNum
from local.characters import MulChar, quadratic_character
from local.cosets import AddChar
from local.datum import LocalDatum, SIDE_E
from local.euler import PoleAtEvaluationPoint
from zeta.basic_integral import ZwInput, zw_closed
from zeta.interpolation import (InconsistentCentralCharacter, R_circ_product,
                                interpolation_factor_Zv, l_half, satake_from_characters)


class TestRCircProduct(unittest.TestCase):
    """Test cases for R_circ_product."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)
        self.d3 = LocalDatum(3, "split")
        self.d5 = LocalDatum(5, "split")

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Product Tests ====================

    def test_split_minus_one(self):
        """Test alpha chi_w(varpi) = -1 on both components over Q_3 gives 27/8."""
        minus = MulChar.unramified(self.d3, -1)
        value = R_circ_product(self.d3, MulChar.trivial(self.d3), [minus, minus], AddChar(3))
        self.assertEqual(value, Fraction(27, 8))

    def test_exceptional(self):
        """Test that an exceptional component gives 0."""
        trivial = MulChar.trivial(self.d3)
        minus = MulChar.unramified(self.d3, -1)
        self.assertEqual(R_circ_product(self.d3, trivial, [trivial, minus], AddChar(3)), 0)

    def test_two_gauss_sums(self):
        """Test two quadratic components over Q_5: L(1, eta) tau^2 = 25/4."""
        chi = quadratic_character(self.d5)
        value = R_circ_product(self.d5, MulChar.trivial(self.d5), [chi, chi], AddChar(5))
        self.assertEqual(value, Fraction(25, 4))

    def test_one_ramified_component(self):
        """Test the mixed product L(1, eta) Z_w,unram tau."""
        chi = quadratic_character(self.d5)
        minus = MulChar.unramified(self.d5, -1)
        alpha = MulChar.trivial(self.d5)
        psi = AddChar(5)
        value = R_circ_product(self.d5, alpha, [minus, chi], psi)
        unram = zw_closed(ZwInput(self.d5, alpha, minus, psi))
        self.assertEqual(unram, Fraction(5, 3))
        self.assertEqual(value, Fraction(5, 4) * unram * CycNum.sqrt(5))

    def test_wrong_number_of_components(self):
        """Test that a split place needs two characters."""
        with self.assertRaises(ValueError):
            R_circ_product(self.d3, MulChar.trivial(self.d3), [MulChar.trivial(self.d3)],
                           AddChar(3))


class TestInterpolationFactor(unittest.TestCase):
    """Test cases for interpolation_factor_Zv."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)
        self.d3 = LocalDatum(3, "split")

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Assembly Tests ====================

    def test_satake_parameters(self):
        """Test the unitary Satake parameters alpha p^(-1/2), beta p^(-1/2)."""
        g1, g2 = satake_from_characters(-1, 2, 3)
        self.assertEqual(g1 * g1, Fraction(1, 3))
        self.assertEqual(g2 * g2, Fraction(4, 3))

    def test_exceptional_is_zero(self):
        """Test that an exceptional character gives Z_v = 0."""
        trivial = MulChar.trivial(self.d3)
        result = interpolation_factor_Zv(self.d3, trivial, [trivial, trivial], AddChar(3),
                                         satake_from_characters(-1, 1, 3))
        self.assertEqual(result.value, 0)

    def test_split_unramified_value(self):
        """Test the assembled product for an unramified split tuple."""
        minus = MulChar.unramified(self.d3, -1)
        satake = satake_from_characters(1, -1, 3)
        result = interpolation_factor_Zv(self.d3, MulChar.trivial(self.d3), [minus, minus],
                                         AddChar(3), satake)
        # L(1/2) = prod over two w and gamma in {1, -1}/sqrt 3 of (1 -/+ (-1)/3)^-1
        expected_half = (Fraction(3, 4) * Fraction(3, 2)) ** 2
        self.assertEqual(result.l_half, expected_half)
        self.assertEqual(result.value, Fraction(9, 8) * Fraction(3, 2) ** 2 / expected_half
                         * Fraction(9, 4))
        self.assertEqual(set(result.to_dict()), {"zw_values", "zeta_F(2)", "L(1,eta)", "L(1/2)",
                                                 "value", "display"})

    def test_inert_unramified_is_rational(self):
        """Test that the inert unramified factor lies in Q."""
        d = LocalDatum(3, "inert")
        chi = MulChar.unramified(d, -1, side=SIDE_E)
        result = interpolation_factor_Zv(d, MulChar.trivial(d), [chi], AddChar(3),
                                         satake_from_characters(1, 1, 3))
        self.assertTrue(result.value.is_rational())
        self.assertNotEqual(result.value, 0)

    def test_central_character_check(self):
        """Test the chi'|F^x = omega^-1 consistency check."""
        d = LocalDatum(5, "split")
        chi = quadratic_character(d)
        alpha = MulChar.trivial(d)
        satake = satake_from_characters(1, 1, 5)
        interpolation_factor_Zv(d, alpha, [chi, chi], AddChar(5), satake, omega=MulChar.trivial(d))
        with self.assertRaises(InconsistentCentralCharacter):
            interpolation_factor_Zv(d, alpha, [chi, MulChar.trivial(d)], AddChar(5), satake,
                                    omega=MulChar.trivial(d))

    def test_l_half_pole(self):
        """Test that a pole of L(1/2) is reported."""
        minus = MulChar.unramified(self.d3, -1)
        # gamma chi(varpi) q^(-1/2) = 1 for gamma = -sqrt 3
        satake = satake_from_characters(-3, 1, 3)
        with self.assertRaises(PoleAtEvaluationPoint):
            l_half(self.d3, [minus, minus], satake)


if __name__ == '__main__':
    unittest.main(verbosity=2)
