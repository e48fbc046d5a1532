"""
Unit tests for LocalDatum and the Hilbert symbol.
"""

import logging
import os
import sys
import unittest
from fractions import Fraction

# Add parent directory to path to enable imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from local.datum import LocalDatum, SIDE_E, SIDE_F, hilbert_symbol, is_local_norm


class TestLocalDatum(unittest.TestCase):
    """Test cases for LocalDatum invariants and unit arithmetic."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Invariant Tests ====================

    def test_residue_invariants(self):
        """Test f, e, q_w and v(D) for the three types."""
        split = LocalDatum(5, LocalDatum.SPLIT)
        inert = LocalDatum(5, LocalDatum.INERT)
        ram = LocalDatum(5, LocalDatum.RAMIFIED)
        self.assertEqual((split.f, split.e, split.q_w, split.v_of_D), (1, 1, 5, 0))
        self.assertEqual((inert.f, inert.e, inert.q_w, inert.v_of_D), (2, 1, 25, 0))
        self.assertEqual((ram.f, ram.e, ram.q_w, ram.v_of_D), (1, 2, 5, 1))
        for d in (split, inert, ram):
            self.assertLessEqual(d.f * d.e, 2)
            self.assertEqual(d.v_of_d, 0)

    def test_invalid_data_rejected(self):
        """Test that composite p, p = 2 ramified and bad types are rejected."""
        with self.assertRaises(ValueError):
            LocalDatum(9, LocalDatum.SPLIT)
        with self.assertRaises(ValueError):
            LocalDatum(2, LocalDatum.RAMIFIED)
        with self.assertRaises(ValueError):
            LocalDatum(3, "biquadratic")
        with self.assertRaises(ValueError):
            LocalDatum(5, LocalDatum.RAMIFIED, ram_unit=10)

    def test_defining_equation(self):
        """Test theta^2 = s + t*theta through unit multiplication."""
        inert = LocalDatum(3, LocalDatum.INERT)
        self.assertEqual(inert.s, 2)
        self.assertEqual(inert.mul_units(SIDE_E, (0, 1), (0, 1), 3), (2, 0))
        cubic = LocalDatum(2, LocalDatum.INERT)
        # theta is a primitive cube root of unity
        self.assertEqual(cubic.pow_unit(SIDE_E, (0, 1), 3, 4), (1, 0))

    def test_norm_form_multiplicative(self):
        """Test N(uv) = N(u)N(v) modulo p^N on inert units."""
        d = LocalDatum(7, LocalDatum.INERT)
        N = 2
        mod = 7 ** N
        for u in [(1, 2), (3, 5), (6, 1)]:
            for v in [(2, 3), (4, 0), (0, 1)]:
                uv = d.mul_units(SIDE_E, u, v, N)
                self.assertEqual(d.norm_form(*uv) % mod,
                                 d.norm_form(*u) * d.norm_form(*v) % mod)

    def test_ramified_moduli(self):
        """Test the (x, y) moduli of ramified E-units."""
        d = LocalDatum(3, LocalDatum.RAMIFIED)
        self.assertEqual(d.e_moduli(3), (9, 3))
        self.assertEqual(d.e_moduli(4), (9, 9))
        self.assertEqual(d.unit_count(SIDE_E, 3), 2 * 9)
        self.assertEqual(d.unit_count(SIDE_F, 0), 1)

    def test_uniformizer_power(self):
        """Test theta^k for ramified E and p^k otherwise."""
        d = LocalDatum(5, LocalDatum.RAMIFIED, ram_unit=2)
        self.assertEqual(d.uniformizer_power(2), (Fraction(10), Fraction(0)))
        self.assertEqual(d.uniformizer_power(3), (Fraction(0), Fraction(10)))
        self.assertEqual(d.uniformizer_power(-1), (Fraction(0), Fraction(1, 10)))
        self.assertEqual(LocalDatum(3, LocalDatum.INERT).uniformizer_power(-2),
                         (Fraction(1, 9), Fraction(0)))

    def test_dict_round_trip(self):
        """Test to_dict and from_dict."""
        d = LocalDatum(7, LocalDatum.RAMIFIED, ram_unit=3)
        self.assertEqual(LocalDatum.from_dict(d.to_dict()), d)
        self.assertEqual(str(d), "Q_7/ramified")


class TestHilbertSymbol(unittest.TestCase):
    """Test cases for the Hilbert symbol and local norms."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Symbol Tests ====================

    def test_known_values(self):
        """Test a few classical values."""
        self.assertEqual(hilbert_symbol(3, -1, 3), -1)
        self.assertEqual(hilbert_symbol(-1, -1, 2), -1)
        self.assertEqual(hilbert_symbol(-1, -1, "inf"), -1)
        self.assertEqual(hilbert_symbol(2, 3, "inf"), 1)
        self.assertEqual(hilbert_symbol(2, 7, 2), 1)
        self.assertEqual(hilbert_symbol(Fraction(1, 4), 5, 5), 1)

    def test_symbol_is_plain_int(self):
        """Test that odd-prime symbols come back as Python ints."""
        for a, b, p in [(3, -1, 3), (5, 2, 5), (7, 3, 7), (2, 5, 5)]:
            self.assertIs(type(hilbert_symbol(a, b, p)), int)

    def test_zero_rejected(self):
        """Test that zero arguments raise ValueError."""
        with self.assertRaises(ValueError):
            hilbert_symbol(0, 3, 3)

    def test_product_formula(self):
        """Test prod_v (a, b)_v = 1 over all places for several pairs."""
        pairs = [(3, -1), (2, 5), (-3, 7), (6, -10), (Fraction(5, 3), -2), (-1, -1)]
        for a, b in pairs:
            places = {2, 3, 5, 7}
            for x in (a, b):
                x = Fraction(x)
                for n in (x.numerator, x.denominator):
                    n = abs(n)
                    ell = 2
                    while n > 1:
                        if n % ell == 0:
                            places.add(ell)
                            n //= ell
                        else:
                            ell += 1
            product = hilbert_symbol(a, b, "inf")
            for ell in places:
                product *= hilbert_symbol(a, b, ell)
            self.assertEqual(product, 1, msg=f"a={a}, b={b}")

    def test_local_norms(self):
        """Test norms from unramified and ramified extensions."""
        inert = LocalDatum(3, LocalDatum.INERT)
        self.assertTrue(is_local_norm(2, inert))
        self.assertFalse(is_local_norm(3, inert))
        self.assertTrue(is_local_norm(9, inert))
        self.assertTrue(is_local_norm(7, LocalDatum(5, LocalDatum.SPLIT)))
        ram = LocalDatum(5, LocalDatum.RAMIFIED)
        self.assertFalse(is_local_norm(2, ram))
        self.assertTrue(is_local_norm(-5, ram))


if __name__ == '__main__':
    unittest.main(verbosity=2)
