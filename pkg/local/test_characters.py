"""
Unit tests for multiplicative characters and the quadratic character eta.
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
from local.characters import (MulChar, compose_norm, enumerate_characters, eta_character,
                              eta_value, eval_mul, norm_coset, quadratic_character)
from local.cosets import InsufficientPrecision, PAdicCoset, unit_group
from local.datum import LocalDatum, SIDE_E, SIDE_F, is_local_norm


class TestMulChar(unittest.TestCase):
    """Test cases for MulChar construction and evaluation."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)
        self.d5 = LocalDatum(5, LocalDatum.SPLIT)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Evaluation Tests ====================

    def test_unramified_at_cube_of_uniformizer(self):
        """Test an unramified chi with chi(varpi) = -1 at v(x) = 3."""
        chi = MulChar.unramified(self.d5, -1)
        x = PAdicCoset(self.d5, SIDE_F, 3, 2, 1)
        self.assertEqual(eval_mul(chi, x), -1)

    def test_quadratic_mod_five(self):
        """Test the quadratic character mod 5 at 2."""
        chi = quadratic_character(self.d5)
        self.assertEqual(chi.conductor, 1)
        self.assertEqual(eval_mul(chi, PAdicCoset(self.d5, SIDE_F, 0, 2, 1)), -1)
        self.assertEqual(eval_mul(chi, PAdicCoset(self.d5, SIDE_F, 0, 4, 1)), 1)
        self.assertEqual(chi.minus_one(), 1)

    def test_trivial_everywhere(self):
        """Test that the trivial character is 1."""
        chi = MulChar.trivial(self.d5)
        for n in (-2, 0, 5):
            self.assertEqual(chi(PAdicCoset(self.d5, SIDE_F, n, 3, 2)), 1)

    def test_precision_below_conductor(self):
        """Test that evaluation needs precision at least the conductor."""
        chi = quadratic_character(self.d5)
        with self.assertRaises(InsufficientPrecision):
            eval_mul(chi, PAdicCoset(self.d5, SIDE_F, 0, 2, 0))

    def test_refinement_consistency(self):
        """Test that evaluation at precision 3 agrees with the coarsening to the conductor."""
        for chi in enumerate_characters(self.d5, SIDE_F, 2):
            for u in unit_group(self.d5, SIDE_F, 3).elements[:20]:
                fine = PAdicCoset(self.d5, SIDE_F, 1, u, 3)
                self.assertEqual(chi(fine), chi(fine.coarsen(2)))

    # ==================== Validation Tests ====================

    def test_relation_violation(self):
        """Test that values violating a generator relation are rejected."""
        with self.assertRaises(ValueError):
            MulChar(self.d5, SIDE_F, 1, [Fraction(1, 3)])

    def test_non_minimal_conductor(self):
        """Test that a declared conductor that is too large is rejected."""
        with self.assertRaises(ValueError):
            MulChar(self.d5, SIDE_F, 2, [Fraction(1, 2), Fraction(0)])
        MulChar(self.d5, SIDE_F, 2, [Fraction(0), Fraction(1, 5)])

    # ==================== Enumeration Tests ====================

    def test_primitive_counts(self):
        """Test the number of primitive characters of each conductor."""
        cases = [(LocalDatum(5, "split"), SIDE_F, 1, 3), (LocalDatum(3, "split"), SIDE_F, 2, 4),
                 (LocalDatum(2, "split"), SIDE_F, 1, 0), (LocalDatum(2, "split"), SIDE_F, 2, 1),
                 (LocalDatum(2, "split"), SIDE_F, 3, 2), (LocalDatum(3, "inert"), SIDE_E, 1, 7),
                 (LocalDatum(5, "ramified"), SIDE_E, 1, 3),
                 (LocalDatum(5, "ramified"), SIDE_E, 2, 16)]
        for d, side, c, expected in cases:
            chars = enumerate_characters(d, side, c)
            self.assertEqual(len(chars), expected, msg=f"{d} {side} c={c}")
            self.assertEqual(len(set(chars)), expected)

    # ==================== Algebra Tests ====================

    def test_product_with_inverse(self):
        """Test chi * chi^-1 is trivial."""
        chi = enumerate_characters(self.d5, SIDE_F, 2, at_uniformizer=CycNum.zeta(3))[1]
        self.assertEqual(chi * chi.inverse(), MulChar.trivial(self.d5))
        self.assertEqual(quadratic_character(self.d5) ** 2, MulChar.trivial(self.d5))

    def test_power_recomputes_conductor(self):
        """Test that powers drop the conductor when they become tamer."""
        alpha = quadratic_character(self.d5)
        self.assertEqual((alpha ** 2).conductor, 0)
        self.assertEqual(alpha ** 3, alpha)
        self.assertEqual(alpha ** -1, alpha)
        for chi in enumerate_characters(self.d5, SIDE_F, 1):
            self.assertEqual((chi ** 4).conductor, 0)
            self.assertEqual(chi ** 4, MulChar.trivial(self.d5))
        inert = LocalDatum(5, "inert")
        for chi in enumerate_characters(inert, SIDE_E, 1)[:3]:
            self.assertEqual(chi ** 24, MulChar.trivial(inert, SIDE_E))

    def test_norm_then_restrict(self):
        """Test that (alpha o q) restricted to F is alpha^2."""
        inert = LocalDatum(5, "inert")
        alpha = quadratic_character(inert)
        lifted = compose_norm(alpha, inert)
        self.assertEqual(lifted.conductor, 1)
        self.assertEqual(lifted.side, SIDE_E)
        self.assertEqual(lifted.restrict_to_F(), MulChar.trivial(inert))

    def test_eta_trivial_on_norms(self):
        """Test that eta o q is trivial for a ramified extension."""
        ram = LocalDatum(5, "ramified")
        self.assertEqual(compose_norm(eta_character(ram), ram), MulChar.trivial(ram, SIDE_E))

    def test_norm_coset(self):
        """Test q(theta) for ramified E lands at valuation 1."""
        ram = LocalDatum(5, "ramified", ram_unit=2)
        x = PAdicCoset(ram, SIDE_E, 1, (1, 0), 2)
        q = norm_coset(x)
        self.assertEqual(q.valuation, 1)
        self.assertEqual(q.unit, (-2) % 5)

    def test_descriptor_round_trip(self):
        """Test to_dict / from_dict and the rational-string descriptor form."""
        chi = enumerate_characters(LocalDatum(7, "split"), SIDE_F, 1, at_uniformizer=-1)[2]
        self.assertEqual(MulChar.from_dict(chi.to_dict()), chi)
        descriptor = {"p": 5, "quad_type": "split", "side": "F", "conductor": 1,
                      "gen_angles": ["1/2"], "at_uniformizer": "-1"}
        chi = MulChar.from_dict(descriptor)
        self.assertEqual(chi.unit_value(2), -1)
        self.assertEqual(chi.at_uniformizer, -1)


class TestEta(unittest.TestCase):
    """Test cases for the quadratic character of E/F."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)
        self.rng = random.Random(5)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Value Tests ====================

    def test_inert_at_p(self):
        """Test eta(3) = -1 for the inert extension of Q_3."""
        d = LocalDatum(3, "inert")
        self.assertEqual(eta_value(d, PAdicCoset(d, SIDE_F, 1, 1, 1)), -1)

    def test_split_trivial(self):
        """Test that eta is trivial when split."""
        d = LocalDatum(7, "split")
        self.assertEqual(eta_value(d, PAdicCoset(d, SIDE_F, 3, 3, 1)), 1)

    def test_ramified_nonsquare(self):
        """Test eta(2) = -1 for Q_5(sqrt 5)."""
        d = LocalDatum(5, "ramified")
        self.assertEqual(eta_value(d, PAdicCoset(d, SIDE_F, 0, 2, 1)), -1)

    def test_ramified_needs_precision(self):
        """Test that ramified eta at precision 0 raises."""
        d = LocalDatum(5, "ramified")
        with self.assertRaises(InsufficientPrecision):
            eta_value(d, PAdicCoset(d, SIDE_F, 0, 2, 0))

    def test_multiplicative(self):
        """Test eta(xy) = eta(x) eta(y) on random coset pairs."""
        for d in (LocalDatum(7, "ramified"), LocalDatum(7, "inert"), LocalDatum(2, "inert")):
            units = unit_group(d, SIDE_F, 3).elements
            for _ in range(50):
                x = PAdicCoset(d, SIDE_F, self.rng.randint(-3, 3), self.rng.choice(units), 3)
                y = PAdicCoset(d, SIDE_F, self.rng.randint(-3, 3), self.rng.choice(units), 2)
                self.assertEqual(eta_value(d, x * y), eta_value(d, x) * eta_value(d, y))

    def test_matches_local_norms(self):
        """Test eta(a) = 1 exactly for local norms a."""
        d = LocalDatum(3, "ramified")
        # (a, v(a), unit part of a)
        cases = [(1, 0, 1), (2, 0, 2), (3, 1, 1), (6, 1, 2), (12, 1, 4),
                 (Fraction(1, 3), -1, 1), (-3, 1, -1)]
        for a, n, unit in cases:
            coset = PAdicCoset(d, SIDE_F, n, unit, 1)
            self.assertEqual(eta_value(d, coset) == 1, is_local_norm(a, d), msg=f"a={a}")


if __name__ == '__main__':
    unittest.main(verbosity=2)
