"""
Unit tests for the basic local integral Z_w and Gauss sums.

The closed form is compared with the enumeration oracle on a small sweep.
"""

import logging
import os
import sys
import unittest
from fractions import Fraction

# Add parent directory to path to enable imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cyclo.number import CycNum
from local.characters import MulChar, enumerate_characters, quadratic_character
from local.cosets import AddChar, E_MEASURE_SELF_DUAL, E_MEASURE_STANDARD
from local.datum import LocalDatum, SIDE_E, SIDE_F
from local.euler import PoleAtEvaluationPoint
from zeta.basic_integral import (ZwInput, gauss_sum, is_exceptional, literal_display,
                                 measure_constant, normalized_gauss_sum, torsor_factor,
                                 zw_annulus_breakdown, zw_bruteforce, zw_closed)


def make_input(datum, alpha_value=1, chi=None, twist=1, e_measure=E_MEASURE_STANDARD):
    """ZwInput with an unramified alpha and a default trivial chi_w."""
    alpha = MulChar.unramified(datum, alpha_value)
    if chi is None:
        chi = MulChar.trivial(datum, datum.w_side())
    return ZwInput(datum, alpha, chi, AddChar(datum.p, twist), e_measure=e_measure)


class TestZwClosedForm(unittest.TestCase):
    """Test cases for the closed form of Z_w."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Closed Form Tests ====================

    def test_trivial_is_exceptional(self):
        """Test that trivial alpha and chi give Z_w = 0."""
        zin = make_input(LocalDatum(3, "split"))
        self.assertEqual(zw_closed(zin), 0)
        self.assertTrue(is_exceptional(zin))

    def test_split_minus_one(self):
        """Test alpha chi(varpi) = -1 over Q_3 gives 3/2."""
        d = LocalDatum(3, "split")
        zin = make_input(d, chi=MulChar.unramified(d, -1))
        self.assertEqual(zw_closed(zin), Fraction(3, 2))
        self.assertFalse(is_exceptional(zin))

    def test_inert_zeta4(self):
        """Test alpha(varpi) = zeta_4 over inert Q_3 gives 9/5."""
        d = LocalDatum(3, "inert")
        zin = make_input(d, alpha_value=CycNum.zeta(4))
        self.assertEqual(zw_closed(zin), Fraction(9, 5))

    def test_unit_rational_alpha(self):
        """Test alpha(varpi) = 2/3 at p = 5 gives -15/26."""
        zin = make_input(LocalDatum(5, "split"), alpha_value=Fraction(2, 3))
        self.assertEqual(zw_closed(zin), Fraction(-15, 26))

    def test_ramified_measure_constant(self):
        """Test the ramified unramified-branch constant p^(3/2) (standard) and p (self-dual)."""
        d = LocalDatum(5, "ramified")
        standard = measure_constant(d, E_MEASURE_STANDARD)
        self.assertEqual(standard * standard, 125)
        self.assertEqual(measure_constant(d, E_MEASURE_SELF_DUAL), 5)
        self.assertEqual(measure_constant(LocalDatum(5, "inert"), E_MEASURE_STANDARD), 1)
        zin = make_input(d, alpha_value=-1)
        self.assertEqual(zw_closed(zin), standard * literal_display(zin))

    def test_pole(self):
        """Test that b = q_w raises PoleAtEvaluationPoint."""
        d = LocalDatum(3, "split")
        zin = make_input(d, chi=MulChar.unramified(d, 3))
        with self.assertRaises(PoleAtEvaluationPoint):
            zw_closed(zin)
        self.assertFalse(is_exceptional(zin))

    def test_non_unit_alpha_rejected(self):
        """Test that alpha(varpi) must be a p-adic unit."""
        with self.assertRaises(ValueError):
            make_input(LocalDatum(3, "split"), alpha_value=3)

    def test_ramified_chi_not_exceptional(self):
        """Test that a ramified chi is never exceptional."""
        d = LocalDatum(5, "split")
        zin = make_input(d, chi=quadratic_character(d))
        self.assertFalse(is_exceptional(zin))


class TestGaussSums(unittest.TestCase):
    """Test cases for Gauss sums."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    # ==================== Value Tests ====================

    def test_quadratic_mod_five(self):
        """Test the classical quadratic Gauss sum mod 5."""
        d = LocalDatum(5, "split")
        tau = gauss_sum(quadratic_character(d), AddChar(5))
        expected = CycNum.zeta(5) - CycNum.zeta(5, 2) - CycNum.zeta(5, 3) + CycNum.zeta(5, 4)
        self.assertEqual(tau, expected)
        self.assertEqual(tau, CycNum.sqrt(5))
        self.assertEqual(normalized_gauss_sum(quadratic_character(d), AddChar(5)), expected / 5)

    def test_norms(self):
        """Test tau * conj(tau) = q^c and tau(chi) tau(chi^-1) = chi(-1) q^c."""
        cases = [(LocalDatum(5, "split"), SIDE_F, 1), (LocalDatum(3, "split"), SIDE_F, 2),
                 (LocalDatum(2, "split"), SIDE_F, 2), (LocalDatum(2, "split"), SIDE_F, 3),
                 (LocalDatum(3, "inert"), SIDE_E, 1)]
        for d, side, c in cases:
            q = d.residue_size(side)
            for chi in enumerate_characters(d, side, c)[:4]:
                for twist in (1, 2 if d.p != 2 else 3):
                    psi = AddChar(d.p, twist)
                    tau = gauss_sum(chi, psi)
                    self.assertEqual(tau * tau.conj(), q ** c, msg=f"{chi}")
                    self.assertEqual(tau * gauss_sum(chi.inverse(), psi), chi.minus_one() * q ** c)
                    normalized = normalized_gauss_sum(chi, psi)
                    self.assertEqual(normalized * normalized.conj(), Fraction(1, q ** c))

    def test_conductor_two_over_q2(self):
        """Test that the conductor-2 Gauss sum over Q_2 involves zeta_4."""
        d = LocalDatum(2, "split")
        chi = enumerate_characters(d, SIDE_F, 2)[0]
        tau = gauss_sum(chi, AddChar(2))
        # chi(1) zeta_4 + chi(3) zeta_4^3 = zeta_4 - zeta_4^3 = 2 zeta_4
        self.assertEqual(tau, 2 * CycNum.zeta(4))

    def test_unramified_rejected(self):
        """Test that Gauss sums need conductor at least 1."""
        d = LocalDatum(5, "split")
        with self.assertRaises(ValueError):
            gauss_sum(MulChar.trivial(d), AddChar(5))


class TestZwOracle(unittest.TestCase):
    """Test cases comparing the closed form with the enumeration oracle."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        """Clean up after each test method."""
        logging.disable(logging.NOTSET)

    def assertOracleAgrees(self, zin):
        self.assertEqual(zw_bruteforce(zin), zw_closed(zin), msg=str(zin.to_dict()))

    # ==================== Agreement Tests ====================

    def test_documented_examples(self):
        """Test the three closed-form examples through the oracle."""
        d3 = LocalDatum(3, "split")
        self.assertOracleAgrees(make_input(d3))
        self.assertOracleAgrees(make_input(d3, chi=MulChar.unramified(d3, -1)))
        self.assertOracleAgrees(make_input(LocalDatum(3, "inert"), alpha_value=CycNum.zeta(4)))
        zin = make_input(LocalDatum(5, "split"), alpha_value=Fraction(2, 3))
        self.assertEqual(zw_bruteforce(zin), Fraction(-15, 26))

    def test_ramified_component_is_gauss_sum(self):
        """Test that a conductor-1 chi over split Q_5 gives the Gauss sum."""
        d = LocalDatum(5, "split")
        zin = make_input(d, chi=quadratic_character(d))
        self.assertEqual(zw_bruteforce(zin), gauss_sum(quadratic_character(d), AddChar(5)))

    def test_small_sweep(self):
        """Test closed form = oracle over primes, types, conductors and alpha values."""
        alphas = [1, -1, CycNum.zeta(3), CycNum.zeta(4)]
        data = [LocalDatum(2, "split"), LocalDatum(3, "split"), LocalDatum(5, "split"),
                LocalDatum(2, "inert"), LocalDatum(3, "inert"),
                LocalDatum(3, "ramified"), LocalDatum(5, "ramified")]
        for d in data:
            side = d.w_side()
            chars = [MulChar.trivial(d, side), MulChar.unramified(d, -1, side)]
            for c in (1, 2):
                chars.extend(enumerate_characters(d, side, c, at_uniformizer=CycNum.zeta(3))[:2])
            for a in alphas:
                for chi in chars:
                    for twist in (1, 2 if d.p != 2 else 3):
                        self.assertOracleAgrees(make_input(d, alpha_value=a, chi=chi, twist=twist))

    def test_self_dual_measure(self):
        """Test the oracle under the self-dual measure on a ramified place."""
        d = LocalDatum(3, "ramified")
        for chi in [MulChar.unramified(d, -1, SIDE_E)] + enumerate_characters(d, SIDE_E, 1):
            zin = make_input(d, alpha_value=CycNum.zeta(4), chi=chi, e_measure=E_MEASURE_SELF_DUAL)
            self.assertOracleAgrees(zin)

    def test_annulus_breakdown(self):
        """Test that the annuli of a ramified chi add up to Z_w."""
        d = LocalDatum(5, "split")
        zin = make_input(d, chi=quadratic_character(d))
        values = zw_annulus_breakdown(zin)
        self.assertEqual(sorted(values), [-1, 0])
        self.assertEqual(CycNum.sum(values.values()), zw_closed(zin))

    def test_oracle_pole(self):
        """Test that the oracle reports the pole of the closed form."""
        d = LocalDatum(3, "split")
        zin = make_input(d, chi=MulChar.unramified(d, 3))
        with self.assertRaises(PoleAtEvaluationPoint):
            zw_bruteforce(zin)

    # ==================== Torsor Tests ====================

    def test_torsor_equivariance(self):
        """Test Z_w(a.psi) = chi'(a)^-1 Z_w(psi)."""
        for d in (LocalDatum(5, "split"), LocalDatum(3, "inert"), LocalDatum(3, "ramified")):
            side = d.w_side()
            for chi in enumerate_characters(d, side, 1)[:3]:
                zin = make_input(d, alpha_value=-1, chi=chi)
                for a in (2, 4):
                    self.assertEqual(zw_closed(zin.twisted(a)),
                                     torsor_factor(zin, a) * zw_closed(zin))
                    self.assertEqual(zw_bruteforce(zin.twisted(a)), zw_closed(zin.twisted(a)))


if __name__ == '__main__':
    unittest.main(verbosity=2)
