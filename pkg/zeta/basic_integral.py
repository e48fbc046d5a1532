"""
The Basic Local Integral Z_w and Gauss Sums

Z_w(chi', psi) is the integral over E_w^x of alpha(q(t)) chi'(t) psi_E(t) dt,
normalized by |D|^(1/2), with psi_E = psi o Tr and dt additive. This module
computes it two ways:

    zw_closed       the closed form (unramified branch or Gauss sum)
    zw_bruteforce   the oracle: annulus enumeration plus an exact geometric tail

The unramified branch of the closed form equals the displayed formula times a
measure constant that is 1 for split and inert places and vol(O_E)|D|^(-1/2)q
for ramified ones (the defining integral sees the different of E_w).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional

import config
from cyclo.number import CycNum
from integrate.oracle import (IntegrandSpec, RatioOne, annulus_values, integrate_annuli,
                              integrate_with_tail)
from local.characters import MulChar, eval_mul
from local.cosets import ADDITIVE, AddChar, PAdicCoset, e_volume, eval_add
from local.datum import LocalDatum, SIDE_E, SIDE_F
from local.euler import PoleAtEvaluationPoint


logger = logging.getLogger(__name__)


@dataclass
class ZwInput:
    """
    Input of the basic integral at a place w | v.

    Attributes:
        datum (LocalDatum): The place v
        alpha (MulChar): Unramified F-side character (alpha(varpi) a p-adic unit)
        chi_w (MulChar): Character of E_w^x (an F-side character for a split component)
        psi (AddChar): Level-0 additive character of F_v
        place_w (int): Component index for split places (0 or 1)
        e_measure (str): Additive measure variant on E_w
    """
    datum: LocalDatum
    alpha: MulChar
    chi_w: MulChar
    psi: AddChar
    place_w: int = 0
    e_measure: str = field(default_factory=lambda: config.DEFAULT_E_MEASURE)

    def __post_init__(self):
        if not self.alpha.is_unramified or self.alpha.side != SIDE_F:
            raise ValueError("alpha must be an unramified F-side character")
        if self.alpha.at_uniformizer.p_valuation(self.datum.p) != 0:
            raise ValueError(f"alpha(varpi) = {self.alpha.at_uniformizer} is not a p-adic unit")
        if self.chi_w.side != self.datum.w_side():
            raise ValueError(f"chi_w must live on side {self.datum.w_side()} for {self.datum}")

    @property
    def side(self) -> str:
        return self.datum.w_side()

    @property
    def q(self) -> int:
        return self.datum.q_w

    @property
    def delta(self) -> int:
        return self.datum.delta

    @property
    def conductor(self) -> int:
        """Conductor of chi' * alpha o q (alpha is unramified)."""
        return self.chi_w.conductor

    @property
    def b(self) -> CycNum:
        """(chi' * alpha o q)(varpi_w) = alpha(varpi)^f chi'(varpi_w)."""
        return self.alpha.at_uniformizer ** self.datum.f * self.chi_w.at_uniformizer

    def chi_tilde_value(self, x: PAdicCoset) -> CycNum:
        """(chi' * alpha o q)(x)."""
        return eval_mul(self.chi_w, x) * self.alpha.at_uniformizer ** (self.datum.f * x.valuation)

    def twisted(self, a: int) -> "ZwInput":
        return ZwInput(self.datum, self.alpha, self.chi_w, self.psi.twisted(a),
                       self.place_w, self.e_measure)

    def to_dict(self) -> Dict[str, Any]:
        return {"datum": self.datum.to_dict(), "alpha": self.alpha.to_dict(),
                "chi_w": self.chi_w.to_dict(), "psi": self.psi.to_dict(),
                "place_w": self.place_w, "e_measure": self.e_measure}


def different_normalization(datum: LocalDatum, side: str) -> CycNum:
    """|D|^(1/2) for E-side integrals (the different of Q_p is trivial)."""
    if side == SIDE_E and datum.v_of_D:
        return CycNum.sqrt(Fraction(1, datum.p ** datum.v_of_D))
    return CycNum(1)


def measure_constant(datum: LocalDatum, e_measure: str) -> CycNum:
    """
    Constant relating the unramified branch of the closed form to the defining integral.

    vol(O_E) |D|^(-1/2) q^v(D): 1 for split and inert places, p^(3/2) for a
    ramified place under the standard measure and p under the self-dual one.
    """
    if not datum.v_of_D:
        return CycNum(1)
    return (e_volume(datum, e_measure) * different_normalization(datum, SIDE_E).inverse()
            * datum.q_w ** datum.v_of_D)


# ============================================================================
# CLOSED FORM
# ============================================================================

def literal_display(zin: ZwInput) -> CycNum:
    """
    alpha^(-v(D)) chi'(varpi_w)^(-v(D)) (1 - b^-1) / (1 - b q_w^-1) with b = alpha^f chi'(varpi_w).

    Raises:
        PoleAtEvaluationPoint: If b = q_w
    """
    b, q = zin.b, zin.q
    denominator = 1 - b / q
    if denominator.is_zero():
        raise PoleAtEvaluationPoint(f"1 - ({b})/{q} vanishes for {zin.datum}")
    v_D = zin.datum.v_of_D
    prefix = (zin.alpha.at_uniformizer * zin.chi_w.at_uniformizer) ** (-v_D)
    return prefix * (1 - b.inverse()) / denominator


def gauss_sum(chi_tilde: MulChar, psi: AddChar) -> CycNum:
    """
    tau(chi~, psi_E): the integral of chi~(t) psi_E(t) dt over w(t) = -c - delta.

    dt is additive with vol(O_E) = 1, divided by |D|^(1/2).

    Args:
        chi_tilde: Character of conductor c >= 1 (F side for a split component)
        psi: Level-0 additive character of F_v

    Returns:
        The Gauss sum

    Example:
        >>> d = LocalDatum(5, "split")
        >>> gauss_sum(quadratic_character(d), AddChar(5))  # sqrt 5
    """
    c = chi_tilde.conductor
    if c < 1:
        raise ValueError("Gauss sums need a ramified character")
    d, side = chi_tilde.datum, chi_tilde.side
    delta = d.delta if side == SIDE_E else 0
    n = -c - delta
    spec = IntegrandSpec(lambda x: eval_mul(chi_tilde, x) * eval_add(psi, x), c, side,
                         ADDITIVE, d, additive_depth=-delta)
    tau = integrate_annuli(spec, n, n) / different_normalization(d, side)
    logger.debug(f"tau({chi_tilde}, {psi}) = {tau}")
    return tau


def normalized_gauss_sum(chi_tilde: MulChar, psi: AddChar) -> CycNum:
    """tau / q^c, whose absolute value squared is q^-c."""
    q = chi_tilde.datum.residue_size(chi_tilde.side)
    return gauss_sum(chi_tilde, psi) / Fraction(q) ** chi_tilde.conductor


def chi_tilde(zin: ZwInput) -> MulChar:
    """chi' * alpha o q as a single character."""
    chi = zin.chi_w
    unram = MulChar.unramified(zin.datum, zin.alpha.at_uniformizer ** zin.datum.f, chi.side)
    return chi * unram


def zw_closed(zin: ZwInput) -> CycNum:
    """
    Closed form of Z_w.

    Unramified chi' * alpha o q: measure_constant * literal_display.
    Ramified: the Gauss sum of chi' * alpha o q, scaled by vol(O_E).

    Raises:
        PoleAtEvaluationPoint: If the unramified branch has a pole
    """
    if zin.conductor == 0:
        return measure_constant(zin.datum, zin.e_measure) * literal_display(zin)
    return e_volume(zin.datum, zin.e_measure) * gauss_sum(chi_tilde(zin), zin.psi)


def is_exceptional(zin: ZwInput) -> bool:
    """True iff Z_w vanishes (chi' * alpha o q unramified with b = 1)."""
    try:
        return zw_closed(zin).is_zero()
    except PoleAtEvaluationPoint:
        return False


def torsor_factor(zin: ZwInput, a: int) -> CycNum:
    """
    chi'_w(a)^-1: Z_w(a.psi) = torsor_factor * Z_w(psi) for a unit a of F.

    Example:
        >>> torsor_factor(zin, 2) * zw_closed(zin) == zw_closed(zin.twisted(2))
        True
    """
    if a % zin.datum.p == 0:
        raise ValueError(f"{a} is not a unit at {zin.datum.p}")
    if zin.chi_w.is_unramified:
        return CycNum(1)
    unit = a if zin.side == SIDE_F else (a, 0)
    return zin.chi_w.unit_value(unit).inverse()


# ============================================================================
# ORACLE
# ============================================================================

def zw_bruteforce(zin: ZwInput, extra_annulus: Optional[bool] = None) -> CycNum:
    """
    The defining integral of Z_w by enumeration.

    Annuli w(t) < -max(c, 1) - delta contribute nothing; they start the sum
    (one more annulus below is included when it is cheap). For w(t) >= -delta
    psi_E is trivial, so annulus values form a geometric sequence with ratio
    b / q_w (zero when chi' * alpha o q is ramified).

    Args:
        zin: The input
        extra_annulus: Include one annulus below the support (config default: when cheap)

    Returns:
        Z_w under the selected measure variant

    Raises:
        PoleAtEvaluationPoint: If b = q_w
    """
    d, side, c, delta = zin.datum, zin.side, zin.conductor, zin.delta
    N = max(c, 1)
    n_min = -N - delta
    tail_start = -delta
    spec = IntegrandSpec(lambda x: zin.chi_tilde_value(x) * eval_add(zin.psi, x), N, side,
                         ADDITIVE, d, additive_depth=-delta)
    if extra_annulus is None:
        cost = d.unit_count(side, spec.precision_at(n_min - 1))
        extra_annulus = cost <= config.ORACLE_EXTRA_ANNULUS_MAX_COSETS
    if extra_annulus:
        n_min -= 1
    ratio = zin.b / zin.q if c == 0 else CycNum(0)
    try:
        raw = integrate_with_tail(spec, n_min, tail_start, ratio,
                                  reason="psi_E trivial and chi~ unramified beyond -delta"
                                  if c == 0 else "chi~ ramified: unit sums vanish")
    except RatioOne as e:
        raise PoleAtEvaluationPoint(f"Z_w has a pole at b = q_w for {d}: {e}")
    value = raw * e_volume(d, zin.e_measure) / different_normalization(d, side)
    logger.debug(f"Z_w oracle on {d} (c={c}, b={zin.b}): {value}")
    return value


def zw_annulus_breakdown(zin: ZwInput) -> Dict[int, CycNum]:
    """
    Annulus values of the oracle integrand from the bottom of the support to -delta.

    Values are scaled like zw_bruteforce, so their sum plus the geometric tail
    beyond -delta is Z_w.
    """
    d, side, delta = zin.datum, zin.side, zin.delta
    N = max(zin.conductor, 1)
    spec = IntegrandSpec(lambda x: zin.chi_tilde_value(x) * eval_add(zin.psi, x), N, side,
                         ADDITIVE, d, additive_depth=-delta)
    scale = e_volume(d, zin.e_measure) / different_normalization(d, side)
    return {n: value * scale for n, value in annulus_values(spec, -N - delta, -delta).items()}
