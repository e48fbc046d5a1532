"""
Local Euler factors L(s, xi) = (1 - xi(varpi) q^-s)^-1 for the factors used by the
local formulas: zeta_F, zeta_E, L(s, eta), L(s, eta chi_F) and ad hoc characters.
"""

import logging
from fractions import Fraction
from typing import Optional, Union

from cyclo.number import CycNum
from local.characters import MulChar, eta_character
from local.datum import LocalDatum, SIDE_E, SIDE_F


logger = logging.getLogger(__name__)

ZETA_F = "zeta_F"
ZETA_E = "zeta_E"
ETA = "eta"
ETA_CHIF = "eta_chiF"
ADHOC = "adhoc"
FACTORS = (ZETA_F, ZETA_E, ETA, ETA_CHIF, ADHOC)


class PoleAtEvaluationPoint(Exception):
    """Raised when 1 - xi(varpi) q^-s vanishes at the evaluation point."""
    pass


def q_power(q: int, s) -> CycNum:
    """
    q^-s for an integer or half-integer s.

    Example:
        >>> q_power(9, Fraction(1, 2))
        CycNum(1/3)
    """
    s = Fraction(s)
    if (2 * s).denominator != 1:
        raise ValueError(f"s must be an integer or a half-integer, got {s}")
    if s.denominator == 1:
        return CycNum(Fraction(q) ** (-int(s)))
    return CycNum.sqrt(Fraction(1, q)) ** int(2 * s)


def local_factor(value: CycNum, q: int, s) -> CycNum:
    """(1 - value * q^-s)^-1."""
    denominator = 1 - value * q_power(q, s)
    if denominator.is_zero():
        raise PoleAtEvaluationPoint(f"1 - ({value}) * {q}^-({s}) vanishes")
    return denominator.inverse()


def euler_L(datum: LocalDatum, which: str, s,
            character: Optional[Union[MulChar, CycNum, int, Fraction]] = None) -> CycNum:
    """
    A local Euler factor at the place of the datum.

    Args:
        datum: The place
        which: One of ZETA_F, ZETA_E, ETA, ETA_CHIF, ADHOC
        s: Integer or half-integer evaluation point
        character: chi_F for ETA_CHIF (an F-side MulChar); for ADHOC either a
            MulChar (E-side characters use q_w) or the value at the uniformizer
            of an unramified F-side character

    Returns:
        The Euler factor as a CycNum (1 for ramified characters)

    Raises:
        PoleAtEvaluationPoint: If the factor has a pole at s

    Example:
        >>> euler_L(LocalDatum(3, "inert"), ETA, 1)
        CycNum(3/4)
    """
    p = datum.p
    if which == ZETA_F:
        return local_factor(CycNum(1), p, s)
    if which == ZETA_E:
        if datum.quad_type == LocalDatum.SPLIT:
            factor = local_factor(CycNum(1), p, s)
            return factor * factor
        return local_factor(CycNum(1), datum.q_w, s)
    if which == ETA:
        return _character_factor(eta_character(datum), s)
    if which == ETA_CHIF:
        if not isinstance(character, MulChar) or character.side != SIDE_F:
            raise ValueError("eta_chiF needs an F-side MulChar chi_F")
        return _character_factor(eta_character(datum) * character, s)
    if which == ADHOC:
        if character is None:
            raise ValueError("adhoc factor needs a character or a value at the uniformizer")
        if isinstance(character, MulChar):
            return _character_factor(character, s)
        value = character if isinstance(character, CycNum) else CycNum(Fraction(character))
        return local_factor(value, p, s)
    raise ValueError(f"Unknown Euler factor {which}; expected one of {FACTORS}")


def _character_factor(chi: MulChar, s) -> CycNum:
    if not chi.is_unramified:
        return CycNum(1)
    q = chi.datum.q_w if chi.side == SIDE_E else chi.datum.p
    value = local_factor(chi.at_uniformizer, q, s)
    logger.debug(f"L({s}, {chi}) = {value}")
    return value
