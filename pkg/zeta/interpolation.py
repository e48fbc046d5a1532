"""
Interpolation Factor at p

Assembles the local interpolation factor

    Z_v = zeta_F(2) L(1, eta)^2 / L(1/2, sigma_E x chi') * prod_{w | v} Z_w(chi'_w)

and the normalized toric integral R = |D|^(1/2) |d|^2 L(1, eta) prod_w Z_w that the
brute-force toric computation must reproduce.

Satake convention: sigma_v is the principal series induced from (|.| alpha, beta)
without normalization, so its unitary Satake parameters at p are
alpha(varpi) p^(-1/2) and beta(varpi) p^(-1/2). On a place w of inertia degree f
the base change has parameters gamma^f.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from cyclo.number import CycNum
from local.characters import MulChar
from local.cosets import AddChar
from local.datum import LocalDatum, SIDE_E
from local.euler import ETA, ZETA_F, euler_L, local_factor
from zeta.basic_integral import ZwInput, different_normalization, zw_closed


logger = logging.getLogger(__name__)


class InconsistentCentralCharacter(Exception):
    """Raised when chi' restricted to F_v^x is not omega^-1."""
    pass


@dataclass
class InterpolationFactor:
    """
    The interpolation factor with its constituents.

    Attributes:
        zw_values (List[CycNum]): Z_w for each w | v
        zeta_two (CycNum): zeta_F(2)
        l_eta (CycNum): L(1, eta)
        l_half (CycNum): L(1/2, sigma_E x chi')
        value (CycNum): The product
    """
    zw_values: List[CycNum]
    zeta_two: CycNum
    l_eta: CycNum
    l_half: CycNum
    value: CycNum

    def to_dict(self):
        return {
            "zw_values": [z.to_json() for z in self.zw_values],
            "zeta_F(2)": self.zeta_two.to_json(),
            "L(1,eta)": self.l_eta.to_json(),
            "L(1/2)": self.l_half.to_json(),
            "value": self.value.to_json(),
            "display": str(self.value),
        }


def satake_from_characters(alpha_value, beta_value, p: int) -> Tuple[CycNum, CycNum]:
    """
    Unitary Satake parameters of the principal series induced from (|.| alpha, beta).

    Returns:
        (alpha(varpi) p^(-1/2), beta(varpi) p^(-1/2))
    """
    root = CycNum.sqrt(Fraction(1, p))
    a = alpha_value if isinstance(alpha_value, CycNum) else CycNum(Fraction(alpha_value))
    b = beta_value if isinstance(beta_value, CycNum) else CycNum(Fraction(beta_value))
    return a * root, b * root


def _zw_inputs(datum: LocalDatum, alpha: MulChar, chi_pair: Sequence[MulChar],
               psi: AddChar, e_measure: Optional[str]) -> List[ZwInput]:
    expected = 2 if datum.quad_type == LocalDatum.SPLIT else 1
    if len(chi_pair) != expected:
        raise ValueError(f"{datum} has {expected} place(s) above p, got {len(chi_pair)} characters")
    kwargs = {} if e_measure is None else {"e_measure": e_measure}
    return [ZwInput(datum, alpha, chi, psi, place_w=i, **kwargs) for i, chi in enumerate(chi_pair)]


def restriction_to_F(datum: LocalDatum, chi_pair: Sequence[MulChar]) -> MulChar:
    """chi'_v restricted to F_v^x (the product of the components when split)."""
    if datum.quad_type == LocalDatum.SPLIT:
        return chi_pair[0] * chi_pair[1]
    return chi_pair[0].restrict_to_F()


def check_central_character(datum: LocalDatum, chi_pair: Sequence[MulChar], omega: MulChar) -> None:
    """
    Raises:
        InconsistentCentralCharacter: If chi'|F^x differs from omega^-1
    """
    restricted = restriction_to_F(datum, chi_pair)
    if restricted != omega.inverse():
        raise InconsistentCentralCharacter(
            f"chi' restricted to F^x is {restricted}, expected omega^-1 = {omega.inverse()}")


def l_half(datum: LocalDatum, chi_pair: Sequence[MulChar],
           satake: Tuple[CycNum, CycNum]) -> CycNum:
    """
    L(1/2, sigma_E x chi') = prod_w prod_i (1 - gamma_i^f chi'_w(varpi_w) q_w^(-1/2))^-1.

    Ramified chi'_w contribute 1.

    Raises:
        PoleAtEvaluationPoint: If a factor has a pole
    """
    value = CycNum(1)
    for chi in chi_pair:
        if not chi.is_unramified:
            continue
        for gamma in satake:
            value = value * local_factor(gamma ** datum.f * chi.at_uniformizer,
                                         datum.q_w, Fraction(1, 2))
    return value


def interpolation_factor_Zv(datum: LocalDatum, alpha: MulChar, chi_pair: Sequence[MulChar],
                            psi: AddChar, satake: Tuple[CycNum, CycNum],
                            omega: Optional[MulChar] = None,
                            e_measure: Optional[str] = None) -> InterpolationFactor:
    """
    The interpolation factor Z_v and its constituents.

    Args:
        datum: The place v | p
        alpha: Unramified character alpha_v
        chi_pair: chi'_w for each w | v (two F-side characters when split)
        psi: Level-0 additive character
        satake: Unitary Satake parameters of sigma_v
        omega: Central character of sigma_v; when given chi'|F^x = omega^-1 is checked
        e_measure: Measure variant on E_w

    Raises:
        PoleAtEvaluationPoint: If L(1/2) or a Z_w has a pole
        InconsistentCentralCharacter: If the central character check fails
    """
    if omega is not None:
        check_central_character(datum, chi_pair, omega)
    zw = [zw_closed(zin) for zin in _zw_inputs(datum, alpha, chi_pair, psi, e_measure)]
    zeta_two = euler_L(datum, ZETA_F, 2)
    l_eta = euler_L(datum, ETA, 1)
    half = l_half(datum, chi_pair, satake)
    product = CycNum(1)
    for z in zw:
        product = product * z
    value = zeta_two * l_eta * l_eta / half * product
    logger.debug(f"Z_v on {datum}: Z_w={[str(z) for z in zw]}, L(1/2)={half} -> {value}")
    return InterpolationFactor(zw, zeta_two, l_eta, half, value)


def R_circ_product(datum: LocalDatum, alpha: MulChar, chi_pair: Sequence[MulChar],
                   psi: AddChar, e_measure: Optional[str] = None) -> CycNum:
    """
    |D|^(1/2) |d|^2 L(1, eta) prod_w Z_w.

    Example:
        >>> d = LocalDatum(3, "split")
        >>> minus = MulChar.unramified(d, -1)
        >>> R_circ_product(d, MulChar.trivial(d), [minus, minus], AddChar(3))
        CycNum(27/8)
    """
    d_factor = CycNum(1)  # |d| = 1 over Q_p
    value = different_normalization(datum, SIDE_E) * d_factor * d_factor * euler_L(datum, ETA, 1)
    for zin in _zw_inputs(datum, alpha, chi_pair, psi, e_measure):
        value = value * zw_closed(zin)
    return value
