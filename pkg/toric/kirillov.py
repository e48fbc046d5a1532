"""
Kirillov Vectors and the Kirillov Pairing

Functions on F_v^x = Q_p^x, evaluated on PAdicCosets, that describe vectors of a
principal series in its Kirillov model. Every basic vector is supported on
v(y) >= support_min and is pointwise geometric beyond tail_start:

    f(varpi y) = tail_ratio * f(y)    for v(y) >= tail_start

which lets the pairing integral be summed exactly with a geometric tail.
Linear combinations keep their basic terms and are paired bilinearly.

The group acts through

    [[a, b], [0, d]] f (y) = omega(d) psi(b y / d) f(a y / d)

so that s_r = [[varpi^r, 1], [0, 1]] gives psi(y) f(varpi^r y).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from cyclo.number import CycNum
from integrate.oracle import IntegrandSpec, integrate_with_tail
from local.characters import MulChar, eval_mul
from local.cosets import MULTIPLICATIVE, AddChar, PAdicCoset, eval_add
from local.datum import LocalDatum, SIDE_F


logger = logging.getLogger(__name__)

Scalar = Union[CycNum, Fraction, int]


def _cyc(value: Scalar) -> CycNum:
    return value if isinstance(value, CycNum) else CycNum(Fraction(value))


@dataclass
class KirillovVector:
    """
    A vector of a Kirillov model.

    Attributes:
        datum (LocalDatum): The place
        descriptor (Dict[str, Any]): Symbolic tag with the construction parameters
        evaluator (Optional[Callable]): Values on cosets (None for combinations)
        support_min (int): Lowest valuation where the vector can be nonzero
        tail_start (int): First valuation of the pointwise geometric region
        tail_ratio (CycNum): f(varpi y) / f(y) in that region
        precision (int): Unit precision needed on top of any additive character
        additive_depth (Optional[int]): Set when an additive character of y is involved
        terms (List[Tuple[CycNum, KirillovVector]]): Basic terms of a combination
    """
    datum: LocalDatum
    descriptor: Dict[str, Any]
    evaluator: Optional[Callable[[PAdicCoset], CycNum]] = None
    support_min: int = 0
    tail_start: int = 0
    tail_ratio: CycNum = field(default_factory=lambda: CycNum(0))
    precision: int = 0
    additive_depth: Optional[int] = None
    terms: List[Tuple[CycNum, "KirillovVector"]] = field(default_factory=list)

    def __call__(self, y: PAdicCoset) -> CycNum:
        if self.terms:
            return CycNum.sum(c * f(y) for c, f in self.terms)
        if y.valuation < self.support_min:
            return CycNum(0)
        return _cyc(self.evaluator(y))

    def base_terms(self) -> List[Tuple[CycNum, "KirillovVector"]]:
        """The vector as a list of (coefficient, basic vector)."""
        if self.terms:
            return list(self.terms)
        return [(CycNum(1), self)]

    def scaled(self, c: Scalar) -> "KirillovVector":
        c = _cyc(c)
        if self.terms:
            return KirillovVector(self.datum, {"kind": "scaled", "by": c.to_json(),
                                               "of": self.descriptor},
                                  terms=[(c * a, f) for a, f in self.terms])
        evaluator = self.evaluator
        return KirillovVector(self.datum, {"kind": "scaled", "by": c.to_json(),
                                           "of": self.descriptor},
                              lambda y: c * evaluator(y), self.support_min, self.tail_start,
                              self.tail_ratio, self.precision, self.additive_depth)

    def __add__(self, other: "KirillovVector") -> "KirillovVector":
        if not isinstance(other, KirillovVector):
            return NotImplemented
        if other.datum != self.datum:
            raise ValueError("Kirillov vectors of different places cannot be added")
        return KirillovVector(self.datum, {"kind": "sum",
                                           "of": [self.descriptor, other.descriptor]},
                              terms=self.base_terms() + other.base_terms())

    def __sub__(self, other: "KirillovVector") -> "KirillovVector":
        return self + other.scaled(-1)

    def __rmul__(self, c: Scalar) -> "KirillovVector":
        return self.scaled(c)


def check_alpha(alpha: MulChar) -> None:
    if alpha.side != SIDE_F or not alpha.is_unramified:
        raise ValueError("alpha must be an unramified F-side character")
    if alpha.at_uniformizer.p_valuation(alpha.datum.p) != 0:
        raise ValueError(f"alpha(varpi) = {alpha.at_uniformizer} is not a p-adic unit")


def _shifted(y: PAdicCoset, k: int) -> PAdicCoset:
    return PAdicCoset(y.datum, y.side, y.valuation + k, y.unit, y.precision)


# ============================================================================
# BASIC VECTORS
# ============================================================================

def f_mu(mu: MulChar) -> KirillovVector:
    """
    1_O(y) mu(y), the generator attached to the character mu of a principal series.

    mu(varpi) may be any nonzero value (it usually carries a power of |varpi|).
    """
    if mu.side != SIDE_F:
        raise ValueError("f_mu needs an F-side character")
    return KirillovVector(mu.datum, {"kind": "f_mu", "mu": mu.to_dict()},
                          lambda y: eval_mul(mu, y), 0, 0, mu.at_uniformizer, mu.conductor)


def f_indicator(datum: LocalDatum, n: int = 0) -> KirillovVector:
    """Indicator of varpi^n O^x."""
    return KirillovVector(datum, {"kind": "f_indicator", "n": n},
                          lambda y: CycNum(1) if y.valuation == n else CycNum(0),
                          n, n + 1, CycNum(0), 0)


def f_alpha_plus(alpha: MulChar) -> KirillovVector:
    """
    The ordinary vector 1_O(y) |y| alpha(y), a U_v^* eigenvector with eigenvalue alpha(varpi).

    Example:
        >>> d = LocalDatum(3, "split")
        >>> f = f_alpha_plus(MulChar.unramified(d, -1))
        >>> f(PAdicCoset(d, "F", 2, 1, 1))
        CycNum(1/9)
    """
    check_alpha(alpha)
    p = alpha.datum.p
    value = alpha.at_uniformizer

    def evaluator(y: PAdicCoset) -> CycNum:
        return value ** y.valuation / Fraction(p) ** y.valuation

    return KirillovVector(alpha.datum, {"kind": "f_alpha_plus", "alpha": alpha.to_dict()},
                          evaluator, 0, 0, value / p, 0)


def f_alpha_minus(alpha: MulChar, omega: MulChar) -> KirillovVector:
    """
    The ordinary vector of the contragredient: 1_O(y) |y| omega^-1(y) alpha(y).

    Args:
        alpha: Unramified unit-valued character
        omega: Central character (any conductor)
    """
    check_alpha(alpha)
    if omega.side != SIDE_F or omega.datum != alpha.datum:
        raise ValueError("omega must be an F-side character of the same place")
    p = alpha.datum.p
    value = alpha.at_uniformizer
    omega_inv = omega.inverse()

    def evaluator(y: PAdicCoset) -> CycNum:
        return eval_mul(omega_inv, y) * value ** y.valuation / Fraction(p) ** y.valuation

    return KirillovVector(alpha.datum, {"kind": "f_alpha_minus", "alpha": alpha.to_dict(),
                                        "omega": omega.to_dict()},
                          evaluator, 0, 0, value * omega_inv.at_uniformizer / p,
                          omega.conductor)


def new_vector(datum: LocalDatum, mu1_value: Scalar, mu2_value: Scalar) -> KirillovVector:
    """
    Spherical vector of Ind(mu1, mu2 |.|^-1) for unramified mu1 != mu2.

    Its value at varpi^n is sum_{k+l=n} mu1(varpi)^k mu2(varpi)^l, written as
    (mu1 f_mu1 - mu2 f_mu2) / (mu1 - mu2).
    """
    a, b = _cyc(mu1_value), _cyc(mu2_value)
    if a == b:
        raise ValueError("new_vector needs mu1(varpi) != mu2(varpi)")
    f1 = f_mu(MulChar.unramified(datum, a))
    f2 = f_mu(MulChar.unramified(datum, b))
    vector = f1.scaled(a / (a - b)) - f2.scaled(b / (a - b))
    vector.descriptor = {"kind": "new_vector", "mu1": a.to_json(), "mu2": b.to_json()}
    return vector


# ============================================================================
# TRANSLATES
# ============================================================================

def s_r_translate(f: KirillovVector, r: int, psi: AddChar, star: bool = False,
                  omega: Optional[MulChar] = None) -> KirillovVector:
    """
    s_r f (y) = psi(y) f(varpi^r y), or s_r^* f (y) = omega(varpi)^r psi(y) f(varpi^r y).

    Args:
        f: A basic vector
        r: Level (>= 1)
        psi: Level-0 additive character
        star: Apply s_r^* = [[1, varpi^-r], [0, varpi^-r]] instead of s_r
        omega: Central character, required for s_r^*
    """
    if r < 1:
        raise ValueError(f"Level r must be at least 1, got {r}")
    if f.terms:
        raise ValueError("Translate the basic terms of a combination separately")
    if star and omega is None:
        raise ValueError("s_r^* needs the central character omega")
    scale = omega.at_uniformizer ** r if star else CycNum(1)
    inner = f.evaluator

    def evaluator(y: PAdicCoset) -> CycNum:
        if y.valuation + r < f.support_min:
            return CycNum(0)
        return scale * eval_add(psi, y) * inner(_shifted(y, r))

    descriptor = {"kind": "s_r_star" if star else "s_r", "r": r, "psi": psi.to_dict(),
                  "of": f.descriptor}
    return KirillovVector(f.datum, descriptor, evaluator, f.support_min - r,
                          max(f.tail_start - r, 0), f.tail_ratio, f.precision, 0)


def f_alpha_r_plus(alpha: MulChar, r: int, psi: AddChar) -> KirillovVector:
    """
    |varpi|^-r alpha(varpi)^-r s_r f_alpha^+, with the + model taken against psi^-1.

    Equals psi(-y) |y| alpha(y) on v(y) >= -r.
    """
    p = alpha.datum.p
    scale = Fraction(p) ** r * alpha.at_uniformizer ** (-r)
    vector = s_r_translate(f_alpha_plus(alpha), r, psi.twisted(-1)).scaled(scale)
    vector.descriptor = {"kind": "f_alpha_r_plus", "r": r, "alpha": alpha.to_dict(),
                         "psi": psi.to_dict()}
    return vector


def f_alpha_r_minus(alpha: MulChar, omega: MulChar, r: int, psi: AddChar) -> KirillovVector:
    """
    |varpi|^-r alpha(varpi)^-r s_r^* f_alpha^-.

    Equals psi(y) |y| alpha(y) omega^-1(y) on v(y) >= -r.
    """
    p = alpha.datum.p
    scale = Fraction(p) ** r * alpha.at_uniformizer ** (-r)
    vector = s_r_translate(f_alpha_minus(alpha, omega), r, psi, star=True,
                           omega=omega).scaled(scale)
    vector.descriptor = {"kind": "f_alpha_r_minus", "r": r, "alpha": alpha.to_dict(),
                         "omega": omega.to_dict(), "psi": psi.to_dict()}
    return vector


# ============================================================================
# PAIRING
# ============================================================================

def pairing_normalization(mu1_value: Scalar, mu2_value: Scalar, p: int) -> CycNum:
    """
    zeta_F(2) / L(1, sigma x sigma^vee) for sigma = Ind(mu1, mu2 |.|^-1), both unramified.

    L(1, sigma x sigma^vee) = (1 - 1/p)^-2 (1 - mu1/(mu2 p))^-1 (1 - mu2/(mu1 p))^-1,
    so the normalization vanishes (rather than being undefined) at reducibility points.
    """
    a, b = _cyc(mu1_value), _cyc(mu2_value)
    inv_p = Fraction(1, p)
    zeta_two = CycNum(1 / (1 - inv_p * inv_p))
    return zeta_two * (1 - inv_p) ** 2 * (1 - a / b * inv_p) * (1 - b / a * inv_p)


def _raw_pairing(f1: KirillovVector, f2: KirillovVector) -> CycNum:
    n_min = max(f1.support_min, f2.support_min)
    tail_start = max(f1.tail_start, f2.tail_start, n_min)
    depths = [d for d in (f1.additive_depth, f2.additive_depth) if d is not None]
    spec = IntegrandSpec(lambda y: f1(y) * f2(y), max(f1.precision, f2.precision), SIDE_F,
                         MULTIPLICATIVE, f1.datum,
                         additive_depth=max(depths) if depths else None)
    return integrate_with_tail(spec, n_min, tail_start, f1.tail_ratio * f2.tail_ratio,
                               reason="product of pointwise geometric vectors")


def kirillov_pairing(f1: KirillovVector, f2: KirillovVector,
                     L_norm: Scalar = 1) -> CycNum:
    """
    L_norm * integral of f1(y) f2(y) d^x y / |d|^(1/2), regularized by geometric tails.

    Args:
        f1: Vector of sigma
        f2: Vector of sigma^vee
        L_norm: Normalizing multiplier, usually pairing_normalization(...)

    Returns:
        The normalized pairing

    Raises:
        RatioOne: If a pair of basic terms has annulus ratio 1 (a pole of the continuation)
    """
    if f1.datum != f2.datum:
        raise ValueError("Kirillov vectors of different places cannot be paired")
    total = CycNum(0)
    for c1, b1 in f1.base_terms():
        for c2, b2 in f2.base_terms():
            total = total + c1 * c2 * _raw_pairing(b1, b2)
    value = _cyc(L_norm) * total  # |d| = 1 over Q_p
    logger.debug(f"({f1.descriptor.get('kind')}, {f2.descriptor.get('kind')}) = {value}")
    return value
