"""
Local Eisenstein Whittaker Coefficients

For a place v of F = Q and the quadratic space (V_2, uq) = (E_v, u * norm) with
the standard Schwartz function phi_2 = 1_{O_E}, the a-th Whittaker coefficient
at y = 1 is

    W_a(1, u, chi_F) = |d|^(1/2) L(1, eta chi_F) (1 - X) sum_{n >= 0} X^n q^n vol(D_n(a))

with X = chi_F(varpi_v) and D_n(a) = {x in O_E : u q(x) in a + p^n O_F}. The
normalized volumes q^n vol(D_n(a)) are constant from n = v(a) + 1 on, so the
product with (1 - X) is a Laurent polynomial; dividing out the Euler factor
of L(1, eta X) when possible gives the full coefficient as a polynomial in X.

Volumes are exact: D_n(a) only depends on x modulo p^n, and the residues are
counted with numpy histograms. The measure on E_v gives O_E volume 1.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import multiplicity

import config
from cyclo.number import CycNum
from eiskernel.laurent import LaurentPoly, NotExactlyDivisible
from integrate.oracle import BudgetExceeded, TailContractViolation
from local.cosets import InsufficientPrecision, PAdicCoset
from local.datum import LocalDatum, SIDE_F, is_local_norm


logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

STANDARD_PHI = "standard"


class NotRepresented(Exception):
    """Raised when a value lies outside the value set of the relevant quadratic space."""
    pass


def valuation(x: Rational, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if not x:
        raise ValueError("valuation of 0 is infinite")
    return multiplicity(p, abs(x.numerator)) - multiplicity(p, x.denominator)


def _residue(x: Fraction, p: int, modulus: int) -> int:
    """A p-integral rational reduced modulo p^n."""
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


# ============================================================================
# LOCAL QUADRATIC SPACES
# ============================================================================

@dataclass(frozen=True)
class QuadSpaceLocal:
    """
    The plane (E_v, u * N_{E/F}) at a finite place.

    Split places use the hyperbolic form x1 * x2 on F_v^2. The scalar u must be
    p-integral; unit scalars are the standard case, and the non-norm scalars
    of flipped (incoherent) local components have valuation one at inert places.

    Attributes:
        datum (LocalDatum): The place and its quadratic algebra
        u (Fraction): The similitude scalar
    """

    datum: LocalDatum
    u: Fraction = Fraction(1)

    def __post_init__(self):
        u = Fraction(self.u)
        if not u:
            raise ValueError("The similitude scalar u must be nonzero")
        if valuation(u, self.datum.p) < 0:
            raise ValueError(f"u = {u} is not {self.datum.p}-integral; rescale it first")
        object.__setattr__(self, "u", u)

    @property
    def u_valuation(self) -> int:
        return valuation(self.u, self.datum.p)

    def represents(self, a: Rational) -> bool:
        """True iff the nonzero rational a is a value of u * q on V_2."""
        return is_local_norm(Fraction(a) / self.u, self.datum)

    def to_dict(self) -> Dict[str, Any]:
        return {"datum": self.datum.to_dict(), "u": str(self.u)}


def flip_scalar(datum: LocalDatum) -> int:
    """
    The smallest positive integer that is not a local norm from E_v.

    (E_v, c u q) is then the other two-dimensional space of discriminant E_v.

    Raises:
        ValueError: At split places, where every element is a norm
    """
    if datum.quad_type == LocalDatum.SPLIT:
        raise ValueError(f"No non-norm scalar at the split place {datum.p}")
    c = 2
    while is_local_norm(c, datum):
        c += 1
    return c


# ============================================================================
# VOLUMES OF D_n(a)
# ============================================================================

@lru_cache(maxsize=4096)
def _residue_count(space: QuadSpaceLocal, target: int, n: int) -> int:
    """#{x in O_E / p^n O_E : u q(x) = target mod p^n}."""
    if n == 0:
        return 1
    datum = space.datum
    p = datum.p
    modulus = p ** n
    u = _residue(space.u, p, modulus)
    cap = config.DN_VOLUME_MAX_MODULUS

    if datum.quad_type == LocalDatum.SPLIT:
        if modulus > cap:
            raise BudgetExceeded(f"Residue counting modulo {p}^{n} exceeds {cap}")
        # x1 = p^k w contributes p^k solutions x2 to every multiple of p^k
        hist = np.zeros(modulus, dtype=np.int64)
        for k in range(n + 1):
            with_valuation = p ** (n - k) - p ** (n - k - 1) if k < n else 1
            hist[::p ** k] += with_valuation * p ** k
        scaled = (u * np.arange(modulus, dtype=np.int64)) % modulus
        return int(hist[scaled == target].sum())

    if datum.t == 0:
        if modulus > cap:
            raise BudgetExceeded(f"Residue counting modulo {p}^{n} exceeds {cap}")
        x = np.arange(modulus, dtype=np.int64)
        squares = (x * x) % modulus
        first = np.bincount((u * squares) % modulus, minlength=modulus)
        second = np.bincount((-u * datum.s * squares) % modulus, minlength=modulus)
        return int(np.dot(first, second[(target - x) % modulus]))

    if modulus * modulus > cap:
        raise BudgetExceeded(f"Residue counting modulo {p}^{n} squared exceeds {cap}")
    x1, x2 = np.meshgrid(np.arange(modulus, dtype=np.int64),
                         np.arange(modulus, dtype=np.int64), indexing="ij")
    norms = (x1 * x1 + datum.t * x1 * x2 - datum.s * x2 * x2) % modulus
    return int(np.count_nonzero((u * norms) % modulus == target))


def dn_volume(space: QuadSpaceLocal, a: Union[Rational, PAdicCoset], n: int) -> Fraction:
    """
    Exact volume of D_n(a) intersected with the support O_E of phi_2.

    Args:
        space: The local quadratic space
        a: A rational, or an F-side coset known modulo p^n
        n: Depth of the congruence, n >= 0

    Returns:
        vol{x in O_E : u q(x) in a + p^n O_F}

    Raises:
        InsufficientPrecision: If a coset does not determine a modulo p^n
        BudgetExceeded: If the residue count is too large
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    p = space.datum.p
    if isinstance(a, PAdicCoset):
        if a.side != SIDE_F or a.datum.p != p:
            raise ValueError(f"{a} is not an F-side coset at {p}")
        if a.valuation + a.precision < n:
            raise InsufficientPrecision(
                f"{a} is only known modulo p^{a.valuation + a.precision}, need p^{n}")
        a = a.representative()[0]
    a = Fraction(a)
    if a and valuation(a, p) < 0:
        # u q(x) is integral on O_E
        return Fraction(0)
    modulus = p ** n
    target = _residue(a, p, modulus) if a else 0
    return Fraction(_residue_count(space, target, n), modulus * modulus)


# ============================================================================
# WHITTAKER POLYNOMIALS
# ============================================================================

def _l_constant(datum: LocalDatum) -> Fraction:
    """c with L(1, eta X) = (1 - cX)^-1."""
    if datum.quad_type == LocalDatum.SPLIT:
        return Fraction(1, datum.p)
    if datum.quad_type == LocalDatum.INERT:
        return Fraction(-1, datum.p)
    return Fraction(0)


def stable_index(space: QuadSpaceLocal, a: Rational) -> int:
    """First n from which q^n vol(D_n(a)) is constant."""
    m = valuation(a, space.datum.p)
    if m < 0:
        return 0
    return m + 1 + space.datum.v_of_D


@lru_cache(maxsize=1024)
def _normalized_volumes(space: QuadSpaceLocal, a: Fraction) -> Tuple[Fraction, ...]:
    p = space.datum.p
    n0 = stable_index(space, a)
    terms = tuple(p ** n * dn_volume(space, a, n) for n in range(n0 + 2))
    if terms[n0] != terms[n0 + 1]:
        raise TailContractViolation(
            f"q^n vol(D_n({a})) not constant from n = {n0} at {space}: "
            f"{terms[n0]} then {terms[n0 + 1]}")
    return terms[:n0 + 1]


@dataclass
class WhittakerCoefficient:
    """
    W_a(1, u, chi_F) for standard phi_2, as data in X = chi_F(varpi).

    Attributes:
        space (QuadSpaceLocal): The local space
        a (Fraction): The Fourier index
        volumes (Tuple[Fraction, ...]): q^n vol(D_n(a)) for n up to the stable index
        numerator (LaurentPoly): (1 - X) sum_n X^n q^n vol(D_n(a)) after the tail cancellation
        l_constant (Fraction): c with L(1, eta X) = (1 - cX)^-1
        full (Optional[LaurentPoly]): numerator / (1 - cX) when that division is exact
    """

    space: QuadSpaceLocal
    a: Fraction
    volumes: Tuple[Fraction, ...]
    numerator: LaurentPoly
    l_constant: Fraction
    full: Optional[LaurentPoly]

    @property
    def is_polynomial(self) -> bool:
        return self.full is not None

    def value_at(self, x) -> CycNum:
        """The coefficient at X = x."""
        if self.full is not None:
            return self.full.evaluate(x)
        x = x if isinstance(x, CycNum) else CycNum(x)
        return self.numerator.evaluate(x) / (1 - self.l_constant * x)

    def at_one(self) -> CycNum:
        return self.value_at(1)

    def derivative_at_one(self) -> CycNum:
        """d/dX at X = 1."""
        if self.full is not None:
            return self.full.derivative_at_one()
        c = self.l_constant
        return (self.numerator.derivative_at_one() / (1 - c)
                + self.numerator.evaluate(1) * c / (1 - c) ** 2)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "space": self.space.to_dict(),
            "a": str(self.a),
            "prefactor": "|d|^(1/2) L(1, eta X) (1 - X)",
            "L_constant": str(self.l_constant),
            "volumes": [str(v) for v in self.volumes],
            "numerator": self.numerator.to_dict(),
            "full": self.full.to_dict() if self.full is not None else None,
            "at_one": self.at_one().to_json(),
        }


def whittaker_poly(space: QuadSpaceLocal, a: Rational,
                   phi2: str = STANDARD_PHI) -> WhittakerCoefficient:
    """
    Laurent-polynomial form of the local Whittaker coefficient.

    With c' the stable value of q^n vol(D_n(a)) from n0 on, the tail
    c' X^n0 / (1 - X) cancels against (1 - X), leaving

        (1 - X) sum_{n < n0} q^n vol(D_n(a)) X^n + c' X^n0.

    Args:
        space: Local space (E_v, uq)
        a: Nonzero rational Fourier index
        phi2: Only "standard" is supported

    Returns:
        WhittakerCoefficient

    Raises:
        ValueError: For a = 0 (constant terms are not assembled) or another phi2
    """
    if phi2 != STANDARD_PHI:
        raise ValueError(f"Only the standard Schwartz function is supported, got {phi2}")
    a = Fraction(a)
    if not a:
        raise ValueError("a = 0 is the constant term; it is not assembled")
    volumes = _normalized_volumes(space, a)
    n0 = len(volumes) - 1
    head = LaurentPoly.from_sequence(volumes[:n0])
    numerator = head - head.shift(1) + LaurentPoly.monomial(n0, volumes[n0])
    c = _l_constant(space.datum)
    try:
        full = numerator.divide_linear(c)
    except NotExactlyDivisible:
        full = None
        logger.debug(f"W_{a} at {space} keeps its L(1, eta X) denominator")
    return WhittakerCoefficient(space, a, volumes, numerator, c, full)


def whittaker_direct(space: QuadSpaceLocal, a: Rational, x, depth: Optional[int] = None) -> CycNum:
    """
    The coefficient at X = x (x != 1) by direct summation of the defining series.

    The first `depth` terms are summed from fresh volume computations and the
    remainder is closed with the geometric tail of the last one.
    """
    x = x if isinstance(x, CycNum) else CycNum(x)
    if x == 1:
        raise ValueError("Direct summation needs X != 1")
    a = Fraction(a)
    p = space.datum.p
    if depth is None:
        depth = stable_index(space, a) + 2
    partial = CycNum.sum(p ** n * dn_volume(space, a, n) * x ** n for n in range(depth))
    tail = p ** depth * dn_volume(space, a, depth) * x ** depth / (1 - x)
    return (1 - x) * (partial + tail) / (1 - _l_constant(space.datum) * x)


def whittaker_p_standard(datum: LocalDatum, a: Rational, u: Rational,
                         chi_F_minus1) -> CycNum:
    """
    Whittaker coefficient at v | p for the standard phi_2 there.

    |d|^(3/2) |D|^(1/2) chi_F(-1) if v(a) >= -v(d) and v(u) = -v(d), else 0.
    """
    a, u = Fraction(a), Fraction(u)
    if not u:
        raise ValueError("u must be nonzero")
    v_d = datum.v_of_d
    a_ok = (not a) or valuation(a, datum.p) >= -v_d
    if not (a_ok and valuation(u, datum.p) == -v_d):
        return CycNum(0)
    sign = chi_F_minus1 if isinstance(chi_F_minus1, CycNum) else CycNum(chi_F_minus1)
    if datum.v_of_D:
        return sign * CycNum.sqrt(Fraction(1, datum.p ** datum.v_of_D))
    return sign


# ============================================================================
# ARCHIMEDEAN DATA
# ============================================================================

ARCHIMEDEAN_CONSTANTS = {
    "W_a>0": {"tag": "2*exp(-2*pi*a)", "q_coefficient": Fraction(2)},
    "W_0": {"tag": "1", "q_coefficient": Fraction(1)},
    "W_ua<0": {"tag": "0", "q_coefficient": Fraction(0)},
    "R_circ_inf": {"tag": "1/2", "q_coefficient": Fraction(1, 2)},
}


def archimedean_constants() -> Dict[str, Dict[str, Any]]:
    """Recorded archimedean constants (metadata, not computed values)."""
    return {key: dict(entry) for key, entry in ARCHIMEDEAN_CONSTANTS.items()}


def archimedean_fold(a: Rational, u: Rational, definite_sign: int = 1) -> Fraction:
    """
    The archimedean Whittaker value with e^(-2 pi a) absorbed into q^a.

    definite_sign is +1 for the positive definite plane, -1 for the negative one.
    """
    a = Fraction(a)
    if not a:
        return ARCHIMEDEAN_CONSTANTS["W_0"]["q_coefficient"]
    if a * Fraction(u) * definite_sign > 0:
        return ARCHIMEDEAN_CONSTANTS["W_a>0"]["q_coefficient"]
    return ARCHIMEDEAN_CONSTANTS["W_ua<0"]["q_coefficient"]


# ============================================================================
# DERIVATIVE KERNEL
# ============================================================================

def derivative_kernel_k_natural(datum: LocalDatum, x2_norm_valuation: int, u: Rational = 1,
                                vol_e1: Fraction = None) -> Fraction:
    """
    k(1, x, u) divided by l(varpi) at a good inert place.

    k = -|d|^(1/2) |D|^(1/2) / vol(E_v^1) * W'_{uq(x2)}(1, u), and l(varpi)^-1
    turns the directional derivative into d/dX at X = 1. Vectors x2 of the
    other quaternion algebra have q(x2) of odd valuation.

    Args:
        datum: An inert place
        x2_norm_valuation: v(q(x2)), odd
        u: The similitude scalar
        vol_e1: vol(E_v^1); config.VOL_E1_INERT by default

    Returns:
        The rational k-natural value (0 off O_B x O_F^x)

    Raises:
        NotRepresented: For even v(q(x2))
    """
    if datum.quad_type != LocalDatum.INERT:
        raise ValueError(f"The derivative kernel is computed at inert places, got {datum}")
    vol_e1 = Fraction(config.VOL_E1_INERT if vol_e1 is None else vol_e1)
    u = Fraction(u)
    m = x2_norm_valuation
    if m < 0 or valuation(u, datum.p) != 0:
        return Fraction(0)
    if m % 2 == 0:
        raise NotRepresented(
            f"v(q(x2)) = {m} is even; q(x2) lies outside the values of the division algebra")
    coefficient = whittaker_poly(QuadSpaceLocal(datum, u), u * datum.p ** m)
    if not coefficient.at_one().is_zero():
        raise ArithmeticError(f"W at X = 1 should vanish for v(a) = {m} at {datum}")
    k = -coefficient.derivative_at_one() / vol_e1
    logger.debug(f"k_natural at {datum}, v(q(x2)) = {m}: {k}")
    return k.to_fraction()


@dataclass
class VolumeFit:
    """Fitted vol(E_v^1) against k-natural = (v(q(x2)) + 1) / 2."""

    datum: LocalDatum
    samples: Dict[int, Fraction]
    fitted: Optional[Fraction]
    documented: Fraction

    @property
    def consistent(self) -> bool:
        return self.fitted is not None and self.fitted == self.documented

    def to_dict(self) -> Dict[str, Any]:
        return {"datum": self.datum.to_dict(),
                "samples": {str(m): str(v) for m, v in self.samples.items()},
                "fitted": None if self.fitted is None else str(self.fitted),
                "documented": str(self.documented),
                "consistent": self.consistent}


def fit_vol_E1(datum: LocalDatum, valuations: Sequence[int] = (1, 3, 5)) -> VolumeFit:
    """
    Solve -W'(1) / vol = (m + 1) / 2 for vol at each odd m and compare the results.

    A disagreement with config.VOL_E1_INERT is logged, not corrected.
    """
    samples: Dict[int, Fraction] = {}
    for m in valuations:
        raw = derivative_kernel_k_natural(datum, m, vol_e1=1)
        samples[m] = raw / Fraction(m + 1, 2)
    values = set(samples.values())
    fitted = values.pop() if len(values) == 1 else None
    fit = VolumeFit(datum, samples, fitted, Fraction(config.VOL_E1_INERT))
    if not fit.consistent:
        logger.warning(f"vol(E_v^1) fit at {datum}: {fit.to_dict()}")
    else:
        logger.info(f"vol(E_v^1) fit at {datum} agrees with the documented {fit.documented}")
    return fit
