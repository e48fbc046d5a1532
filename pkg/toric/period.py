"""
Toric Periods at a Split Place

For v | p split in E (E_v = F_v x F_v, chi = (chi_1, chi_2) with
chi_1 chi_2 = omega^-1) this module computes:

    toric_double_integral    the level-r toric integral in its factored form
                             A_r * B_r, A_r = int_{v(t) >= -r} psi(-t)|t|alpha(t)chi_1(t) d^x t
    kirillov_toric_integral  the same integral from the Kirillov vectors f_{alpha,r}^+-,
                             int chi_1(t) (pi(t) f^+, f^-) d^x t, by nested enumeration
    r_circ_bruteforce        R_r = |d| zeta(1)^-1 int_{v(q(t)) >= -r} |q(t)| alpha(q(t)) chi(t) psi_E(t) d^x t
    iwahori_terms_Q_sharp    the terms Q(i, c) of the Iwahori decomposition of Q_sharp,
                             each enumerated over (y, t)

and the identities relating them to the product formula of zeta.interpolation.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import multiplicity

import config
from cyclo.number import CycNum
from integrate.oracle import (IntegrandSpec, TailContractViolation, annulus_values,
                              geometric_tail, integrate_with_tail)
from local.characters import MulChar, eval_mul
from local.cosets import (MULTIPLICATIVE, AddChar, PAdicCoset, coset_measure, eval_add,
                          unit_group)
from local.datum import LocalDatum, SIDE_F
from local.euler import ETA, ZETA_F, euler_L
from toric.kirillov import check_alpha, f_alpha_r_minus, f_alpha_r_plus
from zeta.interpolation import (check_central_character, interpolation_factor_Zv, l_half,
                                R_circ_product)


logger = logging.getLogger(__name__)


class InsufficientLevel(Exception):
    """Raised when the level r is below the stabilization threshold."""
    pass


# ============================================================================
# INPUTS AND LEVELS
# ============================================================================

def _check_tuple(alpha: MulChar, omega: MulChar, chi_pair: Sequence[MulChar]) -> LocalDatum:
    datum = alpha.datum
    if datum.quad_type != LocalDatum.SPLIT:
        raise ValueError(f"Toric periods are computed at split places only, got {datum}")
    if len(chi_pair) != 2:
        raise ValueError(f"A split place needs two characters, got {len(chi_pair)}")
    check_alpha(alpha)
    for chi in list(chi_pair) + [omega]:
        if chi.datum != datum or chi.side != SIDE_F:
            raise ValueError(f"{chi} is not an F-side character of {datum}")
    check_central_character(datum, chi_pair, omega)
    return datum


def q_U_exponent(omega: MulChar) -> int:
    """n with q(U) = 1 + p^n Z_p: max(conductor(omega), 1)."""
    return max(omega.conductor, 1)


def level_threshold(alpha: MulChar, omega: MulChar, chi_pair: Sequence[MulChar]) -> int:
    """
    Smallest level r treated as stabilized.

    max(conductors) + additive level + n + 1, raised to N_1 + N_2 with
    N_i = max(c(chi_i), 1) so that the region v(q(t)) >= -r covers the support.
    """
    conductors = [alpha.conductor, omega.conductor] + [chi.conductor for chi in chi_pair]
    documented = max(conductors) + AddChar.level + q_U_exponent(omega) + 1
    support = sum(max(chi.conductor, 1) for chi in chi_pair)
    return max(documented, support)


# ============================================================================
# SINGLE-VARIABLE FACTORS
# ============================================================================

@dataclass
class AnnulusSeries:
    """
    Annulus values of t -> psi(t)|t|alpha(t)chi(t) for v(t) >= lo.

    Values are enumerated on [lo, tail_start] and continue geometrically beyond.
    """
    lo: int
    tail_start: int
    ratio: CycNum
    values: Dict[int, CycNum]

    def value(self, n: int) -> CycNum:
        if n < self.lo:
            return CycNum(0)
        if n <= self.tail_start:
            return self.values[n]
        return self.values[self.tail_start] * self.ratio ** (n - self.tail_start)

    def sum_from(self, m: int) -> CycNum:
        """Sum of the annulus values over n >= m."""
        m = max(m, self.lo)
        first = self.value(max(m, self.tail_start))
        tail = CycNum(0) if first.is_zero() else geometric_tail(first, self.ratio)
        finite = CycNum.sum(self.values[n] for n in range(m, self.tail_start))
        return finite + tail


def annulus_series(alpha: MulChar, chi: MulChar, psi: AddChar, lo: int) -> AnnulusSeries:
    """
    Enumerate psi(t)|t|alpha(t)chi(t) d^x t on the annuli lo..1.

    For v(t) >= 0 psi is trivial, so the annuli are geometric with ratio
    alpha(varpi) chi(varpi) / p.

    Raises:
        TailContractViolation: If the annulus after the tail start breaks the ratio
    """
    datum = alpha.datum
    p = datum.p
    a = alpha.at_uniformizer

    def evaluator(t: PAdicCoset) -> CycNum:
        return eval_add(psi, t) * eval_mul(chi, t) * a ** t.valuation / Fraction(p) ** t.valuation

    spec = IntegrandSpec(evaluator, chi.conductor, SIDE_F, MULTIPLICATIVE, datum,
                         additive_depth=0)
    tail_start = max(lo, 0)
    values = annulus_values(spec, lo, tail_start + 1)
    ratio = a * chi.at_uniformizer / p
    if values[tail_start + 1] != values[tail_start] * ratio:
        raise TailContractViolation(f"Annulus {tail_start + 1} of {chi} is not geometric "
                                    f"with ratio {ratio}")
    return AnnulusSeries(lo, tail_start, ratio, values)


def toric_factor(alpha: MulChar, chi: MulChar, psi: AddChar, r: int) -> CycNum:
    """
    int_{v(t) >= -r} psi(t)|t|alpha(t)chi(t) d^x t, enumerated from v(t) = -r.

    For r >= max(c(chi), 1) this is zeta_F(1) Z_w(chi, psi).
    """
    return annulus_series(alpha, chi, psi, -r).sum_from(-r)


@dataclass
class ToricIntegral:
    """
    The level-r toric integral in factored form.

    Attributes:
        r (int): The level
        factors (Tuple[CycNum, CycNum]): A_r (against psi^-1) and B_r (against psi)
        value (CycNum): |d|^-1 A_r B_r
        stabilized (bool): r is at or above the threshold
        threshold (int): The stabilization threshold
    """
    r: int
    factors: Tuple[CycNum, CycNum]
    value: CycNum
    stabilized: bool
    threshold: int

    def to_dict(self) -> Dict[str, Any]:
        return {"r": self.r, "factors": [f.to_json() for f in self.factors],
                "value": self.value.to_json(), "display": str(self.value),
                "stabilized": self.stabilized, "threshold": self.threshold}


def toric_double_integral(alpha: MulChar, omega: MulChar, chi_pair: Sequence[MulChar],
                          psi: AddChar, r: int, strict: bool = False) -> ToricIntegral:
    """
    The reduced double integral of the toric period at level r.

    After t' = ty the integral over F^x x F^x splits as

        int_{v(t') >= -r} psi(-t')|t'|alpha(t')chi_1(t') d^x t'
          * int_{v(y) >= -r} psi(y)|y|alpha(y)chi_2(y) d^x y

    Args:
        alpha: Unramified unit-valued character
        omega: Central character
        chi_pair: (chi_1, chi_2) with chi_1 chi_2 = omega^-1
        psi: Level-0 additive character
        r: Level
        strict: Raise instead of flagging an unstabilized level

    Returns:
        ToricIntegral

    Raises:
        InsufficientLevel: If strict and r is below the threshold
        InconsistentCentralCharacter: If chi_1 chi_2 != omega^-1
    """
    _check_tuple(alpha, omega, chi_pair)
    threshold = level_threshold(alpha, omega, chi_pair)
    stabilized = r >= threshold
    if not stabilized:
        if strict:
            raise InsufficientLevel(f"r = {r} is below the threshold {threshold}")
        logger.warning(f"Level r = {r} is below the threshold {threshold}; value not stabilized")
    first = toric_factor(alpha, chi_pair[0], psi.twisted(-1), r)
    second = toric_factor(alpha, chi_pair[1], psi, r)
    value = first * second  # |d| = 1 over Q_p
    logger.debug(f"toric integral at r={r}: {first} * {second} = {value}")
    return ToricIntegral(r, (first, second), value, stabilized, threshold)


def kirillov_toric_integral(alpha: MulChar, omega: MulChar, chi_pair: Sequence[MulChar],
                            psi: AddChar, r: int) -> CycNum:
    """
    |d|^-1 int_{F^x} chi_1(t) (pi(t) f_{alpha,r}^+, f_{alpha,r}^-) d^x t with the raw pairing.

    Computed as int_y f^-(y) int_t chi_1(t) f^+(t y) d^x t d^x y. The inner
    integral uses the representative of the y coset as an exact element, so the
    t cosets only need precision for psi(-t y).
    """
    datum = _check_tuple(alpha, omega, chi_pair)
    chi = chi_pair[0]
    f_plus = f_alpha_r_plus(alpha, r, psi)
    f_minus = f_alpha_r_minus(alpha, omega, r, psi)
    inner_ratio = f_plus.tail_ratio * chi.at_uniformizer
    inner_precision = max(f_plus.precision, chi.conductor)

    def inner(y: PAdicCoset) -> CycNum:
        def evaluator(t: PAdicCoset) -> CycNum:
            ty = PAdicCoset(datum, SIDE_F, t.valuation + y.valuation,
                            t.unit * y.unit, t.precision)
            return eval_mul(chi, t) * f_plus(ty)

        spec = IntegrandSpec(evaluator, inner_precision, SIDE_F, MULTIPLICATIVE, datum,
                             additive_depth=f_plus.additive_depth - y.valuation)
        return integrate_with_tail(spec, f_plus.support_min - y.valuation,
                                   f_plus.tail_start - y.valuation, inner_ratio,
                                   reason="psi(-ty) trivial")

    spec = IntegrandSpec(lambda y: f_minus(y) * inner(y),
                         max(f_minus.precision, chi.conductor), SIDE_F, MULTIPLICATIVE,
                         datum, additive_depth=f_minus.additive_depth)
    value = integrate_with_tail(spec, f_minus.support_min, f_minus.tail_start,
                                f_minus.tail_ratio / chi.at_uniformizer,
                                reason="psi(y) trivial")
    logger.debug(f"Kirillov toric integral at r={r}: {value}")
    return value


# ============================================================================
# R-CIRC AND THE IWAHORI TERMS
# ============================================================================

def r_circ_bruteforce(alpha: MulChar, chi_pair: Sequence[MulChar], psi: AddChar,
                      r: int) -> CycNum:
    """
    R_r = |d| zeta_F(1)^-1 * sum over n_1 + n_2 >= -r of a_1(n_1) a_2(n_2).

    a_i(n) is the annulus integral of psi(t)|t|alpha(t)chi_i(t) d^x t at v(t) = n.
    Annuli start one below the support -max(c_i, 1).
    """
    datum = alpha.datum
    first, second = (annulus_series(alpha, chi, psi, -max(chi.conductor, 1) - 1)
                     for chi in chi_pair)
    # for n_1 >= -r - second.lo the inner range is the whole support
    k = -r - second.lo
    value = CycNum.sum(first.value(n) * second.sum_from(-r - n) for n in range(first.lo, k))
    value = value + first.sum_from(max(k, first.lo)) * second.sum_from(second.lo)
    return value / euler_L(datum, ZETA_F, 1)


def psi_qU(psi: AddChar, x: Fraction, n: int) -> CycNum:
    """
    Average of psi over the coset x (1 + p^n Z_p).

    Example:
        >>> psi_qU(AddChar(3), Fraction(-1, 9), 1)
        CycNum(0)
    """
    p = psi.p
    x = Fraction(x)
    depth = multiplicity(p, x.denominator) if x.denominator % p == 0 else 0
    digits = depth - n
    if digits <= 0:
        return psi.value_at(x)
    count = p ** digits
    return CycNum.sum(psi.value_at(x * (1 + p ** n * j)) for j in range(count)) / count


def schwartz_level(omega: MulChar, chi_pair: Sequence[MulChar]) -> int:
    """n with U = (1 + p^n Z_p)^2 in E^x: chi is trivial on U and q(U) = 1 + p^n Z_p."""
    return max([q_U_exponent(omega)] + [chi.conductor for chi in chi_pair])


def translated_whittaker(alpha: MulChar, omega: MulChar, b: int, r: int, i: int) -> CycNum:
    """
    W(diag(y, 1) n^-(c varpi^(r-i))) for v(y) = b.

    W is the alpha-ordinary Whittaker function, |y| alpha(y) on O and 0 off it,
    right invariant under K_1^1(varpi^m) with m = q_U_exponent(omega).

    Raises:
        InsufficientLevel: If n^-(c varpi^(r-i)) is not in K_1^1(varpi^m)
    """
    m = q_U_exponent(omega)
    if r - i < m:
        raise InsufficientLevel(f"n^-(c varpi^{r - i}) is outside K_1^1(varpi^{m})")
    if b < 0:
        return CycNum(0)
    return alpha.at_uniformizer ** b / Fraction(alpha.datum.p) ** b


def _q_sharp_slice(alpha: MulChar, omega: MulChar, chi_pair: Sequence[MulChar], psi: AddChar,
                   r: int, i: int, level: int, a1: int, a2: int) -> CycNum:
    """
    The (y, t) integrand of Q(i, c) over v(t_1) = a1, v(t_2) = a2, without the c factor.

    Sums chi(t) psi_{E,U}(t) W(y) delta_{q(U)}(varpi^r y^-1 q(t)) over precision-level
    cosets of t and y, weighted by their d^x volumes.
    """
    datum = alpha.datum
    p = datum.p
    modulus = p ** level
    units = unit_group(datum, SIDE_F, level).elements
    vol = coset_measure(datum, SIDE_F, 0, level, MULTIPLICATIVE)
    # delta_{q(U)} vanishes unless v(y) = r + v(q(t))
    b = r + a1 + a2
    w_value = translated_whittaker(alpha, omega, b, r, i)
    if w_value.is_zero():
        return CycNum(0)
    factors = []
    for chi, a in zip(chi_pair, (a1, a2)):
        factors.append({u: eval_mul(chi, PAdicCoset(datum, SIDE_F, a, u, level))
                        * psi_qU(psi, Fraction(p) ** a * u, level) for u in units})
    terms = []
    for u1 in units:
        for u2 in units:
            q_unit = (u1 * u2) % modulus
            hits = sum(1 for w in units if (w - q_unit) % modulus == 0)
            if hits:
                terms.append(factors[0][u1] * factors[1][u2] * hits)
    return CycNum.sum(terms) * w_value * vol ** 3


def q_sharp_integral(alpha: MulChar, omega: MulChar, chi_pair: Sequence[MulChar],
                     psi: AddChar, r: int, i: int) -> CycNum:
    """
    alpha(varpi)^-r |varpi|^-r vol(q(U))^-1 zeta_F(1)^-1 times the enumerated (y, t) integral.

    t_j runs over the annuli from one below -max(c(chi_j), 1). psi_{E,U} is trivial
    on integral t_j, so annuli with a_j >= 0 are geometric with ratio
    alpha(varpi) chi_j(varpi) / p and are summed as tails.

    Raises:
        TailContractViolation: If the first annulus past the tail breaks the ratio
    """
    datum = alpha.datum
    p = datum.p
    level = schwartz_level(omega, chi_pair)
    lo = [-max(chi.conductor, 1) - 1 for chi in chi_pair]
    rho = [alpha.at_uniformizer * chi.at_uniformizer / p for chi in chi_pair]
    cache: Dict[Tuple[int, int], CycNum] = {}

    def piece(a1: int, a2: int) -> CycNum:
        if (a1, a2) not in cache:
            cache[(a1, a2)] = _q_sharp_slice(alpha, omega, chi_pair, psi, r, i, level, a1, a2)
        return cache[(a1, a2)]

    if config.TAIL_SPOT_CHECK:
        for (a1, a2), ratio in (((1, 0), rho[0]), ((0, 1), rho[1])):
            if piece(a1, a2) != piece(0, 0) * ratio:
                raise TailContractViolation(f"Slice ({a1}, {a2}) of Q({i}, c) is not geometric "
                                            f"with ratio {ratio}")
    parts = [piece(a1, a2) for a1 in range(lo[0], 0) for a2 in range(lo[1], 0)]
    parts += [geometric_tail(piece(a1, 0), rho[1]) for a1 in range(lo[0], 0)]
    parts += [geometric_tail(piece(0, a2), rho[0]) for a2 in range(lo[1], 0)]
    parts.append(geometric_tail(geometric_tail(piece(0, 0), rho[0]), rho[1]))
    vol_qU = coset_measure(datum, SIDE_F, 0, level, MULTIPLICATIVE)
    scale = alpha.at_uniformizer ** (-r) * Fraction(p) ** r / vol_qU
    return CycNum.sum(parts) * scale / euler_L(datum, ZETA_F, 1)


@dataclass
class QSharpTerms:
    """
    The Iwahori decomposition Q_sharp = Q(0, 1) + sum_{i, c} Q(i, c).

    Attributes:
        r (int): The level
        r_circ (CycNum): Q(0, 1), enumerated like the other terms
        terms (List[Tuple[Tuple[int, int], CycNum]]): ((i, c), Q(i, c)) for 1 <= i <= r
        total (CycNum): Q_sharp
    """
    r: int
    r_circ: CycNum
    terms: List[Tuple[Tuple[int, int], CycNum]]
    total: CycNum

    def level_sums(self) -> Dict[int, CycNum]:
        sums: Dict[int, CycNum] = {}
        for (i, _), value in self.terms:
            sums[i] = sums.get(i, CycNum(0)) + value
        return sums

    def value(self, i: int, c: int) -> CycNum:
        if (i, c) == (0, 1):
            return self.r_circ
        return dict(self.terms)[(i, c)]

    def to_dict(self) -> Dict[str, Any]:
        return {"r": self.r, "Q(0,1)": self.r_circ.to_json(),
                "terms": {f"({i},{c})": v.to_json() for (i, c), v in self.terms},
                "level_sums": {str(i): v.to_json() for i, v in self.level_sums().items()},
                "total": self.total.to_json(), "display": str(self.total)}


def iwahori_terms_Q_sharp(alpha: MulChar, omega: MulChar, chi_pair: Sequence[MulChar],
                          psi: AddChar, r: int,
                          threads: Optional[int] = None) -> QSharpTerms:
    """
    Q(0, 1) and Q(i, c) for 1 <= i <= r and c in (Z/p^i)^x.

    The representative n^-(c varpi^(r-i)) w_r^-1 acts on the Schwartz function by
    |varpi|^(i-r) psi_{E,U}(u x_1) psi_{q(U)}(-c varpi^-i) delta_{q(U)}(varpi^r u), so

        Q(i, c) = |varpi|^i psi_{q(U)}(-c varpi^-i) * q_sharp_integral(..., i)

    with W evaluated at diag(y, 1) n^-(c varpi^(r-i)). Each term is enumerated
    on its own; a zero psi_{q(U)} factor makes the integrand vanish.

    Args:
        alpha, omega, chi_pair, psi: The tuple
        r: Level (at least level_threshold)
        threads: Worker threads for the (i, c) terms (config default)

    Raises:
        InsufficientLevel: If r is below the threshold
    """
    datum = _check_tuple(alpha, omega, chi_pair)
    threshold = level_threshold(alpha, omega, chi_pair)
    if r < threshold:
        raise InsufficientLevel(f"Iwahori terms need r >= {threshold}, got r = {r}")
    p = datum.p
    level = schwartz_level(omega, chi_pair)
    labels = [(i, c) for i in range(1, r + 1) for c in range(1, p ** i) if c % p]

    def term(label: Tuple[int, int]) -> CycNum:
        i, c = label
        factor = psi_qU(psi, Fraction(-c, p ** i), level)
        if factor.is_zero():
            return CycNum(0)
        integral = q_sharp_integral(alpha, omega, chi_pair, psi, r, i)
        return factor * integral / Fraction(p) ** i

    with ThreadPoolExecutor(max_workers=threads or config.DEFAULT_THREADS) as pool:
        values = list(pool.map(term, [(0, 1)] + labels))
    r_circ, values = values[0], values[1:]
    terms = list(zip(labels, values))
    total = r_circ + CycNum.sum(values)
    logger.debug(f"Q_sharp at r={r} over {len(terms)} terms: {total}")
    return QSharpTerms(r, r_circ, terms, total)


@dataclass
class QSharpReport:
    """
    Outcome of the Q_sharp identity check.

    Attributes:
        passed (bool): All identities hold exactly
        terms (QSharpTerms): The decomposition
        r_circ_product (CycNum): |D|^(1/2) |d|^2 L(1, eta) prod_w Z_w
        l_eta (CycNum): L(1, eta_v)
        mismatches (List[Dict[str, Any]]): Failed identities with both sides
    """
    passed: bool
    terms: QSharpTerms
    r_circ_product: CycNum
    l_eta: CycNum
    mismatches: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "terms": self.terms.to_dict(),
                "R_circ_product": self.r_circ_product.to_json(),
                "L(1,eta)": self.l_eta.to_json(), "mismatches": self.mismatches}


def verify_Q_sharp_identity(alpha: MulChar, omega: MulChar, chi_pair: Sequence[MulChar],
                            psi: AddChar, r: int,
                            threads: Optional[int] = None) -> QSharpReport:
    """
    Check Q_sharp = L(1, eta)^-1 R and R = R_circ_product, with the level sums.

    R is the enumerated Q(0, 1); it is also compared with r_circ_bruteforce.

    Returns:
        QSharpReport (mismatches carry both sides as CycNum JSON)
    """
    datum = alpha.datum
    terms = iwahori_terms_Q_sharp(alpha, omega, chi_pair, psi, r, threads=threads)
    product = R_circ_product(datum, alpha, chi_pair, psi)
    l_eta = euler_L(datum, ETA, 1)
    p = datum.p
    checks = [("Q_sharp = L(1,eta)^-1 R", terms.total, terms.r_circ / l_eta),
              ("Q(0,1) = R_r", terms.r_circ, r_circ_bruteforce(alpha, chi_pair, psi, r)),
              ("R = R_circ_product", terms.r_circ, product)]
    sums = terms.level_sums()
    checks.append(("sum_c Q(1,c) = -|varpi| R", sums.get(1, CycNum(0)),
                   -terms.r_circ / p))
    for i in range(2, r + 1):
        checks.append((f"sum_c Q({i},c) = 0", sums.get(i, CycNum(0)), CycNum(0)))
    mismatches = [{"identity": name, "lhs": lhs.to_json(), "rhs": rhs.to_json(),
                   "display": f"{lhs} != {rhs}"}
                  for name, lhs, rhs in checks if lhs != rhs]
    for m in mismatches:
        logger.warning(f"Q_sharp identity failed on {datum}: {m['identity']}: {m['display']}")
    return QSharpReport(not mismatches, terms, product, l_eta, mismatches)


# ============================================================================
# NORM RELATION AND THE TORIC PERIOD AT P
# ============================================================================

def norm_relation_check(alpha: MulChar, r: int, omega: Optional[MulChar] = None,
                        psi: Optional[AddChar] = None) -> bool:
    """
    Check that averaging f_{alpha,r+1} over V_r / V_{r+1} gives f_{alpha,r}.

    V_r / V_{r+1} has representatives diag(1 + j varpi^r, 1), j mod p. Both
    ordinary vectors are compared coset by coset at precision r + 2 on the
    annuli -r-2 .. 1.
    """
    datum = alpha.datum
    p = datum.p
    if r < 1:
        raise ValueError(f"Level r must be at least 1, got {r}")
    omega = omega or MulChar.trivial(datum)
    psi = psi or AddChar(p)
    if omega.conductor > r:
        logger.warning(f"omega has conductor {omega.conductor} > r = {r}; "
                       "V_r does not fix the minus vector")
    N = max(r + 2, omega.conductor)
    modulus = p ** N
    pairs = [(f_alpha_r_plus(alpha, r, psi), f_alpha_r_plus(alpha, r + 1, psi)),
             (f_alpha_r_minus(alpha, omega, r, psi), f_alpha_r_minus(alpha, omega, r + 1, psi))]
    units = unit_group(datum, SIDE_F, N).elements
    for low, high in pairs:
        for n in range(-r - 2, 2):
            for u in units:
                y = PAdicCoset(datum, SIDE_F, n, u, N)
                average = CycNum.sum(
                    high(PAdicCoset(datum, SIDE_F, n, (u * (1 + j * p ** r)) % modulus, N))
                    for j in range(p)) / p
                if average != low(y):
                    logger.debug(f"norm relation fails at {y}: {average} != {low(y)}")
                    return False
    return True


@dataclass
class ToricAtPReport:
    """
    Q_v(f^+, f^-, chi) against zeta_F(2)^-1 Z_v.

    Attributes:
        r (int): Level used
        raw (CycNum): The Kirillov toric integral
        q_value (CycNum): L(1, eta) L(1, ad) / (zeta(2) L(1/2)) times the normalized integral
        target (CycNum): zeta_F(2)^-1 Z_v
        residual (Optional[CycNum]): q_value / target (None when Z_v = 0)
    """
    r: int
    raw: CycNum
    q_value: CycNum
    target: CycNum
    residual: Optional[CycNum]

    def to_dict(self) -> Dict[str, Any]:
        return {"r": self.r, "raw": self.raw.to_json(), "Q_v": self.q_value.to_json(),
                "target": self.target.to_json(),
                "residual": None if self.residual is None else self.residual.to_json(),
                "display": {"Q_v": str(self.q_value), "target": str(self.target),
                            "residual": str(self.residual)}}


def toric_at_p_report(alpha: MulChar, omega: MulChar, chi_pair: Sequence[MulChar],
                      psi: AddChar, satake: Tuple[CycNum, CycNum],
                      r: Optional[int] = None) -> ToricAtPReport:
    """
    Compute Q_v(f_alpha^+, f_alpha^-, chi) and compare it with zeta_F(2)^-1 Z_v.

    The normalized pairing carries zeta(2) / L(1, sigma x sigma^vee) and
    L(1, sigma x sigma^vee) = zeta(1) L(1, ad), so

        Q_v = L(1, eta) / (zeta(1) L(1/2)) * kirillov_toric_integral

    The residual constant depends on the sign convention of the + model
    (it is chi_1(-1) here) and on the L(1/2) convention; it is reported.
    """
    datum = _check_tuple(alpha, omega, chi_pair)
    level = r if r is not None else level_threshold(alpha, omega, chi_pair)
    raw = kirillov_toric_integral(alpha, omega, chi_pair, psi, level)
    half = l_half(datum, chi_pair, satake)
    q_value = euler_L(datum, ETA, 1) / (euler_L(datum, ZETA_F, 1) * half) * raw
    factor = interpolation_factor_Zv(datum, alpha, chi_pair, psi, satake, omega=omega)
    target = factor.value / factor.zeta_two
    residual = None if target.is_zero() else q_value / target
    logger.info(f"toric period at {datum}, r={level}: Q_v={q_value}, target={target}, "
                f"residual={residual}")
    return ToricAtPReport(level, raw, q_value, target, residual)
