"""
Coset Models of F_v^x and E_w^x

This module provides the finite-precision coset model used by every integral:
PAdicCoset (varpi^n * u * (1 + varpi^N O)), the unit groups with their canonical
polycyclic generators and discrete-log tables, annulus enumeration with Haar
measures, and additive characters of level 0.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from sympy import primitive_root

from cyclo.number import CycNum
from local.datum import LocalDatum, SIDE_E, SIDE_F, Unit


logger = logging.getLogger(__name__)


class InsufficientPrecision(Exception):
    """Raised when a coset is too coarse for the function evaluated on it."""
    pass


# ============================================================================
# COSETS
# ============================================================================

class PAdicCoset:
    """
    The set varpi^n * u * (1 + varpi^N O) inside F_v^x or E_w^x.

    For the E side varpi is the uniformizer of E_w (p when inert, theta when
    ramified) and N counts powers of it.

    Attributes:
        datum (LocalDatum): The place
        side (str): SIDE_F or SIDE_E
        valuation (int): n
        unit (Unit): Unit class representative at precision N
        precision (int): N
    """

    __slots__ = ("datum", "side", "valuation", "unit", "precision")

    def __init__(self, datum: LocalDatum, side: str, valuation: int, unit: Unit, precision: int):
        if side not in (SIDE_F, SIDE_E):
            raise ValueError(f"side must be '{SIDE_F}' or '{SIDE_E}', got {side}")
        if side == SIDE_E and datum.quad_type == LocalDatum.SPLIT:
            raise ValueError("Split places are modelled through their F-side components")
        if precision < 0:
            raise ValueError(f"precision must be non-negative, got {precision}")
        self.datum = datum
        self.side = side
        self.valuation = valuation
        self.unit = datum.reduce_unit(side, unit, precision)
        self.precision = precision

    def coarsen(self, N: int) -> "PAdicCoset":
        """The coset of precision N containing this one."""
        if N > self.precision:
            raise InsufficientPrecision(f"Cannot refine precision {self.precision} to {N}")
        return PAdicCoset(self.datum, self.side, self.valuation, self.unit, N)

    def refinements(self) -> List["PAdicCoset"]:
        """All sub-cosets of precision N + 1."""
        N = self.precision
        group = unit_group(self.datum, self.side, N + 1)
        return [PAdicCoset(self.datum, self.side, self.valuation, u, N + 1)
                for u in group.elements
                if self.datum.reduce_unit(self.side, u, N) == self.unit]

    def __mul__(self, other: "PAdicCoset") -> "PAdicCoset":
        if not isinstance(other, PAdicCoset) or other.side != self.side:
            return NotImplemented
        N = min(self.precision, other.precision)
        unit = self.datum.mul_units(self.side, self.unit, other.unit, N)
        return PAdicCoset(self.datum, self.side, self.valuation + other.valuation, unit, N)

    def representative(self) -> Tuple[Fraction, Fraction]:
        """A representative as (x, y) with x + y*theta (y = 0 on the F side)."""
        if self.side == SIDE_F:
            return Fraction(self.datum.p) ** self.valuation * self.unit, Fraction(0)
        ux, uy = self.unit
        px, py = self.datum.uniformizer_power(self.valuation)
        s, t = self.datum.s, self.datum.t
        return px * ux + s * py * uy, px * uy + py * ux + t * py * uy

    def __eq__(self, other) -> bool:
        if not isinstance(other, PAdicCoset):
            return NotImplemented
        return (self.datum == other.datum and self.side == other.side
                and self.valuation == other.valuation and self.unit == other.unit
                and self.precision == other.precision)

    def __hash__(self) -> int:
        return hash((self.datum, self.side, self.valuation, self.unit, self.precision))

    def __repr__(self) -> str:
        return (f"PAdicCoset({self.datum}, {self.side}, v={self.valuation}, "
                f"u={self.unit}, N={self.precision})")


# ============================================================================
# UNIT GROUPS
# ============================================================================

class UnitGroup:
    """
    (O/varpi^N)^x with a polycyclic presentation.

    Every element is uniquely g_1^e_1 ... g_k^e_k with 0 <= e_i < k_i, and
    g_i^k_i lies in the subgroup generated by g_{i+1}, ..., g_k with exponent
    vector relations[i].

    Attributes:
        elements (List[Unit]): All units, in enumeration order
        generators (List[Unit]): Canonical generators with relative order > 1
        relative_orders (List[int]): k_i
        relations (List[Tuple[int, ...]]): Exponent vector of g_i^k_i
    """

    def __init__(self, datum: LocalDatum, side: str, N: int):
        self.datum = datum
        self.side = side
        self.N = N
        self._build()

    def _candidates(self) -> List[Unit]:
        d, N, p = self.datum, self.N, self.datum.p
        if N <= 0:
            return []
        if self.side == SIDE_F:
            if p == 2:
                return [(-1) % 2 ** N, 5 % 2 ** N]
            g = int(primitive_root(p))
            return [pow(g, p ** (N - 1), p ** N), (1 + p) % p ** N]
        if d.quad_type == LocalDatum.RAMIFIED:
            a = (N + 1) // 2
            g = int(primitive_root(p))
            cands = [d.reduce_unit(SIDE_E, (pow(g, p ** a, p ** a), 0), N)]
            for j in range(1, N):
                px, py = d.uniformizer_power(j)
                cands.append(d.reduce_unit(SIDE_E, (1 + int(px), int(py)), N))
            return cands
        q = d.q_w
        gen = self._residue_generator()
        cands = [d.pow_unit(SIDE_E, gen, q ** (N - 1), N)]
        for j in range(1, N):
            cands.append(d.reduce_unit(SIDE_E, (1 + p ** j, 0), N))
            cands.append(d.reduce_unit(SIDE_E, (1, p ** j), N))
        return cands

    def _residue_generator(self) -> Unit:
        """Smallest (x, y) generating the multiplicative group of the residue field of E."""
        d, p = self.datum, self.datum.p
        order = d.q_w - 1
        for y in range(p):
            for x in range(p):
                if (x, y) == (0, 0):
                    continue
                if _element_order(d, (x, y), 1, order) == order:
                    return (x, y)
        raise RuntimeError(f"No generator found for the residue field of {d}")

    def _build(self) -> None:
        d, side, N = self.datum, self.side, self.N
        cands = self._candidates()
        one = d.one(side, N)
        table: Dict[Unit, Tuple[int, ...]] = {one: ()}
        kept: List[Tuple[Unit, int, Tuple[int, ...]]] = []
        # Subgroups H_i = <c_i, ..., c_m> built from the last candidate backwards.
        for c in reversed(cands):
            k, power = 1, c
            while power not in table:
                power = d.mul_units(side, power, c, N)
                k += 1
            relation = table[power]
            if k == 1:
                continue
            new_table: Dict[Unit, Tuple[int, ...]] = {}
            layer = one
            for e in range(k):
                for h, vec in table.items():
                    new_table[d.mul_units(side, layer, h, N)] = (e,) + vec
                layer = d.mul_units(side, layer, c, N)
            table = new_table
            kept.append((c, k, relation))
        kept.reverse()
        self.generators = [c for c, _, _ in kept]
        self.relative_orders = [k for _, k, _ in kept]
        # relation vectors are over the generators after g_i; pad to full length
        width = len(kept)
        self.relations = []
        for i, (_, _, rel) in enumerate(kept):
            self.relations.append((0,) * (i + 1) + tuple(rel) if width else ())
        self._dlog = table
        self.elements = sorted(table)
        self.index = {u: i for i, u in enumerate(self.elements)}
        expected = d.unit_count(side, N)
        if len(table) != expected:
            raise RuntimeError(f"Unit group of {d} side {side} at N={N} has {len(table)} "
                               f"elements, expected {expected}")
        logger.debug(f"Unit group {d} {side} N={N}: orders {self.relative_orders}")

    @property
    def order(self) -> int:
        return len(self.elements)

    def dlog(self, u: Unit) -> Tuple[int, ...]:
        """Exponent vector of a unit at this precision."""
        try:
            return self._dlog[u]
        except KeyError:
            raise ValueError(f"{u} is not a unit modulo varpi^{self.N} for {self.datum}")

    def principal_units(self, c: int) -> List[Unit]:
        """Units congruent to 1 modulo varpi^c."""
        if c <= 0:
            return list(self.elements)
        one_c = self.datum.one(self.side, c)
        return [u for u in self.elements if self.datum.reduce_unit(self.side, u, c) == one_c]


def _element_order(datum: LocalDatum, u: Unit, N: int, bound: int) -> int:
    one = datum.one(SIDE_E, N)
    power, k = u, 1
    while power != one:
        power = datum.mul_units(SIDE_E, power, u, N)
        k += 1
        if k > bound:
            break
    return k


@lru_cache(maxsize=256)
def unit_group(datum: LocalDatum, side: str, N: int) -> UnitGroup:
    """Cached UnitGroup for (datum, side, N)."""
    return UnitGroup(datum, side, N)


# ============================================================================
# ANNULI AND MEASURES
# ============================================================================

MULTIPLICATIVE = "multiplicative"
ADDITIVE = "additive"


def annulus_cosets(datum: LocalDatum, side: str, n: int, N: int,
                   measure: str = MULTIPLICATIVE) -> List[Tuple[PAdicCoset, Fraction]]:
    """
    Partition the annulus {v(t) = n} into cosets of precision N.

    Args:
        datum: The place
        side: SIDE_F or SIDE_E
        n: Valuation of the annulus
        N: Precision (N >= 1)
        measure: MULTIPLICATIVE (vol(O^x, d^x t) = 1) or ADDITIVE (vol(O, dt) = 1)

    Returns:
        List of (coset, measure of the coset)

    Example:
        >>> len(annulus_cosets(LocalDatum(3, "split"), "F", 0, 1))
        2
    """
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    group = unit_group(datum, side, N)
    mass = coset_measure(datum, side, n, N, measure)
    return [(PAdicCoset(datum, side, n, u, N), mass) for u in group.elements]


def coset_measure(datum: LocalDatum, side: str, n: int, N: int, measure: str) -> Fraction:
    """Measure of one precision-N coset in the annulus of valuation n."""
    if measure == MULTIPLICATIVE:
        return Fraction(1, datum.unit_count(side, N))
    if measure == ADDITIVE:
        q = datum.residue_size(side)
        return Fraction(q) ** (-n - N)
    raise ValueError(f"Unknown measure {measure}")


E_MEASURE_STANDARD = "standard"
E_MEASURE_SELF_DUAL = "self_dual"


def e_volume(datum: LocalDatum, variant: str) -> CycNum:
    """
    vol(O_E) under a named additive measure variant.

    "standard" gives 1; "self_dual" gives |D|^(1/2) (p^(-1/2) when ramified).
    """
    if variant == E_MEASURE_STANDARD:
        return CycNum(1)
    if variant == E_MEASURE_SELF_DUAL:
        if datum.v_of_D:
            return CycNum.sqrt(Fraction(1, datum.p ** datum.v_of_D))
        return CycNum(1)
    raise ValueError(f"Unknown E measure variant {variant}")


# ============================================================================
# ADDITIVE CHARACTERS
# ============================================================================

def padic_frac(x: Fraction, p: int) -> Fraction:
    """
    p-adic fractional part of a rational number, as a Fraction in [0, 1).

    Example:
        >>> padic_frac(Fraction(7, 5), 5)
        Fraction(2, 5)
    """
    x = Fraction(x)
    den = x.denominator
    m = 0
    while den % p == 0:
        den //= p
        m += 1
    if m == 0:
        return Fraction(0)
    pm = p ** m
    a = (x.numerator * pow(den, -1, pm)) % pm
    return Fraction(a, pm)


class AddChar:
    """
    The additive character psi_s(x) = psi_1(s*x) of Q_p, of level 0.

    psi_1(a / p^m) = zeta_{p^m}^a. On E the character psi_E = psi_s o Tr is used.

    Attributes:
        p (int): The prime
        twist (int): The unit s, the point of the torsor of level-0 characters
    """

    level = 0

    def __init__(self, p: int, twist: int = 1):
        if twist % p == 0:
            raise ValueError(f"Twist must be a p-adic unit, got {twist} for p={p}")
        self.p = p
        self.twist = twist

    def value_at(self, x: Fraction) -> CycNum:
        """psi_s at a rational number."""
        return CycNum.root_of_unity(padic_frac(Fraction(x) * self.twist, self.p))

    def twisted(self, a: int) -> "AddChar":
        """The character a.psi: x -> psi(a x)."""
        return AddChar(self.p, self.twist * a)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AddChar):
            return NotImplemented
        return self.p == other.p and self.twist == other.twist

    def __hash__(self) -> int:
        return hash((self.p, self.twist))

    def to_dict(self) -> Dict[str, int]:
        return {"p": self.p, "twist": self.twist}

    def __repr__(self) -> str:
        return f"AddChar(p={self.p}, s={self.twist})"


def trace_with_precision(x: PAdicCoset) -> Tuple[Fraction, int]:
    """
    Tr_{E/F} (identity on F) of the coset representative, with the exponent k
    such that the value is known modulo p^k.
    """
    d = x.datum
    n, N = x.valuation, x.precision
    if x.side == SIDE_F:
        return Fraction(d.p) ** n * x.unit, n + N
    rx, ry = x.representative()
    tr = d.trace(rx, ry)
    if d.quad_type == LocalDatum.RAMIFIED:
        # theta^n (x + y theta): even n -> 2x s^(n/2), odd n -> 2y s^((n+1)/2)
        a, b = (N + 1) // 2, N // 2
        known = a + n // 2 if n % 2 == 0 else b + (n + 1) // 2
        return tr, known
    return tr, n + N


def eval_add(psi: AddChar, x: PAdicCoset) -> CycNum:
    """
    psi(x) on F, or psi(Tr x) on E.

    Raises:
        InsufficientPrecision: If the coset does not determine the value
    """
    tr, known = trace_with_precision(x)
    if x.side == SIDE_F and x.valuation >= 0:
        return CycNum(1)
    if known < 0:
        raise InsufficientPrecision(
            f"Additive character needs more precision on {x} (known mod p^{known})")
    return psi.value_at(tr)
