"""
Multiplicative Characters of Finite Conductor

This module implements MulChar, a character of F_v^x or E_w^x of finite conductor
with values in roots of unity times rationals, the quadratic character eta of
E_v / F_v, and the character algebra needed downstream (products, inverses,
composition with the norm, restriction to F_v^x, enumeration by conductor).

A character of conductor c is stored through the angles a_i of its values
exp(2 pi i a_i) on the canonical generators of (O / varpi^c)^x, plus its value
at the uniformizer.
"""

import logging
from fractions import Fraction
from threading import Lock
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from sympy import legendre_symbol

from cyclo.number import CycNum
from local.cosets import InsufficientPrecision, PAdicCoset, unit_group
from local.datum import LocalDatum, SIDE_E, SIDE_F, Unit, hilbert_symbol


logger = logging.getLogger(__name__)


class MulChar:
    """
    Multiplicative character of finite conductor on F_v^x (side F) or E_w^x (side E).

    Attributes:
        datum (LocalDatum): The place
        side (str): SIDE_F or SIDE_E
        conductor (int): Minimal c with the character trivial on 1 + varpi^c O
        angles (Tuple[Fraction, ...]): Angles on the generators of unit_group(datum, side, c)
        at_uniformizer (CycNum): Value at the uniformizer (p, or the uniformizer of E_w)

    Example:
        >>> d = LocalDatum(5, "split")
        >>> chi = quadratic_character(d)
        >>> chi.unit_value(2)
        CycNum(-1)
    """

    def __init__(self, datum: LocalDatum, side: str, conductor: int,
                 angles: Sequence[Fraction], at_uniformizer=1):
        if conductor < 0:
            raise ValueError(f"Conductor must be non-negative, got {conductor}")
        if side == SIDE_E and datum.quad_type == LocalDatum.SPLIT:
            raise ValueError("Characters of a split E_v are pairs of F-side characters")
        self.datum = datum
        self.side = side
        self.conductor = conductor
        self.angles = tuple(Fraction(a) % 1 for a in angles)
        self.at_uniformizer = at_uniformizer if isinstance(at_uniformizer, CycNum) \
            else CycNum(Fraction(at_uniformizer))
        if self.at_uniformizer.is_zero():
            raise ValueError("Value at the uniformizer must be nonzero")
        self._group = unit_group(datum, side, conductor)
        self._table: Optional[Dict[Unit, Fraction]] = None
        self._lock = Lock()
        self._validate()

    def _validate(self) -> None:
        group = self._group
        if len(self.angles) != len(group.generators):
            raise ValueError(f"Expected {len(group.generators)} generator values, "
                             f"got {len(self.angles)}")
        for i, (k, rel) in enumerate(zip(group.relative_orders, group.relations)):
            lhs = (k * self.angles[i]) % 1
            rhs = sum((e * a for e, a in zip(rel, self.angles)), Fraction(0)) % 1
            if lhs != rhs:
                raise ValueError(f"Generator values violate relation {i} of {self.datum} "
                                 f"side {self.side}")
        if self.conductor >= 1:
            below = group.principal_units(self.conductor - 1)
            if all(self._angle_of(u) == 0 for u in below):
                raise ValueError(f"Character is trivial on 1 + varpi^{self.conductor - 1}: "
                                 f"conductor {self.conductor} is not minimal")

    def _angle_of(self, u: Unit) -> Fraction:
        vec = self._group.dlog(u)
        return sum((e * a for e, a in zip(vec, self.angles)), Fraction(0)) % 1

    def _angle_table(self) -> Dict[Unit, Fraction]:
        if self._table is None:
            with self._lock:
                if self._table is None:
                    self._table = {u: self._angle_of(u) for u in self._group.elements}
        return self._table

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def unit_angle(self, u: Unit) -> Fraction:
        """Angle of the value at a unit given at any precision >= conductor."""
        reduced = self.datum.reduce_unit(self.side, u, self.conductor)
        try:
            return self._angle_table()[reduced]
        except KeyError:
            raise ValueError(f"{u} is not a unit for {self.datum} side {self.side}")

    def unit_value(self, u: Unit) -> CycNum:
        return CycNum.root_of_unity(self.unit_angle(u))

    def __call__(self, x: PAdicCoset) -> CycNum:
        return eval_mul(self, x)

    def minus_one(self) -> CycNum:
        """chi(-1)."""
        if self.side == SIDE_F:
            return self.unit_value(-1)
        return self.unit_value((-1, 0))

    @property
    def is_unramified(self) -> bool:
        return self.conductor == 0

    @property
    def gen_values(self) -> List[CycNum]:
        return [CycNum.root_of_unity(a) for a in self.angles]

    # ------------------------------------------------------------------
    # Algebra
    # ------------------------------------------------------------------

    def __mul__(self, other: "MulChar") -> "MulChar":
        if not isinstance(other, MulChar):
            return NotImplemented
        if other.datum != self.datum or other.side != self.side:
            raise ValueError("Characters on different groups cannot be multiplied")
        P = max(self.conductor, other.conductor)
        return MulChar.from_unit_function(
            self.datum, self.side, P,
            lambda u: self.unit_angle(u) + other.unit_angle(u),
            self.at_uniformizer * other.at_uniformizer)

    def inverse(self) -> "MulChar":
        return MulChar(self.datum, self.side, self.conductor,
                       [-a for a in self.angles], self.at_uniformizer.inverse())

    def __pow__(self, k: int) -> "MulChar":
        return MulChar.from_unit_function(
            self.datum, self.side, self.conductor,
            lambda u: k * self.unit_angle(u), self.at_uniformizer ** k)

    def restrict_to_F(self) -> "MulChar":
        """Restriction of an E-side character to F_v^x."""
        if self.side == SIDE_F:
            return self
        d = self.datum
        if d.quad_type == LocalDatum.INERT:
            at_p = self.at_uniformizer
        else:
            # p = theta^2 / u0
            at_p = self.at_uniformizer ** 2 * self.unit_value((d.ram_unit, 0)).inverse()
        return MulChar.from_unit_function(
            d, SIDE_F, self.conductor, lambda u: self.unit_angle((u, 0)), at_p)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def trivial(cls, datum: LocalDatum, side: str = SIDE_F) -> "MulChar":
        return cls(datum, side, 0, [], 1)

    @classmethod
    def unramified(cls, datum: LocalDatum, value, side: str = SIDE_F) -> "MulChar":
        return cls(datum, side, 0, [], value)

    @classmethod
    def from_unit_function(cls, datum: LocalDatum, side: str, precision: int,
                           angle_fn: Callable[[Unit], Fraction], at_uniformizer) -> "MulChar":
        """
        Build the character whose unit part has angles angle_fn on units at precision.

        The conductor is minimized by checking triviality on principal units.
        """
        group = unit_group(datum, side, precision)
        table = {u: Fraction(angle_fn(u)) % 1 for u in group.elements}
        c = precision
        while c > 0 and all(table[u] == 0 for u in group.principal_units(c - 1)):
            c -= 1
        small = unit_group(datum, side, c)
        # A generator mod varpi^c is also a representative mod varpi^precision.
        angles = [table[datum.reduce_unit(side, g, precision)] for g in small.generators]
        return cls(datum, side, c, angles, at_uniformizer)

    # ------------------------------------------------------------------
    # Serialization
    # ------------------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        """Character descriptor (values as CycNum JSON)."""
        data = self.datum.to_dict()
        data.update({
            "side": self.side,
            "conductor": self.conductor,
            "gen_values": [v.to_json() for v in self.gen_values],
            "at_uniformizer": self.at_uniformizer.to_json(),
        })
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MulChar":
        """
        Load a character descriptor.

        Accepted keys: p, quad_type, ram_unit, side, conductor, and either
        gen_values (CycNum JSON list) or gen_angles (rational strings);
        at_uniformizer as CycNum JSON, a rational string or an integer, or
        at_uniformizer_angle for a root of unity.
        """
        datum = LocalDatum.from_dict(data)
        side = data.get("side", datum.w_side() if data.get("on_E") else SIDE_F)
        conductor = int(data.get("conductor", 0))
        if "gen_angles" in data:
            angles = [Fraction(str(a)) for a in data["gen_angles"]]
        else:
            angles = []
            for raw in data.get("gen_values", []):
                angle = CycNum.from_json(raw).angle_if_root_of_unity()
                if angle is None:
                    raise ValueError(f"Generator value {raw} is not a root of unity")
                angles.append(angle)
        if "at_uniformizer_angle" in data:
            at_unif = CycNum.root_of_unity(Fraction(str(data["at_uniformizer_angle"])),
                                           Fraction(str(data.get("at_uniformizer_scale", 1))))
        else:
            raw = data.get("at_uniformizer", 1)
            at_unif = CycNum.from_json(raw) if isinstance(raw, dict) else CycNum(Fraction(str(raw)))
        return cls(datum, side, conductor, angles, at_unif)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MulChar):
            return NotImplemented
        return (self.datum == other.datum and self.side == other.side
                and self.conductor == other.conductor and self.angles == other.angles
                and self.at_uniformizer == other.at_uniformizer)

    def __hash__(self) -> int:
        return hash((self.datum, self.side, self.conductor, self.angles))

    def __repr__(self) -> str:
        angles = ", ".join(str(a) for a in self.angles)
        return (f"MulChar({self.datum}, {self.side}, c={self.conductor}, "
                f"angles=[{angles}], at_unif={self.at_uniformizer})")


# ============================================================================
# EVALUATION
# ============================================================================

def eval_mul(chi: MulChar, x: PAdicCoset) -> CycNum:
    """
    chi(varpi)^v(x) * chi(unit part of x).

    Raises:
        InsufficientPrecision: If the coset precision is below the conductor
    """
    if x.side != chi.side:
        raise ValueError(f"Character on side {chi.side} evaluated on side {x.side}")
    if x.precision < chi.conductor:
        raise InsufficientPrecision(
            f"Coset precision {x.precision} below conductor {chi.conductor}")
    value = CycNum.root_of_unity(chi.unit_angle(x.unit)) if chi.conductor else CycNum(1)
    if x.valuation:
        value = value * chi.at_uniformizer ** x.valuation
    return value


def enumerate_characters(datum: LocalDatum, side: str, conductor: int,
                         at_uniformizer=1) -> List[MulChar]:
    """
    All characters of exact conductor on the given side, in a deterministic order.

    Args:
        datum: The place
        side: SIDE_F or SIDE_E
        conductor: Exact conductor c
        at_uniformizer: Value assigned at the uniformizer

    Returns:
        List of MulChar
    """
    if conductor == 0:
        return [MulChar.unramified(datum, at_uniformizer, side)]
    group = unit_group(datum, side, conductor)
    count = len(group.generators)
    solutions: List[Tuple[Fraction, ...]] = [()]
    # Back-substitution from the last generator: k_i a_i = sum_{j > i} r_ij a_j.
    for i in reversed(range(count)):
        k = group.relative_orders[i]
        rel = group.relations[i]
        extended = []
        for tail in solutions:
            full_tail = (Fraction(0),) * (i + 1) + tail
            rhs = sum((e * a for e, a in zip(rel, full_tail)), Fraction(0))
            for j in range(k):
                extended.append(((rhs + j) / k % 1,) + tail)
        solutions = extended
    chars = []
    below = group.principal_units(conductor - 1)
    for angles in solutions:
        vecs = (group.dlog(u) for u in below)
        if all(sum((e * a for e, a in zip(v, angles)), Fraction(0)) % 1 == 0 for v in vecs):
            continue
        chars.append(MulChar(datum, side, conductor, angles, at_uniformizer))
    logger.debug(f"{len(chars)} characters of conductor {conductor} on {datum} side {side}")
    return chars


def quadratic_character(datum: LocalDatum) -> MulChar:
    """The Legendre character of conductor 1 on Q_p^x (p odd), trivial at p."""
    p = datum.p
    if p == 2:
        raise ValueError("The Legendre character needs an odd prime")
    return MulChar.from_unit_function(
        datum, SIDE_F, 1,
        lambda u: Fraction(0) if legendre_symbol(u % p, p) == 1 else Fraction(1, 2), 1)


# ============================================================================
# NORM MAP AND ETA
# ============================================================================

def norm_unit(datum: LocalDatum, u: Unit) -> int:
    """N_{E/F} of an E-unit representative, as an integer."""
    x, y = u
    return datum.norm_form(x, y)


def norm_coset(x: PAdicCoset) -> PAdicCoset:
    """The F-coset containing q(x) for an E-coset x."""
    d = x.datum
    if x.side == SIDE_F:
        return x
    n, N = x.valuation, x.precision
    nu = norm_unit(d, x.unit)
    if d.quad_type == LocalDatum.INERT:
        return PAdicCoset(d, SIDE_F, 2 * n, nu, N)
    # q(theta) = -s = -p*u0
    a = (N + 1) // 2
    unit = nu * pow(-d.ram_unit, n, d.p ** max(a, 1))
    return PAdicCoset(d, SIDE_F, n, unit, a)


def compose_norm(alpha: MulChar, datum: LocalDatum) -> MulChar:
    """The E-side character alpha o q for an F-side character alpha."""
    if alpha.side != SIDE_F:
        raise ValueError("compose_norm expects an F-side character")
    if datum.quad_type == LocalDatum.SPLIT:
        raise ValueError("For split E_v use alpha on each F-side component")
    if datum.quad_type == LocalDatum.INERT:
        at_unif = alpha.at_uniformizer ** 2
        precision = alpha.conductor
    else:
        at_unif = alpha.at_uniformizer * alpha.unit_value(-datum.ram_unit)
        precision = 2 * alpha.conductor
    return MulChar.from_unit_function(
        datum, SIDE_E, precision,
        lambda u: alpha.unit_angle(norm_unit(datum, u)), at_unif)


def eta_character(datum: LocalDatum) -> MulChar:
    """
    The quadratic character eta of E_v / F_v as an F-side MulChar.

    Trivial when split, unramified with eta(p) = -1 when inert, conductor 1
    (Legendre on units) when ramified.
    """
    if datum.quad_type == LocalDatum.SPLIT:
        return MulChar.trivial(datum)
    d = datum.square_class
    at_p = hilbert_symbol(datum.p, d, datum.p)
    if datum.quad_type == LocalDatum.INERT:
        return MulChar.unramified(datum, at_p)
    return MulChar.from_unit_function(
        datum, SIDE_F, 1,
        lambda u: Fraction(0) if hilbert_symbol(u, d, datum.p) == 1 else Fraction(1, 2), at_p)


def eta_value(datum: LocalDatum, x: PAdicCoset) -> CycNum:
    """
    eta_v(x) for an F-side coset.

    Raises:
        InsufficientPrecision: For ramified E at precision 0
    """
    return eval_mul(eta_character(datum), x)
