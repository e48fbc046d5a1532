"""
Local Datum for p-adic Computations

This module defines LocalDatum, the description of a place v | p of F = Q together
with the etale quadratic algebra E_v over F_v = Q_p (split, inert or tamely ramified),
and the arithmetic of its finite models:

    E_v = Q_p[theta] / (theta^2 = s + t*theta)

    inert, p odd:  s = smallest quadratic non-residue, t = 0
    inert, p = 2:  s = -1, t = -1 (theta is a primitive cube root of unity)
    ramified:      s = p*u0 (u0 a unit, default 1), t = 0, theta is the uniformizer

Units of O_E modulo the N-th power of the uniformizer are stored as pairs (x, y)
standing for x + y*theta, with x modulo p^a and y modulo p^b where a = b = N for
the inert case and a = ceil(N/2), b = floor(N/2) for the ramified case.
Units of O_F modulo p^N are plain integers.

It also hosts the Hilbert symbol, which decides local norms.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Any, Tuple, Union

from sympy import isprime, legendre_symbol


logger = logging.getLogger(__name__)

FUnit = int
EUnit = Tuple[int, int]
Unit = Union[FUnit, EUnit]

SIDE_F = "F"
SIDE_E = "E"


@dataclass(frozen=True)
class LocalDatum:
    """
    A prime p with its etale quadratic algebra E_v / Q_p.

    Attributes:
        p (int): The residue characteristic
        quad_type (str): One of SPLIT, INERT, RAMIFIED
        ram_unit (int): Unit u0 with E = Q_p(sqrt(p*u0)) in the ramified case

    Example:
        >>> d = LocalDatum(5, LocalDatum.INERT)
        >>> d.q_w
        25
    """

    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"
    QUAD_TYPES = (SPLIT, INERT, RAMIFIED)

    p: int
    quad_type: str
    ram_unit: int = 1
    _s: int = field(init=False, repr=False, compare=False)
    _t: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.p, int) or not isprime(self.p):
            raise ValueError(f"p must be a prime, got {self.p}")
        if self.quad_type not in self.QUAD_TYPES:
            raise ValueError(f"quad_type must be one of {self.QUAD_TYPES}, got {self.quad_type}")
        if self.quad_type == self.RAMIFIED:
            if self.p == 2:
                raise ValueError("Ramified quadratic algebras are supported for odd p only")
            if self.ram_unit % self.p == 0:
                raise ValueError(f"ram_unit must be prime to p, got {self.ram_unit}")
        s, t = 0, 0
        if self.quad_type == self.INERT:
            if self.p == 2:
                s, t = -1, -1
            else:
                s = next(a for a in range(2, self.p) if legendre_symbol(a, self.p) == -1)
        elif self.quad_type == self.RAMIFIED:
            s = self.p * self.ram_unit
        object.__setattr__(self, "_s", s)
        object.__setattr__(self, "_t", t)

    # ------------------------------------------------------------------
    # Invariants of the place
    # ------------------------------------------------------------------

    @property
    def q_F(self) -> int:
        return self.p

    @property
    def f(self) -> int:
        return 2 if self.quad_type == self.INERT else 1

    @property
    def e(self) -> int:
        return 2 if self.quad_type == self.RAMIFIED else 1

    @property
    def v_of_D(self) -> int:
        return 1 if self.quad_type == self.RAMIFIED else 0

    @property
    def v_of_d(self) -> int:
        # The different of Q_p is trivial.
        return 0

    @property
    def q_w(self) -> int:
        return self.p ** self.f

    @property
    def delta(self) -> int:
        """w-adic valuation of the different of E_w / F_v."""
        return 1 if self.quad_type == self.RAMIFIED else 0

    @property
    def s(self) -> int:
        return self._s

    @property
    def t(self) -> int:
        return self._t

    @property
    def square_class(self) -> int:
        """An integer d with E_v = Q_p(sqrt(d)) (1 when split)."""
        if self.quad_type == self.SPLIT:
            return 1
        return self._t * self._t + 4 * self._s

    def w_side(self) -> str:
        """Side on which a place w | v lives: F for split components, E otherwise."""
        return SIDE_F if self.quad_type == self.SPLIT else SIDE_E

    def residue_size(self, side: str) -> int:
        return self.p if side == SIDE_F else self.q_w

    # ------------------------------------------------------------------
    # Unit arithmetic
    # ------------------------------------------------------------------

    def e_moduli(self, N: int) -> Tuple[int, int]:
        """Moduli (p^a, p^b) of the (x, y) components of E-units at precision N."""
        if self.quad_type == self.RAMIFIED:
            return self.p ** ((N + 1) // 2), self.p ** (N // 2)
        return self.p ** N, self.p ** N

    def unit_count(self, side: str, N: int) -> int:
        if N <= 0:
            return 1
        q = self.residue_size(side)
        return (q - 1) * q ** (N - 1)

    def is_unit(self, side: str, u: Unit) -> bool:
        if side == SIDE_F:
            return u % self.p != 0
        x, y = u
        if self.quad_type == self.RAMIFIED:
            return x % self.p != 0
        return x % self.p != 0 or y % self.p != 0

    def reduce_unit(self, side: str, u: Unit, N: int) -> Unit:
        """Reduce a unit representative to precision N."""
        if side == SIDE_F:
            return u % self.p ** N if N > 0 else 0
        mx, my = self.e_moduli(N)
        x, y = u
        return x % mx, y % my

    def mul_units(self, side: str, u: Unit, v: Unit, N: int) -> Unit:
        if side == SIDE_F:
            return (u * v) % self.p ** N
        mx, my = self.e_moduli(N)
        x1, y1 = u
        x2, y2 = v
        s, t = self._s, self._t
        return ((x1 * x2 + s * y1 * y2) % mx,
                (x1 * y2 + x2 * y1 + t * y1 * y2) % my)

    def pow_unit(self, side: str, u: Unit, k: int, N: int) -> Unit:
        result: Unit = 1 % self.p ** N if side == SIDE_F else self.reduce_unit(side, (1, 0), N)
        base = u
        while k:
            if k & 1:
                result = self.mul_units(side, result, base, N)
            base = self.mul_units(side, base, base, N)
            k >>= 1
        return result

    def one(self, side: str, N: int) -> Unit:
        return self.reduce_unit(side, 1 if side == SIDE_F else (1, 0), N)

    def uniformizer_power(self, k: int) -> Tuple[Fraction, Fraction]:
        """varpi_w^k for E as (x, y) with rational entries (k may be negative)."""
        if self.quad_type == self.RAMIFIED:
            s = Fraction(self._s)
            if k % 2 == 0:
                return s ** (k // 2), Fraction(0)
            return Fraction(0), s ** ((k - 1) // 2)
        return Fraction(self.p) ** k, Fraction(0)

    def trace(self, x: Fraction, y: Fraction) -> Fraction:
        """Tr_{E/F}(x + y*theta) = 2x + t*y."""
        return 2 * x + self._t * y

    def norm_form(self, x, y):
        """N_{E/F}(x + y*theta) = x^2 + t*x*y - s*y^2."""
        return x * x + self._t * x * y - self._s * y * y

    def to_dict(self) -> Dict[str, Any]:
        return {"p": self.p, "quad_type": self.quad_type, "ram_unit": self.ram_unit}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LocalDatum":
        return cls(int(data["p"]), str(data["quad_type"]), int(data.get("ram_unit", 1)))

    def __str__(self) -> str:
        return f"Q_{self.p}/{self.quad_type}"


# ============================================================================
# HILBERT SYMBOL
# ============================================================================

def _split_p(a: Fraction, p: int) -> Tuple[int, Fraction]:
    """Write a = p^k * u with u a p-adic unit."""
    a = Fraction(a)
    k = 0
    num, den = a.numerator, a.denominator
    while num % p == 0:
        num //= p
        k += 1
    while den % p == 0:
        den //= p
        k -= 1
    return k, Fraction(num, den)


def hilbert_symbol(a, b, p) -> int:
    """
    Hilbert symbol (a, b)_v for nonzero rationals a, b at a prime p or at "inf".

    Args:
        a: Nonzero rational
        b: Nonzero rational
        p: A prime number, or the string "inf"

    Returns:
        +1 or -1

    Raises:
        ValueError: If a or b is zero

    Example:
        >>> hilbert_symbol(3, -1, 3)
        -1
    """
    a, b = Fraction(a), Fraction(b)
    if not a or not b:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if p == "inf":
        return -1 if a < 0 and b < 0 else 1
    alpha, u = _split_p(a, p)
    beta, v = _split_p(b, p)
    if p != 2:
        def leg(w: Fraction) -> int:
            return int(legendre_symbol((w.numerator * w.denominator) % p, p))
        sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
        if beta % 2:
            sign *= leg(u)
        if alpha % 2:
            sign *= leg(v)
        return sign
    # p = 2: units reduced modulo 8 through num * den (den odd, den^2 = 1 mod 8).
    u8 = (u.numerator * u.denominator) % 8
    v8 = (v.numerator * v.denominator) % 8

    def eps(w: int) -> int:
        return ((w - 1) // 2) % 2

    def omega(w: int) -> int:
        return ((w * w - 1) // 8) % 2

    exponent = eps(u8) * eps(v8) + alpha * omega(v8) + beta * omega(u8)
    return -1 if exponent % 2 else 1


def is_local_norm(a, datum: LocalDatum) -> bool:
    """True iff the nonzero rational a is a norm from E_v^x."""
    if datum.quad_type == LocalDatum.SPLIT:
        return True
    return hilbert_symbol(a, datum.square_class, datum.p) == 1
