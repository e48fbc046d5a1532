"""
Exact Cyclotomic Numbers

This module implements CycNum, an exact element of a cyclotomic field Q(zeta_n),
the value type of every local integral in the project. Square roots of rationals
are adjoined by folding them into a cyclotomic field through quadratic Gauss sums,
so every value has a single canonical representation.

Two internal forms are kept:
    - monomial: coef * zeta^angle (angle a Fraction in [0, 1)); products and powers
      of character values stay in this form and cost O(1).
    - dense: coefficient vector of a residue modulo the n-th cyclotomic polynomial,
      materialized lazily when monomials of different angles are added.
"""

import logging
import numbers
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from sympy import Poly, QQ, Rational, cyclotomic_poly, factorint, legendre_symbol, mobius, symbols, totient

import config


logger = logging.getLogger(__name__)

_X = symbols("x")

Number = Union[int, Fraction, "CycNum"]


class DivisionByZero(ArithmeticError):
    """Raised when a zero CycNum is inverted."""
    pass


class OrderTooLarge(Exception):
    """Raised when lifting two operands needs an order above MAX_CYCLOTOMIC_ORDER."""
    pass


class MixedRadicals(Exception):
    """Raised when values carrying square roots of different rationals are combined."""
    pass


# ============================================================================
# CYCLOTOMIC TABLES
# ============================================================================

@lru_cache(maxsize=None)
def _phi(n: int) -> int:
    return int(totient(n))


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(n: int) -> Tuple[int, ...]:
    """Coefficients a_0..a_{phi-1} of Phi_n = x^phi + sum a_i x^i."""
    coeffs = Poly(cyclotomic_poly(n, _X), _X).all_coeffs()
    coeffs = [int(c) for c in reversed(coeffs)]
    return tuple(coeffs[:-1])


@lru_cache(maxsize=64)
def _power_rows(n: int) -> Tuple[Tuple[int, ...], ...]:
    """
    Reduced power basis table: row k is x^k mod Phi_n for 0 <= k < n.

    Rows are built iteratively by multiplying by x and folding the
    leading coefficient back with the cyclotomic relation.
    """
    phi = _phi(n)
    low = _cyclotomic_coeffs(n)
    rows: List[Tuple[int, ...]] = []
    for k in range(phi):
        row = [0] * phi
        row[k] = 1
        rows.append(tuple(row))
    for k in range(phi, n):
        prev = rows[k - 1]
        carry = prev[phi - 1]
        row = [0] + list(prev[:phi - 1])
        if carry:
            for i in range(phi):
                row[i] -= carry * low[i]
        rows.append(tuple(row))
    logger.debug(f"Built power table for order {n} (phi={phi})")
    return tuple(rows)


def _check_order(n: int) -> int:
    if n > config.MAX_CYCLOTOMIC_ORDER:
        raise OrderTooLarge(
            f"Cyclotomic order {n} exceeds MAX_CYCLOTOMIC_ORDER={config.MAX_CYCLOTOMIC_ORDER}"
        )
    return n


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _reduce_terms(n: int, terms: Dict[int, Fraction]) -> Tuple[Fraction, ...]:
    """Reduce a map exponent -> coefficient at order n to the canonical vector."""
    phi = _phi(n)
    vec = [Fraction(0)] * phi
    if not terms:
        return tuple(vec)
    rows = _power_rows(n) if any((k % n) >= phi for k in terms) else None
    for k, c in terms.items():
        if not c:
            continue
        k %= n
        if k < phi:
            vec[k] += c
        else:
            row = rows[k]
            for i, r in enumerate(row):
                if r:
                    vec[i] += c * r
    return tuple(vec)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, numbers.Rational):
        # sympy Integer and Rational
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"Cannot interpret {value!r} as a rational number")


@lru_cache(maxsize=None)
def _squarefree_sqrt(q0: int) -> "CycNum":
    """sqrt(q0) for squarefree q0 via quadratic Gauss sums."""
    if q0 == 1:
        return CycNum(1)
    if q0 == -1:
        return CycNum.root_of_unity(Fraction(1, 4))
    result = CycNum.root_of_unity(Fraction(1, 4)) if q0 < 0 else CycNum(1)
    for ell in sorted(factorint(abs(q0))):
        if ell == 2:
            root = CycNum.root_of_unity(Fraction(1, 8)) + CycNum.root_of_unity(Fraction(7, 8))
        else:
            gauss = CycNum.sum(
                CycNum.root_of_unity(Fraction(k, ell), int(legendre_symbol(k, ell)))
                for k in range(1, ell)
            )
            # g^2 = (-1)^((ell-1)/2) * ell
            root = gauss if ell % 4 == 1 else gauss * CycNum.root_of_unity(Fraction(3, 4))
        result = result * root
    return result


def _squarefree_part(value: Fraction) -> Tuple[int, Fraction]:
    """Write value = q0 * s^2 with q0 squarefree integer, s rational; return (q0, s)."""
    num = value.numerator * value.denominator
    sign = -1 if num < 0 else 1
    q0, s = sign, Fraction(1, value.denominator)
    for ell, e in factorint(abs(num)).items():
        s *= Fraction(ell) ** (e // 2)
        if e % 2:
            q0 *= ell
    return q0, s


# ============================================================================
# CYCNUM
# ============================================================================

class CycNum:
    """
    Exact element of Q(zeta_n), optionally tagged with an adjoined sqrt(q).

    Instances are immutable. Binary operations lift both operands to the lcm of
    their orders; equality and hashing are independent of the order a value is
    stored at.

    Attributes:
        order (int): n such that the value is stored in Q(zeta_n)
        radical (Optional[int]): squarefree q0 when the value carries an odd power of sqrt(q0)

    Example:
        >>> z4 = CycNum.root_of_unity(Fraction(1, 4))
        >>> z4 * z4 == -1
        True
    """

    __slots__ = ("_n", "_dense", "_mono", "_radical")

    def __init__(self, value: Union[int, Fraction, str] = 0):
        self._set_mono(_as_fraction(value), Fraction(0), None)

    def _set_mono(self, coef: Fraction, angle: Fraction, radical: Optional[int]) -> None:
        # Canonical monomial: coef > 0 and angle in [0, 1), or (0, 0).
        if not coef:
            angle = Fraction(0)
        elif coef < 0:
            coef, angle = -coef, angle + Fraction(1, 2)
        angle = angle - (angle.numerator // angle.denominator)
        self._n = angle.denominator
        self._dense: Optional[Tuple[Fraction, ...]] = None
        self._mono: Optional[Tuple[Fraction, Fraction]] = (coef, angle)
        self._radical: Optional[int] = radical

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def _make_mono(cls, coef: Fraction, angle: Fraction, radical: Optional[int] = None) -> "CycNum":
        obj = cls.__new__(cls)
        obj._set_mono(coef, angle, radical)
        return obj

    @classmethod
    def _make_dense(cls, n: int, vec: Tuple[Fraction, ...], radical: Optional[int] = None) -> "CycNum":
        obj = cls.__new__(cls)
        obj._n = n
        obj._dense = vec
        obj._mono = None
        obj._radical = radical
        nonzero = [(k, c) for k, c in enumerate(vec) if c]
        if not nonzero:
            return cls._make_mono(Fraction(0), Fraction(0), radical)
        if len(nonzero) == 1:
            k, c = nonzero[0]
            return cls._make_mono(c, Fraction(k, n), radical)
        return obj

    @classmethod
    def rational(cls, value: Union[int, Fraction, str]) -> "CycNum":
        return cls(value)

    @classmethod
    def root_of_unity(cls, angle: Fraction, coef: Union[int, Fraction] = 1) -> "CycNum":
        """coef * exp(2 pi i angle) for a rational angle."""
        return cls._make_mono(_as_fraction(coef), _as_fraction(angle))

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CycNum":
        """zeta_n^k."""
        if n <= 0:
            raise ValueError(f"Order must be positive, got {n}")
        return cls._make_mono(Fraction(1), Fraction(k, n))

    @classmethod
    def from_coeffs(cls, n: int, coeffs: Iterable[Union[int, Fraction]]) -> "CycNum":
        """Value sum_k coeffs[k] * zeta_n^k (any length; reduced canonically)."""
        if n <= 0:
            raise ValueError(f"Order must be positive, got {n}")
        _check_order(n)
        terms: Dict[int, Fraction] = {}
        for k, c in enumerate(coeffs):
            c = _as_fraction(c)
            if c:
                terms[k % n] = terms.get(k % n, Fraction(0)) + c
        return cls._make_dense(n, _reduce_terms(n, terms))

    @classmethod
    def sqrt(cls, q: Union[int, Fraction, str]) -> "CycNum":
        """
        Square root of a rational q (principal branch: positive, or i times positive).

        Args:
            q: Rational number

        Returns:
            CycNum equal to sqrt(q), tagged with the squarefree part of q
        """
        q = _as_fraction(q)
        if not q:
            return cls(0)
        q0, s = _squarefree_part(q)
        root = _squarefree_sqrt(q0) * s
        radical = None if q0 in (1, -1) else abs(q0)
        return root._with_radical(radical)

    @classmethod
    def sum(cls, values: Iterable[Number]) -> "CycNum":
        """
        Exact sum of many values.

        Monomials are grouped by angle before any dense vector is formed,
        which keeps large character sums cheap.
        """
        by_angle: Dict[Fraction, Fraction] = {}
        dense_parts: List[CycNum] = []
        radical: Optional[int] = None
        for value in values:
            value = _coerce(value)
            radical = _merge_radicals(radical, value._radical)
            if value._mono is not None:
                coef, angle = value._mono
                if coef:
                    by_angle[angle] = by_angle.get(angle, Fraction(0)) + coef
            else:
                dense_parts.append(value)
        by_angle = {a: c for a, c in by_angle.items() if c}
        if not dense_parts and len(by_angle) <= 1:
            if not by_angle:
                return cls._make_mono(Fraction(0), Fraction(0), radical)
            angle, coef = next(iter(by_angle.items()))
            return cls._make_mono(coef, angle, radical)
        n = 1
        for angle in by_angle:
            n = _lcm(n, angle.denominator)
        for part in dense_parts:
            n = _lcm(n, part._n)
        _check_order(n)
        terms: Dict[int, Fraction] = {}
        for angle, coef in by_angle.items():
            k = angle.numerator * (n // angle.denominator)
            terms[k] = terms.get(k, Fraction(0)) + coef
        for part in dense_parts:
            for k, c in part._terms_at(n).items():
                terms[k] = terms.get(k, Fraction(0)) + c
        return cls._make_dense(n, _reduce_terms(n, terms), radical)

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------

    def _with_radical(self, radical: Optional[int]) -> "CycNum":
        if self._mono is not None:
            return CycNum._make_mono(self._mono[0], self._mono[1], radical)
        return CycNum._make_dense(self._n, self._dense, radical)

    def _terms_at(self, n: int) -> Dict[int, Fraction]:
        """Exponent map of this value at an order n divisible by self.order."""
        if n % self._n:
            raise ValueError(f"Cannot lift order {self._n} to {n}")
        if self._mono is not None:
            coef, angle = self._mono
            if not coef:
                return {}
            return {angle.numerator * (n // angle.denominator): coef}
        step = n // self._n
        return {k * step: c for k, c in enumerate(self._dense) if c}

    def _vector_at(self, n: int) -> Tuple[Fraction, ...]:
        _check_order(n)
        if n == self._n and self._dense is not None:
            return self._dense
        return _reduce_terms(n, self._terms_at(n))

    # ------------------------------------------------------------------
    # Properties
    # ------------------------------------------------------------------

    @property
    def order(self) -> int:
        return self._n

    @property
    def radical(self) -> Optional[int]:
        return self._radical

    @property
    def is_monomial(self) -> bool:
        return self._mono is not None

    def is_zero(self) -> bool:
        return self._mono is not None and not self._mono[0]

    def is_rational(self) -> bool:
        return self._mono is not None and self._mono[1] in (0, Fraction(1, 2))

    def to_fraction(self) -> Fraction:
        """
        Return the value as a Fraction.

        Raises:
            ValueError: If the value is not rational
        """
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        coef, angle = self._mono
        return -coef if angle == Fraction(1, 2) else coef

    def angle_if_root_of_unity(self) -> Optional[Fraction]:
        """Angle t with self = exp(2 pi i t), or None if self is not a root of unity."""
        if self._mono is not None:
            coef, angle = self._mono
            return angle if coef == 1 else None
        # Dense roots of unity live in Q(zeta_n) with order dividing lcm(2, n).
        m = _lcm(2, self._n)
        for k in range(m):
            if self == CycNum.root_of_unity(Fraction(k, m)):
                return Fraction(k, m)
        return None

    def monomial(self) -> Optional[Tuple[Fraction, Fraction]]:
        """(coef, angle) when the value is coef * root of unity, else None."""
        return self._mono

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other: Number) -> "CycNum":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CycNum.sum((self, other))

    __radd__ = __add__

    def __neg__(self) -> "CycNum":
        if self._mono is not None:
            return CycNum._make_mono(-self._mono[0], self._mono[1], self._radical)
        return CycNum._make_dense(self._n, tuple(-c for c in self._dense), self._radical)

    def __sub__(self, other: Number) -> "CycNum":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CycNum.sum((self, -other))

    def __rsub__(self, other: Number) -> "CycNum":
        return _coerce(other) - self

    def __mul__(self, other: Number) -> "CycNum":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        radical = _product_radical(self._radical, other._radical)
        if self._mono is not None and other._mono is not None:
            return CycNum._make_mono(self._mono[0] * other._mono[0],
                                     self._mono[1] + other._mono[1], radical)
        n = _check_order(_lcm(self._n, other._n))
        if self._mono is not None or other._mono is not None:
            mono, dense = (self, other) if self._mono is not None else (other, self)
            coef, angle = mono._mono
            if not coef:
                return CycNum._make_mono(Fraction(0), Fraction(0), radical)
            shift = angle.numerator * (n // angle.denominator)
            terms = {k + shift: c * coef for k, c in dense._terms_at(n).items()}
            return CycNum._make_dense(n, _reduce_terms(n, terms), radical)
        a = self._terms_at(n)
        b = other._terms_at(n)
        terms: Dict[int, Fraction] = {}
        for i, x in a.items():
            for j, y in b.items():
                k = (i + j) % n
                terms[k] = terms.get(k, Fraction(0)) + x * y
        return CycNum._make_dense(n, _reduce_terms(n, terms), radical)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        """
        Multiplicative inverse.

        Raises:
            DivisionByZero: If the value is zero
        """
        if self.is_zero():
            raise DivisionByZero("Inversion of zero CycNum")
        if self._mono is not None:
            coef, angle = self._mono
            return CycNum._make_mono(1 / coef, -angle, self._radical)
        n = self._n
        inv = _dense_poly(self._dense).invert(_modulus_poly(n))
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(inv.all_coeffs())]
        return CycNum.from_coeffs(n, coeffs)._with_radical(self._radical)

    def __truediv__(self, other: Number) -> "CycNum":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: Number) -> "CycNum":
        return _coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "CycNum":
        if not isinstance(exponent, int):
            raise TypeError("CycNum exponents must be integers")
        if self._mono is not None:
            coef, angle = self._mono
            if exponent < 0:
                if not coef:
                    raise DivisionByZero("Negative power of zero CycNum")
                coef, angle, exponent = 1 / coef, -angle, -exponent
            radical = self._radical if exponent % 2 else None
            return CycNum._make_mono(coef ** exponent, angle * exponent, radical)
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = CycNum(1), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conj(self) -> "CycNum":
        """Complex conjugation zeta -> zeta^-1 (square roots of positive rationals are fixed)."""
        if self._mono is not None:
            return CycNum._make_mono(self._mono[0], -self._mono[1], self._radical)
        terms = {(-k) % self._n: c for k, c in enumerate(self._dense) if c}
        return CycNum._make_dense(self._n, _reduce_terms(self._n, terms), self._radical)

    # ------------------------------------------------------------------
    # Comparison
    # ------------------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._mono is not None and other._mono is not None:
            return self._mono == other._mono
        if self.is_zero() != other.is_zero():
            return False
        n = _lcm(self._n, other._n)
        return self._vector_at(n) == other._vector_at(n)

    def __ne__(self, other) -> bool:
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self) -> int:
        # Normalized trace: invariant under lifting to any order.
        if self._mono is not None:
            coef, angle = self._mono
            d = angle.denominator
            return hash(coef * Fraction(int(mobius(d)), _phi(d)))
        trace = Fraction(0)
        n = self._n
        for k, c in enumerate(self._dense):
            if c:
                d = n // gcd(k, n)
                trace += c * Fraction(int(mobius(d)), _phi(d))
        return hash(trace)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # ------------------------------------------------------------------
    # Valuations and embeddings
    # ------------------------------------------------------------------

    def norm(self) -> Fraction:
        """Absolute norm N_{Q(zeta_n)/Q} of the value at its stored order."""
        if self._mono is not None:
            return self._mono[0] ** _phi(self._n)
        # Res(Phi_n, A) = prod A(zeta) over primitive zeta since Phi_n is monic.
        res = Rational(_modulus_poly(self._n).resultant(_dense_poly(self._dense)))
        return Fraction(int(res.p), int(res.q))

    def p_valuation(self, p: int) -> Optional[Fraction]:
        """
        p-adic valuation normalized so that v(p) = 1; None for zero.

        Exact for rationals and monomials. For other values the average over
        the primes above p is returned (v_p of the norm divided by the degree).
        """
        if self.is_zero():
            return None
        if self._mono is not None:
            return Fraction(_vp_fraction(self._mono[0], p))
        return Fraction(_vp_fraction(self.norm(), p), _phi(self._n))

    def to_complex(self) -> complex:
        """Complex embedding zeta_n -> exp(2 pi i / n); debug output only."""
        if self._mono is not None:
            coef, angle = self._mono
            return complex(float(coef) * np.exp(2j * np.pi * float(angle)))
        k = np.arange(len(self._dense))
        coeffs = np.array([float(c) for c in self._dense])
        return complex(np.sum(coeffs * np.exp(2j * np.pi * k / self._n)))

    # ------------------------------------------------------------------
    # Serialization
    # ------------------------------------------------------------------

    def to_json(self) -> Dict:
        """
        JSON form {"n", "coeffs", "sqrt_q", "sqrt_coeffs"} of the canonical representation.

        A value tagged with a radical q0 is written as sqrt(q0) * s, with s in
        sqrt_coeffs and coeffs all zero.
        """
        if self._radical is None:
            n, vec = self._n, self._vector_at(self._n)
            return {
                "n": n,
                "coeffs": [[c.numerator, c.denominator] for c in vec],
                "sqrt_q": None,
                "sqrt_coeffs": None,
            }
        cofactor = self / CycNum.sqrt(self._radical)
        n, vec = cofactor._n, cofactor._vector_at(cofactor._n)
        return {
            "n": n,
            "coeffs": [[0, 1] for _ in vec],
            "sqrt_q": self._radical,
            "sqrt_coeffs": [[c.numerator, c.denominator] for c in vec],
        }

    @classmethod
    def from_json(cls, data: Dict) -> "CycNum":
        """
        Build a CycNum from its JSON form.

        A non-null sqrt_q with sqrt_coeffs adds sqrt(sqrt_q) * (sqrt_coeffs value).
        """
        n = int(data["n"])
        value = cls.from_coeffs(n, [Fraction(int(a), int(b)) for a, b in data["coeffs"]])
        if data.get("sqrt_q") is not None and data.get("sqrt_coeffs"):
            extra = cls.from_coeffs(n, [Fraction(int(a), int(b)) for a, b in data["sqrt_coeffs"]])
            value = value + extra * cls.sqrt(_as_fraction(str(data["sqrt_q"])))
        return value

    def __repr__(self) -> str:
        return f"CycNum({self})"

    def __str__(self) -> str:
        if self._mono is not None:
            coef, angle = self._mono
            if not coef or not angle:
                return str(coef)
            if angle == Fraction(1, 2):
                return str(-coef)
            root = f"zeta{angle.denominator}^{angle.numerator}"
            return root if coef == 1 else f"{coef}*{root}"
        parts = []
        for k, c in enumerate(self._dense):
            if not c:
                continue
            if k == 0:
                parts.append(str(c))
            else:
                root = f"zeta{self._n}^{k}"
                parts.append(root if c == 1 else f"{c}*{root}")
        return " + ".join(parts).replace("+ -", "- ")


# ============================================================================
# MODULE HELPERS
# ============================================================================

def _dense_poly(vec: Tuple[Fraction, ...]) -> Poly:
    return Poly([Rational(c.numerator, c.denominator) for c in reversed(vec)], _X, domain=QQ)


@lru_cache(maxsize=64)
def _modulus_poly(n: int) -> Poly:
    return Poly(cyclotomic_poly(n, _X), _X, domain=QQ)


def _coerce(value) -> "CycNum":
    if isinstance(value, CycNum):
        return value
    if isinstance(value, (int, Fraction)):
        return CycNum(value)
    return NotImplemented


def _merge_radicals(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise MixedRadicals(f"Cannot combine sqrt({a}) and sqrt({b}) in one value")


def _product_radical(a: Optional[int], b: Optional[int]) -> Optional[int]:
    # sqrt(q0) * sqrt(q0) is rational
    if a is not None and a == b:
        return None
    return _merge_radicals(a, b)


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _vp_fraction(x: Fraction, p: int) -> int:
    return _vp_int(abs(x.numerator), p) - _vp_int(x.denominator, p)


def cyc_add(a: Number, b: Number) -> CycNum:
    return _coerce(a) + _coerce(b)


def cyc_mul(a: Number, b: Number) -> CycNum:
    return _coerce(a) * _coerce(b)


def cyc_neg(a: Number) -> CycNum:
    return -_coerce(a)


def cyc_inv(a: Number) -> CycNum:
    return _coerce(a).inverse()


def cyc_conj(a: Number) -> CycNum:
    return _coerce(a).conj()


def cyc_is_zero(a: Number) -> bool:
    return _coerce(a).is_zero()


def cyc_eq(a: Number, b: Number) -> bool:
    return _coerce(a) == _coerce(b)
