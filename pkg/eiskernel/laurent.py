"""
Laurent Polynomials in the Unramified Character Variable

A LaurentPoly is a finitely supported map from integer exponents to exact
cyclotomic coefficients, read as a function of X = chi_F(varpi_v). Local
Eisenstein Whittaker coefficients live in this ring once the (1 - X) factor
has been cancelled against their geometric tail.
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, Tuple, Union

from cyclo.number import CycNum


logger = logging.getLogger(__name__)

Scalar = Union[CycNum, int, Fraction]


class NotExactlyDivisible(ArithmeticError):
    """Raised when a division by 1 - cX leaves a remainder."""
    pass


def _as_cyc(value: Scalar) -> CycNum:
    return value if isinstance(value, CycNum) else CycNum(value)


class LaurentPoly:
    """
    Exact Laurent polynomial sum_k c_k X^k.

    Zero coefficients are never stored, so two equal polynomials have equal
    coefficient maps.

    Attributes:
        coefficients (Dict[int, CycNum]): Exponent to nonzero coefficient
        variable (str): Display tag of the variable

    Example:
        >>> LaurentPoly({0: 1, 1: -1}).evaluate(1)
        CycNum(0)
    """

    __slots__ = ("coefficients", "variable")

    def __init__(self, coefficients: Dict[int, Scalar] = None, variable: str = "X"):
        clean: Dict[int, CycNum] = {}
        for k, c in (coefficients or {}).items():
            c = _as_cyc(c)
            if not c.is_zero():
                clean[int(k)] = c
        self.coefficients = clean
        self.variable = variable

    @classmethod
    def constant(cls, value: Scalar, variable: str = "X") -> "LaurentPoly":
        return cls({0: value}, variable)

    @classmethod
    def monomial(cls, exponent: int, value: Scalar = 1, variable: str = "X") -> "LaurentPoly":
        return cls({exponent: value}, variable)

    @classmethod
    def from_sequence(cls, values: Iterable[Scalar], start: int = 0,
                      variable: str = "X") -> "LaurentPoly":
        """sum_i values[i] X^(start + i)."""
        return cls({start + i: c for i, c in enumerate(values)}, variable)

    # ------------------------------------------------------------------
    # Shape
    # ------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coefficients

    def degree_range(self) -> Tuple[int, int]:
        """(lowest, highest) exponent; (0, 0) for the zero polynomial."""
        if not self.coefficients:
            return 0, 0
        return min(self.coefficients), max(self.coefficients)

    def coefficient(self, k: int) -> CycNum:
        return self.coefficients.get(k, CycNum(0))

    def is_constant(self) -> bool:
        return all(k == 0 for k in self.coefficients)

    # ------------------------------------------------------------------
    # Ring operations
    # ------------------------------------------------------------------

    def _wrap(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (CycNum, int, Fraction)):
            return LaurentPoly.constant(other, self.variable)
        return NotImplemented

    def __add__(self, other) -> "LaurentPoly":
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        result = dict(self.coefficients)
        for k, c in other.coefficients.items():
            result[k] = result[k] + c if k in result else c
        return LaurentPoly(result, self.variable)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -c for k, c in self.coefficients.items()}, self.variable)

    def __sub__(self, other) -> "LaurentPoly":
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        result: Dict[int, CycNum] = {}
        for i, a in self.coefficients.items():
            for j, b in other.coefficients.items():
                term = a * b
                result[i + j] = result[i + j] + term if i + j in result else term
        return LaurentPoly(result, self.variable)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentPoly":
        """X^k * self."""
        return LaurentPoly({e + k: c for e, c in self.coefficients.items()}, self.variable)

    def divide_linear(self, c: Scalar) -> "LaurentPoly":
        """
        Exact quotient of self by (1 - cX).

        Args:
            c: The constant of the linear factor

        Returns:
            Q with (1 - cX) * Q == self

        Raises:
            NotExactlyDivisible: If the division leaves a remainder
        """
        c = _as_cyc(c)
        if c.is_zero() or self.is_zero():
            return LaurentPoly(self.coefficients, self.variable)
        lo, hi = self.degree_range()
        # p_k = q_k - c q_(k-1), solved upward from the lowest exponent
        quotient: Dict[int, CycNum] = {}
        previous = CycNum(0)
        for k in range(lo, hi + 1):
            q_k = self.coefficient(k) + c * previous
            quotient[k] = q_k
            previous = q_k
        if not quotient[hi].is_zero():
            raise NotExactlyDivisible(
                f"{self} is not divisible by (1 - ({c}){self.variable})")
        return LaurentPoly(quotient, self.variable)

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def evaluate(self, x: Scalar) -> CycNum:
        """Value at X = x (x must be invertible when negative exponents occur)."""
        x = _as_cyc(x)
        return CycNum.sum(c * x ** k for k, c in self.coefficients.items())

    def derivative_at_one(self) -> CycNum:
        """d/dX at X = 1, that is sum_k k c_k."""
        return CycNum.sum(c * k for k, c in self.coefficients.items())

    # ------------------------------------------------------------------
    # Comparison and serialization
    # ------------------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(frozenset(self.coefficients.items()))

    def to_dict(self) -> Dict[str, Dict]:
        """JSON form: exponent (as a string key) to CycNum JSON."""
        return {str(k): self.coefficients[k].to_json() for k in sorted(self.coefficients)}

    @classmethod
    def from_dict(cls, data: Dict[str, Dict], variable: str = "X") -> "LaurentPoly":
        return cls({int(k): CycNum.from_json(v) for k, v in data.items()}, variable)

    def __repr__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for k in sorted(self.coefficients):
            c = self.coefficients[k]
            if k == 0:
                parts.append(f"({c})")
            elif k == 1:
                parts.append(f"({c}){self.variable}")
            else:
                parts.append(f"({c}){self.variable}^{k}")
        return " + ".join(parts)


def derivative_at_one(poly: LaurentPoly) -> CycNum:
    """The coefficient of the directional derivative at the trivial character."""
    return poly.derivative_at_one()
