"""
Theta Representation Numbers over an Imaginary Quadratic Field

The maximal order of E = Q(sqrt(D)), D < 0 a fundamental discriminant, is
Z + Z*omega with omega = sqrt(D)/2 (D = 0 mod 4) or (1 + sqrt(D))/2 (D = 1 mod 4),
so the norm form is

    N(x + y*omega) = x^2 + Tr(omega) x y + N(omega) y^2.

theta_rep_number counts weighted lattice points of a given scaled norm point by
point; theta_series_coefficients builds the whole coefficient table from one
numpy traversal of the norm ball and serves as its cross-check.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from sympy import factorint, legendre_symbol

import config
from integrate.oracle import BudgetExceeded
from local.datum import LocalDatum


logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class ThetaLattice:
    """
    The maximal order of an imaginary quadratic field with a Schwartz weight.

    Attributes:
        discriminant (int): Fundamental discriminant D < 0
        coset (Optional[Tuple[int, int, int]]): (x0, y0, M) for the indicator
            of x0 + y0*omega + M*O; None for the indicator of O

    Example:
        >>> lat = ThetaLattice(-4)
        >>> lat.norm(1, 1)
        2
    """

    discriminant: int
    coset: Optional[Tuple[int, int, int]] = None

    def __post_init__(self):
        D = self.discriminant
        if D >= 0:
            raise ValueError(f"Discriminant must be negative, got {D}")
        if D % 4 == 1:
            core = -D
        elif D % 4 == 0 and (D // 4) % 4 in (2, 3):
            core = -D // 4
        else:
            raise ValueError(f"{D} is not a fundamental discriminant")
        if any(e > 1 for e in factorint(core).values()):
            raise ValueError(f"{D} is not a fundamental discriminant")
        if self.coset is not None:
            x0, y0, modulus = self.coset
            if modulus <= 0:
                raise ValueError(f"Coset modulus must be positive, got {modulus}")
            object.__setattr__(self, "coset", (x0 % modulus, y0 % modulus, modulus))

    # ------------------------------------------------------------------
    # Arithmetic of the order
    # ------------------------------------------------------------------

    @property
    def omega_trace(self) -> int:
        return 1 if self.discriminant % 4 == 1 else 0

    @property
    def omega_norm(self) -> int:
        if self.discriminant % 4 == 1:
            return (1 - self.discriminant) // 4
        return -self.discriminant // 4

    def norm(self, x: int, y: int) -> int:
        return x * x + self.omega_trace * x * y + self.omega_norm * y * y

    @property
    def unit_count(self) -> int:
        """|O^x|."""
        return {-4: 4, -3: 6}.get(self.discriminant, 2)

    def weight(self, x: int, y: int) -> int:
        """phi_1 at x + y*omega."""
        if self.coset is None:
            return 1
        x0, y0, modulus = self.coset
        return int((x - x0) % modulus == 0 and (y - y0) % modulus == 0)

    # ------------------------------------------------------------------
    # Local behaviour
    # ------------------------------------------------------------------

    def splitting(self, p: int) -> str:
        """How p decomposes in E: LocalDatum.SPLIT, INERT or RAMIFIED."""
        D = self.discriminant
        if D % p == 0:
            return LocalDatum.RAMIFIED
        if p == 2:
            return LocalDatum.SPLIT if D % 8 == 1 else LocalDatum.INERT
        return LocalDatum.SPLIT if legendre_symbol(D % p, p) == 1 else LocalDatum.INERT

    def is_non_split(self, p: int) -> bool:
        return self.splitting(p) != LocalDatum.SPLIT

    def local_datum(self, p: int) -> Optional[LocalDatum]:
        """E_p as a LocalDatum, or None where the local model is unsupported (2 ramified)."""
        kind = self.splitting(p)
        if kind != LocalDatum.RAMIFIED:
            return LocalDatum(p, kind)
        if p == 2:
            return None
        return LocalDatum(p, kind, ram_unit=self.discriminant // p)

    def to_dict(self) -> Dict[str, Any]:
        return {"discriminant": self.discriminant,
                "coset": list(self.coset) if self.coset is not None else None}


def _target(a: Rational, u: Rational) -> Optional[int]:
    """The norm a / u as an integer, or None if no lattice point can reach it."""
    if not u:
        raise ValueError("u must be nonzero")
    ratio = Fraction(a) / Fraction(u)
    if ratio < 0 or ratio.denominator != 1:
        return None
    return ratio.numerator


def theta_rep_number(lat: ThetaLattice, a: Rational, u: Rational = 1,
                     budget: Optional[int] = None) -> int:
    """
    sum of phi_1(x) over x in O with u N(x) = a.

    Args:
        lat: The weighted lattice
        a: Non-negative rational index
        u: Nonzero rational scale
        budget: Lattice points the search may visit (config.THETA_ENUMERATION_BUDGET)

    Returns:
        The weighted representation number

    Raises:
        BudgetExceeded: If the norm ball holds more points than the budget

    Example:
        >>> theta_rep_number(ThetaLattice(-4), 5)
        8
    """
    budget = config.THETA_ENUMERATION_BUDGET if budget is None else budget
    target = _target(a, u)
    if target is None:
        return 0
    y_max = isqrt(4 * target // -lat.discriminant)
    x_max = isqrt(target) + y_max + 1
    visits = (2 * x_max + 1) * (2 * y_max + 1)
    if visits > budget:
        raise BudgetExceeded(f"Norm ball for N = {target} holds {visits} points (budget {budget})")
    count = 0
    for y in range(-y_max, y_max + 1):
        for x in range(-x_max, x_max + 1):
            if lat.norm(x, y) == target:
                count += lat.weight(x, y)
    return count


def theta_series_coefficients(lat: ThetaLattice, bound: int, u: Rational = 1) -> List[int]:
    """
    Coefficients r(a) for the integer indices a = 0..bound, by one traversal.

    Raises:
        BudgetExceeded: If the norm ball exceeds config.THETA_ENUMERATION_BUDGET
    """
    u = Fraction(u)
    if not u:
        raise ValueError("u must be nonzero")
    if u < 0:
        # only x = 0 has u N(x) >= 0
        return [lat.weight(0, 0)] + [0] * bound
    norm_max = int(bound / u)
    y_max = isqrt(4 * norm_max // -lat.discriminant)
    x_max = isqrt(norm_max) + y_max + 1
    xs = np.arange(-x_max, x_max + 1, dtype=np.int64)
    ys = np.arange(-y_max, y_max + 1, dtype=np.int64)
    if xs.size * ys.size > config.THETA_ENUMERATION_BUDGET:
        raise BudgetExceeded(f"Norm ball up to {norm_max} exceeds the enumeration budget")
    x, y = np.meshgrid(xs, ys, indexing="ij")
    norms = x * x + lat.omega_trace * x * y + lat.omega_norm * y * y
    mask = norms <= norm_max
    if lat.coset is not None:
        x0, y0, modulus = lat.coset
        mask &= ((x - x0) % modulus == 0) & ((y - y0) % modulus == 0)
    hist = np.bincount(norms[mask], minlength=norm_max + 1)
    coefficients = []
    for a in range(bound + 1):
        target = _target(a, u)
        coefficients.append(int(hist[target]) if target is not None and target <= norm_max else 0)
    logger.debug(f"theta coefficients for {lat.to_dict()} up to {bound}: {coefficients}")
    return coefficients
