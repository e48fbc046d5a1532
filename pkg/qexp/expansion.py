"""
Reduced q-Expansions

A ReducedQExpansion over F = Q holds the reduced coefficients W_a of a weight-2
form at positive rational indices a, the constant terms W_0 by class label, the
tame level N and the central character omega. Coefficients are CycNum values,
measured by their p-adic valuation.

Indices are grouped into p-lines {a0 p^s : s in Z} with a0 prime to p. A line may
carry a GeometricTail: for s >= start the coefficient at a0 p^s is

    sum_j c_j r_j^(s - start)

added to nothing (explicit coefficients on a tailed line sit below start). The
tail is the support contract that lets U_{p,*} and the ordinary projector act
exactly on data that does not stop.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from sympy import isprime, multiplicity

from cyclo.number import CycNum


logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction, CycNum]


def _cyc(value: Scalar) -> CycNum:
    return value if isinstance(value, CycNum) else CycNum(Fraction(value))


def split_index(a: Fraction, p: int) -> Tuple[Fraction, int]:
    """(a0, s) with a = a0 p^s and a0 prime to p."""
    a = Fraction(a)
    if a <= 0:
        raise ValueError(f"indices are positive rationals, got {a}")
    s = multiplicity(p, a.numerator) - multiplicity(p, a.denominator)
    return a / Fraction(p) ** s, s


def join_index(a0: Fraction, s: int, p: int) -> Fraction:
    return Fraction(a0) * Fraction(p) ** s


# ============================================================================
# CENTRAL CHARACTER
# ============================================================================

@dataclass
class CentralCharacter:
    """Values omega(varpi_l) at primes; primes not listed have omega = 1."""

    values: Dict[int, CycNum] = field(default_factory=dict)

    def __post_init__(self):
        self.values = {int(l): _cyc(v) for l, v in self.values.items()}
        for l, v in self.values.items():
            if not isprime(l):
                raise ValueError(f"central character keys must be primes, got {l}")
            if v.is_zero():
                raise ValueError(f"omega({l}) must be nonzero")

    def at(self, prime: int) -> CycNum:
        return self.values.get(prime, CycNum(1))

    def inverse_at(self, prime: int) -> CycNum:
        return self.at(prime).inverse()

    def __eq__(self, other) -> bool:
        if not isinstance(other, CentralCharacter):
            return NotImplemented
        primes = set(self.values) | set(other.values)
        return all(self.at(l) == other.at(l) for l in primes)

    def to_json(self) -> Dict[str, Any]:
        return {str(l): self.values[l].to_json() for l in sorted(self.values)
                if self.values[l] != 1}

    @classmethod
    def from_json(cls, data: Optional[Mapping[str, Any]]) -> "CentralCharacter":
        return cls({int(l): CycNum.from_json(v) for l, v in (data or {}).items()})


# ============================================================================
# GEOMETRIC TAILS
# ============================================================================

@dataclass(frozen=True)
class GeometricTail:
    """
    Coefficients sum_j c_j r_j^(s - start) for s >= start on one p-line.

    Components with equal ratio are merged and zero components dropped, so
    two tails with the same start compare by their component sets.
    """

    start: int
    components: Tuple[Tuple[CycNum, CycNum], ...] = ()

    def __post_init__(self):
        merged: Dict[CycNum, CycNum] = {}
        for c, r in self.components:
            c, r = _cyc(c), _cyc(r)
            if r.is_zero():
                raise ValueError("tail ratios must be nonzero")
            merged[r] = merged.get(r, CycNum(0)) + c
        kept = tuple(sorted(((c, r) for r, c in merged.items() if not c.is_zero()),
                            key=lambda cr: json.dumps(cr[1].to_json(), sort_keys=True)))
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "components", kept)

    def is_empty(self) -> bool:
        return not self.components

    def value(self, s: int) -> CycNum:
        if s < self.start:
            return CycNum(0)
        return CycNum.sum(c * r ** (s - self.start) for c, r in self.components)

    def shifted(self, k: int) -> "GeometricTail":
        """The tail of the line moved k steps down: start - k."""
        return GeometricTail(self.start - k, self.components)

    def scaled(self, factor: Scalar) -> "GeometricTail":
        factor = _cyc(factor)
        return GeometricTail(self.start, tuple((factor * c, r) for c, r in self.components))

    def rebased(self, new_start: int) -> Tuple[Dict[int, CycNum], "GeometricTail"]:
        """
        Move the start up to new_start.

        Returns the values at start <= s < new_start, which become explicit
        coefficients, and the tail from new_start.
        """
        if new_start < self.start:
            raise ValueError(f"cannot rebase tail at {self.start} down to {new_start}")
        head = {s: self.value(s) for s in range(self.start, new_start)}
        shift = new_start - self.start
        tail = GeometricTail(new_start, tuple((c * r ** shift, r) for c, r in self.components))
        return {s: v for s, v in head.items() if not v.is_zero()}, tail

    def to_json(self) -> Dict[str, Any]:
        return {"start": self.start,
                "components": [[c.to_json(), r.to_json()] for c, r in self.components]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "GeometricTail":
        return cls(int(data["start"]), tuple((CycNum.from_json(c), CycNum.from_json(r))
                                             for c, r in data["components"]))


# ============================================================================
# EXPANSIONS
# ============================================================================

class ReducedQExpansion:
    """
    Reduced q-expansion data (W_0, (W_a)) of a weight-2 form over Q.

    Attributes:
        p: The prime of the ordinary theory
        coefficients: Explicit W_a at positive rational a (zeros never stored)
        constant_terms: W_0 by class label
        level: Tame level N, prime to p
        omega: Central character
        tails: GeometricTail by p-line representative a0
    """

    def __init__(self, p: int, coefficients: Optional[Mapping[Any, Scalar]] = None,
                 constant_terms: Optional[Mapping[str, Scalar]] = None, level: int = 1,
                 omega: Optional[CentralCharacter] = None,
                 tails: Optional[Mapping[Any, GeometricTail]] = None):
        if not isprime(p):
            raise ValueError(f"p must be prime, got {p}")
        if level < 1 or level % p == 0:
            raise ValueError(f"tame level must be a positive integer prime to {p}, got {level}")
        self.p = int(p)
        self.level = int(level)
        self.omega = omega if omega is not None else CentralCharacter()

        self.coefficients: Dict[Fraction, CycNum] = {}
        for a, value in (coefficients or {}).items():
            a, value = Fraction(a), _cyc(value)
            split_index(a, p)
            if not value.is_zero():
                self.coefficients[a] = value

        self.constant_terms: Dict[str, CycNum] = {
            str(k): _cyc(v) for k, v in (constant_terms or {}).items() if not _cyc(v).is_zero()}

        self.tails: Dict[Fraction, GeometricTail] = {}
        for a0, tail in (tails or {}).items():
            a0 = Fraction(a0)
            if split_index(a0, p)[1] != 0:
                raise ValueError(f"tail line {a0} is divisible by {p}; use its p-free part")
            if not tail.is_empty():
                self.tails[a0] = tail

        self._lift_tails()

    def _lift_tails(self) -> None:
        """Rebase each tail above the explicit coefficients of its line."""
        top: Dict[Fraction, int] = {}
        for a in self.coefficients:
            a0, s = split_index(a, self.p)
            if a0 in self.tails:
                top[a0] = max(top.get(a0, s), s)
        for a0, s_max in top.items():
            tail = self.tails[a0]
            if s_max < tail.start:
                continue
            head, moved = tail.rebased(s_max + 1)
            for s, v in head.items():
                a = join_index(a0, s, self.p)
                total = self.coefficients.get(a, CycNum(0)) + v
                if total.is_zero():
                    self.coefficients.pop(a, None)
                else:
                    self.coefficients[a] = total
            self.tails[a0] = moved

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, p: int, level: int = 1, omega: Optional[CentralCharacter] = None):
        return cls(p, level=level, omega=omega)

    @classmethod
    def delta(cls, p: int, a, value: Scalar = 1, **kwargs) -> "ReducedQExpansion":
        """The expansion with a single coefficient at a."""
        return cls(p, {Fraction(a): value}, **kwargs)

    @classmethod
    def geometric_line(cls, p: int, a0, components: Iterable[Tuple[Scalar, Scalar]],
                       start: int = 0, **kwargs) -> "ReducedQExpansion":
        """
        A single p-line W_{a0 p^s} = sum c r^(s - start) for s >= start.

        geometric_line(p, 1, [(1, alpha)]) is the comb W_{p^s} = alpha^s.
        """
        tail = GeometricTail(start, tuple(components))
        return cls(p, tails={Fraction(a0): tail}, **kwargs)

    def _like(self, coefficients=None, constant_terms=None,
              tails=None) -> "ReducedQExpansion":
        return ReducedQExpansion(self.p, coefficients, constant_terms, self.level, self.omega,
                                 tails)

    # ------------------------------------------------------------------
    # Access
    # ------------------------------------------------------------------

    def coefficient(self, a) -> CycNum:
        """W_a, explicit part plus tail."""
        a = Fraction(a)
        a0, s = split_index(a, self.p)
        value = self.coefficients.get(a, CycNum(0))
        tail = self.tails.get(a0)
        return value + tail.value(s) if tail is not None else value

    def constant_term(self, label: str = "0") -> CycNum:
        return self.constant_terms.get(str(label), CycNum(0))

    def lines(self) -> List[Fraction]:
        return sorted({split_index(a, self.p)[0] for a in self.coefficients} | set(self.tails))

    def window(self) -> List[Fraction]:
        """
        The retained finite window: explicit indices plus, on each tailed line,
        the indices from the lowest stored s up to the last tail head value.
        """
        indices = set(self.coefficients)
        for a0, tail in self.tails.items():
            line = [split_index(a, self.p)[1] for a in self.coefficients
                    if split_index(a, self.p)[0] == a0]
            low = min(line + [tail.start])
            high = tail.start + max(len(tail.components), 1)
            indices.update(join_index(a0, s, self.p) for s in range(low, high))
        return sorted(indices)

    def is_zero(self) -> bool:
        return not self.coefficients and not self.tails and not self.constant_terms

    def is_finite(self) -> bool:
        return not self.tails

    # ------------------------------------------------------------------
    # Linear structure
    # ------------------------------------------------------------------

    def _check_compatible(self, other: "ReducedQExpansion") -> None:
        if self.p != other.p or self.level != other.level or self.omega != other.omega:
            raise ValueError("expansions differ in p, level or central character")

    def __add__(self, other: "ReducedQExpansion") -> "ReducedQExpansion":
        if not isinstance(other, ReducedQExpansion):
            return NotImplemented
        self._check_compatible(other)
        coefficients: Dict[Fraction, CycNum] = dict(self.coefficients)
        for a, v in other.coefficients.items():
            coefficients[a] = coefficients.get(a, CycNum(0)) + v
        constants = dict(self.constant_terms)
        for k, v in other.constant_terms.items():
            constants[k] = constants.get(k, CycNum(0)) + v

        tails = dict(self.tails)
        for a0, tail in other.tails.items():
            mine = tails.get(a0)
            if mine is None:
                tails[a0] = tail
                continue
            start = max(mine.start, tail.start)
            parts = []
            for t in (mine, tail):
                head, moved = t.rebased(start)
                for s, v in head.items():
                    a = join_index(a0, s, self.p)
                    coefficients[a] = coefficients.get(a, CycNum(0)) + v
                parts.extend(moved.components)
            tails[a0] = GeometricTail(start, tuple(parts))
        return self._like(coefficients, constants, tails)

    def scaled(self, factor: Scalar) -> "ReducedQExpansion":
        factor = _cyc(factor)
        return self._like({a: factor * v for a, v in self.coefficients.items()},
                          {k: factor * v for k, v in self.constant_terms.items()},
                          {a0: t.scaled(factor) for a0, t in self.tails.items()})

    def __rmul__(self, factor: Scalar) -> "ReducedQExpansion":
        return self.scaled(factor)

    def __neg__(self) -> "ReducedQExpansion":
        return self.scaled(-1)

    def __sub__(self, other: "ReducedQExpansion") -> "ReducedQExpansion":
        return self + (-other)

    def relabeled(self, factor, scale: Scalar = 1) -> "ReducedQExpansion":
        """The expansion V with V_{a * factor} = scale * W_a, for factor prime to p."""
        factor = Fraction(factor)
        if split_index(factor, self.p)[1] != 0:
            raise ValueError(f"relabeling factor {factor} must be prime to {self.p}")
        scale = _cyc(scale)
        return self._like({a * factor: scale * v for a, v in self.coefficients.items()},
                          {k: scale * v for k, v in self.constant_terms.items()},
                          {a0 * factor: t.scaled(scale) for a0, t in self.tails.items()})

    def restricted(self, indices: Iterable) -> "ReducedQExpansion":
        """Finite expansion holding W_a at the given indices, constant terms kept."""
        return self._like({Fraction(a): self.coefficient(a) for a in indices},
                          self.constant_terms)

    def __eq__(self, other) -> bool:
        """
        Equality as coefficient families.

        The difference is normalized on construction: tails are rebased to a
        common start and their components merged by ratio, so W == V exactly
        when W - V stores nothing.
        """
        if not isinstance(other, ReducedQExpansion):
            return NotImplemented
        if self.p != other.p or self.level != other.level or self.omega != other.omega:
            return False
        difference = self - other
        if difference.coefficients or difference.constant_terms:
            return False
        return all(t.is_empty() for t in difference.tails.values())

    def __hash__(self):
        return hash((self.p, self.level, len(self.coefficients)))

    def __repr__(self) -> str:
        return (f"ReducedQExpansion(p={self.p}, coefficients={len(self.coefficients)}, "
                f"tails={len(self.tails)}, level={self.level})")

    # ------------------------------------------------------------------
    # Serialization
    # ------------------------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        """Canonical JSON form; keys and lists are sorted so dumps are byte-stable."""
        return {
            "p": self.p,
            "level": self.level,
            "omega": self.omega.to_json(),
            "constant_terms": {k: self.constant_terms[k].to_json()
                               for k in sorted(self.constant_terms)},
            "coefficients": [[str(a), self.coefficients[a].to_json()]
                             for a in sorted(self.coefficients)],
            "tails": [{"line": str(a0), **self.tails[a0].to_json()}
                      for a0 in sorted(self.tails)],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ReducedQExpansion":
        return cls(int(data["p"]),
                   {Fraction(a): CycNum.from_json(v) for a, v in data.get("coefficients", [])},
                   {k: CycNum.from_json(v) for k, v in data.get("constant_terms", {}).items()},
                   int(data.get("level", 1)),
                   CentralCharacter.from_json(data.get("omega")),
                   {Fraction(t["line"]): GeometricTail.from_json(t)
                    for t in data.get("tails", [])})

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "ReducedQExpansion":
        return cls.from_json(json.loads(text))


# ============================================================================
# NORM
# ============================================================================

def _period(tail: GeometricTail) -> int:
    period = 1
    for _, r in tail.components:
        angle = r.angle_if_root_of_unity()
        if angle is not None:
            period = period * angle.denominator // math.gcd(period, angle.denominator)
    return period


def _tail_valuations(tail: GeometricTail, p: int) -> List[Fraction]:
    """Valuations whose minimum is the inf over the whole tail."""
    unit_part = []
    for c, r in tail.components:
        v = r.p_valuation(p)
        if v < 0:
            return [-math.inf]
        if v == 0:
            if r.angle_if_root_of_unity() is None:
                raise ValueError(f"tail ratio {r} is a unit but not a root of unity; "
                                 f"its sup is not computed exactly")
            unit_part.append((c, r))
    horizon = len(tail.components) + _period(tail)
    values = [tail.value(tail.start + k) for k in range(horizon)]
    # Far out the contracting components die and the periodic unit part remains
    if unit_part:
        far = GeometricTail(tail.start, tuple(unit_part))
        values.extend(far.value(tail.start + k) for k in range(_period(far)))
    return [v.p_valuation(p) for v in values if not v.is_zero()]


def min_valuation(W: ReducedQExpansion) -> Optional[Union[Fraction, float]]:
    """
    Minimal p-adic valuation over all coefficients; None for W = 0.

    -inf when a tail grows without bound.
    """
    valuations = [v.p_valuation(W.p) for v in W.coefficients.values()]
    valuations += [v.p_valuation(W.p) for v in W.constant_terms.values()]
    for tail in W.tails.values():
        valuations += _tail_valuations(tail, W.p)
    return min(valuations) if valuations else None


def qexp_norm(W: ReducedQExpansion) -> Union[Fraction, float]:
    """
    ||W|| = sup of |W_0|_p and |W_a|_p.

    Returns:
        A Fraction p^(-v), 0 for W = 0, or math.inf for a growing tail

    Raises:
        ValueError: If the minimal valuation is not an integer
    """
    v = min_valuation(W)
    if v is None:
        return Fraction(0)
    if v == -math.inf:
        return math.inf
    if Fraction(v).denominator != 1:
        raise ValueError(f"minimal valuation {v} is not integral; the norm is not rational")
    return Fraction(W.p) ** (-int(v))
