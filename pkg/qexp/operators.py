"""
Hecke Operators, U_{p,*} and Ordinary Projectors on Reduced q-Expansions

    hecke_T(W, l)            (T W)_a = W_{a l} + omega^-1(l) W_{a/l}
    U_v_star(W, p)           (U W)_a = omega^-1(p) W_{a p}
    ordinary_projector(W, p) e W = lim U^(n!) W on the retained window
    is_v_critical(W, p)      minimal c with v_p(W_{a p^s}) >= s - c
    s_quotient(W, S)         restriction to indices that are units at S

Constant terms follow the same formulas with a = 0.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

from sympy import isprime, multiplicity

import config
from cyclo.number import CycNum
from qexp.expansion import (CentralCharacter, GeometricTail, ReducedQExpansion, join_index,
                            min_valuation, qexp_norm, split_index)


logger = logging.getLogger(__name__)


class BadPlace(Exception):
    """Raised when an operator is applied at a place it is not defined for."""
    pass


class NoConvergence(Exception):
    """Raised when U^(n!) does not settle within the iteration budget."""

    def __init__(self, message: str, trajectory: Optional[List] = None):
        super().__init__(message)
        self.trajectory = list(trajectory or [])


def _omega(W: ReducedQExpansion, omega: Optional[CentralCharacter]) -> CentralCharacter:
    return W.omega if omega is None else omega


def _check_p(W: ReducedQExpansion, v: int) -> None:
    if v != W.p:
        raise BadPlace(f"U and e are defined at p = {W.p}, got v = {v}")


# ============================================================================
# HECKE AND U OPERATORS
# ============================================================================

def hecke_T(W: ReducedQExpansion, v: int,
            omega: Optional[CentralCharacter] = None) -> ReducedQExpansion:
    """
    T(varpi_v) on reduced coefficients.

    Args:
        W: Expansion
        v: A prime not dividing the tame level and different from p
        omega: Central character; W.omega by default

    Raises:
        BadPlace: If v is not prime, equals p or divides the level
    """
    if not isprime(v) or v == W.p or W.level % v == 0:
        raise BadPlace(f"T({v}) needs a prime away from p = {W.p} and level {W.level}")
    w = _omega(W, omega).inverse_at(v)
    return W.relabeled(Fraction(1, v)) + W.relabeled(v, w)


def U_v_star(W: ReducedQExpansion, v: int,
             omega: Optional[CentralCharacter] = None) -> ReducedQExpansion:
    """Shift-and-twist (U W)_a = omega^-1(p) W_{a p}; tails move one step down."""
    _check_p(W, v)
    w = _omega(W, omega).inverse_at(v)
    p = Fraction(W.p)
    return ReducedQExpansion(
        W.p,
        {a / p: w * value for a, value in W.coefficients.items()},
        {k: w * value for k, value in W.constant_terms.items()},
        W.level, W.omega,
        {a0: tail.shifted(1).scaled(w) for a0, tail in W.tails.items()})


def _power(x: CycNum, exponent: int) -> CycNum:
    """x^exponent, reduced modulo the order for roots of unity."""
    angle = x.angle_if_root_of_unity()
    if angle is not None:
        return CycNum.root_of_unity(angle * (exponent % angle.denominator))
    if exponent > config.MAX_EXACT_POWER:
        raise NoConvergence(f"{x}^{exponent} exceeds the exact power cap "
                            f"{config.MAX_EXACT_POWER} and {x} is not a root of unity")
    return x ** exponent


def _far_tail_value(tail: GeometricTail, s: int, p: int) -> CycNum:
    """Tail value at s; terms far below p^-B are dropped instead of computed."""
    if s < tail.start:
        return CycNum(0)
    e = s - tail.start
    terms = []
    for c, r in tail.components:
        vr = r.p_valuation(p)
        if (e > config.MAX_EXACT_POWER and vr > 0
                and c.p_valuation(p) + e * vr > config.PROJECTOR_NORM_EXPONENT):
            continue
        terms.append(c * _power(r, e))
    return CycNum.sum(terms)


def U_power_on_window(W: ReducedQExpansion, exponent: int, window: Iterable,
                      omega: Optional[CentralCharacter] = None) -> ReducedQExpansion:
    """
    U^exponent W restricted to the indices in window.

    The coefficient at a is omega^-exponent(p) W_{a p^exponent}, read from the
    explicit data and the tail of the line of a.
    """
    twist = _power(_omega(W, omega).inverse_at(W.p), exponent)
    values = {}
    for a in window:
        a0, s = split_index(Fraction(a), W.p)
        far = join_index(a0, s + exponent, W.p)
        value = W.coefficients.get(far, CycNum(0))
        tail = W.tails.get(a0)
        if tail is not None:
            value = value + _far_tail_value(tail, s + exponent, W.p)
        values[Fraction(a)] = twist * value
    constants = {k: twist * value for k, value in W.constant_terms.items()}
    return ReducedQExpansion(W.p, values, constants, W.level, W.omega)


# ============================================================================
# ORDINARY PROJECTOR
# ============================================================================

def _unit_component(W: ReducedQExpansion, window: Sequence[Fraction],
                    omega: CentralCharacter) -> Optional[ReducedQExpansion]:
    """
    The exact limit of U^(n!) W on the window, or None when it is not exact.

    On each tailed line the components with omega^-1(p) r a root of unity
    survive, continued down to the lowest window index of the line. Components
    with v(omega^-1(p) r) > 0 die; any other component has no exact limit.
    """
    w = omega.inverse_at(W.p)
    lowest: Dict[Fraction, int] = {}
    for a in window:
        a0, s = split_index(a, W.p)
        lowest[a0] = min(lowest.get(a0, s), s)

    tails = {}
    for a0, tail in W.tails.items():
        kept = []
        for c, r in tail.components:
            twisted = w * r
            if twisted.angle_if_root_of_unity() is not None:
                kept.append((c, r))
            elif twisted.p_valuation(W.p) <= 0:
                return None
        if kept and a0 in lowest:
            s_min = lowest[a0]
            tails[a0] = GeometricTail(s_min, tuple((c * r ** (s_min - tail.start), r)
                                                   for c, r in kept))

    constants = {}
    if W.constant_terms:
        if w.angle_if_root_of_unity() is not None:
            constants = dict(W.constant_terms)
        elif w.p_valuation(W.p) <= 0:
            return None
    return ReducedQExpansion(W.p, None, constants, W.level, W.omega, tails)


def iterate_norms(W: ReducedQExpansion, v: int, n_max: int,
                  omega: Optional[CentralCharacter] = None,
                  window: Optional[Iterable] = None) -> List[Union[Fraction, float]]:
    """qexp_norm of U^(n!) W on the window for n = 1 .. n_max."""
    _check_p(W, v)
    window = W.window() if window is None else sorted(Fraction(a) for a in window)
    return [qexp_norm(U_power_on_window(W, math.factorial(n), window, omega))
            for n in range(1, n_max + 1)]


def ordinary_projector(W: ReducedQExpansion, v: int,
                       omega: Optional[CentralCharacter] = None,
                       max_iter: Optional[int] = None,
                       window: Optional[Iterable] = None) -> ReducedQExpansion:
    """
    e_v W = lim U_{v,*}^(n!) W.

    Each iterate is compared on the retained window with the unit-eigen
    component; the limit is accepted on an exact match or once the residual
    lies below p^-PROJECTOR_NORM_EXPONENT.

    Args:
        W: Expansion
        v: Must be p
        omega: Central character; W.omega by default
        max_iter: Largest n; config.PROJECTOR_MAX_ITER by default
        window: Indices retained; W.window() by default

    Returns:
        The unit-eigen component (zero for v-critical W)

    Raises:
        NoConvergence: With the residual valuation trajectory
    """
    _check_p(W, v)
    omega = _omega(W, omega)
    max_iter = max_iter or config.PROJECTOR_MAX_ITER
    bound = config.PROJECTOR_NORM_EXPONENT
    window = W.window() if window is None else sorted(Fraction(a) for a in window)

    limit = _unit_component(W, window, omega)
    target = limit.restricted(window) if limit is not None else None
    trajectory = []
    previous = None
    for n in range(1, max_iter + 1):
        try:
            image = U_power_on_window(W, math.factorial(n), window, omega)
        except NoConvergence as exc:
            raise NoConvergence(str(exc), trajectory) from exc
        reference = target if target is not None else previous
        previous = image
        if reference is None:
            continue
        residual = min_valuation(image - reference)
        trajectory.append(residual)
        logger.debug(f"e_{v}: n = {n}, residual valuation {residual}")
        if target is None:
            continue
        if residual is None:
            logger.debug(f"e_{v}: exact fixed point at n = {n}")
            return limit
        if residual > bound:
            logger.debug(f"e_{v}: residual below p^-{bound} at n = {n}")
            return limit
    raise NoConvergence(f"U^(n!) did not settle on {len(window)} indices after "
                        f"n = {max_iter}; residual valuations {trajectory}", trajectory)


# ============================================================================
# CRITICALITY AND THE S-QUOTIENT
# ============================================================================

@dataclass
class CriticalityResult:
    """Outcome of is_v_critical."""

    c: Optional[int]
    window_limited: bool
    untailed_lines: List[Fraction] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"c": self.c, "window_limited": self.window_limited,
                "untailed_lines": [str(a0) for a0 in self.untailed_lines]}


def is_v_critical(W: ReducedQExpansion, v: int) -> CriticalityResult:
    """
    Minimal c with v_p(W_{a0 p^s}) >= s - c over the stored data.

    A line without a tail is only checked where it is stored, which is
    reported as window-limited. A tail is critical when every ratio has
    valuation at least 1; its contribution is max_j(start - v(c_j)). The
    zero expansion reports c = 0.

    Returns:
        CriticalityResult with c = None when some tail is not critical
    """
    _check_p(W, v)
    bounds = []
    for a, value in W.coefficients.items():
        _, s = split_index(a, W.p)
        bounds.append(s - value.p_valuation(W.p))
    for a0, tail in W.tails.items():
        for c, r in tail.components:
            if r.p_valuation(W.p) < 1:
                logger.debug(f"line {a0}: ratio {r} is not contracting by p")
                return CriticalityResult(None, False)
            bounds.append(tail.start - c.p_valuation(W.p))

    untailed = sorted(a0 for a0 in W.lines() if a0 not in W.tails)
    c = math.ceil(max(bounds)) if bounds else 0
    result = CriticalityResult(c, bool(untailed), untailed)
    if untailed:
        logger.warning(f"criticality c = {c} is window-limited on {len(untailed)} line(s)")
    return result


def s_quotient(W: ReducedQExpansion, S: Iterable[int]) -> ReducedQExpansion:
    """
    Restriction to indices a with v_l(a) = 0 for every l in S.

    Raises:
        ValueError: If S contains p or a non-prime
    """
    S = sorted(set(int(l) for l in S))
    for l in S:
        if not isprime(l) or l == W.p:
            raise ValueError(f"S must hold primes other than p = {W.p}, got {l}")

    def kept(a: Fraction) -> bool:
        return all(multiplicity(l, a.numerator) == 0 and multiplicity(l, a.denominator) == 0
                   for l in S)

    return ReducedQExpansion(W.p, {a: x for a, x in W.coefficients.items() if kept(a)},
                             W.constant_terms, W.level, W.omega,
                             {a0: t for a0, t in W.tails.items() if kept(a0)})


# ============================================================================
# PIPELINES
# ============================================================================

VALID_OPS = ["T", "U", "e", "S"]


def load_pipeline(source: Union[str, Sequence[Mapping[str, Any]]]) -> List[Dict[str, Any]]:
    """
    Parse and check a pipeline such as [{"op": "U", "v": 3}, {"op": "e", "v": 3}].

    "T", "U" and "e" take a prime "v" ("e" also an optional "max_iter");
    "S" takes a list "primes".
    """
    steps = json.loads(source) if isinstance(source, str) else source
    if not isinstance(steps, list):
        raise ValueError("a pipeline is a JSON list of operations")
    checked = []
    for i, step in enumerate(steps):
        if not isinstance(step, Mapping) or step.get("op") not in VALID_OPS:
            raise ValueError(f"step {i}: expected an object with op in {VALID_OPS}, got {step}")
        if step["op"] == "S":
            if not isinstance(step.get("primes"), list):
                raise ValueError(f"step {i}: 'S' needs a list 'primes'")
        elif not isinstance(step.get("v"), int):
            raise ValueError(f"step {i}: '{step['op']}' needs an integer 'v'")
        checked.append(dict(step))
    return checked


def apply_pipeline(W: ReducedQExpansion, pipeline) -> ReducedQExpansion:
    """Apply the operations of a pipeline in order."""
    for step in load_pipeline(pipeline):
        op = step["op"]
        if op == "T":
            W = hecke_T(W, step["v"])
        elif op == "U":
            W = U_v_star(W, step["v"])
        elif op == "e":
            W = ordinary_projector(W, step["v"], max_iter=step.get("max_iter"))
        else:
            W = s_quotient(W, step["primes"])
        logger.info(f"pipeline {op}: {W}")
    return W
