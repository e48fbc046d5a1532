"""
Brute-Force Integration Oracle

This module integrates locally constant integrands over valuation annuli of
F_v^x or E_w^x exactly, by enumerating finite-precision cosets, and closes
convergent directions with exact geometric tails whose ratio is supplied (and
justified) by the caller.

The oracle never infers convergence: integrate_with_tail takes the ratio of
consecutive annulus values together with a reason string, optionally spot
checks it on the first annulus past tail_start, and raises RatioOne when the
formal geometric sum is undefined.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Optional, Union

import numpy as np

import config
from cyclo.number import CycNum
from local.cosets import (InsufficientPrecision, MULTIPLICATIVE, PAdicCoset, annulus_cosets,
                          unit_group)
from local.datum import LocalDatum


logger = logging.getLogger(__name__)

Evaluator = Callable[[PAdicCoset], Union[CycNum, int, Fraction]]


class RatioOne(Exception):
    """Raised when a geometric tail with ratio exactly 1 is requested."""
    pass


class BudgetExceeded(Exception):
    """Raised when an integral would enumerate more cosets than allowed."""
    pass


class TailContractViolation(Exception):
    """Raised when the annulus after tail_start does not follow the declared ratio."""
    pass


@dataclass
class IntegrandSpec:
    """
    A locally constant integrand on one side of a place.

    Attributes:
        evaluator (Evaluator): Function constant on precision-N cosets
        required_precision (int): N
        side (str): SIDE_F or SIDE_E
        measure (str): MULTIPLICATIVE or ADDITIVE
        datum (LocalDatum): The place
        additive_depth (Optional[int]): When set, the annulus of valuation n is
            enumerated at precision max(N, additive_depth - n) so that additive
            characters of the integration variable are determined
        max_cosets (Optional[int]): Per-integral coset budget (config default)
    """
    evaluator: Evaluator
    required_precision: int
    side: str
    measure: str
    datum: LocalDatum
    additive_depth: Optional[int] = None
    max_cosets: Optional[int] = None

    def precision_at(self, n: int) -> int:
        N = max(self.required_precision, 1)
        if self.additive_depth is not None:
            N = max(N, self.additive_depth - n)
        return N

    @property
    def budget(self) -> int:
        return self.max_cosets if self.max_cosets is not None else config.MAX_COSETS_PER_INTEGRAL


def _as_cyc(value) -> CycNum:
    return value if isinstance(value, CycNum) else CycNum(Fraction(value))


def annulus_value(spec: IntegrandSpec, n: int) -> CycNum:
    """
    Integral of the evaluator over the annulus of valuation n.

    Raises:
        BudgetExceeded: If the annulus alone exceeds the coset budget
        InsufficientPrecision: Propagated from the evaluator
    """
    N = spec.precision_at(n)
    count = spec.datum.unit_count(spec.side, N)
    if count > spec.budget:
        raise BudgetExceeded(f"Annulus n={n} at precision {N} has {count} cosets "
                             f"(budget {spec.budget})")
    cosets = annulus_cosets(spec.datum, spec.side, n, N, spec.measure)
    value = CycNum.sum(_as_cyc(spec.evaluator(coset)) * mass for coset, mass in cosets)
    logger.debug(f"annulus n={n} N={N} on {spec.datum}/{spec.side}: {value}")
    return value


def _check_budget(spec: IntegrandSpec, n_min: int, n_max: int) -> None:
    total_cosets = sum(spec.datum.unit_count(spec.side, spec.precision_at(n))
                       for n in range(n_min, n_max + 1))
    if total_cosets > spec.budget:
        raise BudgetExceeded(f"Integral over [{n_min}, {n_max}] needs {total_cosets} cosets "
                             f"(budget {spec.budget})")


def annulus_values(spec: IntegrandSpec, n_min: int, n_max: int) -> Dict[int, CycNum]:
    """Per-annulus breakdown for n in [n_min, n_max]."""
    if n_min > n_max:
        raise ValueError(f"n_min ({n_min}) must not exceed n_max ({n_max})")
    _check_budget(spec, n_min, n_max)
    return {n: annulus_value(spec, n) for n in range(n_min, n_max + 1)}


def integrate_annuli(spec: IntegrandSpec, n_min: int, n_max: int) -> CycNum:
    """
    Exact integral over the annuli n_min <= v(t) <= n_max.

    Args:
        spec: The integrand
        n_min: Lowest valuation
        n_max: Highest valuation

    Returns:
        Sum over cosets of evaluator * measure

    Example:
        >>> d = LocalDatum(5, "split")
        >>> spec = IntegrandSpec(lambda x: 1, 1, "F", MULTIPLICATIVE, d)
        >>> integrate_annuli(spec, 0, 0)
        CycNum(1)
    """
    return CycNum.sum(annulus_values(spec, n_min, n_max).values())


def geometric_tail(first: CycNum, ratio: CycNum) -> CycNum:
    """first / (1 - ratio), the analytic continuation of sum_k first * ratio^k."""
    ratio = _as_cyc(ratio)
    if ratio == 1:
        raise RatioOne("Geometric tail with ratio 1 is divergent or indeterminate")
    return _as_cyc(first) / (1 - ratio)


def integrate_with_tail(spec: IntegrandSpec, n_min: int, tail_start: int,
                        ratio: Union[CycNum, Fraction, int], reason: str = "",
                        spot_check: Optional[bool] = None) -> CycNum:
    """
    Finite annulus sum over [n_min, tail_start) plus the geometric tail from tail_start.

    The caller asserts that the annulus value at n >= tail_start is
    c * ratio^(n - tail_start) with c the annulus value at tail_start.

    Args:
        spec: The integrand
        n_min: Lowest valuation
        tail_start: First annulus of the geometric region
        ratio: Ratio of consecutive annulus values in the geometric region
        reason: Why the geometric structure holds (logged)
        spot_check: Compare the annulus at tail_start + 1 with c * ratio
            (defaults to config.TAIL_SPOT_CHECK)

    Returns:
        Exact value of the regularized integral

    Raises:
        RatioOne: If ratio == 1 and c != 0
        TailContractViolation: If the spot check fails
        BudgetExceeded: If all enumerated annuli together exceed the coset budget
    """
    ratio = _as_cyc(ratio)
    if spot_check is None:
        spot_check = config.TAIL_SPOT_CHECK
    # one budget for the finite part, the tail annulus and the spot check
    _check_budget(spec, min(n_min, tail_start), tail_start + (1 if spot_check else 0))
    finite = integrate_annuli(spec, n_min, tail_start - 1) if n_min < tail_start else CycNum(0)
    first = annulus_value(spec, tail_start)
    if spot_check:
        following = annulus_value(spec, tail_start + 1)
        if following != first * ratio:
            raise TailContractViolation(
                f"Annulus {tail_start + 1} is {following}, expected {first * ratio} "
                f"(ratio {ratio}, reason: {reason or 'unspecified'})")
    if first.is_zero():
        tail = CycNum(0)
    else:
        tail = geometric_tail(first, ratio)
    logger.debug(f"tail from n={tail_start}: c={first}, r={ratio} ({reason}) -> {tail}")
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"truncation error after 30 terms: {tail_truncation_error(first, ratio):.3e}")
    return finite + tail


def tail_truncation_error(first: CycNum, ratio: CycNum, terms: int = 30) -> float:
    """Archimedean distance between the closed tail and its truncation after terms annuli."""
    c = _as_cyc(first).to_complex()
    r = _as_cyc(ratio).to_complex()
    if abs(r) >= 1 or _as_cyc(ratio) == 1:
        return float("nan")
    partial = np.sum(c * r ** np.arange(terms))
    closed = c / (1 - r)
    return float(np.abs(closed - partial))


def verify_local_constancy(spec: IntegrandSpec, samples: Optional[int] = None,
                           valuations: Iterable[int] = (0,), seed: Optional[int] = None) -> bool:
    """
    Check the caller contract: the evaluator is constant on precision-N cosets.

    For random cosets at the declared precision, compares the value on the
    coset with the values on its sub-cosets at precision N + 1.
    An evaluator that cannot be evaluated at the declared precision fails.

    Args:
        spec: The integrand
        samples: Number of random cosets (config.CONSTANCY_SAMPLES by default)
        valuations: Annuli to sample from
        seed: Random seed (config.RANDOM_SEED by default)

    Returns:
        True if no aliasing was detected
    """
    samples = samples if samples is not None else config.CONSTANCY_SAMPLES
    rng = random.Random(config.RANDOM_SEED if seed is None else seed)
    valuations = list(valuations)
    for _ in range(samples):
        n = rng.choice(valuations)
        N = spec.precision_at(n)
        u = rng.choice(unit_group(spec.datum, spec.side, N).elements)
        coset = PAdicCoset(spec.datum, spec.side, n, u, N)
        try:
            value = _as_cyc(spec.evaluator(coset))
            for sub in coset.refinements():
                if _as_cyc(spec.evaluator(sub)) != value:
                    logger.debug(f"aliasing on {coset}: {sub} differs")
                    return False
        except InsufficientPrecision as e:
            logger.debug(f"evaluator needs more precision than declared: {e}")
            return False
    return True
