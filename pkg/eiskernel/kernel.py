"""
Analytic Kernel Coefficients and the Incoherence Check

Desk-scale assembly of the kernel over F = Q: the a-th q-coefficient is

    c_U * sum_u sum_{a1 + a2 = a} r_theta(a1, u) * E_{a2}(u)

where r_theta comes from eiskernel.theta and E_{a2}(u) is the product over
places of local Whittaker coefficients at a character point. The local space
at every place is (E_v, uq) except at one flip place, where the other plane of
discriminant E_v is used; the resulting collection is incoherent and every
coefficient at the trivial character has a local zero.

Constant terms (a2 = 0) are flagged and left out of the assembly.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

from sympy import factorint, primerange

import config
from cyclo.number import CycNum
from eiskernel.theta import ThetaLattice, theta_rep_number
from eiskernel.whittaker import QuadSpaceLocal, archimedean_fold, flip_scalar, whittaker_poly
from local.datum import LocalDatum, hilbert_symbol


logger = logging.getLogger(__name__)

INF = "inf"

Place = Union[int, str]
LocalModel = Union[LocalDatum, int, Fraction, CycNum]


class MissingLocalDatum(Exception):
    """Raised when a prime in the support has no local model."""
    pass


class BoundTooSmall(Exception):
    """Raised when a prime search bound does not cover the relevant primes."""
    pass


def c_U_constant(unit_index: Optional[int] = None, class_number: int = 1) -> Fraction:
    """2^([F:Q]-1) h_F / [O_F^x : mu^2] for F = Q."""
    unit_index = config.UNIT_INDEX_CONSTANT if unit_index is None else unit_index
    return Fraction(class_number, unit_index)


def _check_flip(lat: ThetaLattice, flip_place: Optional[Place]) -> None:
    if flip_place is None or flip_place == INF:
        return
    if not isinstance(flip_place, int) or flip_place < 2:
        raise ValueError(f"flip place must be a prime or '{INF}', got {flip_place}")
    if not lat.is_non_split(flip_place):
        raise ValueError(f"flip place {flip_place} splits in Q(sqrt({lat.discriminant}))")


def _primes_of(x: Fraction) -> set:
    return set(factorint(abs(x.numerator))) | set(factorint(x.denominator))


def place_represents(lat: ThetaLattice, place: Place, a: Fraction, u: Fraction,
                     flip_place: Optional[Place]) -> bool:
    """
    True iff the local space at `place` represents a.

    (E_v, uq) represents a iff eta_v(a / u) = 1; the flipped plane represents
    exactly the complement.
    """
    eta = hilbert_symbol(Fraction(a) / Fraction(u), lat.discriminant, place)
    return (eta == 1) != (place == flip_place)


def relevant_primes(lat: ThetaLattice, a: Fraction, u: Fraction,
                    flip_place: Optional[Place]) -> List[int]:
    """Primes at which the local factor can differ from 1."""
    primes = _primes_of(Fraction(a)) | _primes_of(Fraction(u)) | set(factorint(-lat.discriminant))
    if isinstance(flip_place, int):
        primes.add(flip_place)
    return sorted(primes)


def incoherence_witness(lat: ThetaLattice, a, u, prime_bound: int,
                        flip_place: Optional[Place] = config.DEFAULT_FLIP_PLACE) -> Optional[Place]:
    """
    A place whose local space does not represent a.

    The search runs over odd non-split primes in ascending order, then 2, then
    the archimedean place (returned as "inf").

    Args:
        lat: The lattice fixing E
        a: Nonzero rational
        u: Nonzero rational
        prime_bound: Largest prime searched
        flip_place: Where the collection differs from (E, uq); None for coherent data

    Returns:
        The first failing place, or None for coherent data

    Raises:
        BoundTooSmall: If prime_bound misses a prime dividing a u D or the flip place
    """
    a, u = Fraction(a), Fraction(u)
    if not a or not u:
        raise ValueError("a and u must be nonzero")
    _check_flip(lat, flip_place)
    needed = relevant_primes(lat, a, u, flip_place)
    if needed and needed[-1] > prime_bound:
        raise BoundTooSmall(f"prime bound {prime_bound} misses {needed[-1]}")

    for p in primerange(3, prime_bound + 1):
        if lat.is_non_split(p) and not place_represents(lat, p, a, u, flip_place):
            return p
    if not place_represents(lat, 2, a, u, flip_place):
        return 2
    if not place_represents(lat, INF, a, u, flip_place):
        return INF
    if flip_place is not None:
        raise ArithmeticError(f"No witness for a = {a}, u = {u}: signs violate the product formula")
    return None


# ============================================================================
# KERNEL ASSEMBLY
# ============================================================================

def _resolve_models(lat: ThetaLattice, spaces: Mapping[int, LocalModel],
                    primes: Iterable[int]) -> Dict[int, LocalModel]:
    models = {}
    for p in primes:
        model = spaces.get(p) if spaces else None
        if model is None:
            model = lat.local_datum(p)
        if model is None:
            raise MissingLocalDatum(
                f"No local model at {p} for Q(sqrt({lat.discriminant})); supply one in spaces")
        models[p] = model
    return models


def _local_factor(lat: ThetaLattice, p: int, model: LocalModel, a: Fraction, u: Fraction,
                  x_value, flip_place: Optional[Place]) -> CycNum:
    if not isinstance(model, LocalDatum):
        # A recorded local value, used where a is represented
        if not place_represents(lat, p, a, u, flip_place):
            return CycNum(0)
        return model if isinstance(model, CycNum) else CycNum(model)
    scalar = u * flip_scalar(model) if p == flip_place else u
    return whittaker_poly(QuadSpaceLocal(model, scalar), a).value_at(x_value)


def eisenstein_coefficient(lat: ThetaLattice, spaces: Mapping[int, LocalModel], a, u,
                           chi_point: Optional[Mapping[int, Any]] = None,
                           flip_place: Optional[Place] = config.DEFAULT_FLIP_PLACE) -> CycNum:
    """
    E_a(u): archimedean constant times the local Whittaker coefficients.

    Places outside relevant_primes contribute 1.

    Raises:
        MissingLocalDatum: If a relevant prime has no local model
    """
    a, u = Fraction(a), Fraction(u)
    if not a:
        raise ValueError("a = 0 is the constant term; it is not assembled")
    _check_flip(lat, flip_place)
    chi_point = chi_point or {}
    models = _resolve_models(lat, spaces, relevant_primes(lat, a, u, flip_place))
    value = CycNum(archimedean_fold(a, u, -1 if flip_place == INF else 1))
    for p, model in models.items():
        if value.is_zero():
            break
        value = value * _local_factor(lat, p, model, a, u, chi_point.get(p, 1), flip_place)
    return value


def _u_contribution(lat: ThetaLattice, spaces, a: Fraction, u: Fraction, chi_point,
                    flip_place) -> CycNum:
    terms = []
    k = 0
    while u * k < a:
        r = theta_rep_number(lat, u * k, u)
        if r:
            terms.append(r * eisenstein_coefficient(lat, spaces, a - u * k, u, chi_point, flip_place))
        k += 1
    return CycNum.sum(terms)


def kernel_coefficient(lat: ThetaLattice, spaces: Mapping[int, LocalModel], a,
                       u_range: Sequence, c_constant=None,
                       chi_point: Optional[Mapping[int, Any]] = None,
                       flip_place: Optional[Place] = config.DEFAULT_FLIP_PLACE,
                       threads: Optional[int] = None) -> Optional[CycNum]:
    """
    The a-th coefficient c_U sum_u sum_{a1 + a2 = a} r_theta(a1, u) E_{a2}(u).

    Args:
        lat: Lattice and weight of the theta part
        spaces: Local models by prime: a LocalDatum, or a recorded local value
            for places without a supported model (the dyadic place of Q(i))
        a: Non-negative rational index
        u_range: Positive scales representing mu^2 \\ F^x within the support
        c_constant: c_U; c_U_constant() by default
        chi_point: X_v = chi_F(varpi_v) by prime; 1 (trivial character) elsewhere
        flip_place: Place where the collection is flipped; None for coherent data
        threads: Worker threads over u_range

    Returns:
        The coefficient, or None for the constant term a = 0

    Raises:
        MissingLocalDatum: If a relevant prime has no local model
    """
    a = Fraction(a)
    if a < 0:
        raise ValueError(f"a must be non-negative, got {a}")
    if not a:
        logger.info("a = 0: constant term flagged, not assembled")
        return None
    c = c_U_constant() if c_constant is None else c_constant
    scales = [Fraction(u) for u in u_range]
    if any(u <= 0 for u in scales):
        raise ValueError(f"u_range must hold positive scales, got {list(u_range)}")
    threads = threads or config.DEFAULT_THREADS
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(
            lambda u: _u_contribution(lat, spaces, a, u, chi_point, flip_place), scales))
    value = CycNum.sum(parts) * c
    logger.debug(f"kernel coefficient a = {a}: {value}")
    return value


@dataclass
class KernelRow:
    """One line of a kernel coefficient table."""

    a: Fraction
    value: Optional[CycNum]
    witness: Optional[Place]

    def to_dict(self) -> Dict[str, Any]:
        return {"a": str(self.a),
                "value": None if self.value is None else self.value.to_json(),
                "display": "constant term" if self.value is None else str(self.value),
                "witness": self.witness}


def kernel_table(lat: ThetaLattice, spaces: Mapping[int, LocalModel], a_values: Iterable,
                 u_range: Sequence, c_constant=None, chi_point=None,
                 flip_place: Optional[Place] = config.DEFAULT_FLIP_PLACE,
                 prime_bound: int = 100, threads: Optional[int] = None) -> List[KernelRow]:
    """Coefficients and, for the first scale, the incoherence witness of every a."""
    rows = []
    for a in a_values:
        a = Fraction(a)
        value = kernel_coefficient(lat, spaces, a, u_range, c_constant, chi_point,
                                   flip_place, threads)
        witness = None
        if a:
            witness = incoherence_witness(lat, a, Fraction(u_range[0]), prime_bound, flip_place)
        rows.append(KernelRow(a, value, witness))
    logger.info(f"Kernel table: {len(rows)} coefficients for Q(sqrt({lat.discriminant}))")
    return rows
