"""
Sweep Specifications

A SweepSpec names the primes, quadratic types, conductors, alpha values and
psi twists a verification run enumerates, and the suites it runs. Specs are
read from TOML scenario files; alpha values are descriptors:

    "1", "-1", "2/3"      rationals
    "zeta3", "zeta12^5"   roots of unity zeta_n^k
    {"n": ..., "coeffs": ...}  CycNum JSON
"""

import json
import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Union

from sympy import isprime

import config
from cyclo.number import CycNum
from local.characters import MulChar, enumerate_characters, quadratic_character
from local.datum import SIDE_F, LocalDatum


logger = logging.getLogger(__name__)

VALID_SUITES = ["zw", "gauss-norm", "rcirc", "qsharp", "toric-factor", "eis-dichotomy",
                "dkernel", "qexp-laws", "kernel-vanishing", "exceptional", "theta"]

_ZETA = re.compile(r"^zeta(\d+)(?:\^(-?\d+))?$")
_CONDUCTOR = re.compile(r"^c(\d+)\.(\d+)$")


class SweepSpecError(Exception):
    """Raised when a sweep specification is malformed."""
    pass


def parse_alpha(descriptor: Union[str, int, Mapping[str, Any]]) -> CycNum:
    """
    CycNum from an alpha descriptor.

    Raises:
        SweepSpecError: If the descriptor is not understood
    """
    if isinstance(descriptor, Mapping):
        try:
            return CycNum.from_json(descriptor)
        except (KeyError, TypeError, ValueError) as e:
            raise SweepSpecError(f"bad CycNum descriptor {descriptor}: {e}")
    text = str(descriptor).strip()
    match = _ZETA.match(text)
    if match:
        return CycNum.zeta(int(match.group(1)), int(match.group(2) or 1))
    try:
        return CycNum(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise SweepSpecError(f"alpha descriptor '{descriptor}' is neither rational nor zetaN^k")


def parse_character(text: str, datum: LocalDatum, side: Optional[str] = None) -> MulChar:
    """
    MulChar from a character descriptor on the given side (the w side by default).

    Descriptors:
        "1"                 the trivial character
        "unr:<alpha>"       unramified with the given value at the uniformizer
        "quad"              the Legendre character (F side, p odd)
        "c<k>.<i>"          the i-th character of exact conductor k
        JSON object         a MulChar descriptor

    "quad" and "c<k>.<i>" take an optional "@<alpha>" for the value at the
    uniformizer, e.g. "c1.0@zeta3".

    Raises:
        SweepSpecError: If the descriptor is not understood
    """
    side = side or datum.w_side()
    text = text.strip()
    if text.startswith("{"):
        try:
            return MulChar.from_dict(json.loads(text))
        except (KeyError, TypeError, ValueError) as e:
            raise SweepSpecError(f"bad character descriptor {text}: {e}")
    if text.startswith("unr:"):
        return MulChar.unramified(datum, parse_alpha(text[4:]), side)
    base, _, at = text.partition("@")
    at_value = parse_alpha(at) if at else CycNum(1)
    if base in ("1", "trivial"):
        return MulChar.unramified(datum, at_value, side)
    if base == "quad":
        if side != SIDE_F or datum.p == 2:
            raise SweepSpecError("'quad' is the Legendre character on Q_p^x for odd p")
        chi = quadratic_character(datum)
        return chi * MulChar.unramified(datum, at_value) if at else chi
    match = _CONDUCTOR.match(base)
    if not match:
        raise SweepSpecError(f"character descriptor '{text}' not understood")
    conductor, index = int(match.group(1)), int(match.group(2))
    found = enumerate_characters(datum, side, conductor, at_uniformizer=at_value)
    if index >= len(found):
        raise SweepSpecError(f"{datum} has {len(found)} characters of conductor {conductor} "
                             f"on side {side}; index {index} is out of range")
    return found[index]


@dataclass
class SweepSpec:
    """
    What a verification run enumerates.

    Attributes:
        primes: Primes p of the local places
        quad_types: Types of E_v swept at every prime ("split", "inert")
        ramified_primes: Odd primes also swept with a ramified E_v
        conductor_max: Largest character conductor
        alpha_values: Descriptors of alpha(varpi)
        psi_twists: Units s of the level-0 characters psi_s
        suites: Suites to run, a subset of VALID_SUITES
        budget: Coset budget of a single oracle integral
        random_cases: Randomized cases of the qexp-laws suite
        kernel_bound: Largest a of the kernel-vanishing suite
        theta_bound: Largest a of the theta suite
    """

    primes: List[int] = field(default_factory=list)
    quad_types: List[str] = field(default_factory=lambda: ["split", "inert"])
    ramified_primes: List[int] = field(default_factory=list)
    conductor_max: int = 1
    alpha_values: List[Any] = field(default_factory=lambda: ["1", "-1", "zeta3", "zeta4"])
    psi_twists: List[int] = field(default_factory=lambda: [1, 2])
    suites: List[str] = field(default_factory=lambda: ["zw"])
    budget: int = config.DEFAULT_CASE_BUDGET
    random_cases: int = 200
    kernel_bound: int = 50
    theta_bound: int = 200

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Check every field.

        Raises:
            SweepSpecError: On the first problem found
        """
        unknown = [s for s in self.suites if s not in VALID_SUITES]
        if unknown:
            raise SweepSpecError(f"unknown suite(s) {unknown}; valid suites are {VALID_SUITES}")
        for p in list(self.primes) + list(self.ramified_primes):
            if not isinstance(p, int) or not isprime(p):
                raise SweepSpecError(f"primes must be prime integers, got {p}")
        if any(p == 2 for p in self.ramified_primes):
            raise SweepSpecError("ramified places are swept at odd primes only")
        for kind in self.quad_types:
            if kind not in (LocalDatum.SPLIT, LocalDatum.INERT):
                raise SweepSpecError(f"quad_types holds split/inert, got {kind}")
        if not isinstance(self.conductor_max, int) or self.conductor_max < 0:
            raise SweepSpecError(f"conductor_max must be a non-negative integer, "
                                 f"got {self.conductor_max}")
        for descriptor in self.alpha_values:
            if parse_alpha(descriptor).is_zero():
                raise SweepSpecError("alpha values must be nonzero")
        for s in self.psi_twists:
            if not isinstance(s, int) or s == 0:
                raise SweepSpecError(f"psi twists are nonzero integers, got {s}")
        for name in ("budget", "random_cases", "kernel_bound", "theta_bound"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise SweepSpecError(f"{name} must be a non-negative integer, got {value}")

    def alphas(self) -> List[CycNum]:
        return [parse_alpha(d) for d in self.alpha_values]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SweepSpec":
        """
        Build a spec from a mapping, the [sweep] table of a scenario file.

        Raises:
            SweepSpecError: On unknown keys or invalid values
        """
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise SweepSpecError(f"unknown sweep key(s) {sorted(extra)}")
        try:
            return cls(**dict(data))
        except TypeError as e:
            raise SweepSpecError(str(e))


def load_sweep(path: str) -> SweepSpec:
    """
    Read a SweepSpec from a TOML file with a [sweep] table (or top-level keys).

    Raises:
        SweepSpecError: If the file cannot be parsed or the spec is invalid
    """
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise SweepSpecError(f"cannot read sweep file {path}: {e}")
    spec = SweepSpec.from_dict(data.get("sweep", data))
    logger.info(f"Loaded sweep from {path}: suites {spec.suites}, primes {spec.primes}")
    return spec
