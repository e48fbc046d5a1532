"""
Verification Runner

Expands a SweepSpec into cases, one per input tuple and suite, runs them on a
worker pool and collects a Report. Every case compares a computed side with an
expected side in exact arithmetic.

Case ids are stable strings such as "zw/p3-inert/chi=c1.0/alpha=zeta3/psi=2";
explain(case_id, spec) rebuilds the case and prints its intermediate values.
"""

import json
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

from sympy import primerange

import config
from cyclo.number import CycNum
from eiskernel.kernel import incoherence_witness, kernel_coefficient
from eiskernel.theta import ThetaLattice, theta_rep_number, theta_series_coefficients
from eiskernel.whittaker import (NotRepresented, QuadSpaceLocal, derivative_kernel_k_natural,
                                 fit_vol_E1, whittaker_poly)
from integrate.oracle import BudgetExceeded
from local.characters import MulChar, enumerate_characters
from local.cosets import AddChar
from local.datum import LocalDatum
from local.euler import ETA, ZETA_F, euler_L
from qexp.expansion import ReducedQExpansion
from qexp.operators import U_v_star, hecke_T, is_v_critical, ordinary_projector
from toric.period import (iwahori_terms_Q_sharp, level_threshold, r_circ_bruteforce,
                          toric_double_integral, toric_factor, verify_Q_sharp_identity)
from verification.report import BUDGET, ERROR, FAIL, PASS, CaseRecord, Report, to_jsonable
from verification.sweep import SweepSpec
from zeta.basic_integral import (ZwInput, chi_tilde, gauss_sum, is_exceptional, literal_display,
                                 measure_constant, normalized_gauss_sum, zw_annulus_breakdown,
                                 zw_bruteforce, zw_closed)
from zeta.interpolation import R_circ_product


logger = logging.getLogger(__name__)

# Dyadic local value of the Q(i) kernel, which has no local model at 2
GAUSS_DYADIC = {2: Fraction(1)}

THETA_DISCRIMINANTS = (-3, -4, -7, -8)

QEXP_LAWS = ("commute", "idempotent", "critical-kill", "comb-fixed")


class UnknownCase(Exception):
    """Raised when a case id is not produced by the given sweep."""
    pass


@dataclass
class CheckOutcome:
    """Both sides of one case and whether they agree."""

    passed: bool
    lhs: Any = None
    rhs: Any = None
    note: str = ""


@dataclass
class Case:
    """
    A single verification case.

    Attributes:
        case_id (str): Stable key
        suite (str): Suite name
        inputs (Dict[str, Any]): Labels of the inputs
        check (Callable[[], CheckOutcome]): Computes both sides
        explain (Optional[Callable[[], List[str]]]): Lines of the equation chain
    """
    case_id: str
    suite: str
    inputs: Dict[str, Any]
    check: Callable[[], CheckOutcome]
    explain: Optional[Callable[[], List[str]]] = None


def _compare(lhs, rhs, note: str = "") -> CheckOutcome:
    if isinstance(lhs, (list, tuple)):
        passed = len(lhs) == len(rhs) and all(a == b for a, b in zip(lhs, rhs))
    else:
        passed = lhs == rhs
    return CheckOutcome(passed, lhs, rhs, note)


@contextmanager
def coset_budget(budget: int) -> Iterator[None]:
    """Temporarily cap the cosets of a single oracle integral (0 keeps the config value)."""
    saved = config.MAX_COSETS_PER_INTEGRAL
    if budget:
        config.MAX_COSETS_PER_INTEGRAL = budget
    try:
        yield
    finally:
        config.MAX_COSETS_PER_INTEGRAL = saved


# ============================================================================
# INPUT ENUMERATION
# ============================================================================

def _datum_label(d: LocalDatum) -> str:
    return f"p{d.p}-{d.quad_type}"


def _alpha_label(descriptor) -> str:
    if isinstance(descriptor, dict):
        return json.dumps(descriptor, sort_keys=True, separators=(",", ":"))
    return str(descriptor)


def _datums(spec: SweepSpec) -> List[LocalDatum]:
    datums = [LocalDatum(p, kind) for p in spec.primes for kind in spec.quad_types]
    datums += [LocalDatum(p, LocalDatum.RAMIFIED) for p in spec.ramified_primes]
    return datums


def _characters(d: LocalDatum, conductor_max: int) -> List[Tuple[str, MulChar]]:
    """Trivial, unramified -1, and the first characters of each conductor (chi(varpi) = zeta_3)."""
    side = d.w_side()
    chars = [("1", MulChar.trivial(d, side)), ("unr(-1)", MulChar.unramified(d, -1, side))]
    for c in range(1, conductor_max + 1):
        found = enumerate_characters(d, side, c, at_uniformizer=CycNum.zeta(3))
        for i, chi in enumerate(found[:config.SWEEP_CHARS_PER_CONDUCTOR]):
            chars.append((f"c{c}.{i}", chi))
    return chars


def _alphas(spec: SweepSpec, d: LocalDatum) -> List[Tuple[str, CycNum]]:
    """Alpha values that are p-adic units at d.p."""
    kept = []
    for descriptor, value in zip(spec.alpha_values, spec.alphas()):
        if value.p_valuation(d.p) != 0:
            logger.debug(f"alpha {descriptor} is not a unit at {d.p}; skipped")
            continue
        kept.append((_alpha_label(descriptor), value))
    return kept


def _twists(spec: SweepSpec, d: LocalDatum) -> List[int]:
    return [s for s in spec.psi_twists if s % d.p]


def _split_tuples(spec: SweepSpec, d: LocalDatum, chars: List[Tuple[str, MulChar]]):
    """(labels, alpha, omega, chi_pair, psi) over unordered pairs of characters."""
    for i, (label1, chi1) in enumerate(chars):
        for label2, chi2 in chars[i:]:
            omega = (chi1 * chi2).inverse()
            for alpha_label, value in _alphas(spec, d):
                alpha = MulChar.unramified(d, value)
                for s in _twists(spec, d):
                    labels = {"datum": str(d), "chi": [label1, label2], "alpha": alpha_label,
                              "psi": s}
                    key = f"{_datum_label(d)}/chi={label1},{label2}/alpha={alpha_label}/psi={s}"
                    yield key, labels, alpha, omega, [chi1, chi2], AddChar(d.p, s)


# ============================================================================
# SUITES
# ============================================================================

def _zw_explain(zin: ZwInput) -> Callable[[], List[str]]:
    def lines() -> List[str]:
        out = [f"Z_w on {zin.datum}, chi' conductor {zin.conductor}, "
               f"alpha(varpi) = {zin.alpha.at_uniformizer}, psi twist {zin.psi.twist}"]
        if zin.conductor == 0:
            out.append("unramified branch: measure_constant * (alpha chi'(varpi_w))^(-v(D)) "
                       "(1 - b^-1) / (1 - b q_w^-1)")
            out.append(f"  b = {zin.b}, q_w = {zin.q}")
            out.append(f"  measure_constant = {measure_constant(zin.datum, zin.e_measure)}")
            out.append(f"  literal display = {literal_display(zin)}")
            tail = f"annuli beyond -delta: geometric with ratio b/q_w = {zin.b / zin.q}"
        else:
            out.append("ramified branch: vol(O_E) * tau(chi' alpha o q, psi_E) "
                       "on w(t) = -c - delta")
            out.append(f"  tau = {gauss_sum(chi_tilde(zin), zin.psi)}")
            tail = "annuli beyond -delta: zero (ramified unit sums vanish)"
        out.append(f"  closed form = {zw_closed(zin)}")
        out.append("oracle annuli:")
        for n, value in zw_annulus_breakdown(zin).items():
            out.append(f"  w(t) = {n}: {value}")
        out.append(f"  {tail}")
        out.append(f"  oracle total = {zw_bruteforce(zin)}")
        return out
    return lines


def _zw_inputs(spec: SweepSpec, d: LocalDatum, chars):
    for label, chi in chars:
        for alpha_label, value in _alphas(spec, d):
            alpha = MulChar.unramified(d, value)
            for s in _twists(spec, d):
                labels = {"datum": str(d), "chi": label, "alpha": alpha_label, "psi": s}
                key = f"{_datum_label(d)}/chi={label}/alpha={alpha_label}/psi={s}"
                yield key, labels, ZwInput(d, alpha, chi, AddChar(d.p, s))


def _zw_cases(spec: SweepSpec, d: LocalDatum, chars) -> List[Case]:
    cases = []
    for key, labels, zin in _zw_inputs(spec, d, chars):
        cases.append(Case(f"zw/{key}", "zw", labels,
                          lambda zin=zin: _compare(zw_closed(zin), zw_bruteforce(zin)),
                          _zw_explain(zin)))
    return cases


def _exceptional_cases(spec: SweepSpec, d: LocalDatum, chars) -> List[Case]:
    def single(zin: ZwInput) -> CheckOutcome:
        flag = is_exceptional(zin)
        closed, oracle = zw_closed(zin), zw_bruteforce(zin)
        passed = flag == closed.is_zero() == oracle.is_zero()
        return CheckOutcome(passed, closed, oracle, f"exceptional={flag}")

    def pair(alpha, chi_pair, psi) -> CheckOutcome:
        flag = any(is_exceptional(ZwInput(d, alpha, chi, psi)) for chi in chi_pair)
        product = R_circ_product(d, alpha, chi_pair, psi)
        return CheckOutcome(flag == product.is_zero(), product, None, f"exceptional={flag}")

    cases = [Case(f"exceptional/{key}", "exceptional", labels,
                  lambda zin=zin: single(zin), _zw_explain(zin))
             for key, labels, zin in _zw_inputs(spec, d, chars)]
    if d.quad_type == LocalDatum.SPLIT:
        for key, labels, alpha, omega, chi_pair, psi in _split_tuples(spec, d, chars):
            cases.append(Case(f"exceptional/{key}/R", "exceptional", labels,
                              lambda a=alpha, c=chi_pair, s=psi: pair(a, c, s)))
    return cases


def _gauss_cases(spec: SweepSpec, d: LocalDatum, chars) -> List[Case]:
    def check(chi: MulChar, psi: AddChar) -> CheckOutcome:
        q_c = Fraction(d.residue_size(chi.side)) ** chi.conductor
        n = normalized_gauss_sum(chi, psi)
        tau = gauss_sum(chi, psi)
        lhs = [n * n.conj(), tau * gauss_sum(chi.inverse(), psi)]
        return _compare(lhs, [1 / q_c, chi.minus_one() * q_c])

    cases = []
    if d.quad_type == LocalDatum.RAMIFIED:
        return cases
    for label, chi in chars:
        if chi.conductor == 0:
            continue
        for s in _twists(spec, d):
            key = f"{_datum_label(d)}/chi={label}/psi={s}"
            cases.append(Case(f"gauss-norm/{key}", "gauss-norm",
                              {"datum": str(d), "chi": label, "psi": s},
                              lambda chi=chi, psi=AddChar(d.p, s): check(chi, psi)))
    return cases


def _rcirc_cases(spec: SweepSpec, d: LocalDatum, chars) -> List[Case]:
    def check(alpha, omega, chi_pair, psi) -> CheckOutcome:
        r0 = level_threshold(alpha, omega, chi_pair)
        product = R_circ_product(d, alpha, chi_pair, psi)
        toric = toric_double_integral(alpha, omega, chi_pair, psi, r0).value
        lhs = [r_circ_bruteforce(alpha, chi_pair, psi, r0),
               r_circ_bruteforce(alpha, chi_pair, psi, r0 + 1), toric]
        rhs = [product, product, euler_L(d, ZETA_F, 1) * chi_pair[0].minus_one() * product]
        return _compare(lhs, rhs, f"r0={r0}")

    return [Case(f"rcirc/{key}", "rcirc", labels,
                 lambda a=alpha, o=omega, c=chi_pair, s=psi: check(a, o, c, s))
            for key, labels, alpha, omega, chi_pair, psi in _split_tuples(spec, d, chars)]


def _qsharp_explain(alpha, omega, chi_pair, psi) -> Callable[[], List[str]]:
    def lines() -> List[str]:
        d = alpha.datum
        r = level_threshold(alpha, omega, chi_pair)
        terms = iwahori_terms_Q_sharp(alpha, omega, chi_pair, psi, r, threads=1)
        l_eta = euler_L(d, ETA, 1)
        out = [f"Q_sharp on {d} at level r = {r}",
               f"  Q(0,1) = {terms.r_circ}",
               f"  R_r by annuli = {r_circ_bruteforce(alpha, chi_pair, psi, r)}"]
        for (i, c), value in terms.terms:
            out.append(f"  Q({i},{c}) = {value}")
        for i, value in terms.level_sums().items():
            out.append(f"  sum_c Q({i},c) = {value}")
        out.append(f"  Q_sharp = {terms.total}")
        out.append(f"  L(1,eta) = {l_eta}; L(1,eta)^-1 R_r = {terms.r_circ / l_eta}")
        out.append(f"  R_circ_product = {R_circ_product(d, alpha, chi_pair, psi)}")
        return out
    return lines


def _qsharp_cases(spec: SweepSpec, d: LocalDatum, chars) -> List[Case]:
    def check(alpha, omega, chi_pair, psi) -> CheckOutcome:
        r = level_threshold(alpha, omega, chi_pair)
        report = verify_Q_sharp_identity(alpha, omega, chi_pair, psi, r, threads=1)
        note = "; ".join(m["identity"] for m in report.mismatches)
        return CheckOutcome(report.passed, report.terms.total,
                            report.terms.r_circ / report.l_eta, note or f"r={r}")

    return [Case(f"qsharp/{key}", "qsharp", labels,
                 lambda a=alpha, o=omega, c=chi_pair, s=psi: check(a, o, c, s),
                 _qsharp_explain(alpha, omega, chi_pair, psi))
            for key, labels, alpha, omega, chi_pair, psi in _split_tuples(spec, d, chars)]


def _toric_factor_cases(spec: SweepSpec, d: LocalDatum, chars) -> List[Case]:
    def check(zin: ZwInput) -> CheckOutcome:
        N = max(zin.chi_w.conductor, 1)
        expected = euler_L(d, ZETA_F, 1) * zw_closed(zin)
        lhs = [toric_factor(zin.alpha, zin.chi_w, zin.psi, r) for r in (N, N + 1)]
        return _compare(lhs, [expected, expected])

    return [Case(f"toric-factor/{key}", "toric-factor", labels, lambda zin=zin: check(zin))
            for key, labels, zin in _zw_inputs(spec, d, chars)]


def _eis_cases(spec: SweepSpec, d: LocalDatum) -> List[Case]:
    def expected(m: int) -> int:
        if m < 0:
            return 0
        if d.quad_type == LocalDatum.SPLIT:
            return m + 1
        return 1 if m % 2 == 0 else 0

    cases = []
    for m in range(-2, 5):
        a = Fraction(d.p) ** m * 2
        cases.append(Case(f"eis-dichotomy/{_datum_label(d)}/m={m:+d}", "eis-dichotomy",
                          {"datum": str(d), "a": str(a)},
                          lambda a=a, m=m: _compare(
                              whittaker_poly(QuadSpaceLocal(d), a).at_one(), expected(m))))
    return cases


def _dkernel_cases(spec: SweepSpec, d: LocalDatum) -> List[Case]:
    def check(m: int) -> CheckOutcome:
        if m % 2:
            return _compare(derivative_kernel_k_natural(d, m), Fraction(m + 1, 2))
        try:
            value = derivative_kernel_k_natural(d, m)
        except NotRepresented:
            return CheckOutcome(True, note="not represented")
        return CheckOutcome(False, value, None, "even valuation should not be represented")

    def volume() -> CheckOutcome:
        fit = fit_vol_E1(d)
        return CheckOutcome(fit.consistent, fit.fitted, fit.documented,
                            f"fitted vol(E^1) = {fit.fitted}, documented {fit.documented}")

    cases = [Case(f"dkernel/{_datum_label(d)}/m={m}", "dkernel", {"datum": str(d), "m": m},
                  lambda m=m: check(m))
             for m in range(0, 5)]
    cases.append(Case(f"dkernel/{_datum_label(d)}/vol-fit", "dkernel", {"datum": str(d)}, volume))
    return cases


# ----------------------------------------------------------------------------
# q-expansion laws
# ----------------------------------------------------------------------------

def _unit_index(rng: random.Random, p: int) -> int:
    return rng.choice([a for a in range(1, 21) if a % p])


def _finite_part(rng: random.Random, p: int) -> ReducedQExpansion:
    coefficients = {}
    for _ in range(5):
        a = Fraction(_unit_index(rng, p), rng.choice([1, 2, 5])) * Fraction(p) ** rng.randint(-1, 3)
        coefficients[a] = Fraction(rng.randint(-9, 9), rng.choice([1, p, 4]))
    return ReducedQExpansion(p, coefficients, {"0": rng.randint(0, 3)})


def _comb(rng: random.Random, p: int) -> ReducedQExpansion:
    ratio = CycNum.zeta(rng.choice([1, 2, 3, 4, 6]))
    value = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2, p]))
    return ReducedQExpansion.geometric_line(p, _unit_index(rng, p), [(value, ratio)])


def _critical(rng: random.Random, p: int) -> ReducedQExpansion:
    a0 = _unit_index(rng, p)
    tail = ReducedQExpansion.geometric_line(p, a0, [(rng.randint(1, 5), Fraction(p) ** rng.randint(1, 2))])
    a1 = _unit_index(rng, p)
    finite = ReducedQExpansion(p, {Fraction(a1 * p ** s): p ** s * rng.randint(1, 5)
                                   for s in range(4)})
    return tail + finite


def _away_prime(p: int) -> int:
    return next(v for v in primerange(2, 30) if v != p)


def _qexp_check(law: str, p: int, seed: str) -> CheckOutcome:
    rng = random.Random(seed)
    if law == "commute":
        W = _finite_part(rng, p) + _comb(rng, p) + _critical(rng, p)
        v = _away_prime(p)
        lhs, rhs = U_v_star(hecke_T(W, v), p), hecke_T(U_v_star(W, p), v)
    elif law == "idempotent":
        W = _finite_part(rng, p) + _comb(rng, p) + _critical(rng, p)
        rhs = ordinary_projector(W, p)
        lhs = ordinary_projector(rhs, p)
    elif law == "critical-kill":
        W = _critical(rng, p)
        if is_v_critical(W, p).c is None:
            return CheckOutcome(False, W.to_json(), None, "input is not critical")
        lhs, rhs = ordinary_projector(W, p), ReducedQExpansion.zero(p)
    else:
        W = _comb(rng, p)
        lhs, rhs = ordinary_projector(W, p), W
    return CheckOutcome(lhs == rhs, lhs.to_json(), rhs.to_json())


def _qexp_cases(spec: SweepSpec) -> List[Case]:
    cases = []
    if not spec.primes:
        return cases
    for k in range(spec.random_cases):
        p = spec.primes[k % len(spec.primes)]
        law = QEXP_LAWS[(k // len(spec.primes)) % len(QEXP_LAWS)]
        seed = f"{config.RANDOM_SEED}:{p}:{k}"
        cases.append(Case(f"qexp-laws/p{p}/{law}/{k:05d}", "qexp-laws",
                          {"p": p, "law": law, "seed": seed},
                          lambda law=law, p=p, seed=seed: _qexp_check(law, p, seed)))
    return cases


# ----------------------------------------------------------------------------
# Kernel and theta
# ----------------------------------------------------------------------------

def _kernel_cases(spec: SweepSpec) -> List[Case]:
    lat = ThetaLattice(-4)

    def check(a: int) -> CheckOutcome:
        witness = incoherence_witness(lat, a, 1, max(a, 3), flip_place=3)
        value = kernel_coefficient(lat, GAUSS_DYADIC, a, [1], flip_place=3, threads=1)
        note = f"witness={witness}"
        return CheckOutcome(isinstance(witness, int) and value == 0, value, 0, note)

    return [Case(f"kernel-vanishing/D=-4/a={a:05d}", "kernel-vanishing",
                 {"discriminant": -4, "a": a, "flip_place": 3}, lambda a=a: check(a))
            for a in range(1, spec.kernel_bound + 1)]


def _theta_cases(spec: SweepSpec) -> List[Case]:
    def check(lat: ThetaLattice) -> CheckOutcome:
        direct = [theta_rep_number(lat, a) for a in range(spec.theta_bound + 1)]
        series = theta_series_coefficients(lat, spec.theta_bound)
        return CheckOutcome(direct == list(series), direct, list(series))

    return [Case(f"theta/D={D}", "theta", {"discriminant": D, "bound": spec.theta_bound},
                 lambda lat=ThetaLattice(D): check(lat))
            for D in THETA_DISCRIMINANTS]


# ============================================================================
# DRIVER
# ============================================================================

_PER_DATUM = {
    "zw": _zw_cases,
    "exceptional": _exceptional_cases,
    "gauss-norm": _gauss_cases,
    "toric-factor": _toric_factor_cases,
}
_PER_SPLIT_DATUM = {"rcirc": _rcirc_cases, "qsharp": _qsharp_cases}


def build_cases(spec: SweepSpec) -> List[Case]:
    """
    Every case of the sweep, sorted by case id.

    Split-only suites (rcirc, qsharp, toric-factor) skip other places;
    eis-dichotomy runs at odd primes and dkernel at odd inert places.
    """
    cases: List[Case] = []
    for d in _datums(spec):
        wanted = [s for s in spec.suites if s in _PER_DATUM or s in _PER_SPLIT_DATUM]
        chars = _characters(d, spec.conductor_max) if wanted else []
        for suite in wanted:
            if suite in _PER_SPLIT_DATUM or suite == "toric-factor":
                if d.quad_type != LocalDatum.SPLIT:
                    continue
            builder = _PER_DATUM.get(suite) or _PER_SPLIT_DATUM[suite]
            cases.extend(builder(spec, d, chars))
        if d.p != 2 and d.quad_type != LocalDatum.RAMIFIED:
            if "eis-dichotomy" in spec.suites:
                cases.extend(_eis_cases(spec, d))
            if "dkernel" in spec.suites and d.quad_type == LocalDatum.INERT:
                cases.extend(_dkernel_cases(spec, d))
    if "qexp-laws" in spec.suites:
        cases.extend(_qexp_cases(spec))
    if "kernel-vanishing" in spec.suites:
        cases.extend(_kernel_cases(spec))
    if "theta" in spec.suites:
        cases.extend(_theta_cases(spec))
    return sorted(cases, key=lambda c: c.case_id)


def _run_case(case: Case) -> CaseRecord:
    start = time.perf_counter()
    lhs = rhs = None
    note = ""
    try:
        outcome = case.check()
        status = PASS if outcome.passed else FAIL
        lhs, rhs, note = to_jsonable(outcome.lhs), to_jsonable(outcome.rhs), outcome.note
        if not outcome.passed:
            logger.warning(f"Mismatch in {case.case_id}: {outcome.note}")
    except BudgetExceeded as e:
        status, note = BUDGET, str(e)
        logger.warning(f"Budget exceeded in {case.case_id}: {e}")
    except Exception as e:
        status, note = ERROR, f"{type(e).__name__}: {e}"
        logger.error(f"Error in {case.case_id}: {note}")
    return CaseRecord(case.case_id, case.suite, case.inputs, status, lhs, rhs, note,
                      time.perf_counter() - start)


def run_suite(spec: SweepSpec, threads: Optional[int] = None) -> Report:
    """
    Run every case of the sweep.

    Args:
        spec: The sweep
        threads: Worker threads (config.DEFAULT_THREADS by default)

    Returns:
        Report with records sorted by case id
    """
    cases = build_cases(spec)
    threads = threads or config.DEFAULT_THREADS
    logger.info(f"Running {len(cases)} cases of suites {spec.suites} on {threads} thread(s)")
    with coset_budget(spec.budget):
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_case, cases))
    report = Report(spec.to_dict(), records)
    counts = report.counts()
    for suite, c in counts.items():
        logger.info(f"  {suite}: {c[PASS]} pass, {c[FAIL]} fail, {c[ERROR]} error, "
                    f"{c[BUDGET]} budget")
    return report


def explain(case_id: str, spec: SweepSpec) -> str:
    """
    The equation chain and intermediate values of one case.

    Raises:
        UnknownCase: If the sweep does not produce case_id
    """
    case = next((c for c in build_cases(spec) if c.case_id == case_id), None)
    if case is None:
        raise UnknownCase(f"No case '{case_id}' in this sweep")
    lines = [f"case {case.case_id} (suite {case.suite})",
             f"inputs: {json.dumps(case.inputs, sort_keys=True)}"]
    if case.explain is not None:
        lines.extend(case.explain())
    record = _run_case(case)
    lines.append(f"status: {record.status}")
    if record.lhs is not None or record.rhs is not None:
        lines.append(f"computed: {json.dumps(record.lhs, sort_keys=True)}")
        lines.append(f"expected: {json.dumps(record.rhs, sort_keys=True)}")
    if record.note:
        lines.append(f"note: {record.note}")
    return "\n".join(lines)
