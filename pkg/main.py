"""
p-adic Local Gross-Zagier Toolkit - Main Entry Point

Command-line front end for the exact local computations and the verification
runner. Every subcommand prints a JSON document; --report also writes it to a
file. The verify subcommand runs a sweep file and exits 0 when every case
passes, 1 on a mismatch; usage errors exit 2.

Examples:
    python main.py zw --p 5 --type split --chi quad --alpha zeta3
    python main.py rcirc --p 3 --chi unr:-1 --chi unr:-1
    python main.py kernel data/kernel_gauss.toml
    python main.py qexp data/expansion.json --pipeline data/pipeline.json
    python main.py --threads 8 verify data/sweep.toml --report output/report.json
"""

import argparse
import json
import logging
import math
import sys
import time
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List

import config
from cyclo.number import CycNum
from eiskernel.kernel import BoundTooSmall, MissingLocalDatum, kernel_table
from eiskernel.theta import ThetaLattice, theta_series_coefficients
from eiskernel.whittaker import (NotRepresented, QuadSpaceLocal, derivative_kernel_k_natural,
                                 whittaker_poly)
from integrate.oracle import BudgetExceeded
from local.cosets import AddChar
from local.datum import LocalDatum
from local.characters import MulChar
from qexp.expansion import ReducedQExpansion, qexp_norm
from qexp.operators import apply_pipeline, is_v_critical, load_pipeline
from toric.period import (level_threshold, r_circ_bruteforce, toric_at_p_report,
                          toric_double_integral, verify_Q_sharp_identity)
from verification.runner import UnknownCase, coset_budget, explain, run_suite
from verification.sweep import SweepSpecError, load_sweep, parse_alpha, parse_character
from zeta.basic_integral import (ZwInput, gauss_sum, is_exceptional, normalized_gauss_sum,
                                 zw_annulus_breakdown, zw_bruteforce, zw_closed)
from zeta.interpolation import R_circ_product, interpolation_factor_Zv, satake_from_characters


EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2


def setup_logging(log_level=None, log_file=None):
    """
    Configure the logging system with a console handler and an optional file handler.

    Args:
        log_level: Override log level from config
        log_file: Override log file path from config
    """
    level = log_level or config.LOG_LEVEL
    file_path = log_file or config.LOG_FILE

    formatter = logging.Formatter(config.LOG_FORMAT, datefmt=config.LOG_DATE_FORMAT)

    logger = logging.getLogger()
    logger.setLevel(level)
    logger.handlers = []

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if file_path:
        try:
            file_handler = logging.FileHandler(file_path, mode='a', encoding='utf-8')
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except Exception as e:
            logger.warning(f"Failed to create log file handler: {e}")


# ============================================================================
# ARGUMENTS
# ============================================================================

def _add_place(parser, default_type="split"):
    parser.add_argument('--p', type=int, required=True, help='Residue characteristic')
    parser.add_argument('--type', default=default_type, choices=list(LocalDatum.QUAD_TYPES),
                        help=f'Type of E_v (default {default_type})')
    parser.add_argument('--ram-unit', type=int, default=1,
                        help='Unit u0 with E = Q_p(sqrt(p u0)) for ramified places')


def _add_tuple(parser, chi_help):
    parser.add_argument('--chi', action='append', default=None, help=chi_help)
    parser.add_argument('--alpha', default="1", help='alpha(varpi): rational or zetaN^k')
    parser.add_argument('--psi', type=int, default=1, help='Twist s of psi_s (a unit)')


def parse_arguments(argv=None):
    """
    Parse command line arguments.

    Returns:
        argparse.Namespace: Parsed arguments
    """
    parser = argparse.ArgumentParser(
        description='Exact local computations for p-adic Gross-Zagier formulas',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Examples:" + __doc__.split("Examples:")[1]
    )
    parser.add_argument('--report', type=str, help='Write the JSON output to this file')
    parser.add_argument('--threads', type=int, help='Worker threads (overrides config)')
    parser.add_argument('--budget', type=int,
                        help='Coset budget of a single oracle integral (overrides config)')
    parser.add_argument('--log-level', type=str,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        help='Logging level (overrides config)')
    parser.add_argument('--log-file', type=str, help='Log file (overrides config)')

    sub = parser.add_subparsers(dest='command', required=True)
    chi_help = ("Character descriptor: 1, unr:<alpha>, quad[@<alpha>], c<k>.<i>[@<alpha>] "
                "or a JSON MulChar; repeat for the second component of a split place")

    p = sub.add_parser('zw', help='Closed form of the basic local integral Z_w')
    _add_place(p)
    _add_tuple(p, chi_help)
    p.add_argument('--measure', choices=config.VALID_E_MEASURES, default=None)
    p.add_argument('--place-w', type=int, default=0, choices=[0, 1])

    p = sub.add_parser('oracle', help='Z_w by coset enumeration, annulus by annulus')
    _add_place(p)
    _add_tuple(p, chi_help)
    p.add_argument('--measure', choices=config.VALID_E_MEASURES, default=None)
    p.add_argument('--place-w', type=int, default=0, choices=[0, 1])

    p = sub.add_parser('gauss', help='Gauss sum and normalized Gauss sum')
    _add_place(p)
    p.add_argument('--chi', action='append', default=None, help=chi_help)
    p.add_argument('--psi', type=int, default=1, help='Twist s of psi_s')

    p = sub.add_parser('interp', help='Interpolation factor Z_v')
    _add_place(p)
    _add_tuple(p, chi_help)
    p.add_argument('--sigma', nargs=2, default=["1", "1"], metavar=('A', 'B'),
                   help='Values at varpi of the characters inducing sigma_v')
    p.add_argument('--measure', choices=config.VALID_E_MEASURES, default=None)

    p = sub.add_parser('rcirc', help='R_r by enumeration, R_circ_product and the Q_sharp identity')
    _add_place(p)
    _add_tuple(p, chi_help)
    p.add_argument('--r', type=int, help='Level (default: the stabilization threshold)')

    p = sub.add_parser('toric', help='Toric double integral and the residual against Z_v')
    _add_place(p)
    _add_tuple(p, chi_help)
    p.add_argument('--r', type=int, help='Level (default: the stabilization threshold)')
    p.add_argument('--sigma', nargs=2, metavar=('A', 'B'),
                   help='Values at varpi of the characters inducing sigma_v (adds the residual)')

    p = sub.add_parser('eis', help='Local Whittaker coefficient of the Eisenstein series')
    _add_place(p)
    p.add_argument('--a', type=str, required=True, help='Nonzero rational index a')
    p.add_argument('--u', type=str, default="1", help='Similitude scalar u')

    p = sub.add_parser('dkernel', help='Derivative kernel k-natural at a good inert place')
    p.add_argument('--p', type=int, required=True)
    p.add_argument('--m', type=int, required=True, help='v(q(x2))')
    p.add_argument('--u', type=str, default="1")

    p = sub.add_parser('theta', help='Theta representation numbers')
    p.add_argument('--discriminant', type=int, required=True)
    p.add_argument('--bound', type=int, default=50)
    p.add_argument('--u', type=str, default="1")

    p = sub.add_parser('kernel', help='Kernel coefficient table from a TOML scenario')
    p.add_argument('scenario', type=str)

    p = sub.add_parser('qexp', help='Apply an operator pipeline to a q-expansion')
    p.add_argument('expansion', type=str, help='JSON file of a ReducedQExpansion')
    p.add_argument('--pipeline', type=str, help='JSON file of operations')

    p = sub.add_parser('verify', help='Run a verification sweep')
    p.add_argument('sweep', type=str, help='TOML sweep file')
    p.add_argument('--report', default=argparse.SUPPRESS, help='Write the JSON report to this file')
    p.add_argument('--explain', type=str, metavar='CASE_ID',
                   help='Print the equation chain of one case instead of running the sweep')

    return parser.parse_args(argv)


def build_config_dict(cmd_overrides):
    """
    Build configuration dictionary from config module and command line overrides.

    Args:
        cmd_overrides: Dictionary containing command line parameter overrides

    Returns:
        dict: Complete configuration dictionary
    """
    config_dict = config.get_config()

    if 'threads' in cmd_overrides:
        config_dict['threads'] = cmd_overrides['threads']

    if 'budget' in cmd_overrides:
        config_dict['case_budget'] = cmd_overrides['budget']

    if 'log_level' in cmd_overrides:
        config_dict['log_level'] = cmd_overrides['log_level']

    if 'log_file' in cmd_overrides:
        config_dict['log_file'] = cmd_overrides['log_file']

    return config_dict


def validate_config(config_dict):
    """
    Validate the run configuration.

    Args:
        config_dict: Configuration dictionary

    Returns:
        bool: True if valid, False otherwise
    """
    logger = logging.getLogger(__name__)

    if config_dict['threads'] <= 0:
        logger.error(f"Threads must be positive, got {config_dict['threads']}")
        return False

    if config_dict['case_budget'] < 0:
        logger.error(f"Budget must be non-negative, got {config_dict['case_budget']}")
        return False

    if not config.validate_config():
        logger.error("Configuration validation failed")
        return False

    return True


def print_welcome():
    """Print welcome banner."""
    print("=" * 60)
    print(f"    {config.ARTIFACT_NAME} {config.ARTIFACT_VERSION}")
    print("=" * 60)
    print()


# ============================================================================
# INPUT HELPERS
# ============================================================================

def _datum(args) -> LocalDatum:
    return LocalDatum(args.p, args.type, args.ram_unit)


def _chis(args, datum: LocalDatum, count: int = None) -> List[MulChar]:
    texts = args.chi or ["1"]
    chis = [parse_character(text, datum) for text in texts]
    if count is not None and len(chis) != count:
        raise ValueError(f"{datum} needs {count} character(s), got {len(chis)}")
    return chis


def _pair(args, datum: LocalDatum) -> List[MulChar]:
    """chi'_w for every w | v: two F-side characters when split."""
    count = 2 if datum.quad_type == LocalDatum.SPLIT else 1
    return _chis(args, datum, count)


def _alpha(args, datum: LocalDatum) -> MulChar:
    return MulChar.unramified(datum, parse_alpha(args.alpha))


def _zw_input(args) -> ZwInput:
    d = _datum(args)
    kwargs = {"e_measure": args.measure} if args.measure else {}
    return ZwInput(d, _alpha(args, d), _chis(args, d, 1)[0], AddChar(d.p, args.psi),
                   args.place_w, **kwargs)


def _omega(chi_pair: List[MulChar]) -> MulChar:
    return (chi_pair[0] * chi_pair[1]).inverse()


def _show(value: CycNum) -> Dict[str, Any]:
    return {"value": value.to_json(), "display": str(value)}


def load_kernel_scenario(path: str) -> Dict[str, Any]:
    """
    Read a kernel scenario: a [kernel] table with discriminant, a_min, a_max,
    u_range, flip_place (a prime, "inf" or "none"), prime_bound and the optional
    tables chi_point and spaces keyed by prime.

    Raises:
        ValueError: If the file is malformed
    """
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ValueError(f"cannot read scenario {path}: {e}")
    table = data.get("kernel", data)
    if "discriminant" not in table:
        raise ValueError(f"scenario {path} has no discriminant")
    flip = table.get("flip_place", config.DEFAULT_FLIP_PLACE)
    if flip == "none":
        flip = None
    elif flip != "inf" and not isinstance(flip, int):
        raise ValueError(f"flip_place must be a prime, 'inf' or 'none', got {flip}")
    return {
        "lattice": ThetaLattice(int(table["discriminant"])),
        "a_values": list(range(int(table.get("a_min", 1)), int(table.get("a_max", 10)) + 1)),
        "u_range": [Fraction(str(u)) for u in table.get("u_range", [1])],
        "flip_place": flip,
        "prime_bound": int(table.get("prime_bound", 100)),
        "chi_point": {int(k): parse_alpha(v) for k, v in table.get("chi_point", {}).items()},
        "spaces": {int(k): parse_alpha(v) for k, v in table.get("spaces", {}).items()},
    }


# ============================================================================
# SUBCOMMANDS
# ============================================================================

def cmd_zw(args) -> Dict[str, Any]:
    zin = _zw_input(args)
    closed = zw_closed(zin)
    return {"input": zin.to_dict(), "Z_w": _show(closed), "exceptional": is_exceptional(zin)}


def cmd_oracle(args) -> Dict[str, Any]:
    zin = _zw_input(args)
    oracle = zw_bruteforce(zin)
    closed = zw_closed(zin)
    return {"input": zin.to_dict(),
            "annuli": {str(n): _show(v) for n, v in zw_annulus_breakdown(zin).items()},
            "oracle": _show(oracle), "closed": _show(closed), "match": oracle == closed}


def cmd_gauss(args) -> Dict[str, Any]:
    d = _datum(args)
    chi = _chis(args, d, 1)[0]
    psi = AddChar(d.p, args.psi)
    return {"chi": chi.to_dict(), "psi": psi.to_dict(), "tau": _show(gauss_sum(chi, psi)),
            "normalized": _show(normalized_gauss_sum(chi, psi))}


def cmd_interp(args) -> Dict[str, Any]:
    d = _datum(args)
    satake = satake_from_characters(parse_alpha(args.sigma[0]), parse_alpha(args.sigma[1]), d.p)
    factor = interpolation_factor_Zv(d, _alpha(args, d), _pair(args, d), AddChar(d.p, args.psi),
                                     satake, e_measure=args.measure)
    return {"datum": d.to_dict(), "satake": [s.to_json() for s in satake],
            "Z_v": factor.to_dict()}


def cmd_rcirc(args) -> Dict[str, Any]:
    d = _datum(args)
    alpha, chi_pair, psi = _alpha(args, d), _pair(args, d), AddChar(d.p, args.psi)
    omega = _omega(chi_pair)
    r = args.r if args.r is not None else level_threshold(alpha, omega, chi_pair)
    brute = r_circ_bruteforce(alpha, chi_pair, psi, r)
    product = R_circ_product(d, alpha, chi_pair, psi)
    identity = verify_Q_sharp_identity(alpha, omega, chi_pair, psi, r, threads=config.DEFAULT_THREADS)
    return {"r": r, "R_r": _show(brute), "R_circ_product": _show(product),
            "match": brute == product, "Q_sharp": identity.to_dict()}


def cmd_toric(args) -> Dict[str, Any]:
    d = _datum(args)
    alpha, chi_pair, psi = _alpha(args, d), _pair(args, d), AddChar(d.p, args.psi)
    omega = _omega(chi_pair)
    r = args.r if args.r is not None else level_threshold(alpha, omega, chi_pair)
    result = {"toric": toric_double_integral(alpha, omega, chi_pair, psi, r).to_dict()}
    if args.sigma:
        satake = satake_from_characters(parse_alpha(args.sigma[0]), parse_alpha(args.sigma[1]),
                                        d.p)
        result["at_p"] = toric_at_p_report(alpha, omega, chi_pair, psi, satake, r).to_dict()
    return result


def cmd_eis(args) -> Dict[str, Any]:
    space = QuadSpaceLocal(_datum(args), Fraction(args.u))
    return whittaker_poly(space, Fraction(args.a)).to_dict()


def cmd_dkernel(args) -> Dict[str, Any]:
    d = LocalDatum(args.p, LocalDatum.INERT)
    value = derivative_kernel_k_natural(d, args.m, Fraction(args.u))
    return {"datum": d.to_dict(), "m": args.m, "k_natural": str(value)}


def cmd_theta(args) -> Dict[str, Any]:
    lat = ThetaLattice(args.discriminant)
    return {"lattice": lat.to_dict(), "u": args.u,
            "coefficients": theta_series_coefficients(lat, args.bound, Fraction(args.u))}


def cmd_kernel(args) -> Dict[str, Any]:
    scenario = load_kernel_scenario(args.scenario)
    rows = kernel_table(scenario["lattice"], scenario["spaces"], scenario["a_values"],
                        scenario["u_range"], chi_point=scenario["chi_point"] or None,
                        flip_place=scenario["flip_place"], prime_bound=scenario["prime_bound"],
                        threads=config.DEFAULT_THREADS)
    return {"lattice": scenario["lattice"].to_dict(), "flip_place": scenario["flip_place"],
            "rows": [row.to_dict() for row in rows]}


def cmd_qexp(args) -> Dict[str, Any]:
    with open(args.expansion, "r", encoding="utf-8") as f:
        W = ReducedQExpansion.loads(f.read())
    pipeline = []
    if args.pipeline:
        with open(args.pipeline, "r", encoding="utf-8") as f:
            pipeline = load_pipeline(f.read())
    result = apply_pipeline(W, pipeline)
    norm = qexp_norm(result)
    return {"pipeline": pipeline, "result": result.to_json(),
            "norm": "inf" if norm == math.inf else str(norm),
            "critical": is_v_critical(result, result.p).to_dict()}


COMMANDS = {
    "zw": cmd_zw, "oracle": cmd_oracle, "gauss": cmd_gauss, "interp": cmd_interp,
    "rcirc": cmd_rcirc, "toric": cmd_toric, "eis": cmd_eis, "dkernel": cmd_dkernel,
    "theta": cmd_theta, "kernel": cmd_kernel, "qexp": cmd_qexp,
}


def _emit(payload: Dict[str, Any], report_path: str = None) -> None:
    text = json.dumps(payload, indent=2)
    print(text)
    if report_path:
        path = Path(report_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        logging.getLogger(__name__).info(f"Output written to {path}")


def cmd_verify(args, threads: int) -> int:
    logger = logging.getLogger(__name__)
    spec = load_sweep(args.sweep)
    if args.explain:
        print(explain(args.explain, spec))
        return EXIT_OK
    print_welcome()
    report = run_suite(spec, threads=threads)
    print(report.format_text())
    if args.report:
        report.write(args.report)
    logger.info(f"Verification {'passed' if report.passed else 'failed'}: "
                f"{len(report.records)} cases, sha256 {report.digest()}")
    return report.exit_code


def main(argv=None):
    """
    Main entry point.

    Returns:
        int: Exit code (0 success, 1 mismatch or failure, 2 usage error)
    """
    real_start_time = time.time()
    args = parse_arguments(argv)

    log_level = getattr(logging, args.log_level) if args.log_level else None
    setup_logging(log_level=log_level, log_file=args.log_file)
    logger = logging.getLogger(__name__)

    cmd_overrides = {}
    if args.threads is not None:
        cmd_overrides['threads'] = args.threads
    if args.budget is not None:
        cmd_overrides['budget'] = args.budget
    if args.log_level:
        cmd_overrides['log_level'] = args.log_level
    if args.log_file:
        cmd_overrides['log_file'] = args.log_file

    config_dict = build_config_dict(cmd_overrides)
    if cmd_overrides:
        logger.debug("Applied configuration overrides:")
        for key, value in cmd_overrides.items():
            logger.debug(f"  {key} = {value}")
    if not validate_config(config_dict):
        return EXIT_USAGE

    try:
        with coset_budget(config_dict['case_budget'] if 'budget' in cmd_overrides else 0):
            if args.command == "verify":
                code = cmd_verify(args, config_dict['threads'])
            else:
                _emit(COMMANDS[args.command](args), args.report)
                code = EXIT_OK
        logger.debug(f"{args.command} finished in {time.time() - real_start_time:.2f} seconds")
        return code

    except (SweepSpecError, UnknownCase, ValueError, json.JSONDecodeError) as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE

    except (MissingLocalDatum, BoundTooSmall, NotRepresented) as e:
        logger.error(f"Input outside the supported range: {e}")
        return EXIT_USAGE

    except BudgetExceeded as e:
        logger.error(f"Coset budget exceeded: {e}; raise --budget")
        return EXIT_MISMATCH

    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        return EXIT_MISMATCH

    except Exception as e:
        logger.exception(f"Fatal error in {args.command}: {e}")
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
