"""
Configuration module for the p-adic local Gross-Zagier verification toolkit.

This module contains every tunable parameter of the library and the CLI:
arithmetic caps, oracle budgets, measure conventions, kernel toy data,
projector thresholds, runner settings and logging.
All parameters can be modified here without changing the computational code;
the CLI overrides a subset of them per run (see main.build_config_dict).

Config to change: MAX_COSETS_PER_INTEGRAL, DEFAULT_E_MEASURE, DEFAULT_FLIP_PLACE,
PROJECTOR_NORM_EXPONENT, DEFAULT_THREADS, LOG_LEVEL
"""

import os
from typing import Dict, Any


# ============================================================================
# CYCLOTOMIC ARITHMETIC
# ============================================================================

# Hard cap on the order n of Q(zeta_n) reached by lifting two operands
MAX_CYCLOTOMIC_ORDER = 10 ** 6


# ============================================================================
# BRUTE-FORCE ORACLE
# ============================================================================

# Total cosets one integral may enumerate before BudgetExceeded is raised
MAX_COSETS_PER_INTEGRAL = 10 ** 7

# Random cosets refined by verify_local_constancy
CONSTANCY_SAMPLES = 20

# Seed for every sampled check (reports must be reproducible)
RANDOM_SEED = 20240725

# Re-enumerate the annulus after tail_start and compare with c*r
TAIL_SPOT_CHECK = True

# zw_bruteforce also sums one annulus below the first contributing one
# when that annulus has at most this many cosets
ORACLE_EXTRA_ANNULUS_MAX_COSETS = 20000


# ============================================================================
# MEASURE CONVENTIONS
# ============================================================================

# Additive measure on E_w: "standard" (vol O_E = 1) or "self_dual" (vol O_E = |D|^(1/2))
DEFAULT_E_MEASURE = "standard"

VALID_E_MEASURES = ["standard", "self_dual"]


# ============================================================================
# EISENSTEIN AND KERNEL SETTINGS
# ============================================================================

# vol(E_v^1) for an unramified inert place. The measure convention normalizes it by
# 2 L(1, eta_v); this value is not derived from that. It is the one fit_vol_E1 recovers from
# k = (v(q(x2)) + 1) / 2, and the dkernel suite reports the fit beside it.
VOL_E1_INERT = 1

# Largest p^n (split, inert and ramified odd p) or p^(2n) (p = 2 inert) that
# residue counting for D_n(a) may enumerate
DN_VOLUME_MAX_MODULUS = 5 * 10 ** 6

# Maximum lattice points a single theta count may visit
THETA_ENUMERATION_BUDGET = 2 * 10 ** 6

# Place where the incoherent toy collection differs from the global space:
# an odd non-split prime, 2, or "inf"
DEFAULT_FLIP_PLACE = 3

# [O_F^x : mu^2] entering c_U; 2 for F = Q
UNIT_INDEX_CONSTANT = 2


# ============================================================================
# Q-EXPANSION ENGINE
# ============================================================================

# Iterates of U^(n!) with norm below p^(-B) are treated as converged to 0
PROJECTOR_NORM_EXPONENT = 50

# Largest n tried in U^(n!)
PROJECTOR_MAX_ITER = 10

# Exponent cap for exact powers of non-root-of-unity ratios
MAX_EXACT_POWER = 4096


# ============================================================================
# VERIFICATION RUNNER
# ============================================================================

# Worker threads for suite cases
DEFAULT_THREADS = 4

# Per-case coset budget (0 disables the per-case cap)
DEFAULT_CASE_BUDGET = 10 ** 6

# Primitive characters sampled per conductor in a sweep
SWEEP_CHARS_PER_CONDUCTOR = 2

# Directory for reports written without an explicit path
OUTPUT_DIR = "output"

ARTIFACT_NAME = "padic-gz-local"
ARTIFACT_VERSION = "1.0.0"


# ============================================================================
# LOGGING
# ============================================================================

# Log level: "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"
LOG_LEVEL = "INFO"

# Optional log file (None for console only)
LOG_FILE = None

LOG_FORMAT = "[%(asctime)s] [%(levelname)s] [%(name)s] - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def get_config() -> Dict[str, Any]:
    """
    Get all configuration parameters as a dictionary.

    Returns:
        Dictionary containing all configuration parameters
    """
    config = {
        # Arithmetic
        "max_cyclotomic_order": MAX_CYCLOTOMIC_ORDER,

        # Oracle
        "max_cosets_per_integral": MAX_COSETS_PER_INTEGRAL,
        "constancy_samples": CONSTANCY_SAMPLES,
        "random_seed": RANDOM_SEED,
        "tail_spot_check": TAIL_SPOT_CHECK,
        "oracle_extra_annulus_max_cosets": ORACLE_EXTRA_ANNULUS_MAX_COSETS,

        # Measures
        "default_e_measure": DEFAULT_E_MEASURE,

        # Eisenstein / kernel
        "vol_e1_inert": VOL_E1_INERT,
        "dn_volume_max_modulus": DN_VOLUME_MAX_MODULUS,
        "theta_enumeration_budget": THETA_ENUMERATION_BUDGET,
        "default_flip_place": DEFAULT_FLIP_PLACE,
        "unit_index_constant": UNIT_INDEX_CONSTANT,

        # q-expansions
        "projector_norm_exponent": PROJECTOR_NORM_EXPONENT,
        "projector_max_iter": PROJECTOR_MAX_ITER,
        "max_exact_power": MAX_EXACT_POWER,

        # Runner
        "threads": DEFAULT_THREADS,
        "case_budget": DEFAULT_CASE_BUDGET,
        "sweep_chars_per_conductor": SWEEP_CHARS_PER_CONDUCTOR,
        "output_dir": OUTPUT_DIR,
        "artifact_name": ARTIFACT_NAME,
        "artifact_version": ARTIFACT_VERSION,

        # Logging
        "log_level": LOG_LEVEL,
        "log_file": LOG_FILE,
    }

    return config


def validate_config() -> bool:
    """
    Validate configuration parameters.

    Returns:
        True if configuration is valid, False otherwise
    """
    valid = True

    if MAX_CYCLOTOMIC_ORDER < 8:
        print("Error: MAX_CYCLOTOMIC_ORDER must be at least 8")
        valid = False

    if MAX_COSETS_PER_INTEGRAL <= 0:
        print("Error: MAX_COSETS_PER_INTEGRAL must be positive")
        valid = False

    if CONSTANCY_SAMPLES <= 0:
        print("Error: CONSTANCY_SAMPLES must be positive")
        valid = False

    if DEFAULT_E_MEASURE not in VALID_E_MEASURES:
        print(f"Error: Invalid DEFAULT_E_MEASURE: {DEFAULT_E_MEASURE} "
              f"(must be one of {VALID_E_MEASURES})")
        valid = False

    if VOL_E1_INERT <= 0:
        print("Error: VOL_E1_INERT must be positive")
        valid = False

    if DEFAULT_FLIP_PLACE != "inf" and (not isinstance(DEFAULT_FLIP_PLACE, int)
                                        or DEFAULT_FLIP_PLACE < 2):
        print(f"Error: DEFAULT_FLIP_PLACE must be a prime or 'inf', got {DEFAULT_FLIP_PLACE}")
        valid = False

    if PROJECTOR_NORM_EXPONENT <= 0 or PROJECTOR_MAX_ITER <= 0:
        print("Error: projector thresholds must be positive")
        valid = False

    if DEFAULT_THREADS <= 0:
        print("Error: DEFAULT_THREADS must be positive")
        valid = False

    if not os.path.exists(OUTPUT_DIR):
        try:
            os.makedirs(OUTPUT_DIR)
            print(f"Created output directory: {OUTPUT_DIR}")
        except Exception as e:
            print(f"Error: Cannot create output directory {OUTPUT_DIR}: {e}")
            valid = False

    valid_log_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
    if LOG_LEVEL not in valid_log_levels:
        print(f"Error: Invalid LOG_LEVEL: {LOG_LEVEL} (must be one of {valid_log_levels})")
        valid = False

    if valid:
        print("Configuration validation passed")
    else:
        print("Configuration validation failed")

    return valid


# ============================================================================
# MODULE TEST
# ============================================================================

if __name__ == "__main__":
    print("=== Configuration Module Test ===\n")

    print("Current Configuration:")
    config = get_config()
    for key, value in config.items():
        print(f"  {key}: {value}")

    print("\n" + "="*50 + "\n")

    print("Validating configuration...")
    is_valid = validate_config()

    print(f"\nConfiguration is {'valid' if is_valid else 'invalid'}")
