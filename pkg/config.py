"""Configuration file for MagStrich verification defaults."""

import os


def _safe_int(value: str, default: int) -> int:
    """Safely convert a string to int, returning default on failure."""
    try:
        return int(value)
    except (ValueError, TypeError):
        return default


def _safe_float(value: str, default: float) -> float:
    """Safely convert a string to float, returning default on failure."""
    try:
        return float(value)
    except (ValueError, TypeError):
        return default


def _safe_bool(value: str, default: bool) -> bool:
    """Interpret 'true'/'false' style strings, returning default otherwise."""
    if value is None:
        return default
    lowered = value.strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    return default


# Problem defaults (odd parity, the headline configuration)
DEFAULT_N = _safe_int(os.getenv('MAGSTRICH_N', '3'), 3)
DEFAULT_ALPHA = _safe_float(os.getenv('MAGSTRICH_ALPHA', '1.5'), 1.5)
DEFAULT_GAMMA = _safe_float(os.getenv('MAGSTRICH_GAMMA', '0.8'), 0.8)
DEFAULT_MODEL_C = _safe_int(os.getenv('MAGSTRICH_MODEL_C', '1'), 1)
MODEL_COEFFICIENTS = (1, 2)
BETA_MARGIN = 1.02  # beta = threshold * margin when not given explicitly
DEFAULT_TIME_EXPONENT = '2'  # default pair (2, 2n/(n-2))
DEFAULT_REGULARIZED = _safe_bool(os.getenv('MAGSTRICH_REGULARIZED'), False)

# R sweep: geometric grid 2^5 .. 2^12
DEFAULT_R_MIN = 32.0
DEFAULT_R_MAX = 4096.0
DEFAULT_R_POINTS = 8
MIN_FIT_POINTS = 5
MIN_FIT_DECADES = 2.0

# Quadrature (Gauss-Legendre nodes per panel)
QUAD_RADIAL_NODES = _safe_int(os.getenv('MAGSTRICH_QUAD_RADIAL', '48'), 48)
QUAD_Z_NODES = _safe_int(os.getenv('MAGSTRICH_QUAD_Z', '48'), 48)
QUAD_Z_NODES_EVEN = _safe_int(os.getenv('MAGSTRICH_QUAD_Z_EVEN', '24'), 24)
QUAD_T_NODES = _safe_int(os.getenv('MAGSTRICH_QUAD_T', '32'), 32)
QUAD_Z_CHUNK = _safe_int(os.getenv('MAGSTRICH_QUAD_Z_CHUNK', '2048'), 2048)  # z nodes per block
QUAD_REFINEMENT = 2
QUAD_MIN_NODES = 8
NORM_TOLERANCE = 1e-6
# Forcing terms carry sign-changing cutoff derivatives raised to q' < 2.
# 1e-3 moves a slope fitted over two decades by under 5e-4.
FORCING_TOLERANCE = 1e-3

# Twisted oscillator eigensolve
EIG_BOX_HALF_WIDTH = 8.0
EIG_GRID_POINTS = 96
EIG_MIN_GRID_POINTS = 16
EIG_STENCIL_ORDER = 6
EIG_COUNT = 4
EIG_TOLERANCE = 1e-4
EIG_MAXITER = 5000

# Potential identity checks
POTENTIAL_SAMPLES = 1000
IDENTITY_TOLERANCE = 1e-10

# Residual oracle
RESIDUAL_SAMPLES = 200
RESIDUAL_TOLERANCE = 1e-8
ERRATA_TOLERANCE = 1e-6
RESIDUAL_R = 4.0  # small R keeps the term basis well conditioned
FD_CHECK_R = 16.0  # cutoff transitions several steps wide
FD_STEPS = (0.1, 0.05, 0.025)

# Verdict tolerances
SLOPE_TOLERANCE = 0.02
DELTA_MARGIN = 0.05
C_INDEPENDENCE_TOLERANCE = 0.005
SLOPE_STABILITY_TOLERANCE = 0.005

# Reproducibility
DEFAULT_SEED = _safe_int(os.getenv('MAGSTRICH_SEED', '42'), 42)

# Execution / output
WORKER_COUNT = max(1, _safe_int(os.getenv('MAGSTRICH_WORKERS', '2'), 2))
OUTPUT_DIR = os.getenv('MAGSTRICH_OUTPUT_DIR', 'results')
LOG_LEVEL = os.getenv('MAGSTRICH_LOG_LEVEL', 'INFO').upper()
CSV_FLOAT_FORMAT = '%.16e'  # 17 significant digits
