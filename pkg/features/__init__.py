"""
Features package - quasi-modes, residual oracle, mixed norms, scaling and run settings.
"""
from features.quasimode import (
    CutoffSpec,
    ProblemConfig,
    QuasiModeField,
    ScaledProfile,
    bump,
    bump_derivatives,
    make_field,
    make_problem,
)
from features.printed import (
    corrected_coefficients,
    eval_f_printed,
    eval_f_r_printed,
    eval_g_r_printed,
    printed_coefficients,
)
from features.residual import (
    errata_table,
    eval_f_fd,
    fd_convergence_order,
    fit_printed_coefficients,
    residual_report,
)
from features.mixednorm import (
    NormResult,
    QuadratureSpec,
    SpaceTimeField,
    dual_pair,
    mixed_norm,
    spatial_norm,
    strichartz_ratio,
)
from features.scaling import (
    AdmissiblePair,
    ExponentSet,
    ScalingFit,
    SweepRow,
    admissible_pairs,
    beta_threshold,
    fit_exponent,
    fit_power_law,
    gamma_window,
    predicted_exponents,
    verdict,
)
from features.settings import RunConfig, load_config_file, resolve_run_config

__all__ = [
    # Quasi-modes
    'CutoffSpec',
    'ProblemConfig',
    'QuasiModeField',
    'ScaledProfile',
    'bump',
    'bump_derivatives',
    'make_field',
    'make_problem',
    # Printed formulas and residual oracle
    'corrected_coefficients',
    'eval_f_printed',
    'eval_f_r_printed',
    'eval_g_r_printed',
    'printed_coefficients',
    'errata_table',
    'eval_f_fd',
    'fd_convergence_order',
    'fit_printed_coefficients',
    'residual_report',
    # Norms
    'NormResult',
    'QuadratureSpec',
    'SpaceTimeField',
    'dual_pair',
    'mixed_norm',
    'spatial_norm',
    'strichartz_ratio',
    # Scaling
    'AdmissiblePair',
    'ExponentSet',
    'ScalingFit',
    'SweepRow',
    'admissible_pairs',
    'beta_threshold',
    'fit_exponent',
    'fit_power_law',
    'gamma_window',
    'predicted_exponents',
    'verdict',
    # Settings
    'RunConfig',
    'load_config_file',
    'resolve_run_config',
]
