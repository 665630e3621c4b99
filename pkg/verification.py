"""
Verification facade.

This module re-exports the public API from the package structure so tests
and scripts can import everything from one place.
"""

# Core
from core.errors import (
    ConvergenceError,
    EndpointPairError,
    GridTooCoarseError,
    InvalidDimensionError,
    OutsideSupportError,
    SingularityError,
)

from core.potential import (
    PotentialSpec,
    build_m,
    build_omega,
    divergence_a,
    eval_a,
    eval_b,
    fd_jacobian_a,
    jacobian_a,
    make_potential,
    remainder_bound_constants,
    remainder_exponent,
    tangential_b,
    tangential_b_expected,
    taylor_remainders,
    verify_identities,
)

from core.landau import (
    BlockGrid,
    Eigenpair,
    TwistedOscillator,
    apply_t,
    build_operator,
    ground_state,
    profile_from_grid,
    profile_norms,
    radial_variance,
    solve_eigen_numeric,
    spectral_gap,
)

# Features
from features.quasimode import (
    CutoffSpec,
    QuasiModeField,
    ScaledProfile,
    bump,
    bump_derivatives,
    make_field,
    make_problem,
)

from features.printed import (
    TERM_NAMES,
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
    sample_support_points,
)

from features.mixednorm import (
    QuadratureSpec,
    default_quadrature,
    dual_pair,
    f_r_field,
    forcing_field,
    mixed_norm,
    rectangle_f_r_norm_closed_form,
    rest_field,
    spatial_norm,
    strichartz_ratio,
    w_r_field,
)

from features.scaling import (
    AdmissiblePair,
    SweepRow,
    admissible_pairs,
    beta_threshold,
    c_independence,
    delta_lipschitz_bound,
    delta_terms,
    delta_value,
    fit_exponent,
    fit_power_law,
    forcing_bound_exponent,
    gamma_window,
    predicted_exponents,
    printed_threshold_delta_terms,
    slope_stability,
    threshold_for,
    verdict,
    window_positivity_table,
)

from features.settings import (
    RunConfig,
    load_config_file,
    parse_config_text,
    resolve_run_config,
    validate_run_config,
)

# Services
from services.sweep import compute_row, run_sweep

from services.reports import (
    load_json,
    load_sweep_csv,
    write_json,
    write_plot_data,
    write_sweep_csv,
    write_sweep_reports,
)
