"""
Core package - magnetic potentials, the twisted oscillator, quadrature and validation.
"""
from core.errors import (
    ConvergenceError,
    EndpointPairError,
    GridTooCoarseError,
    InvalidDimensionError,
    OutsideSupportError,
    SingularityError,
)
from core.potential import (
    MatrixSpec,
    PotentialSpec,
    build_m,
    build_omega,
    divergence_a,
    eval_a,
    eval_b,
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
    RadialProfile,
    TwistedOscillator,
    apply_t,
    build_operator,
    gaussian_profile,
    ground_state,
    profile_norms,
    solve_eigen_numeric,
    spectral_gap,
)
from core.quadrature import composite_rule, gauss_legendre, sphere_area

__all__ = [
    # Errors
    'ConvergenceError',
    'EndpointPairError',
    'GridTooCoarseError',
    'InvalidDimensionError',
    'OutsideSupportError',
    'SingularityError',
    # Potential
    'MatrixSpec',
    'PotentialSpec',
    'build_m',
    'build_omega',
    'divergence_a',
    'eval_a',
    'eval_b',
    'jacobian_a',
    'make_potential',
    'remainder_bound_constants',
    'remainder_exponent',
    'tangential_b',
    'tangential_b_expected',
    'taylor_remainders',
    'verify_identities',
    # Twisted oscillator
    'BlockGrid',
    'Eigenpair',
    'RadialProfile',
    'TwistedOscillator',
    'apply_t',
    'build_operator',
    'gaussian_profile',
    'ground_state',
    'profile_norms',
    'solve_eigen_numeric',
    'spectral_gap',
    # Quadrature
    'composite_rule',
    'gauss_legendre',
    'sphere_area',
]
