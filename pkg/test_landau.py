"""
Tests for the twisted oscillator: closed-form ground states, the discretized
operator, the eigensolver and radial profile norms.
"""
import numpy as np
import pytest

from config import EIG_TOLERANCE
from core.errors import GridTooCoarseError, InvalidDimensionError
from core.landau import (
    BlockGrid,
    TwistedOscillator,
    apply_t,
    build_operator,
    ground_state,
    profile_norms,
    radial_variance,
    solve_eigen_numeric,
    spectral_gap,
)


def _ground_field(pair, grid):
    y1, y2 = grid.mesh()
    return pair.profile.value(np.sqrt(y1 ** 2 + y2 ** 2))


def test_closed_form_eigenvalues():
    assert ground_state(1, 2).eigenvalue == pytest.approx(2.828427, abs=1e-6)
    assert ground_state(1, 1).eigenvalue == pytest.approx(2.0)
    assert ground_state(2, 2).eigenvalue == pytest.approx(4.0 * np.sqrt(2.0))
    assert ground_state(1, 2).profile.c0 == pytest.approx(np.sqrt(2.0) / 2.0)
    assert ground_state(3, 1).profile.dimension == 6
    with pytest.raises(InvalidDimensionError):
        ground_state(0, 2)


def test_invalid_grid_and_coefficient():
    with pytest.raises(GridTooCoarseError):
        BlockGrid(half_width=8.0, points=8)
    with pytest.raises(ValueError):
        TwistedOscillator(k=1, c=3)


def test_operator_is_hermitian():
    grid = BlockGrid(half_width=6.0, points=24)
    for order in (2, 4, 6):
        matrix = build_operator(TwistedOscillator(k=1, c=2), grid, order)
        assert abs(matrix - matrix.conj().T).max() < 1e-12


def test_apply_t_converges_on_ground_state():
    """Second-order stencil: error ratio near 4 under refinement."""
    osc = TwistedOscillator(k=1, c=2)
    pair = ground_state(1, 2)
    errors = []
    for points in (59, 119):
        grid = BlockGrid(half_width=6.0, points=points)
        u = _ground_field(pair, grid)
        residual = apply_t(osc, u, grid, order=2) - pair.eigenvalue * u
        y1, y2 = grid.mesh()
        inner = (np.abs(y1) < 3.0) & (np.abs(y2) < 3.0)
        errors.append(np.max(np.abs(residual[inner])))
    assert np.log2(errors[0] / errors[1]) >= 1.9


def test_numeric_ground_state_c2():
    grid = BlockGrid(half_width=8.0, points=96)
    pairs = solve_eigen_numeric(TwistedOscillator(k=1, c=2), grid, 4)
    assert abs(pairs[0].eigenvalue - 2.0 * np.sqrt(2.0)) <= EIG_TOLERANCE
    assert [p.eigenvalue for p in pairs] == sorted(p.eigenvalue for p in pairs)
    assert spectral_gap(pairs) > 0.5
    assert pairs[0].profile is not None
    assert pairs[0].profile.value(0.0) == pytest.approx(1.0)


def test_numeric_ground_state_c1_degenerate():
    grid = BlockGrid(half_width=8.0, points=96)
    pairs = solve_eigen_numeric(TwistedOscillator(k=1, c=1), grid, 3)
    assert abs(pairs[0].eigenvalue - 2.0) <= EIG_TOLERANCE
    # lowest Landau level: the first eigenvalues cluster at 2
    assert spectral_gap(pairs) < 0.5


def test_closed_form_ground_state_on_grid():
    grid = BlockGrid(half_width=8.0, points=64)
    osc = TwistedOscillator(k=1, c=2)
    matrix = build_operator(osc, grid)
    pair = ground_state(1, 2)
    u = _ground_field(pair, grid).ravel()
    assert radial_variance(grid, u) <= 1e-6
    rayleigh = np.vdot(u, matrix @ u).real / np.vdot(u, u).real
    assert rayleigh == pytest.approx(pair.eigenvalue, abs=1e-3)


def test_block_sums_for_two_blocks():
    grid = BlockGrid(half_width=8.0, points=64)
    pairs = solve_eigen_numeric(TwistedOscillator(k=2, c=2), grid, 2)
    assert pairs[0].eigenvalue == pytest.approx(4.0 * np.sqrt(2.0), abs=1e-3)
    assert pairs[0].profile is None


def test_profile_norms():
    l2, linf = profile_norms(ground_state(1, 2), [2.0, np.inf])
    assert l2 == pytest.approx(np.sqrt(np.pi / np.sqrt(2.0)), rel=1e-10)
    assert l2 == pytest.approx(1.490450, abs=1e-6)
    assert linf == pytest.approx(1.0)
    (l2_c1,) = profile_norms(ground_state(1, 1), [2.0])
    assert l2_c1 == pytest.approx(1.772454, abs=1e-6)
    with pytest.raises(ValueError):
        profile_norms(ground_state(1, 1), [0.5])


def test_profile_contractions():
    profile = ground_state(1, 2).profile
    c0 = profile.c0
    r = np.linspace(0.0, 4.0, 41)
    v = profile.value(r)
    np.testing.assert_allclose(profile.grad_dot_u(r), -2.0 * c0 * r ** 2 * v, atol=1e-12)
    np.testing.assert_allclose(profile.hessian_form(r),
                               (-2.0 * c0 * r ** 2 + 4.0 * c0 ** 2 * r ** 4) * v, atol=1e-12)
    # -lap v + c |u|^2 v = lambda v for the Gaussian
    np.testing.assert_allclose(-profile.laplacian(r) + 2.0 * r ** 2 * v,
                               2.0 * np.sqrt(2.0) * v, atol=1e-12)


def run_tests():
    print("Starting twisted oscillator tests...\n")
    steps = [
        ("Closed-form eigenvalues", test_closed_form_eigenvalues),
        ("Input validation", test_invalid_grid_and_coefficient),
        ("Hermitian operator", test_operator_is_hermitian),
        ("Stencil convergence", test_apply_t_converges_on_ground_state),
        ("Numeric ground state c=2", test_numeric_ground_state_c2),
        ("Numeric ground state c=1", test_numeric_ground_state_c1_degenerate),
        ("Ground state on the grid", test_closed_form_ground_state_on_grid),
        ("Two blocks", test_block_sums_for_two_blocks),
        ("Profile norms", test_profile_norms),
        ("Profile contractions", test_profile_contractions),
    ]
    for number, (label, test) in enumerate(steps, start=1):
        print(f"{number}. {label}...")
        test()
        print(f"[OK] {label}\n")
    print("All twisted oscillator tests passed!")


if __name__ == "__main__":
    try:
        run_tests()
    except AssertionError as e:
        print(f"\n✗ Test failed: {e}")
        exit(1)
