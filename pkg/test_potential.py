"""
Tests for the magnetic potential: matrices, A, B, tangential part, divergence,
Taylor remainders and the sampled identity report.
"""
import numpy as np
import pytest

from core.errors import InvalidDimensionError, OutsideSupportError, SingularityError
from core.potential import (
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


def test_omega_blocks():
    np.testing.assert_array_equal(build_omega(1), [[0.0, 1.0], [-1.0, 0.0]])
    omega = build_omega(3)
    assert omega.shape == (6, 6)
    np.testing.assert_array_equal(omega + omega.T, np.zeros((6, 6)))
    np.testing.assert_allclose(omega.T @ omega, np.eye(6))
    with pytest.raises(InvalidDimensionError):
        build_omega(0)


def test_m_matrix_by_parity():
    x = np.array([0.3, -0.7, 2.0])
    np.testing.assert_allclose(build_m(3).m @ x, [-0.7, -0.3, 0.0])
    x4 = np.array([0.3, -0.7, 2.0, 1.0])
    np.testing.assert_allclose(build_m(4).m @ x4, [-0.7, -0.3, 0.0, 0.0])
    m5 = build_m(5).m
    np.testing.assert_allclose(m5.T @ m5, np.diag([1.0, 1.0, 1.0, 1.0, 0.0]))
    assert build_m(4).d_z == 2 and build_m(5).d_y == 4
    with pytest.raises(InvalidDimensionError):
        build_m(2)


def test_eval_a_examples():
    spec = make_potential(3, 1.5)
    np.testing.assert_allclose(eval_a([0.0, 0.0, 1.0], spec), [0.0, 0.0, 0.0])
    np.testing.assert_allclose(eval_a([1.0, 0.0, 0.0], spec), [0.0, -1.0, 0.0])
    np.testing.assert_allclose(eval_a([0.0, 1.0, 0.0], spec), [1.0, 0.0, 0.0])
    with pytest.raises(SingularityError):
        eval_a([0.0, 0.0, 0.0], spec)
    regularized = make_potential(3, 1.5, regularized=True)
    np.testing.assert_allclose(eval_a([0.0, 0.0, 0.0], regularized), [0.0, 0.0, 0.0])


def test_b_antisymmetric_and_matches_fd_jacobian():
    spec = make_potential(3, 1.5)
    x = np.array([0.3, 0.4, 1.2])
    b = eval_b(x, spec)
    np.testing.assert_allclose(b + b.T, np.zeros((3, 3)), atol=1e-14)
    assert np.max(np.abs(fd_jacobian_a(x, spec) - jacobian_a(x, spec))) < 1e-8


def test_b_is_curl_cross_product_in_three_dimensions():
    spec = make_potential(3, 1.5)
    rng = np.random.default_rng(3)
    x = np.array([0.5, -0.2, 0.9])
    jac = jacobian_a(x, spec)
    curl = np.array([jac[2, 1] - jac[1, 2], jac[0, 2] - jac[2, 0], jac[1, 0] - jac[0, 1]])
    b = eval_b(x, spec)
    for _ in range(5):
        v = rng.normal(size=3)
        np.testing.assert_allclose(b @ v, np.cross(curl, v), atol=1e-10)


def test_tangential_part_matches_closed_form():
    spec3 = make_potential(3, 1.5)
    x = np.array([1.0, 1.0, 1.0])
    np.testing.assert_allclose(tangential_b(x, spec3), tangential_b_expected(x, spec3), atol=1e-12)
    # (alpha - 2) A / |x| for the homogeneous weight
    np.testing.assert_allclose(tangential_b(x, spec3), -0.5 * eval_a(x, spec3) / np.sqrt(3.0),
                               atol=1e-12)
    np.testing.assert_allclose(tangential_b([0.0, 0.0, 1.0], spec3), np.zeros(3), atol=1e-12)
    spec4 = make_potential(4, 1.5)
    x4 = np.array([0.2, -0.7, 0.1, 2.0])
    np.testing.assert_allclose(tangential_b(x4, spec4), tangential_b_expected(x4, spec4), atol=1e-12)


def test_divergence_vanishes():
    assert abs(divergence_a(np.array([1.0, 2.0, 3.0]), make_potential(3, 1.5))) < 1e-12
    assert abs(divergence_a(np.array([1.0, 0.0, 0.0, 0.0]), make_potential(4, 1.5))) < 1e-12


def test_taylor_remainders_examples():
    spec = make_potential(3, 1.5)
    zero = taylor_remainders([0.0, 0.0], 1.0, spec, 1)
    assert zero.r2 == 0.0 and np.all(zero.r1 == 0.0)

    sample = taylor_remainders([0.1, 0.0], 1.0, spec, 1)
    np.testing.assert_allclose(sample.r1, [0.0, 7.435e-4, 0.0], atol=1e-6)
    assert sample.r2 == pytest.approx(0.01 * (1.01 ** -1.5 - 1.0), rel=1e-12)
    assert sample.r2 == pytest.approx(-1.4815e-4, rel=1e-3)

    quadratic = taylor_remainders([0.1, 0.0], 1.0, spec, 2)
    assert quadratic.r2 == pytest.approx(-0.01, abs=2e-4)

    with pytest.raises(OutsideSupportError):
        taylor_remainders([2.0, 0.0], 1.0, spec, 1)


def test_remainder_exponents_by_model_coefficient():
    spec = make_potential(3, 1.5)
    c1 = remainder_exponent(spec, 1)
    c2 = remainder_exponent(spec, 2)
    assert c1['r2_exponent'] == pytest.approx(4.0, abs=0.05)
    assert c1['r2_cubic_bound_holds']
    assert c2['r2_exponent'] == pytest.approx(2.0, abs=0.05)
    assert not c2['r2_cubic_bound_holds']
    assert c1['r1_exponent'] == pytest.approx(3.0, abs=0.05)


def test_remainder_bound_constants_stable_under_refinement():
    spec = make_potential(3, 1.5)
    coarse = remainder_bound_constants(spec, 1, points=8)
    fine = remainder_bound_constants(spec, 1, points=16)
    assert np.isfinite(coarse['sup_r1_ratio']) and np.isfinite(fine['sup_r1_ratio'])
    assert fine['sup_r1_ratio'] == pytest.approx(coarse['sup_r1_ratio'], rel=0.1)


def test_verify_identities_reports():
    for n in (3, 4, 5):
        report = verify_identities(make_potential(n, 1.5), 1000, seed=42)
        assert report['passed'], [c for c in report['checks'] if not c['passed']]
    regularized = verify_identities(make_potential(3, 1.5, regularized=True), 200, seed=1)
    homogeneity = next(c for c in regularized['checks'] if c['name'] == 'homogeneity')
    assert homogeneity['status'] == 'not-applicable'
    assert regularized['passed']


def run_tests():
    print("Starting potential tests...\n")
    steps = [
        ("Omega blocks", test_omega_blocks),
        ("M by parity", test_m_matrix_by_parity),
        ("A examples", test_eval_a_examples),
        ("B antisymmetry and Jacobian", test_b_antisymmetric_and_matches_fd_jacobian),
        ("B as a cross product", test_b_is_curl_cross_product_in_three_dimensions),
        ("Tangential part", test_tangential_part_matches_closed_form),
        ("Divergence", test_divergence_vanishes),
        ("Taylor remainders", test_taylor_remainders_examples),
        ("Remainder exponents", test_remainder_exponents_by_model_coefficient),
        ("Remainder bound constants", test_remainder_bound_constants_stable_under_refinement),
        ("Identity report", test_verify_identities_reports),
    ]
    for number, (label, test) in enumerate(steps, start=1):
        print(f"{number}. {label}...")
        test()
        print(f"[OK] {label}\n")
    print("All potential tests passed!")


if __name__ == "__main__":
    try:
        run_tests()
    except AssertionError as e:
        print(f"\n✗ Test failed: {e}")
        exit(1)
