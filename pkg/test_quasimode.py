"""
Tests for the quasi-mode fields, the printed forcing tables and the residual
oracle that checks them against direct differentiation.
"""
import numpy as np
import pytest

from features.printed import (
    F_TERMS,
    TERM_NAMES,
    corrected_coefficients,
    eval_f_printed,
    eval_f_r_printed,
    eval_g_r_printed,
    printed_coefficients,
)
from features.quasimode import CutoffSpec, bump, bump_derivatives, make_field, make_problem
from features.residual import (
    eval_f_fd,
    fd_convergence_order,
    fit_printed_coefficients,
    residual_report,
    sample_support_points,
)
from features.scaling import threshold_for


def _odd(c=2):
    return make_problem(3, 1.5, 0.8, c=c)


def _even(c=2):
    return make_problem(4, 1.5, 0.8, c=c)


def test_bump_values():
    assert bump(0.3) == 1.0
    assert bump(-0.3) == 1.0
    assert bump(1.2) == 0.0
    assert bump(0.75) == pytest.approx(0.5)
    s = np.linspace(0.55, 0.95, 41)
    values = bump(s)
    assert np.all((values > 0) & (values < 1))
    assert np.all(np.diff(values) < 0)


def test_bump_derivatives_match_differences():
    s = np.linspace(0.55, 0.95, 9)
    h = 1e-5
    _, d1, d2 = bump_derivatives(s)
    np.testing.assert_allclose(d1, (bump(s + h) - bump(s - h)) / (2 * h), rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(d2, (bump(s + h) - 2 * bump(s) + bump(s - h)) / h ** 2,
                               rtol=1e-3, atol=1e-4)


def test_make_problem_defaults_and_validation():
    config = _odd()
    assert config.d_y == 2 and config.d_z == 1 and config.k == 1
    assert config.beta == pytest.approx(float(threshold_for(3, 1.5, 0.8)) * 1.02)
    assert _even().d_z == 2
    for bad in (dict(n=2, alpha=1.5, gamma=0.8), dict(n=3, alpha=2.5, gamma=0.8),
                dict(n=3, alpha=1.5, gamma=0.3), dict(n=3, alpha=1.5, gamma=0.8, c=3)):
        with pytest.raises(ValueError):
            make_problem(**bad)
    with pytest.raises(ValueError):
        make_field(config, 2.0)
    with pytest.raises(ValueError):
        CutoffSpec(0.8, mode='triangle')


def test_omega_examples():
    qm = make_field(_odd(c=2), 8.0)
    assert qm.eval_omega(np.array([1.0, 0.0]), 4.0) == pytest.approx(0.915405, abs=1e-6)
    assert qm.eval_omega(np.zeros(2), 5.0) == pytest.approx(1.0)
    y = np.array([0.4, -0.3])
    assert qm.eval_omega(y, 1.0) == pytest.approx(float(qm.profile.value(0.5)))
    for s in (2.0, 7.5):
        assert qm.eval_omega(s ** 0.75 * y, s * 3.0) == pytest.approx(qm.eval_omega(y, 3.0), rel=1e-12)


def test_w_phase():
    qm = make_field(_odd(), 8.0)
    y, z = np.array([0.4, 0.2]), 7.5
    omega = qm.eval_omega(y, z)
    assert qm.eval_w(0.0, y, z) == pytest.approx(omega)
    assert abs(qm.eval_w(3.7, y, z)) == pytest.approx(omega)
    period = 2 * np.pi * z ** 1.5 / qm.lam
    assert qm.eval_w(period, y, z) == pytest.approx(omega, abs=1e-12)


def test_w_r_support_and_plateau():
    qm = make_field(_odd(), 16.0)
    lo, hi = qm.z_interval
    y = np.array([0.5, 0.5])
    assert qm.eval_w_r(1.0, y, hi + 0.1) == 0.0
    assert qm.eval_w_r(1.0, y, lo - 0.1) == 0.0
    assert qm.eval_w_r(1.0, np.array([17.0, 0.0]), 16.0) == 0.0
    assert qm.eval_w_r(1.0, y, 16.0) == pytest.approx(qm.eval_w(1.0, y, 16.0), abs=1e-15)
    assert qm.eval_f_r(y, 16.0) == pytest.approx(qm.eval_omega(y, 16.0))

    even = make_field(_even(), 16.0)
    z_out = np.array([16.0, hi + 0.5])
    assert even.eval_w_r(0.0, y, z_out) == 0.0
    z_in = np.array([16.0, 16.0])
    assert even.eval_w_r(0.0, y, z_in) == pytest.approx(even.eval_w(0.0, y, z_in))


def test_printed_forcing_vanishes_at_axis():
    for config in (_odd(), _even()):
        qm = make_field(config, 16.0)
        z = 16.0 if config.d_z == 1 else np.array([16.0, 16.0])
        assert abs(eval_f_printed(qm, 0.0, np.zeros(config.d_y), z)) < 1e-15
        assert abs(qm.eval_f_direct(0.0, np.zeros(config.d_y), z)) < 1e-12


def test_printed_f_structure_at_t0():
    qm = make_field(_odd(), 16.0)
    y, z = np.array([0.8, -0.4]), 15.0
    u = np.linalg.norm(y) / z ** 0.75
    a = 1.5
    expected = -(a * (a + 2) / 4 * qm.profile.grad_dot_u(u) + a * a / 4 * qm.profile.hessian_form(u)) / z ** 2
    assert eval_f_printed(qm, 0.0, y, z) == pytest.approx(expected, rel=1e-12)


def test_plateau_forcing_equals_untruncated_table():
    rng = np.random.default_rng(5)
    for config in (_odd(), _even()):
        qm = make_field(config, 16.0)
        t, y, z = sample_support_points(qm, 50, rng, plateau=True)
        direct = qm.eval_f_direct(t, y, z)
        table = eval_f_printed(qm, t, y, z, corrected_coefficients(config.n, config.alpha))
        scale = np.max(np.abs(direct))
        assert np.max(np.abs(direct - table)) / scale < 1e-8
        assert np.max(np.abs(eval_g_r_printed(qm, t, y, z))) < 1e-12 * scale


def test_printed_odd_table_matches_direct_forcing():
    qm = make_field(_odd(), 4.0)
    t, y, z = sample_support_points(qm, 200, np.random.default_rng(11))
    direct = qm.eval_f_direct(t, y, z)
    printed = eval_f_r_printed(qm, t, y, z)
    assert np.max(np.abs(direct - printed)) / np.max(np.abs(direct)) < 1e-8


def test_even_table_differs_only_in_one_coefficient():
    printed = printed_coefficients(4, 1.5)
    corrected = corrected_coefficients(4, 1.5)
    differing = [name for name in TERM_NAMES if printed[name] != corrected[name]]
    assert differing == ['F.G.t0']
    assert printed['F.G.t0'] == pytest.approx(1.5 ** 2 / 4)
    assert corrected['F.G.t0'] == pytest.approx(-1.5 ** 2 / 4)
    assert printed_coefficients(3, 1.5) == corrected_coefficients(3, 1.5)
    assert printed_coefficients(3, 1.5)['F.v.t1'] == pytest.approx(-1.5 * 2.5)
    assert printed['F.v.t1'] == pytest.approx(-1.5 ** 2)


def test_direct_forcing_ignores_transport_term():
    qm = make_field(_odd(), 4.0)
    t, y, z = sample_support_points(qm, 40, np.random.default_rng(2))
    radial = qm.forcing_radial(t, np.linalg.norm(y, axis=-1), z)
    np.testing.assert_allclose(qm.eval_f_direct(t, y, z), radial, rtol=1e-12, atol=1e-14)


def test_gradient_matches_differences():
    qm = make_field(_even(), 16.0)
    t, y, z = sample_support_points(qm, 10, np.random.default_rng(4), fill=0.9)
    grad = qm.eval_grad_w_r(t, y, z)
    h = 1e-5
    for i in range(qm.config.d_y):
        e = np.zeros(qm.config.d_y)
        e[i] = h
        fd = (qm.eval_w_r(t, y + e, z) - qm.eval_w_r(t, y - e, z)) / (2 * h)
        np.testing.assert_allclose(grad[:, i], fd, atol=1e-7)
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        fd = (qm.eval_w_r(t, y, z + e) - qm.eval_w_r(t, y, z - e)) / (2 * h)
        np.testing.assert_allclose(grad[:, qm.config.d_y + j], fd, atol=1e-7)


def test_rest_forcing():
    qm = make_field(_odd(), 16.0)
    assert qm.eval_rest_forcing(1.0, np.zeros(2), 16.0) == 0.0
    assert qm.eval_rest_forcing(1.0, np.array([20.0, 0.0]), 16.0) == 0.0
    t, y, z = sample_support_points(qm, 30, np.random.default_rng(8))
    vector = qm.eval_rest_forcing(t, y, z)
    radial = qm.rest_radial(t, np.linalg.norm(y, axis=-1), z)
    np.testing.assert_allclose(vector, radial, rtol=1e-10, atol=1e-15)


def test_fd_oracle_order():
    qm = make_field(_odd(), 16.0)
    study = fd_convergence_order(qm, count=30, seed=3)
    assert all(order >= 3.5 for order in study['orders']), study
    with pytest.raises(ValueError):
        t, y, z = sample_support_points(qm, 5, np.random.default_rng(0))
        eval_f_fd(qm, t, y, z, step=2.0, tolerance=1e-12)


def test_fit_recovers_even_coefficient():
    config = _even()
    qm = make_field(config, 4.0)
    t, y, z = sample_support_points(qm, 200, np.random.default_rng(42))
    fit = fit_printed_coefficients(qm, t, y, z)
    assert fit['relative_residual'] < 1e-8
    assert fit['coefficients']['F.G.t0'] == pytest.approx(-1.5 ** 2 / 4, abs=1e-6)
    for name in F_TERMS:
        assert np.isfinite(fit['coefficients'][name])


def test_residual_reports():
    odd = residual_report(_odd(), fd_check=False)
    assert odd['passed']
    assert odd['errata_terms'] == []
    assert odd['max_rel_error_printed'] < 1e-8

    even = residual_report(_even(), fd_check=False)
    assert even['passed']
    assert even['errata_terms'] == ['F.G.t0']
    assert even['max_rel_error_printed'] > 1e-6
    assert even['max_rel_error_derived_table'] < 1e-8


def test_residual_fault_injection():
    report = residual_report(_odd(), perturb={'term': 'G.G.psi1', 'factor': 1.001}, fd_check=False)
    assert 'G.G.psi1' in report['errata_terms']
    assert report['max_rel_error_printed'] > 1e-6
    with pytest.raises(ValueError):
        residual_report(_odd(), perturb={'term': 'nope'}, fd_check=False)


def run_tests():
    print("Starting quasi-mode tests...\n")
    steps = [
        ("Bump values", test_bump_values),
        ("Bump derivatives", test_bump_derivatives_match_differences),
        ("Problem defaults and validation", test_make_problem_defaults_and_validation),
        ("Scaled profile omega", test_omega_examples),
        ("Phase of W", test_w_phase),
        ("W_R support and plateau", test_w_r_support_and_plateau),
        ("Printed F at the axis", test_printed_forcing_vanishes_at_axis),
        ("Printed F at t=0", test_printed_f_structure_at_t0),
        ("Plateau forcing", test_plateau_forcing_equals_untruncated_table),
        ("Odd table vs direct forcing", test_printed_odd_table_matches_direct_forcing),
        ("Even table coefficient", test_even_table_differs_only_in_one_coefficient),
        ("Transport term", test_direct_forcing_ignores_transport_term),
        ("Gradient of W_R", test_gradient_matches_differences),
        ("Rest forcing", test_rest_forcing),
        ("Finite-difference oracle", test_fd_oracle_order),
        ("Coefficient fit", test_fit_recovers_even_coefficient),
        ("Residual reports", test_residual_reports),
        ("Fault injection", test_residual_fault_injection),
    ]
    for number, (label, test) in enumerate(steps, start=1):
        print(f"{number}. {label}...")
        test()
        print(f"[OK] {label}\n")
    print("All quasi-mode tests passed!")


if __name__ == "__main__":
    try:
        run_tests()
    except AssertionError as e:
        print(f"\n✗ Test failed: {e}")
        exit(1)
