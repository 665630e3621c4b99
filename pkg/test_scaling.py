"""
Tests for exponent arithmetic, admissible pairs, power-law fits and the verdict.
"""
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from core.errors import EndpointPairError, InvalidDimensionError
from features.quasimode import make_problem
from features.scaling import (
    DELTA_TERM_NAMES,
    AdmissiblePair,
    SweepRow,
    admissible_pairs,
    beta_threshold,
    c_independence,
    delta_lipschitz_bound,
    delta_terms,
    delta_value,
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
from ui.tables import verdict_table


def test_admissible_pairs():
    pair = AdmissiblePair.from_text('2', '6', 3)
    assert pair.p == 2 and pair.q == 6
    assert AdmissiblePair.from_text('8/3', '4', 3).label == '8/3,4'
    assert AdmissiblePair.from_text('2', '4', 4).p == 2
    assert AdmissiblePair.from_text('inf', '2', 3).is_mass_conservation
    with pytest.raises(ValueError):
        AdmissiblePair.from_text('2', '4', 3)
    with pytest.raises(InvalidDimensionError):
        AdmissiblePair.from_text('2', '4', 2)
    with pytest.raises(EndpointPairError):
        AdmissiblePair.from_text('inf', '2', 3).require_non_endpoint()

    pairs = admissible_pairs(3, 3)
    assert [p.q for p in pairs] == [Fraction(2), Fraction(4), Fraction(6)]
    assert pairs[0].p is None and pairs[1].p == Fraction(8, 3) and pairs[2].p == 2
    for n in (3, 4, 5, 6):
        for p in admissible_pairs(n, 7):
            assert 2 * (0 if p.p is None else 1 / p.p) == Fraction(n, 2) - Fraction(n) / p.q


def test_thresholds():
    assert threshold_for(3, 1.5, 0.8) == Fraction(23, 15)
    assert threshold_for(4, 1.5, 0.8) == Fraction(31, 20)
    assert float(threshold_for(4, 1.5, 0.8)) == pytest.approx(1.55)
    config = make_problem(3, 1.5, 0.8)
    assert beta_threshold(config) == Fraction(23, 15)


def test_gamma_windows():
    assert gamma_window(3, 1.5) == (Fraction(3, 4), Fraction(1))
    lo, hi = gamma_window(4, 1.5)
    assert lo == Fraction(3, 4)
    assert hi == Fraction(3, 4) + Fraction(1, 6)
    assert float(hi) == pytest.approx(0.9167, abs=1e-4)


def test_delta_at_threshold():
    delta, attained = delta_value(3, 1.5, 0.8, Fraction(23, 15), Fraction(2))
    assert delta == Fraction(1, 15)
    assert attained == ['2g-b']


def test_delta_sign_follows_gamma_window():
    for n in (3, 4, 5, 6):
        for alpha in (Fraction(11, 10), Fraction(3, 2), Fraction(19, 10)):
            lo, hi = gamma_window(n, alpha)
            inside = (lo + hi) / 2
            beta = threshold_for(n, alpha, inside)
            assert delta_value(n, alpha, inside, beta, Fraction(2))[0] > 0
            below = lo - Fraction(1, 100)
            if below > Fraction(1, 2):
                beta = threshold_for(n, alpha, below)
                assert delta_value(n, alpha, below, beta, Fraction(2))[0] < 0


def test_window_positivity_table():
    rows = window_positivity_table()
    assert len(rows) == 12
    assert all(row['positive'] for row in rows)
    for row in rows:
        assert Fraction(1, 2) <= row['gamma_lo'] < row['gamma_mid'] < row['gamma_hi'] <= 1
    first = rows[0]
    assert first['n'] == 3 and first['alpha'] == Fraction(11, 10)
    assert first['beta_threshold'] == threshold_for(3, Fraction(11, 10), first['gamma_mid'])


def test_printed_threshold_forms_agree():
    for n in (3, 4, 5, 6, 7):
        for alpha in (Fraction(6, 5), Fraction(3, 2), Fraction(9, 5)):
            for gamma in (Fraction(3, 5), Fraction(4, 5), Fraction(9, 10)):
                beta = threshold_for(n, alpha, gamma)
                assert delta_terms(n, alpha, gamma, beta) == printed_threshold_delta_terms(n, alpha, gamma)
    assert set(printed_threshold_delta_terms(3, 1.5, 0.8)) == set(DELTA_TERM_NAMES)


def test_delta_lipschitz_in_alpha():
    bound = delta_lipschitz_bound(3, Fraction(4, 5))
    assert bound > 0
    gamma = Fraction(4, 5)
    a1, a2 = Fraction(3, 2), Fraction(8, 5)
    d1 = min(printed_threshold_delta_terms(3, a1, gamma).values())
    d2 = min(printed_threshold_delta_terms(3, a2, gamma).values())
    assert abs(d2 - d1) <= bound * (a2 - a1)


def test_predicted_exponents():
    config = make_problem(3, 1.5, 0.8, beta=float(Fraction(23, 15)))
    exps = predicted_exponents(config, AdmissiblePair.from_text('2', '6', 3))
    assert exps.f_r_slope == Fraction(23, 20)
    assert float(exps.w_r_spatial_slope) == pytest.approx(0.38333, abs=1e-5)
    assert exps.beta_threshold == Fraction(23, 15)
    assert exps.gamma_window == (Fraction(3, 4), Fraction(1))
    data = exps.as_dict()
    assert data['f_r_slope'] == pytest.approx(1.15)
    assert data['beta_threshold_exact'] == '23/15'

    even = predicted_exponents(make_problem(4, 1.5, 0.8), AdmissiblePair.from_text('2', '4', 4))
    assert float(even.f_r_slope) == pytest.approx(1.55)


def test_forcing_bound_exponent():
    config = make_problem(3, 1.5, 0.8, beta=1.6)
    exps = forcing_bound_exponent(config, AdmissiblePair.from_text('2', '6', 3))
    # T^(1/2) R^(D/12) max{R^-1.6, T^2 R^-5}
    assert exps['shape'] == Fraction(4, 5) + Fraction(23, 60) + Fraction(-8, 5)
    assert exps['full'] >= exps['shape']


def test_power_law_fits():
    r = np.geomspace(10, 1e4, 8)
    fit = fit_power_law(r, 3.0 * r ** 1.25)
    assert fit.slope == pytest.approx(1.25, abs=1e-12)
    assert fit.max_abs_residual < 1e-12
    with pytest.raises(ValueError):
        fit_power_law(r[:3], r[:3])
    with pytest.raises(ValueError):
        fit_power_law(np.linspace(10, 20, 8), np.linspace(10, 20, 8))
    with pytest.raises(ValueError):
        fit_power_law(r, -r)
    stability = slope_stability(r, 2.0 * r ** 0.5)
    assert stability['stable'] and stability['change'] < 1e-12


def test_c_independence():
    same = c_independence({'f_R': 1.150, 'W_R': 1.15}, {'f_R': 1.152, 'W_R': 1.15})
    assert same['passed']
    assert not c_independence({'f_R': 1.15}, {'f_R': 1.17})['passed']


def _synthetic_rows(config, pair, ratio_slope):
    exps = predicted_exponents(config, pair)
    rows = []
    for R in np.geomspace(32, 4096, 8):
        f_r = 2.0 * R ** float(exps.f_r_slope)
        w_r = 3.0 * R ** float(exps.w_r_slope)
        bound = float(exps.f_r_forcing_bound_exponents['shape'])
        rows.append(SweepRow(R=R, horizon=R ** config.beta, f_r_norm=f_r, w_r_norm=w_r,
                             forcing_norm=0.1 * R ** 0.5, rest_norm=0.01 * R ** 0.2,
                             ftilde_norm=0.1 * R ** 0.5, forcing_pq_norm=0.5 * R ** bound,
                             ratio=0.2 * R ** ratio_slope))
    return rows


def test_verdict_on_synthetic_sweep():
    config = make_problem(3, 1.5, 0.8)
    pair = AdmissiblePair.from_text('2', '6', 3)
    delta = float(predicted_exponents(config, pair).delta)
    assert delta > 0

    good = verdict(config, pair, _synthetic_rows(config, pair, delta))
    assert good['status'] == 'PASS', good['criteria']
    assert good['criteria']['b_ratio_growth']['strictly_increasing']
    assert good['predicted']['f_r_slope'] == pytest.approx(1.15)

    bad = verdict(config, pair, _synthetic_rows(config, pair, -0.1))
    assert bad['status'] == 'FAIL'
    assert bad['criteria']['b_ratio_growth']['status'] == 'FAIL'


def test_verdict_outside_gamma_window():
    config = make_problem(3, 1.5, 0.7)
    pair = AdmissiblePair.from_text('2', '6', 3)
    assert predicted_exponents(config, pair).delta <= 0
    result = verdict(config, pair, _synthetic_rows(config, pair, 0.0))
    assert result['criteria']['b_ratio_growth']['status'] == 'N/A'


def test_verdict_with_unconverged_rows():
    config = make_problem(3, 1.5, 0.8)
    pair = AdmissiblePair.from_text('2', '6', 3)
    rows = [replace(row, converged=False) for row in _synthetic_rows(config, pair, 0.1)]
    result = verdict(config, pair, rows)
    assert result['status'] == 'FAIL'
    assert result['reason'].startswith('0/8 converged rows')
    assert result['unconverged_rows'] == [row.R for row in rows]
    criteria = result['criteria']
    assert not criteria['a_ratio_wf']['passed']
    assert criteria['b_ratio_growth']['status'] == 'FAIL'
    assert not any(c['passed'] for c in criteria['c_components']['components'].values())
    text = verdict_table(result)
    assert 'Verdict: FAIL (0/8 converged rows' in text

    half = [replace(row, converged=i % 2 == 0) for i, row in enumerate(rows)]
    assert verdict(config, pair, half)['reason'].startswith('4/8 converged rows')


def run_tests():
    print("Starting scaling tests...\n")
    steps = [
        ("Admissible pairs", test_admissible_pairs),
        ("Thresholds", test_thresholds),
        ("Gamma windows", test_gamma_windows),
        ("Delta at threshold", test_delta_at_threshold),
        ("Delta sign", test_delta_sign_follows_gamma_window),
        ("Window positivity table", test_window_positivity_table),
        ("Printed threshold forms", test_printed_threshold_forms_agree),
        ("Delta Lipschitz bound", test_delta_lipschitz_in_alpha),
        ("Predicted exponents", test_predicted_exponents),
        ("Forcing bound exponent", test_forcing_bound_exponent),
        ("Power-law fits", test_power_law_fits),
        ("c-independence", test_c_independence),
        ("Verdict", test_verdict_on_synthetic_sweep),
        ("Verdict outside window", test_verdict_outside_gamma_window),
        ("Verdict without converged rows", test_verdict_with_unconverged_rows),
    ]
    for number, (label, test) in enumerate(steps, start=1):
        print(f"{number}. {label}...")
        test()
        print(f"[OK] {label}\n")
    print("All scaling tests passed!")


if __name__ == "__main__":
    try:
        run_tests()
    except AssertionError as e:
        print(f"\n✗ Test failed: {e}")
        exit(1)
