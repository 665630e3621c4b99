"""
MagStrich: numerical checks for Strichartz counterexamples with magnetic potentials.

Command-line entry point. Subcommands:
  eig               closed-form vs numerical twisted-oscillator eigenvalues
  verify-potential  sampled identities and remainder diagnostics of A
  residual          printed forcing formulas vs direct differentiation
  norms             every norm entering the Strichartz ratio at one R
  sweep             R-sweep, power-law fits and verdict
  report            re-render saved sweep/verdict/errata reports
"""

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

import numpy as np

from config import (
    EIG_BOX_HALF_WIDTH,
    EIG_COUNT,
    EIG_GRID_POINTS,
    EIG_STENCIL_ORDER,
    EIG_TOLERANCE,
    IDENTITY_TOLERANCE,
    LOG_LEVEL,
    MODEL_COEFFICIENTS,
    RESIDUAL_R,
)
from core.errors import ConvergenceError
from core.landau import (
    BlockGrid,
    TwistedOscillator,
    ground_state,
    profile_norms,
    solve_eigen_numeric,
    spectral_gap,
)
from core.potential import (
    make_potential,
    remainder_bound_constants,
    remainder_exponent,
    verify_identities,
)
from core.validation import validate_block_count, validate_model_c
from features.mixednorm import QuadratureSpec, strichartz_ratio
from features.quasimode import make_field, make_problem
from features.residual import residual_report
from features.scaling import AdmissiblePair, c_independence, verdict, window_positivity_table
from features.settings import (
    RunConfig,
    load_config_file,
    resolve_run_config,
    validate_run_config,
)
from services.reports import (
    ERRATA_JSON,
    NORMS_JSON,
    POTENTIAL_JSON,
    SWEEP_CSV,
    VERDICT_JSON,
    load_json,
    load_sweep_csv,
    sweep_frame,
    write_json,
    write_sweep_reports,
)
from services.sweep import run_sweep
from ui.tables import (
    checks_table,
    eigen_table,
    errata_table_text,
    norms_table,
    sweep_table,
    verdict_table,
    window_table,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Invalid command-line input; reported with exit status 2."""


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group('problem')
    group.add_argument('--config', help='flat key = value settings file')
    group.add_argument('--n', type=int, help='total dimension (>= 3)')
    group.add_argument('--parity', choices=['odd', 'even'],
                       help='pick n=3 (odd) or n=4 (even) when --n is not given')
    group.add_argument('--alpha', type=float, help='decay exponent in (1, 2)')
    group.add_argument('--gamma', type=float, help='cutoff exponent in (1/2, 1)')
    group.add_argument('--beta', type=float, help='time horizon exponent (default: threshold margin)')
    group.add_argument('--model-c', dest='model_c', type=int, help='|y|^2 coefficient of the model operator')
    group.add_argument('--pair', help="admissible pair 'p,q', e.g. 2,6 or 8/3,4")
    group.add_argument('--seed', type=int, help='random seed for sampled checks')
    group.add_argument('--out', help='output directory')
    group.add_argument('--formats', help='comma list of csv,json,plot')
    sweep = common.add_argument_group('sweep and quadrature')
    sweep.add_argument('--r-min', dest='r_min', type=float)
    sweep.add_argument('--r-max', dest='r_max', type=float)
    sweep.add_argument('--r-points', dest='r_points', type=int)
    sweep.add_argument('--quad-radial', dest='quad_radial', type=int)
    sweep.add_argument('--quad-z', dest='quad_z', type=int)
    sweep.add_argument('--quad-t', dest='quad_t', type=int)
    sweep.add_argument('--quad-refinement', dest='quad_refinement', type=int)
    common.add_argument('--verbose', '-v', action='store_true', help='debug logging')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog='magstrich', description=__doc__.split('\n')[1])
    sub = parser.add_subparsers(dest='command', required=True)

    eig = sub.add_parser('eig', parents=[common], help='twisted oscillator eigenvalues')
    eig.add_argument('--k', type=int, default=1, help='number of 2x2 blocks')
    eig.add_argument('--c', dest='model_c', type=int, help='alias of --model-c')
    eig.add_argument('--grid-points', type=int, default=EIG_GRID_POINTS)
    eig.add_argument('--box', type=float, default=EIG_BOX_HALF_WIDTH, help='box half-width')
    eig.add_argument('--count', type=int, default=EIG_COUNT)
    eig.add_argument('--order', type=int, default=EIG_STENCIL_ORDER, choices=[2, 4, 6])

    potential = sub.add_parser('verify-potential', parents=[common], help='potential identities')
    potential.add_argument('--regularized', action='store_true', default=None,
                           help='use <x>^-alpha instead of |x|^-alpha')
    potential.add_argument('--samples', dest='potential_samples', type=int)

    residual = sub.add_parser('residual', parents=[common], help='printed forcing vs direct')
    residual.add_argument('--samples', dest='residual_samples', type=int)
    residual.add_argument('--R', dest='radius', type=float, default=RESIDUAL_R)
    residual.add_argument('--perturb', help="fault injection 'TERM[:FACTOR]'")
    residual.add_argument('--plateau', action='store_true', help='sample cutoff plateaus only')
    residual.add_argument('--no-fd', action='store_true', help='skip the finite-difference study')

    norms = sub.add_parser('norms', parents=[common], help='all norms at one R')
    norms.add_argument('--R', dest='radius', type=float, help='truncation radius (default r_min)')
    norms.add_argument('--rectangle', action='store_true', help='rectangle cutoff sanity mode')

    sweep = sub.add_parser('sweep', parents=[common], help='R-sweep, fits and verdict')
    sweep.add_argument('--check-c', action='store_true',
                       help='repeat the sweep with the other model coefficient')

    report = sub.add_parser('report', parents=[common], help='re-render saved reports')
    report.add_argument('--errata-only', action='store_true')
    return parser


_SETTING_KEYS = ('n', 'alpha', 'gamma', 'beta', 'model_c', 'pair', 'seed', 'out', 'formats',
                 'r_min', 'r_max', 'r_points', 'quad_radial', 'quad_z', 'quad_t',
                 'quad_refinement', 'regularized', 'residual_samples', 'potential_samples')


def resolve_settings(args: argparse.Namespace) -> RunConfig:
    """CLI flags over config file over defaults; raises UsageError when invalid."""
    try:
        file_values = load_config_file(args.config) if args.config else {}
        overrides = {key: getattr(args, key, None) for key in _SETTING_KEYS}
        if overrides['pair'] is not None:
            overrides['pair'] = tuple(part.strip() for part in overrides['pair'].split(','))
            if len(overrides['pair']) != 2:
                raise ValueError(f"--pair expects 'p,q', got {args.pair!r}")
        if overrides['formats'] is not None:
            overrides['formats'] = tuple(f.strip() for f in overrides['formats'].split(',') if f.strip())
        parity = getattr(args, 'parity', None)
        if parity and overrides['n'] is None and 'n' not in file_values:
            overrides['n'] = 3 if parity == 'odd' else 4
        cfg = resolve_run_config(file_values, overrides)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    if parity and cfg.parity != parity:
        raise UsageError(f"--parity {parity} conflicts with n={cfg.n}")
    ok, message = validate_run_config(cfg)
    if not ok:
        raise UsageError(message)
    return cfg


def _problem(cfg: RunConfig, model_c: Optional[int] = None):
    try:
        return make_problem(cfg.n, cfg.alpha, cfg.gamma, cfg.beta,
                            cfg.model_c if model_c is None else model_c)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _pair(cfg: RunConfig) -> AdmissiblePair:
    return AdmissiblePair.from_text(cfg.pair[0], cfg.pair[1], cfg.n)


def _quadrature(cfg: RunConfig) -> QuadratureSpec:
    return QuadratureSpec(radial_nodes=cfg.quad_radial, z_nodes=cfg.z_nodes,
                          t_nodes=cfg.quad_t, refinement_factor=cfg.quad_refinement)


def _report_writes(results) -> bool:
    ok = True
    for success, message in results:
        print(message)
        ok = ok and success
    return ok


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_eig(args: argparse.Namespace, cfg: RunConfig) -> int:
    ok, message = validate_block_count(args.k)
    if not ok:
        raise UsageError(message)
    ok, message = validate_model_c(cfg.model_c)
    if not ok:
        raise UsageError(message)
    try:
        grid = BlockGrid(half_width=args.box, points=args.grid_points)
        osc = TwistedOscillator(k=args.k, c=cfg.model_c)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    closed = ground_state(args.k, cfg.model_c)
    try:
        numeric = solve_eigen_numeric(osc, grid, args.count, order=args.order)
    except ConvergenceError as exc:
        print(f"Eigensolver failed: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_FAILED

    difference = abs(numeric[0].eigenvalue - closed.eigenvalue)
    rows = [{'level': 0, 'closed_form': closed.eigenvalue, 'numeric': numeric[0].eigenvalue,
             'difference': difference}]
    rows += [{'level': i, 'closed_form': np.nan, 'numeric': pair.eigenvalue, 'difference': np.nan}
             for i, pair in enumerate(numeric[1:], start=1)]
    print(f"Twisted oscillator k={args.k}, c={cfg.model_c}, grid {grid.points}^2 on "
          f"[-{grid.half_width:g}, {grid.half_width:g}]^2, stencil order {args.order}")
    print(eigen_table(rows))
    if len(numeric) > 1:
        gap = spectral_gap(numeric)
        note = '' if cfg.model_c == 2 else ' (degenerate lowest level expected for c=1)'
        print(f"Spectral gap: {gap:.6f}{note}")
    l2, linf = profile_norms(closed, [2.0, np.inf])
    print(f"Closed-form profile norms: L2 = {l2:.10f}, Linf = {linf:.10f}")
    passed = difference <= EIG_TOLERANCE
    print(f"Ground eigenvalue within {EIG_TOLERANCE:g}: {'yes' if passed else 'NO'}")
    return EXIT_OK if passed else EXIT_FAILED


def cmd_verify_potential(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = make_potential(cfg.n, cfg.alpha, regularized=cfg.regularized)
    print(f"Potential n={cfg.n}, alpha={cfg.alpha}, regularized={cfg.regularized}, seed={cfg.seed}")
    report = verify_identities(spec, cfg.potential_samples, cfg.seed, IDENTITY_TOLERANCE)
    print(checks_table(report))
    tangential = next(c for c in report['checks'] if c['name'] == 'tangential_identity')
    print(f"max |B_tau| = {tangential['max_tangential_magnitude']:.6e} "
          f"(B_tau = (alpha-2) A/|x| for the homogeneous weight)")

    remainders = []
    for c in MODEL_COEFFICIENTS:
        exponents = remainder_exponent(spec, c)
        bounds = remainder_bound_constants(spec, c)
        flagged = '' if exponents['r2_cubic_bound_holds'] else '  <- R2 is not O(|w|^3)'
        print(f"c={c}: |R1| ~ |w|^{exponents['r1_exponent']:.3f}, "
              f"|R2| ~ |w|^{exponents['r2_exponent']:.3f}, "
              f"sup |R1||z|^2/|y|^2 = {bounds['sup_r1_ratio']:.4f}, "
              f"sup |R2||z|^3/|y|^3 = {bounds['sup_r2_ratio']:.4f}{flagged}")
        remainders.append({**exponents, **bounds, 'selected': c == cfg.model_c})
    report['remainders'] = remainders
    report['settings'] = cfg.as_dict()
    bounded = all(np.isfinite(r['sup_r1_ratio']) for r in remainders)
    report['passed'] = report['passed'] and bounded
    ok = True
    if 'json' in cfg.formats:
        ok = _report_writes([write_json(report, os.path.join(cfg.out, POTENTIAL_JSON))])
    return EXIT_OK if report['passed'] and ok else EXIT_FAILED


def _parse_perturbation(text: Optional[str]) -> Optional[Dict]:
    if not text:
        return None
    term, _, factor = text.partition(':')
    try:
        return {'term': term.strip(), 'factor': float(factor) if factor else 1.001}
    except ValueError as exc:
        raise UsageError(f"--perturb expects TERM[:FACTOR], got {text!r}") from exc


def cmd_residual(args: argparse.Namespace, cfg: RunConfig) -> int:
    problem = _problem(cfg)
    perturb = _parse_perturbation(args.perturb)
    print(f"Residual oracle n={cfg.n}, R={args.radius:g}, samples={cfg.residual_samples}, seed={cfg.seed}")
    try:
        report = residual_report(problem, R=args.radius, count=cfg.residual_samples, seed=cfg.seed,
                                 perturb=perturb, plateau=args.plateau, fd_check=not args.no_fd)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(errata_table_text(report['errata']))
    print(f"max relative discrepancy, printed table:   {report['max_rel_error_printed']:.3e}")
    print(f"max relative discrepancy, errata replaced: {report['max_rel_error_corrected']:.3e}")
    print(f"max |G_R| part: {report['max_abs_g_r']:.3e}")
    if report['errata_terms']:
        print(f"Errata: {', '.join(report['errata_terms'])}")
    if 'fd' in report:
        orders = ', '.join(f"{o:.2f}" for o in report['fd']['orders'])
        print(f"Finite-difference observed orders: {orders}")
    report['settings'] = cfg.as_dict()
    ok = True
    if 'json' in cfg.formats:
        ok = _report_writes([write_json(report, os.path.join(cfg.out, ERRATA_JSON))])
    return EXIT_OK if report['passed'] and ok else EXIT_FAILED


def cmd_norms(args: argparse.Namespace, cfg: RunConfig) -> int:
    problem = _problem(cfg)
    pair = _pair(cfg)
    radius = args.radius if args.radius is not None else cfg.r_min
    try:
        qm = make_field(problem, radius, 'rectangle' if args.rectangle else 'smooth')
        result = strichartz_ratio(radius, pair, qm, _quadrature(cfg))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    norms = {
        'W_R (L^p L^q)': result.numerator,
        'f_R (L^2)': result.initial,
        "F_R (L^p' L^q')": result.forcing,
        "rest (L^p' L^q')": result.rest,
        "Ftilde_R (L^p' L^q')": result.forcing_total,
        'F_R (L^p L^q)': result.forcing_pq,
    }
    records = {name: {'value': n.value, 'rel_error_estimate': n.rel_error_estimate,
                      'converged': n.converged, 'nodes_used': n.nodes_used}
               for name, n in norms.items()}
    print(f"R={radius:g}, T=R^beta={result.horizon:.6e}, pair=({pair.label})")
    print(norms_table(records))
    print(f"ratio = {result.ratio:.10e}")
    payload = {'R': radius, 'T': result.horizon, 'pair': pair.label, 'ratio': result.ratio,
               'norms': records, 'settings': cfg.as_dict(), 'converged': result.converged}
    ok = True
    if 'json' in cfg.formats:
        ok = _report_writes([write_json(payload, os.path.join(cfg.out, NORMS_JSON))])
    return EXIT_OK if result.converged and ok else EXIT_FAILED


def cmd_sweep(args: argparse.Namespace, cfg: RunConfig) -> int:
    problem = _problem(cfg)
    pair = _pair(cfg)
    quad = _quadrature(cfg)
    rows = run_sweep(problem, pair, cfg.r_grid(), quad)
    result = verdict(problem, pair, rows)
    result['settings'] = cfg.as_dict()
    if args.check_c:
        other = next(c for c in MODEL_COEFFICIENTS if c != cfg.model_c)
        other_rows = run_sweep(_problem(cfg, model_c=other), pair, cfg.r_grid(), quad)
        other_verdict = verdict(_problem(cfg, model_c=other), pair, other_rows)
        if result['fits'] and other_verdict['fits']:
            slopes = {name: result['fits'][name]['slope'] for name in ('f_R', 'W_R')}
            other_slopes = {name: other_verdict['fits'][name]['slope'] for name in ('f_R', 'W_R')}
            comparison = c_independence(slopes, other_slopes)
        else:
            comparison = {'passed': False,
                          'reason': other_verdict.get('reason', result.get('reason'))}
        result['c_independence'] = {'c_values': [cfg.model_c, other], **comparison}
        if not result['c_independence']['passed']:
            result['status'] = 'FAIL'
    windows = window_positivity_table()
    result['window_positivity'] = windows
    if not all(row['positive'] for row in windows):
        result['status'] = 'FAIL'
    print(sweep_table(sweep_frame(rows)))
    print(window_table(windows))
    print(verdict_table(result))
    ok = _report_writes(write_sweep_reports(rows, result, cfg.out, cfg.formats))
    return EXIT_OK if result['status'] == 'PASS' and ok else EXIT_FAILED


def cmd_report(args: argparse.Namespace, cfg: RunConfig) -> int:
    found = False
    csv_path = os.path.join(cfg.out, SWEEP_CSV)
    if os.path.exists(csv_path):
        found = True
        print(sweep_table(load_sweep_csv(csv_path)))
    verdict_path = os.path.join(cfg.out, VERDICT_JSON)
    if os.path.exists(verdict_path):
        found = True
        print(verdict_table(load_json(verdict_path)))
    errata_path = os.path.join(cfg.out, ERRATA_JSON)
    if os.path.exists(errata_path):
        found = True
        print(errata_table_text(load_json(errata_path)['errata'], only_errata=args.errata_only))
    if not found:
        print(f"No reports found in {cfg.out}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


COMMANDS = {
    'eig': cmd_eig,
    'verify-potential': cmd_verify_potential,
    'residual': cmd_residual,
    'norms': cmd_norms,
    'sweep': cmd_sweep,
    'report': cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, LOG_LEVEL, logging.INFO),
        format='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    try:
        cfg = resolve_settings(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
