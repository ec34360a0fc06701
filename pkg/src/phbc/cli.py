"""Command-line front end.

Subcommands::

    phbc check       --spec FILE
    phbc simulate    --spec FILE [--T 2] [--x0 sine] [--input zero] [--snapshots 5]
    phbc tf          --spec FILE [--s-min 1] [--s-max 100] [--points 25]
    phbc plan        --spec FILE
    phbc synthesize  --spec FILE [--target sine] [--tol 0.02]
    phbc example-wave [--rho 1] [--tension 1] [--graded] [--W0 -1 0 0 1]

Common options: ``--cells`` (200), ``--cfl`` (0.9), ``--horizon-factor``
(2.5), ``--out`` (output directory), ``--seed``.

Exit codes: 0 success, 2 validation failure (standing assumptions or
well-posedness), 3 numerical failure, 4 parse error.
"""

import argparse
import csv
import json
import os
import sys as _sys

import numpy as np

from . import models
from .boundary import check_contraction, check_impedance_energy_preserving, convert_boundary_matrices
from .control import build_plan, discretize, gramian, reach_error, synthesize
from .exceptions import (CFLError, IllPosedError, PHBCError, RankError, SingularGramianError,
                         SpectralPointError, StiffnessError, DimensionError)
from .frequency import estimate_feedthrough, transfer
from .simulate import passivity_probe, simulate
from .spectral import check_generation, default_horizon, diagonalize_field, traversal_times
from .specfile import SpecParseError, format_spec, load_spec, system_to_dict
from .systems import StateGrid, energy_norm, validate_system

__all__ = ['main', 'build_parser', 'EXIT_OK', 'EXIT_VALIDATION', 'EXIT_NUMERICAL', 'EXIT_PARSE']

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_PARSE = 0, 2, 3, 4
FMT = '%.12e'


class _ValidationFailure(Exception):
    pass


def _positive_int(lo):
    def conv(text):
        v = int(text)
        if v < lo:
            raise argparse.ArgumentTypeError(f'must be >= {lo}')
        return v
    return conv


def _cfl(text):
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError('must lie in (0, 1]')
    return v


def _factor(text):
    v = float(text)
    if v < 1:
        raise argparse.ArgumentTypeError('must be >= 1')
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--cells', type=_positive_int(8), default=200, help='grid cells N (>= 8)')
    common.add_argument('--cfl', type=_cfl, default=0.9, help='Courant number in (0, 1]')
    common.add_argument('--horizon-factor', type=_factor, default=2.5,
                        help='control horizon as a multiple of the longest travel time')
    common.add_argument('--out', default=None, help='output directory for artifacts')
    common.add_argument('--seed', type=int, default=0, help='seed for randomized probes')

    spec = argparse.ArgumentParser(add_help=False)
    spec.add_argument('--spec', required=True, help='JSON system spec')

    p = argparse.ArgumentParser(prog='phbc', description='Port-Hamiltonian boundary control toolkit')
    sub = p.add_subparsers(dest='command', required=True)

    sub.add_parser('check', parents=[common, spec], help='standing assumptions and well-posedness')

    s = sub.add_parser('simulate', parents=[common, spec], help='simulate and write CSV snapshots')
    s.add_argument('--T', type=float, default=2.0, help='final time')
    s.add_argument('--x0', choices=['zero', 'sine', 'bump'], default='sine')
    s.add_argument('--input', choices=['zero', 'sine'], default='zero')
    s.add_argument('--snapshots', type=_positive_int(2), default=5)
    s.add_argument('--feedback', type=float, default=None,
                   help='close the loop with u = -k y (requires k = n outputs)')

    t = sub.add_parser('tf', parents=[common, spec], help='transfer function sweep and feedthrough')
    t.add_argument('--s-min', type=float, default=1.0)
    t.add_argument('--s-max', type=float, default=100.0)
    t.add_argument('--points', type=_positive_int(1), default=25)

    sub.add_parser('plan', parents=[common, spec], help='feedback decomposition of the input map')

    y = sub.add_parser('synthesize', parents=[common, spec], help='minimum-norm steering to a target')
    y.add_argument('--target', choices=['sine', 'bump'], default='sine')
    y.add_argument('--tol', type=float, default=0.02, help='accepted relative error')

    w = sub.add_parser('example-wave', parents=[common], help='bundled string example end to end')
    w.add_argument('--rho', type=float, default=1.0, help='constant mass density')
    w.add_argument('--tension', type=float, default=1.0, help="constant Young's modulus")
    w.add_argument('--graded', action='store_true', help='use rho = (1 + zeta)^2, T = 1')
    w.add_argument('--W1', type=float, nargs=4, default=[1, 0, 0, 1], metavar='a')
    w.add_argument('--W0', type=float, nargs=4, default=[-1, 0, 0, 1], metavar='a')
    w.add_argument('--target', choices=['sine', 'bump'], default='sine')
    w.add_argument('--tol', type=float, default=0.02)
    return p


def _out_dir(args):
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    return args.out


def _write_csv(path, header, rows):
    with open(path, 'w', newline='') as fh:
        w = csv.writer(fh, lineterminator='\n')
        w.writerow(header)
        for r in rows:
            w.writerow([FMT % v if isinstance(v, float) else v for v in r])


def _complex_cols(prefix, a):
    a = np.asarray(a, dtype=complex).ravel()
    return [float(v) for z in a for v in (z.real, z.imag)]


def _complex_header(prefix, shape):
    idx = np.ndindex(*shape)
    return [f'{prefix}{"".join(str(i + 1) for i in ix)}_{part}' for ix in idx for part in ('re', 'im')]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _emit(report, args, name):
    text = json.dumps(_jsonable(report), indent=1, sort_keys=True)
    print(text)
    out = _out_dir(args)
    if out:
        with open(os.path.join(out, name), 'w') as fh:
            fh.write(text + '\n')


def _profile(kind, N, n):
    z = (np.arange(N) + 0.5) / N
    if kind == 'zero':
        f = np.zeros(N)
    elif kind == 'sine':
        f = np.sin(np.pi * z)
    else:
        f = np.exp(-((z - 0.5) / 0.1) ** 2)
    vals = np.zeros((N, n), dtype=complex)
    vals[:, 0] = f
    return StateGrid(vals)


def check_report(sys, args):
    """Validation, contraction, energy-preserving and generation checks."""
    val = validate_system(sys)
    rep = {'validation': val.as_dict(), 'valid': val.ok}
    if not val.ok:
        return rep, False
    holds, lam = check_contraction(sys.P1, sys.WB)
    rep['contraction'] = {'holds': holds, 'max_violation': lam}
    bp = convert_boundary_matrices(sys.P1, sys.WB, sys.WC)
    iep, res, reason = check_impedance_energy_preserving(bp)
    rep['impedance_energy_preserving'] = {'holds': iep, 'residual': res, 'reason': reason}
    try:
        diag = diagonalize_field(sys.P1, sys.H)
        gen = check_generation(sys, diag)
        rep['traversal_times'] = traversal_times(diag).tolist()
    except RankError as exc:
        rep['generation'] = {'holds': False, 'reason': str(exc)}
        return rep, False
    rep['generation'] = {'holds': gen.holds, 'sigma_min': gen.sigma_min,
                         'heuristic': gen.heuristic, 'n_incoming_at_1': gen.n_pos}
    rep['well_posed'] = gen.holds
    if sys.k == sys.n:
        passive, worst = passivity_probe(sys, trials=20, seed=args.seed)
        rep['passivity_probe'] = {'passive': passive, 'worst_violation': worst}
    return rep, gen.holds


def cmd_check(sys, args):
    rep, ok = check_report(sys, args)
    _emit(rep, args, 'check.json')
    return EXIT_OK if ok else EXIT_VALIDATION


def _require_valid(sys):
    val = validate_system(sys)
    if not val.ok:
        raise _ValidationFailure('; '.join(f'{c.name}: {c.detail}' for c in val.failures()))


def cmd_simulate(sys, args):
    _require_valid(sys)
    N, n = args.cells, sys.n
    x0 = _profile(args.x0, N, n)
    if args.input == 'zero':
        u = None
    else:
        u = lambda t: np.full(n, np.sin(np.pi * t) ** 2)
    fb = None
    if args.feedback is not None:
        if sys.k != n:
            raise DimensionError('feedback needs k = n outputs')
        fb = -args.feedback * np.eye(n)
    traj = simulate(sys, x0, u, args.T, cfl=args.cfl, feedback=fb)
    idx = np.unique(np.round(np.linspace(0, len(traj.times) - 1, args.snapshots)).astype(int))
    supplied = np.concatenate([[0.0], np.cumsum(
        np.einsum('ki,ki->k', traj.u.conj(), traj.y).real * traj.dt)]) if sys.k else None
    report = {'steps': len(traj.times) - 1, 'dt': traj.dt, 'E0': traj.energy[0],
              'ET': traj.energy[-1]}
    if supplied is not None:
        report['supplied'] = supplied[-1]
        report['balance_defect'] = traj.energy[-1] - traj.energy[0] - supplied[-1]
    out = _out_dir(args)
    if out:
        zeta = (np.arange(N) + 0.5) / N
        rows = [[float(traj.times[i]), float(zeta[j])] + _complex_cols('x', traj.states[i, j])
                for i in idx for j in range(N)]
        _write_csv(os.path.join(out, 'snapshots.csv'), ['t', 'zeta'] + _complex_header('x', (n,)), rows)
        rows = [[float(t), float(e)] + ([float(supplied[i])] if supplied is not None else [])
                for i, (t, e) in enumerate(zip(traj.times, traj.energy))]
        _write_csv(os.path.join(out, 'energy.csv'),
                   ['t', 'energy'] + (['supplied'] if supplied is not None else []), rows)
    _emit(report, args, 'simulate.json')
    return EXIT_OK


def cmd_tf(sys, args):
    _require_valid(sys)
    if sys.k == 0:
        raise DimensionError('tf needs an output (WC)')
    s_values = np.geomspace(args.s_min, args.s_max, args.points) if args.points > 1 else [args.s_min]
    rows = []
    for s in s_values:
        G = transfer(sys, float(s), s_min=args.s_min).G
        rows.append([float(s)] + _complex_cols('G', G))
    D = estimate_feedthrough(sys)
    report = {'D': _complex_cols('D', D.D), 'D_gap': D.convergence_gap, 'D_converged': D.converged}
    out = _out_dir(args)
    if out:
        _write_csv(os.path.join(out, 'tf.csv'), ['s'] + _complex_header('G', (sys.k, sys.n)), rows)
    else:
        report['samples'] = rows
    _emit(report, args, 'tf.json')
    return EXIT_OK if D.converged else EXIT_NUMERICAL


def cmd_plan(sys, args):
    _require_valid(sys)
    plan = build_plan(sys)
    _emit(plan.as_dict(), args, 'plan.json')
    if not plan.well_posed:
        return EXIT_VALIDATION
    return EXIT_NUMERICAL if plan.alpha_fallback else EXIT_OK


def run_synthesis(sys, args, target_kind):
    diag = diagonalize_field(sys.P1, sys.H)
    horizon = default_horizon(diag, args.horizon_factor)
    lti = discretize(sys, args.cells, cfl=args.cfl)
    K = int(np.ceil(horizon / lti.dt - 1e-9))
    gram = gramian(lti, K)
    target = _profile(target_kind, args.cells, sys.n)
    u = synthesize(lti, target, K, gram, regularize=True)
    err, traj = reach_error(sys, lti, u, target)
    report = {'horizon': K * lti.dt, 'steps': K, 'dt': lti.dt,
              'lambda_min': gram.lambda_min, 'lambda_max': gram.lambda_max,
              'regularized': u.regularized, 'control_l2': u.l2_norm(),
              'relative_error': err, 'target_energy_norm': energy_norm(sys, target)}
    out = _out_dir(args)
    if out:
        _write_csv(os.path.join(out, 'control.csv'), ['t'] + _complex_header('u', (sys.n,)),
                   [[float(t)] + _complex_cols('u', v) for t, v in zip(u.times, u.samples)])
        zeta = (np.arange(args.cells) + 0.5) / args.cells
        _write_csv(os.path.join(out, 'state.csv'),
                   ['zeta'] + _complex_header('x', (sys.n,)) + _complex_header('target', (sys.n,)),
                   [[float(z)] + _complex_cols('x', a) + _complex_cols('t', b)
                    for z, a, b in zip(zeta, traj.states[-1], target.values)])
    return report, err <= args.tol


def cmd_synthesize(sys, args):
    _require_valid(sys)
    rep, _ = check_report(sys, args)
    if not rep.get('well_posed', False):
        raise IllPosedError('boundary condition fails the generation check')
    report, ok = run_synthesis(sys, args, args.target)
    _emit(report, args, 'synthesize.json')
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_example_wave(args):
    W1 = np.reshape(args.W1, (2, 2))
    W0 = np.reshape(args.W0, (2, 2))
    if args.graded:
        sys = models.graded_wave(W1, W0)
        rho1, T1, rho0, T0 = 4.0, 1.0, 1.0, 1.0
    else:
        sys = models.wave_system(args.rho, args.tension, W1, W0)
        rho1 = rho0 = args.rho
        T1 = T0 = args.tension
    out = _out_dir(args)
    if out:
        with open(os.path.join(out, 'wave_spec.json'), 'w') as fh:
            fh.write(format_spec(system_to_dict(sys)))
    rep, ok = check_report(sys, args)
    report = {'check': rep, 'independence_criterion': models.wave_independence(W1, W0, rho1, T1, rho0, T0)}
    if not ok:
        _emit(report, args, 'example_wave.json')
        return EXIT_VALIDATION
    report['plan'] = build_plan(sys).as_dict()
    syn, good = run_synthesis(sys, args, args.target)
    report['synthesis'] = syn
    _emit(report, args, 'example_wave.json')
    return EXIT_OK if good else EXIT_NUMERICAL


COMMANDS = {'check': cmd_check, 'simulate': cmd_simulate, 'tf': cmd_tf, 'plan': cmd_plan,
            'synthesize': cmd_synthesize}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == 'example-wave':
            return cmd_example_wave(args)
        sys = load_spec(args.spec)
        return COMMANDS[args.command](sys, args)
    except SpecParseError as exc:
        print(f'parse error: {exc}', file=_sys.stderr)
        return EXIT_PARSE
    except (_ValidationFailure, IllPosedError, RankError, DimensionError, CFLError) as exc:
        print(f'validation error: {exc}', file=_sys.stderr)
        return EXIT_VALIDATION
    except (SingularGramianError, StiffnessError, SpectralPointError, np.linalg.LinAlgError) as exc:
        print(f'numerical error: {exc}', file=_sys.stderr)
        return EXIT_NUMERICAL
    except PHBCError as exc:
        print(f'error: {exc}', file=_sys.stderr)
        return EXIT_NUMERICAL


if __name__ == '__main__':
    _sys.exit(main())
