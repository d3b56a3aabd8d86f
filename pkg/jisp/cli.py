#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""CLI module

Exit codes: 0 success, 1 acceptance criterion failure, 2 usage/domain error, 3 numerical
failure.
"""

import io
import os
import os.path
import sys
import functools

import click

from .core import log, set_debug, set_threads, JispError, DomainError
from .specfun import jacobi_phi, mittag_leffler
from .transform import read_csv, write_csv, forward_transform, CSV_FMT
from .solvers import direct_solve, isp_solve, write_solution
from .experiments import (RunConfig, Criterion, DFLT_EPSILONS, run_stability_table,
                          write_stability_table, run_roundtrip_suite, write_report)
from .utils import prettyprint

EXIT_CRITERION = 1
EXIT_USAGE     = 2
EXIT_NUMERICAL = 3

# CLI flag -> dotted config key
FLAG_KEYS = {'alpha':      'jacobi.alpha',
             'beta':       'jacobi.beta',
             'gamma':      'problem.gamma',
             'a':          'problem.a',
             'm':          'problem.m',
             'T':          'problem.T',
             'x_max':      'grids.x_max',
             'n_x':        'grids.n_x',
             'lambda_max': 'grids.lambda_max',
             'n_lambda':   'grids.n_lambda',
             'n_t':        'grids.n_t',
             'output_dir': 'output.dir'}

##################
# option helpers #
##################

def _fail(code, e):
    log.debug("Exit %d on %s: %s" % (code, type(e).__name__, e))
    click.echo("Error: %s" % (e), err=True)
    sys.exit(code)

def guarded(func):
    """Map package exceptions onto the exit-code contract
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except DomainError as e:
            _fail(EXIT_USAGE, e)
        except (JispError, ArithmeticError) as e:
            _fail(EXIT_NUMERICAL, e)
        except OSError as e:
            _fail(EXIT_USAGE, e)
    return wrapper

def jacobi_options(func):
    func = click.option('--beta', type=float, help="Jacobi parameter beta (overrides config)")(func)
    func = click.option('--alpha', type=float, help="Jacobi parameter alpha (overrides config)")(func)
    return func

def problem_options(func):
    func = click.option('--T', 'T', type=float, help="Final time")(func)
    func = click.option('--m', 'm', type=float, help="Zero-order coefficient m >= 0")(func)
    func = click.option('--a', 'a', type=float, help="Pseudo-parabolic coefficient a >= 0")(func)
    func = click.option('--gamma', type=float, help="Fractional order in (0, 1]")(func)
    return func

def grid_options(func):
    func = click.option('--output-dir', help="Output directory (overrides config)")(func)
    func = click.option('--n-t', type=int, help="Number of time nodes")(func)
    func = click.option('--n-lambda', type=int, help="Number of spectral nodes")(func)
    func = click.option('--lambda-max', type=float, help="Spectral truncation")(func)
    func = click.option('--n-x', type=int, help="Number of spatial nodes")(func)
    func = click.option('--x-max', type=float, help="Spatial truncation")(func)
    return func

def load_config(ctx, flags):
    """
    :param ctx: click context (group options in ctx.obj)
    :param flags: dict of command options; those in FLAG_KEYS become overrides
    :return: RunConfig
    """
    overrides = {FLAG_KEYS[k]: v for k, v in flags.items() if k in FLAG_KEYS}
    config = RunConfig.load(ctx.obj['config_path'], ctx.obj['profile'], overrides)
    set_threads(config.threads)
    log.debug("Run config: %s" % (config.config_info()))
    return config

def parse_tolerances(ctx, param, values):
    tolerances = {}
    for item in values:
        name, sep, value = item.partition('=')
        try:
            if not sep:
                raise ValueError(item)
            tolerances[name.strip()] = float(value)
        except ValueError:
            raise click.BadParameter("expected NAME=VALUE, got '%s'" % (item))
    return tolerances

#########
# group #
#########

@click.group()
@click.option('--config',  'config_path', type=click.Path(exists=True, dir_okay=False), help="User config file (YAML, nested sections or dotted keys)")
@click.option('--profile', help="Profile of the built-in config to overlay on 'default'")
@click.option('--debug',   default=0, help="Debug level (1 = DEBUG, 2 = TRACE)")
@click.pass_context
def main(ctx, config_path, profile, debug):
    """Direct and inverse source problems for time-fractional pseudo-parabolic equations
    with the Jacobi operator
    """
    set_debug(debug)
    ctx.obj = {'config_path': config_path, 'profile': profile}

############
# commands #
############

@main.command()
@jacobi_options
@click.option('--lambda', 'lam', type=float, default=0.0, help="Spectral variable (>= 0)")
@click.option('--x', 'x', type=float, required=True, help="Point (>= 0)")
@click.pass_context
@guarded
def phi(ctx, alpha, beta, lam, x):
    """Print lambda, x and the Jacobi function phi_lambda(x)
    """
    config = load_config(ctx, {'alpha': alpha, 'beta': beta})
    value = float(jacobi_phi(config.jacobi, lam, x))
    click.echo(','.join(CSV_FMT % v for v in (lam, x, value)))

@main.command()
@click.option('--gamma', type=float, required=True, help="Order gamma > 0")
@click.option('--beta', type=float, default=1.0, help="Second parameter beta > 0")
@click.option('--t', 't', type=float, required=True, help="Real argument")
@guarded
def ml(gamma, beta, t):
    """Print gamma, beta, t and the Mittag-Leffler function E_{gamma,beta}(t)
    """
    value = float(mittag_leffler(gamma, beta, t))
    click.echo(','.join(CSV_FMT % v for v in (gamma, beta, t, value)))

@main.command()
@jacobi_options
@grid_options
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False), required=True, help="x,value CSV on the configured spatial grid")
@click.option('--output', 'output_path', type=click.Path(dir_okay=False), help="lambda,value CSV (default: stdout)")
@click.pass_context
@guarded
def transform(ctx, input_path, output_path, **flags):
    """Forward Fourier-Jacobi transform of a sampled function
    """
    config = load_config(ctx, flags)
    grids = config.build_grids()
    f = read_csv(input_path, grids.spatial)
    g = forward_transform(f, grids.spectral)
    if output_path:
        write_csv(g, output_path)
        log.info("Wrote transform of %s to %s" % (input_path, output_path))
    else:
        buf = io.StringIO()
        write_csv(g, buf)
        click.echo(buf.getvalue(), nl=False)

@main.command()
@jacobi_options
@problem_options
@grid_options
@click.option('--phi-file', type=click.Path(exists=True, dir_okay=False), required=True, help="Initial data (x,value CSV)")
@click.option('--f-file', type=click.Path(exists=True, dir_okay=False), required=True, help="Time-independent source (x,value CSV)")
@click.pass_context
@guarded
def direct(ctx, phi_file, f_file, **flags):
    """Solve the direct problem and write the solution directory
    """
    config = load_config(ctx, flags)
    grids = config.build_grids()
    phi_fn = read_csv(phi_file, grids.spatial)
    f_fn = read_csv(f_file, grids.spatial)
    sol = direct_solve(config.problem, config.jacobi, f_fn, phi_fn, grids)
    write_solution(sol, config.output_dir)
    click.echo(config.output_dir)

@main.command()
@jacobi_options
@problem_options
@grid_options
@click.option('--phi-file', type=click.Path(exists=True, dir_okay=False), required=True, help="Initial data (x,value CSV)")
@click.option('--psi-file', type=click.Path(exists=True, dir_okay=False), required=True, help="Final-time data (x,value CSV)")
@click.pass_context
@guarded
def isp(ctx, phi_file, psi_file, **flags):
    """Solve the inverse source problem and write the solution directory
    """
    config = load_config(ctx, flags)
    grids = config.build_grids()
    phi_fn = read_csv(phi_file, grids.spatial)
    psi_fn = read_csv(psi_file, grids.spatial)
    sol = isp_solve(config.problem, config.jacobi, phi_fn, psi_fn, grids)
    write_solution(sol, config.output_dir)
    click.echo(config.output_dir)

@main.command('stability-table')
@grid_options
@click.option('--epsilon', 'epsilons', type=float, multiple=True, help="Noise level (repeatable, default 1, 0.2, 0.02)")
@click.pass_context
@guarded
def stability_table(ctx, epsilons, **flags):
    """Write stability_table.csv and report.json (ratio and stability verdicts)
    """
    config = load_config(ctx, flags)
    rows = run_stability_table(epsilons or DFLT_EPSILONS, config)
    os.makedirs(config.output_dir, exist_ok=True)
    write_stability_table(rows, os.path.join(config.output_dir, 'stability_table.csv'))
    report = run_roundtrip_suite(config, [Criterion.TABLE_RATIOS, Criterion.STABILITY], rows=rows)
    report['rows'] = [row.row_info() for row in rows]
    write_report(report, os.path.join(config.output_dir, 'report.json'))
    click.echo(config.output_dir)
    if not report['passed']:
        click.echo("Failed criteria: %s" % (', '.join(report['failed'])), err=True)
        sys.exit(EXIT_CRITERION)

@main.command()
@grid_options
@click.option('--criterion', 'criteria', multiple=True, type=click.Choice(sorted(Criterion.values())), help="Criterion to run (repeatable, default all)")
@click.option('--tolerance', 'tolerances', multiple=True, callback=parse_tolerances, help="Tolerance override NAME=VALUE (repeatable)")
@click.pass_context
@guarded
def selftest(ctx, criteria, tolerances, **flags):
    """Run the acceptance suite, write report.json; exit 1 if any criterion fails
    """
    config = load_config(ctx, flags)
    report = run_roundtrip_suite(config, list(criteria) or None, tolerances)
    os.makedirs(config.output_dir, exist_ok=True)
    write_report(report, os.path.join(config.output_dir, 'report.json'))
    prettyprint({name: entry['passed'] for name, entry in report['criteria'].items()})
    if not report['passed']:
        click.echo("Failed criteria: %s" % (', '.join(report['failed'])), err=True)
        sys.exit(EXIT_CRITERION)

if __name__ == '__main__':
    main()
