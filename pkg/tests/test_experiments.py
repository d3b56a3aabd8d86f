# -*- coding: utf-8 -*-

import csv
from dataclasses import replace
import json
import math

import pytest

from jisp import __version__, core
from jisp.core import DomainError
from jisp.specfun import JacobiParams
from jisp.experiments import (RunConfig, StabilityRow, Criterion, CRITERIA, DFLT_EPSILONS,
                              REFERENCE_TABLE, TABLE_COLUMNS, appendix_norms, run_stability_table,
                              write_stability_table, table_ratios, run_roundtrip_suite, build_info,
                              write_report, _roundtrip_grids)
from jisp.solvers import ProblemParams

COARSE = {'n_x': 256, 'n_lambda': 256, 'n_t': 51}

@pytest.fixture(scope='module')
def coarse_config():
    return RunConfig().with_grids(**COARSE)

@pytest.fixture(scope='module')
def rows(coarse_config):
    return run_stability_table(DFLT_EPSILONS, coarse_config)

##############
# run config #
##############

def test_config_defaults():
    config = RunConfig.load()
    assert config.jacobi == JacobiParams(-0.5, -0.5)
    assert config.problem.params_info() == {'gamma': 1.0, 'a': 0.0, 'm': 0.0, 'T': 1.0}
    assert (config.x_max, config.n_x, config.lambda_max, config.n_lambda, config.n_t) == (10.0, 512, 30.0, 512, 101)
    assert config.output_dir == 'out'
    assert config.tolerances == {}
    assert config.threads == 0
    assert replace(config, threads=None) == RunConfig()

def test_config_profiles():
    config = RunConfig.load(profile='jacobi_00')
    assert config.jacobi == JacobiParams(0.0, 0.0)
    assert (config.problem.gamma, config.problem.a, config.problem.m) == (0.5, 0.5, 2.0)
    assert config.n_x == 512
    assert RunConfig.load(profile='coarse').n_lambda == 256
    with pytest.raises(DomainError):
        RunConfig.load(profile='no_such_profile')

def test_config_user_file(tmp_path):
    path = tmp_path / 'run.yml'
    path.write_text("jacobi.alpha: 1.0\n"
                    "jacobi.beta: 0.5\n"
                    "grids:\n"
                    "  n_x: 128\n"
                    "tolerances.plancherel: 1.0e-3\n")
    config = RunConfig.load(str(path), overrides={'grids.n_x': 64, 'problem.gamma': None})
    assert config.jacobi == JacobiParams(1.0, 0.5)
    assert config.n_x == 64
    assert config.problem.gamma == 1.0
    assert config.tolerances == {'plancherel': 1e-3}

def test_config_user_profiles(tmp_path):
    path = tmp_path / 'run.yml'
    path.write_text("default:\n  grids.n_t: 11\nfine:\n  grids.n_t: 401\n")
    assert RunConfig.load(str(path)).n_t == 11
    assert RunConfig.load(str(path), profile='fine').n_t == 401

@pytest.mark.parametrize('text', ["grids.n_q: 10\n", "jacobi:\n  gamma: 0.5\n", "- 1\n- 2\n",
                                  "problem.gamma: 2.0\n", "jacobi.alpha: -1.0\n", "grids.n_x: abc\n",
                                  "grids: [1, 2\n", "environment.threads: -2\n"])
def test_config_invalid(tmp_path, text):
    path = tmp_path / 'bad.yml'
    path.write_text(text)
    with pytest.raises(DomainError):
        RunConfig.load(str(path))

def test_config_threads(monkeypatch):
    monkeypatch.setitem(core.env, 'threads', 5)
    config = RunConfig.from_dict({'environment.threads': 2})
    assert config.threads == 2
    # parsing leaves the process-wide setting alone
    assert core.env['threads'] == 5
    assert RunConfig.from_dict({}).threads is None

def test_config_info(coarse_config):
    info = coarse_config.config_info()
    assert info['grids']['n_x'] == 256
    assert info['jacobi']['rho'] == 0.0
    json.dumps(info)

###################
# stability table #
###################

def test_table_rows(rows):
    assert [r.epsilon for r in rows] == list(DFLT_EPSILONS)
    for r in rows:
        assert r.ratio_u <= 1.0 + 1e-9
        assert math.isfinite(r.ratio_f)
        assert 0.0 <= r.coef_min and r.coef_max <= 1.0

def test_table_values(rows):
    # eps = 1: ||psi||_H^2 = ||u||^2 = 3/4 in the library convention
    first = rows[0]
    assert first.norm_psi_diff_sq == pytest.approx(0.75, rel=1e-4)
    assert first.norm_u_diff_sq == pytest.approx(0.75, rel=1e-4)
    assert first.norm_f_diff_sq == pytest.approx(1.0474, rel=1e-3)
    assert first.norm_psi_appendix == pytest.approx(30.0, rel=1e-4)
    assert first.norm_u_appendix == pytest.approx(0.75, rel=1e-4)
    assert first.norm_f_appendix == pytest.approx(REFERENCE_TABLE[1.0][2], rel=1e-3)
    assert first.t_argmax == COARSE['n_t'] - 1

def test_table_ratios(rows):
    ratios = table_ratios(rows)
    for eps in DFLT_EPSILONS:
        for ratio in ratios[eps]:
            assert ratio == pytest.approx(eps * eps, rel=1e-3)
    # printed columns follow the same eps^2 pattern, with u at half of psi
    assert REFERENCE_TABLE[1.0][1] == 0.5 * REFERENCE_TABLE[1.0][0]
    for eps, cols in REFERENCE_TABLE.items():
        assert cols[0] / REFERENCE_TABLE[1.0][0] == pytest.approx(eps * eps, rel=1e-3)

def test_appendix_scaling(coarse_config):
    grids = coarse_config.build_grids()
    one = appendix_norms(1.0, grids)
    half = appendix_norms(0.5, grids)
    for a, b in zip(one, half):
        assert b == pytest.approx(0.25 * a, rel=1e-12)

def test_table_invalid_epsilon(coarse_config):
    with pytest.raises(DomainError):
        run_stability_table([1.0, 0.0], coarse_config)
    with pytest.raises(DomainError):
        StabilityRow(-1.0, 0.0, 0.0, 0.0)

def test_write_table(tmp_path, rows):
    path = tmp_path / 'stability_table.csv'
    write_stability_table(rows, str(path))
    with open(path) as f:
        data = list(csv.reader(f))
    assert data[0] == list(TABLE_COLUMNS)
    assert len(data) == len(rows) + 1
    assert float(data[2][0]) == 0.2

####################
# acceptance suite #
####################

def test_suite_empty(coarse_config):
    report = run_roundtrip_suite(coarse_config, [])
    assert report['criteria'] == {}
    assert report['passed'] and report['failed'] == []

def test_suite_cheap_criteria(coarse_config):
    names = [Criterion.COSINE, Criterion.C_FUNCTION, Criterion.SIMON, Criterion.LEMMA,
             Criterion.CLASSICAL_LIMIT, Criterion.STEADY_STATE]
    report = run_roundtrip_suite(coarse_config, names)
    assert list(report['criteria']) == names
    assert report['passed'], report['failed']
    assert report['build']['version'] == __version__

def test_suite_table_criteria(coarse_config, rows):
    report = run_roundtrip_suite(coarse_config, [Criterion.TABLE_RATIOS, Criterion.STABILITY], rows=rows)
    assert report['passed'], report['criteria']
    assert report['criteria'][Criterion.TABLE_RATIOS]['detail']['sup_attained_at_T']

def test_suite_unreachable_tolerance(coarse_config):
    report = run_roundtrip_suite(coarse_config, [Criterion.PLANCHEREL], {Criterion.PLANCHEREL: 1e-30})
    assert not report['passed']
    assert report['failed'] == [Criterion.PLANCHEREL]
    entry = report['criteria'][Criterion.PLANCHEREL]
    assert entry['value'] > entry['tolerance']

def test_suite_config_tolerances(coarse_config):
    config = coarse_config.with_grids(tolerances={Criterion.SIMON: -1.0})
    assert not run_roundtrip_suite(config, [Criterion.SIMON])['passed']

def test_suite_unknown_names(coarse_config):
    with pytest.raises(DomainError):
        run_roundtrip_suite(coarse_config, ['nope'])
    with pytest.raises(DomainError):
        run_roundtrip_suite(coarse_config, [], {'nope': 1.0})

def test_roundtrip_grids(coarse_config):
    p = coarse_config.jacobi
    grids = _roundtrip_grids(coarse_config, p, ProblemParams(gamma=1.0))
    assert grids.spatial.x_max == coarse_config.x_max
    assert grids.spatial.n == coarse_config.n_x
    grids = _roundtrip_grids(coarse_config, p, ProblemParams(gamma=0.5))
    assert grids.spatial.x_max == 20.0
    assert grids.spatial.n == math.ceil(coarse_config.n_x * 20.0 / coarse_config.x_max)
    assert grids.spectral.n == coarse_config.n_lambda
    assert len(grids.time) == coarse_config.n_t

def test_criteria_registry():
    assert set(CRITERIA) == Criterion.values()
    assert len(CRITERIA) == 11

@pytest.mark.slow
def test_suite_defaults():
    report = run_roundtrip_suite()
    assert report['passed'], report['failed']

###########
# reports #
###########

def test_build_info():
    info = build_info()
    assert info['package'] == 'jisp'
    assert info['git'] is None or isinstance(info['git'], str)

def test_write_report(tmp_path):
    path = tmp_path / 'report.json'
    write_report({'ratio': float('nan'), 'rows': [1.5, float('inf')], 'ok': True}, str(path))
    assert json.loads(path.read_text()) == {'ratio': None, 'rows': [1.5, None], 'ok': True}
