# -*- coding: utf-8 -*-

"""Experiments module

Run configuration, the stability test table (zero problem vs data psi = eps exp(-x^2) in
the cosine case, heat equation on [0, 1]) and the acceptance suite.
"""

import csv
import json
import math
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import yaml
from scipy.special import gamma as gamma_fn

from . import __version__
from .core import (cfg, log, worker_count, BASE_DIR, JispError,
                   DomainError, DFLT_X_MAX, DFLT_N_X, DFLT_LAMBDA_MAX, DFLT_N_LAMBDA, DFLT_N_T)
from .utils import Config, LOV, flatten, unflatten, overlay, mappingtype
from .specfun import JacobiParams, jacobi_phi, harish_chandra_c, mittag_leffler
from .transform import (SampledFunction, composite_gauss_legendre, cosine_transform,
                        forward_transform, apply_operator, norm_l2_mu, norm_l2_nu, SQRT_2PI)
from .fractional import TimeSeries, build_time_grid, mode_ode_oracle, lemma_ratio
from .solvers import (ProblemParams, build_grids, direct_mode, direct_solve, isp_solve,
                      stability_functionals)

##########
# config #
##########

GRID_KEYS   = ('x_max', 'n_x', 'lambda_max', 'n_lambda', 'n_t')
CONFIG_KEYS = ({'jacobi.alpha', 'jacobi.beta', 'problem.gamma', 'problem.a', 'problem.m',
                'problem.T', 'output.dir', 'environment.threads'} |
               {'grids.' + k for k in GRID_KEYS})

@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI run or suite run depends on
    """
    jacobi: JacobiParams = field(default_factory=JacobiParams)
    problem: ProblemParams = field(default_factory=ProblemParams)
    x_max: float = DFLT_X_MAX
    n_x: int = DFLT_N_X
    lambda_max: float = DFLT_LAMBDA_MAX
    n_lambda: int = DFLT_N_LAMBDA
    n_t: int = DFLT_N_T
    output_dir: str = 'out'
    tolerances: dict = field(default_factory=dict, hash=False)
    threads: int = None

    def __post_init__(self):
        if self.threads is not None and self.threads < 0:
            raise DomainError("environment.threads must be >= 0 (got %d)" % (self.threads))

    @classmethod
    def from_dict(cls, data):
        """
        :param data: nested or dotted-key dict (sections jacobi, problem, grids, output,
            tolerances, environment)
        :return: RunConfig
        :raises DomainError: unknown keys or invalid values
        """
        flat = flatten(data)
        tolerances = {}
        for key in list(flat):
            if key.startswith('tolerances.'):
                value = flat.pop(key)
                try:
                    tolerances[key.split('.', 1)[1]] = float(value)
                except (TypeError, ValueError):
                    raise DomainError("Bad tolerance for %s: %r" % (key, value))
        flat.pop('tolerances', None)
        unknown = set(flat) - CONFIG_KEYS
        if unknown:
            raise DomainError("Unknown config key(s): %s" % (', '.join(sorted(unknown))))
        nested = unflatten(flat)
        jac = nested.get('jacobi', {})
        prob = nested.get('problem', {})
        grids = nested.get('grids', {})
        threads = nested.get('environment', {}).get('threads')
        try:
            return cls(jacobi=JacobiParams(**jac),
                       problem=ProblemParams(**prob),
                       x_max=float(grids.get('x_max', DFLT_X_MAX)),
                       n_x=int(grids.get('n_x', DFLT_N_X)),
                       lambda_max=float(grids.get('lambda_max', DFLT_LAMBDA_MAX)),
                       n_lambda=int(grids.get('n_lambda', DFLT_N_LAMBDA)),
                       n_t=int(grids.get('n_t', DFLT_N_T)),
                       output_dir=str(nested.get('output', {}).get('dir', 'out')),
                       tolerances=tolerances,
                       threads=None if threads is None else int(threads))
        except (TypeError, ValueError) as e:
            if isinstance(e, DomainError):
                raise
            raise DomainError("Bad config value: %s" % (e))

    @classmethod
    def load(cls, path=None, profile=None, overrides=None):
        """Built-in config (profile overlaid on 'default'), then the user file, then
        overrides (dotted keys, None values skipped)

        :param path: [optional] user YAML config file
        :param profile: [optional] profile name
        :param overrides: [optional] dict of dotted keys (from CLI flags)
        :return: RunConfig
        """
        user = {}
        if path:
            with open(path) as f:
                try:
                    user = yaml.safe_load(f) or {}
                except yaml.YAMLError as e:
                    raise DomainError("Malformed YAML in %s: %s" % (path, e))
            if not mappingtype(user):
                raise DomainError("Config file %s must hold a mapping" % (path))
        # a profile may live in the built-in config, the user file, or both
        in_user = bool(profile) and 'default' in user and profile in user
        try:
            data = cfg.profile(None if in_user and profile not in cfg.profile_names() else profile)
            if 'default' in user:
                user = Config(path).profile(profile if in_user else None)
            if user:
                data = overlay(data, unflatten(user))
            if overrides:
                data = overlay(data, unflatten({k: v for k, v in overrides.items() if v is not None}))
        except RuntimeError as e:
            raise DomainError(str(e))
        return cls.from_dict(data)

    def with_grids(self, **kwargs):
        return replace(self, **kwargs)

    def build_grids(self, p=None, q=None):
        return build_grids(p or self.jacobi, q or self.problem, self.x_max, self.n_x,
                           self.lambda_max, self.n_lambda, self.n_t)

    def config_info(self):
        return {'jacobi': self.jacobi.params_info(),
                'problem': self.problem.params_info(),
                'grids': {k: getattr(self, k) for k in GRID_KEYS},
                'output_dir': self.output_dir,
                'tolerances': dict(self.tolerances),
                'threads': self.threads}

def build_info():
    """Package version plus `git describe` of the checkout (None outside a repo)
    """
    try:
        res = subprocess.run(['git', 'describe', '--always', '--dirty', '--tags'], cwd=BASE_DIR,
                             capture_output=True, text=True, check=True, timeout=10)
        describe = res.stdout.strip() or None
    except (OSError, subprocess.SubprocessError):
        describe = None
    return {'package': 'jisp', 'version': __version__, 'git': describe}

def _json_safe(val):
    if isinstance(val, float) and not math.isfinite(val):
        return None
    if isinstance(val, dict):
        return {k: _json_safe(v) for k, v in val.items()}
    if isinstance(val, (list, tuple)):
        return [_json_safe(v) for v in val]
    if isinstance(val, (np.floating, np.integer, np.bool_)):
        return _json_safe(val.item())
    return val

def write_report(report, path):
    """
    :param report: dict (non-finite floats written as null)
    :param path: output JSON path
    """
    with open(path, 'w') as f:
        json.dump(_json_safe(report), f, indent=2)

###################
# stability table #
###################

DFLT_EPSILONS = (1.0, 0.2, 0.02)

# reference values of the stability test (psi, u, f columns)
REFERENCE_TABLE = {1.0:  (1.5, 0.75, 1.0474),
                   0.2:  (0.06, 0.03, 0.041897),
                   0.02: (0.0006, 0.0003, 0.0004)}

# leading factor on the psi column of the symbolic pipeline
APPENDIX_PSI_FACTOR = 40.0

TABLE_COLUMNS = ('epsilon', 'norm_psi_diff_sq', 'norm_u_diff_sq', 'norm_f_diff_sq',
                 'norm_psi_appendix', 'norm_u_appendix', 'norm_f_appendix')

STABILITY_JACOBI  = JacobiParams(-0.5, -0.5)
STABILITY_PROBLEM = ProblemParams(gamma=1.0, a=0.0, m=0.0, T=1.0)

@dataclass(frozen=True)
class StabilityRow:
    epsilon: float
    norm_psi_diff_sq: float
    norm_u_diff_sq: float
    norm_f_diff_sq: float
    norm_psi_appendix: float = float('nan')
    norm_u_appendix: float = float('nan')
    norm_f_appendix: float = float('nan')
    ratio_u: float = float('nan')
    ratio_f: float = float('nan')
    t_argmax: int = -1
    coef_min: float = float('nan')
    coef_max: float = float('nan')

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise DomainError("epsilon must be > 0 (got %s)" % (self.epsilon))
        for name in ('norm_psi_diff_sq', 'norm_u_diff_sq', 'norm_f_diff_sq'):
            if not getattr(self, name) >= 0.0:
                raise DomainError("%s must be >= 0" % (name))

    def row_info(self):
        return dict(self.__dict__)

def appendix_norms(epsilon, grids):
    """Squared norms of the stability test computed the way the symbolic pipeline does:
    cosine transforms, density 4/sqrt(2 pi), leading factor 40 on psi

      psi^(lambda) = (2 pi)^-1/2 int cos(lambda x) eps exp(-x^2) dx
      u^(t, lambda) = psi^ (1 - exp(-lambda^2 t)) / (1 - exp(-lambda^2))
      f^(lambda) = lambda^2 psi^ / (1 - exp(-lambda^2))

    :param epsilon: noise level
    :param grids: SolverGrids (spatial grid, spectral range and time grid are used)
    :return: tuple (norm_psi, norm_u, norm_f)
    """
    xg, sg, tg = grids.spatial, grids.spectral, grids.time
    lam, w = composite_gauss_legendre(sg.lambda_max, sg.n)
    psi = SampledFunction.from_callable(xg, lambda x: epsilon * np.exp(-x * x))
    psi_hat = cosine_transform(psi, lam)
    dens = w * 4.0 / SQRT_2PI
    lam2 = lam * lam
    denom = -np.expm1(-lam2)
    norm_psi = APPENDIX_PSI_FACTOR * float(np.dot(dens, lam2 ** 2 * psi_hat ** 2))
    coef = -np.expm1(-lam2[None, :] * tg.nodes[:, None]) / denom[None, :]
    norm_u = float(np.max((dens[None, :] * lam2[None, :] ** 2 * (coef * psi_hat[None, :]) ** 2).sum(axis=1)))
    f_hat = lam2 * psi_hat / denom
    norm_f = float(np.dot(dens, f_hat ** 2))
    return norm_psi, norm_u, norm_f

def run_stability_table(epsilons=DFLT_EPSILONS, config=None):
    """Stability test: the zero problem (phi = psi = 0, so u = f = 0) against the data
    phi = 0, psi = eps exp(-x^2), cosine case, gamma = 1, a = m = 0, T = 1

    :param epsilons: noise levels (> 0)
    :param config: [optional] RunConfig, only its grid sizes are used
    :return: list of StabilityRow, in the order of epsilons
    """
    config = config or RunConfig()
    epsilons = [float(e) for e in epsilons]
    for eps in epsilons:
        if not eps > 0.0:
            raise DomainError("epsilon must be > 0 (got %s)" % (eps))
    p, q = STABILITY_JACOBI, STABILITY_PROBLEM
    grids = config.build_grids(p, q)
    xg = grids.spatial
    zero = SampledFunction.zeros(xg)
    gauss = SampledFunction.from_callable(xg, lambda x: np.exp(-x * x))
    base = isp_solve(q, p, zero, zero, grids)

    def _row(eps):
        psi = eps * gauss
        sol = isp_solve(q, p, zero, psi, grids)
        rep = stability_functionals(q, p, base, sol, (zero, zero), (zero, psi))
        appx = appendix_norms(eps, grids)
        interior = sol.coefficients[1:-1]
        log.debug("stability row eps=%g: psi %.6g, u %.6g, f %.6g" %
                  (eps, rep.norm_psi_diff_sq, rep.norm_u_diff_sq, rep.norm_f_diff_sq))
        return StabilityRow(eps, rep.norm_psi_diff_sq, rep.norm_u_diff_sq, rep.norm_f_diff_sq,
                            *appx, rep.ratio_u, rep.ratio_f, rep.t_argmax,
                            float(np.min(interior)), float(np.max(interior)))

    with ThreadPoolExecutor(max_workers=max(1, min(worker_count(config.threads), len(epsilons)))) as pool:
        rows = list(pool.map(_row, epsilons))
    return rows

def write_stability_table(rows, path):
    """
    :param rows: list of StabilityRow
    :param path: CSV path
    """
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(TABLE_COLUMNS)
        for row in rows:
            writer.writerow(['%.17g' % getattr(row, col) for col in TABLE_COLUMNS])

def table_ratios(rows):
    """Column ratios of every row against the eps = 1 row (or the first row)

    :return: dict {epsilon: (psi, u, f)}
    """
    ref = _reference_row(rows)
    cols = ('norm_psi_diff_sq', 'norm_u_diff_sq', 'norm_f_diff_sq')
    return {r.epsilon: tuple(getattr(r, c) / getattr(ref, c) for c in cols) for r in rows}

def _reference_row(rows):
    return next((r for r in rows if r.epsilon == 1.0), rows[0])

####################
# acceptance suite #
####################

Criterion = LOV(['COSINE',
                 'C_FUNCTION',
                 'PLANCHEREL',
                 'SIMON',
                 'LEMMA',
                 'MODE_ORACLE',
                 'CLASSICAL_LIMIT',
                 'ISP_ROUNDTRIP',
                 'STEADY_STATE',
                 'TABLE_RATIOS',
                 'STABILITY'], 'lower')

ORACLE_SIZES   = (256, 512, 1024, 2048, 4096)
ORACLE_REF     = 8192
ORACLE_SLACK   = 0.9
PLANCHEREL_KS  = np.linspace(0.5, 2.5, 10)
LEMMA_SAMPLES  = 1000
SUITE_SEED     = 20210101
ROUNDTRIP_X_MAX = 20.0

class SuiteContext(object):
    """Per-run state shared by the criteria (config, cached stability rows)
    """
    def __init__(self, config, rows=None):
        self.config = config
        self._rows = rows

    def stability_rows(self):
        if self._rows is None:
            self._rows = run_stability_table(DFLT_EPSILONS, self.config)
        return self._rows

def _check_cosine(ctx):
    lam = np.linspace(0.0, 20.0, 100)
    x = np.linspace(0.0, 5.0, 100)
    phi = jacobi_phi(JacobiParams(-0.5, -0.5), lam[:, None], x[None, :])
    return float(np.max(np.abs(phi - np.cos(np.outer(lam, x))))), {}

def _check_c_function(ctx):
    lam = np.array([0.1, 0.5, 1.0, 5.0, 10.0, 50.0])
    dev = np.abs(harish_chandra_c(JacobiParams(-0.5, -0.5), lam) - 0.5)
    return float(np.max(dev)), {'lambda': lam.tolist(), 'deviation': dev.tolist()}

def _check_plancherel(ctx):
    cfg_ = ctx.config
    worst = 0.0
    detail = {}
    for p in (JacobiParams(-0.5, -0.5), JacobiParams(0.0, 0.0)):
        grids = cfg_.build_grids(p)
        defects = []
        for k in PLANCHEREL_KS:
            f = SampledFunction.from_callable(grids.spatial, lambda x: np.exp(-k * x * x))
            n_mu = norm_l2_mu(f)
            n_nu = norm_l2_nu(forward_transform(f, grids.spectral))
            defects.append(abs(n_nu - n_mu) / n_mu)
        detail[str((p.alpha, p.beta))] = max(defects)
        worst = max(worst, max(defects))
    return worst, detail

def _check_simon(ctx):
    gammas = np.linspace(0.02, 0.98, 50)
    ts = np.linspace(0.6, 30.0, 50)
    worst = -np.inf
    for g in gammas:
        e = mittag_leffler(g, 1.0, -ts)
        lower = 1.0 / (1.0 + gamma_fn(1.0 - g) * ts)
        upper = 1.0 / (1.0 + ts / gamma_fn(1.0 + g))
        worst = max(worst, float(np.max(np.maximum(lower - e, e - upper))))
    return worst, {}

def _check_lemma(ctx):
    rng = np.random.default_rng(SUITE_SEED)
    worst = -np.inf
    for _ in range(LEMMA_SAMPLES):
        g = rng.uniform(0.05, 1.0)
        lam = 10.0 ** rng.uniform(-2.0, 2.0)
        T = rng.uniform(0.1, 10.0)
        t = T * rng.uniform(0.01, 0.99)
        r1, r2 = lemma_ratio(g, lam, t, T)
        worst = max(worst, -r1, r1 - 1.0, -1.0 - r2, r2, abs(r2 - (r1 - 1.0)))
    return worst, {}

def _manufactured_rhs(tg, gamma, B):
    t = tg.nodes
    return TimeSeries(tg, 2.0 * t ** (2.0 - gamma) / gamma_fn(3.0 - gamma) + B * t * t)

def _check_mode_oracle(ctx):
    # u(t) = t^2 solves D^gamma u + B u = rhs with u(0) = 0
    p = JacobiParams(-0.5, -0.5)
    worst = 0.0
    detail = {}
    for gamma in (0.3, 0.5, 0.7):
        q = ProblemParams(gamma=gamma, a=0.0, m=0.0, T=1.0)
        required = ORACLE_SLACK * 2.0 ** (2.0 - gamma)
        for B in (0.5, 2.0, 10.0):
            ref_grid = build_time_grid(1.0, ORACLE_REF + 1)
            ref = direct_mode(q, p, math.sqrt(B), _manufactured_rhs(ref_grid, gamma, B), 0.0).values[-1]
            errs = []
            for n in ORACLE_SIZES:
                tg = build_time_grid(1.0, n + 1)
                u = mode_ode_oracle(B, _manufactured_rhs(tg, gamma, B), 0.0, gamma)
                errs.append(abs(u.values[-1] - ref))
            ratios = [a / b for a, b in zip(errs[:-1], errs[1:])]
            detail['gamma=%g,B=%g' % (gamma, B)] = {'ratios': ratios, 'direct_mode_error': abs(ref - 1.0)}
            worst = max(worst, required / min(ratios))
    return worst, detail

def _check_classical_limit(ctx):
    p = JacobiParams(-0.5, -0.5)
    q = ProblemParams(gamma=1.0, a=0.0, m=0.0, T=1.0)
    tg = build_time_grid(1.0, 101)
    t = tg.nodes
    worst = 0.0
    for lam in (0.5, 1.0, 2.0, 5.0):
        B = lam * lam
        phi0 = 0.7
        const = direct_mode(q, p, lam, TimeSeries(tg, np.full(len(tg), 1.3)), phi0).values
        exact = 1.3 / B * -np.expm1(-B * t) + phi0 * np.exp(-B * t)
        linear = direct_mode(q, p, lam, TimeSeries(tg, t), phi0).values
        exact_lin = t / B - 1.0 / B ** 2 + (phi0 + 1.0 / B ** 2) * np.exp(-B * t)
        worst = max(worst, float(np.max(np.abs(const - exact))), float(np.max(np.abs(linear - exact_lin))))
    return worst, {}

def _roundtrip_grids(cfg_, p, q):
    """Config grids, widened to ROUNDTRIP_X_MAX at the same node density when gamma < 1
    (u(T) then decays only like exp(-c x^(2/(2-gamma))))
    """
    if q.gamma == 1.0 or cfg_.x_max >= ROUNDTRIP_X_MAX:
        return cfg_.build_grids(p, q)
    n_x = int(math.ceil(cfg_.n_x * ROUNDTRIP_X_MAX / cfg_.x_max))
    return build_grids(p, q, ROUNDTRIP_X_MAX, n_x, cfg_.lambda_max, cfg_.n_lambda, cfg_.n_t)

def _check_isp_roundtrip(ctx):
    cfg_ = ctx.config
    p = cfg_.jacobi
    worst = 0.0
    detail = {}
    for gamma in (0.5, 1.0):
        for a, m in ((0.0, 0.0), (0.5, 2.0)):
            q = ProblemParams(gamma=gamma, a=a, m=m, T=cfg_.problem.T)
            grids = _roundtrip_grids(cfg_, p, q)
            xg = grids.spatial
            f_star = SampledFunction.from_callable(xg, lambda x: np.exp(-x * x))
            zero = SampledFunction.zeros(xg)
            psi = direct_solve(q, p, f_star, zero, grids).u[-1]
            sol = isp_solve(q, p, zero, psi, grids)
            err = norm_l2_mu(sol.f - f_star) / norm_l2_mu(f_star)
            detail['gamma=%g,a=%g,m=%g' % (gamma, a, m)] = err
            worst = max(worst, err)
    return worst, detail

def _check_steady_state(ctx):
    cfg_ = ctx.config
    p = cfg_.jacobi
    worst = 0.0
    for q in (cfg_.problem, ProblemParams(gamma=0.5, a=0.5, m=2.0, T=cfg_.problem.T)):
        grids = cfg_.build_grids(p, q)
        phi = SampledFunction.from_callable(grids.spatial, lambda x: np.exp(-x * x))
        sol = isp_solve(q, p, phi, phi, grids)
        target = apply_operator(sol.phi_hat, q.m).values
        scale = max(float(np.max(np.abs(target))), 1e-300)
        worst = max(worst, float(np.max(np.abs(sol.f_hat.values - target))) / scale,
                    float(np.max(np.abs(sol.modes - sol.phi_hat.values[None, :]))))
    return worst, {}

def _check_table_ratios(ctx):
    rows = ctx.stability_rows()
    ratios = table_ratios(rows)
    eps_ref = _reference_row(rows).epsilon
    worst = 0.0
    for eps, cols in ratios.items():
        target = (eps / eps_ref) ** 2
        worst = max(worst, max(abs(c / target - 1.0) for c in cols))
    n_t = ctx.config.n_t
    attained_at_T = all(r.t_argmax == n_t - 1 for r in rows)
    if not attained_at_T:
        worst = max(worst, 1.0)
    detail = {'ratios': {str(e): list(c) for e, c in ratios.items()},
              'printed_ratios': {str(e): [v / w for v, w in zip(REFERENCE_TABLE[e], REFERENCE_TABLE[1.0])]
                                 for e in REFERENCE_TABLE},
              'sup_attained_at_T': attained_at_T}
    return worst, detail

def _check_stability(ctx):
    rows = ctx.stability_rows()
    worst = -np.inf
    for r in rows:
        if not math.isfinite(r.ratio_f):
            return math.inf, {'epsilon': r.epsilon, 'ratio_f': None}
        # r2 = r1 - 1, so r1 in [0, 1] covers both bounds
        worst = max(worst, -r.coef_min, r.coef_max - 1.0, r.ratio_u - 1.0 - 1e-9)
    detail = {'ratio_u': [r.ratio_u for r in rows], 'ratio_f': [r.ratio_f for r in rows]}
    return worst, detail

@dataclass(frozen=True)
class CriterionSpec:
    measure: object
    tolerance: float
    strict: bool = False

CRITERIA = {
    Criterion.COSINE:          CriterionSpec(_check_cosine, 1e-9),
    Criterion.C_FUNCTION:      CriterionSpec(_check_c_function, 1e-10),
    Criterion.PLANCHEREL:      CriterionSpec(_check_plancherel, 1e-4),
    Criterion.SIMON:           CriterionSpec(_check_simon, 0.0, strict=True),
    Criterion.LEMMA:           CriterionSpec(_check_lemma, 1e-14),
    Criterion.MODE_ORACLE:     CriterionSpec(_check_mode_oracle, 1.0),
    Criterion.CLASSICAL_LIMIT: CriterionSpec(_check_classical_limit, 1e-10),
    Criterion.ISP_ROUNDTRIP:   CriterionSpec(_check_isp_roundtrip, 1e-4),
    Criterion.STEADY_STATE:    CriterionSpec(_check_steady_state, 1e-12),
    Criterion.TABLE_RATIOS:    CriterionSpec(_check_table_ratios, 1e-3),
    Criterion.STABILITY:       CriterionSpec(_check_stability, 0.0),
}

def run_roundtrip_suite(config=None, criteria=None, tolerances=None, rows=None):
    """Run acceptance criteria; failures (including numerical errors) are report entries

    :param config: [optional] RunConfig (default: built-in defaults)
    :param criteria: [optional] criterion names (default: all, in order); empty -> no entries
    :param tolerances: [optional] {name: tolerance} on top of config.tolerances
    :param rows: [optional] stability rows already computed for the default epsilons
    :return: dict report
    :raises DomainError: unknown criterion name
    """
    config = config or RunConfig()
    names = list(CRITERIA) if criteria is None else list(criteria)
    tol = {name: spec.tolerance for name, spec in CRITERIA.items()}
    tol.update(config.tolerances)
    tol.update(tolerances or {})
    unknown = (set(names) | set(tol)) - Criterion.values()
    if unknown:
        raise DomainError("Unknown criterion name(s): %s" % (', '.join(sorted(unknown))))

    ctx = SuiteContext(config, rows)
    results = {}
    for name in names:
        spec = CRITERIA[name]
        start = time.perf_counter()
        try:
            value, detail = spec.measure(ctx)
            passed = value < tol[name] if spec.strict else value <= tol[name]
            entry = {'value': value, 'tolerance': tol[name], 'passed': bool(passed), 'detail': detail}
        except (JispError, ArithmeticError) as e:
            log.outlier("Criterion %s raised %s: %s" % (name, type(e).__name__, e))
            entry = {'value': None, 'tolerance': tol[name], 'passed': False,
                     'error': "%s: %s" % (type(e).__name__, e)}
        entry['seconds'] = round(time.perf_counter() - start, 3)
        results[name] = entry
        log.info("Criterion %-16s %s (value %s, tolerance %s)" %
                 (name, 'PASS' if entry['passed'] else 'FAIL', entry['value'], entry['tolerance']))

    failed = [name for name, entry in results.items() if not entry['passed']]
    return {'criteria': results,
            'passed': not failed,
            'failed': failed,
            'config': config.config_info(),
            'build': build_info()}
