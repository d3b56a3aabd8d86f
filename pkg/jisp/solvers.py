# -*- coding: utf-8 -*-

"""Solvers module

Direct and inverse source problems for

    D^gamma (u - a Delta u) - Delta u + m u = f(x),   u(0, x) = phi(x),   [u(T, x) = psi(x)]

with Delta the Jacobi operator.  Both are solved mode by mode in the Fourier-Jacobi
spectral variable, where the equation becomes

    D^gamma u^(t) + B(lambda) u^(t) = f^(t) / (1 + a (lambda^2 + rho^2)).
"""

import os
import os.path
import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (log, DomainError, ParamMismatchError, GridMismatchError, ConvergenceError,
                   DegenerateModeError, HNormError,
                   DFLT_X_MAX, DFLT_N_X, DFLT_LAMBDA_MAX, DFLT_N_LAMBDA, DFLT_N_T)
from .specfun import ml_kernel_B
from .transform import (SampledFunction, SpectralFunction, build_spatial_grid, build_spectral_grid,
                        kernel_matrix, forward_transform, norm_l2_mu, norm_H, write_csv, CSV_FMT)
from .fractional import (TimeSeries, build_time_grid, caputo_values, relaxation,
                         relaxation_integral, relaxation_integral2, mode_ratios)

# stand-in for lambda = 0 when lambda^2 + rho^2 + m = 0 (node carries zero nu-weight)
DEGENERATE_LAMBDA = 1e-8

#########
# types #
#########

@dataclass(frozen=True)
class ProblemParams:
    """(gamma, a, m, T) of the fractional pseudo-parabolic equation
    """
    gamma: float = 1.0
    a: float = 0.0
    m: float = 0.0
    T: float = 1.0

    def __post_init__(self):
        for name in ('gamma', 'a', 'm', 'T'):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise DomainError("%s must be finite" % (name))
            object.__setattr__(self, name, val)
        if not (0.0 < self.gamma <= 1.0):
            raise DomainError("0 < gamma <= 1 violated (gamma=%g)" % (self.gamma))
        if self.a < 0.0:
            raise DomainError("a >= 0 violated (a=%g)" % (self.a))
        if self.m < 0.0:
            raise DomainError("m >= 0 violated (m=%g)" % (self.m))
        if self.T <= 0.0:
            raise DomainError("T > 0 violated (T=%g)" % (self.T))

    def params_info(self):
        return {'gamma': self.gamma, 'a': self.a, 'm': self.m, 'T': self.T}

@dataclass(frozen=True, eq=False)
class SolverGrids:
    """Spatial, spectral and time grids of one run
    """
    spatial: object
    spectral: object
    time: object

    def __post_init__(self):
        if self.spatial.params != self.spectral.params:
            raise ParamMismatchError("Spatial and spectral grids built for different Jacobi parameters")

    @property
    def params(self):
        return self.spatial.params

    @property
    def key(self):
        return (self.spatial.key, self.spectral.key, self.time.key)

    def check_same(self, other):
        if self.key != other.key:
            raise GridMismatchError("Solutions computed on different grids")

    def grids_info(self):
        return {'spatial': self.spatial.grid_info(),
                'spectral': self.spectral.grid_info(),
                'time': {'T': self.time.T, 'n': self.time.n}}

def build_grids(p, q, x_max=DFLT_X_MAX, n_x=DFLT_N_X, lambda_max=DFLT_LAMBDA_MAX,
                n_lambda=DFLT_N_LAMBDA, n_t=DFLT_N_T):
    """
    :return: SolverGrids for JacobiParams p and ProblemParams q (time grid on [0, q.T])
    """
    return SolverGrids(build_spatial_grid(p, x_max, n_x),
                       build_spectral_grid(p, lambda_max, n_lambda),
                       build_time_grid(q.T, n_t))

def _check_setup(q, p, grids, *funcs):
    if grids.params != p:
        raise ParamMismatchError("Grids built for %s, problem uses %s" % (grids.params, p))
    if grids.time.T != q.T:
        raise GridMismatchError("Time grid ends at %g, problem has T = %g" % (grids.time.T, q.T))
    for fn in funcs:
        grids.spatial.check_same(fn.grid)

def _modes_norm_H_sq(grid, modes):
    """Squared H-norm of each row of a (time x lambda) array
    """
    return (grid.weights[None, :] * (grid.eigenvalues[None, :] * modes) ** 2).sum(axis=1)

def _slices(xg, sg, modes):
    """Inverse transform of every row of a (time x lambda) array
    """
    values = (modes * sg.weights[None, :]) @ kernel_matrix(xg, sg)
    return [SampledFunction(xg, row) for row in values]

##################
# direct problem #
##################

def _direct_modes(q, p, lam, f_hat, phi_hat, t):
    """Mode solutions for sources sampled in time

    :param lam: (n_lambda,) nodes
    :param f_hat: (n_t, n_lambda) source modes
    :param phi_hat: (n_lambda,) initial modes
    :param t: (n_t,) uniform time nodes starting at 0
    :return: (n_t, n_lambda) array
    """
    B = ml_kernel_B(p, q, lam)
    scale = 1.0 + q.a * (lam * lam + p.rho * p.rho)
    g = f_hat / scale[None, :]
    tt = t[:, None]
    modes = phi_hat[None, :] * relaxation(q.gamma, B[None, :], tt)
    modes += g[0][None, :] * relaxation_integral(q.gamma, B[None, :], tt)

    varying = np.flatnonzero(np.any(g != g[0][None, :], axis=0))
    if varying.size:
        # integrated by parts: int K(t - tau) g'(tau) dtau with piecewise-linear g
        dt = t[1] - t[0]
        n_t = len(t)
        D = relaxation_integral2(q.gamma, B[None, varying], tt)
        dD = np.diff(D, axis=0)
        slopes = np.diff(g[:, varying], axis=0) / dt
        for col in range(varying.size):
            conv = np.convolve(slopes[:, col], dD[:, col])[:n_t - 1]
            modes[1:, varying[col]] += conv
    return modes

def direct_mode(q, p, lam, f_hat_t, phi_hat):
    """Solution of one spectral mode of the direct problem

      u^(t) = int_0^t (t-tau)^{gamma-1} E_{gamma,gamma}(-B (t-tau)^gamma) f^(tau) / (1 + a(lambda^2+rho^2)) dtau
              + phi^ E_{gamma,1}(-B t^gamma)

    :param q: ProblemParams
    :param p: JacobiParams
    :param lam: spectral variable >= 0
    :param f_hat_t: TimeSeries of the source mode (piecewise linear in time)
    :param phi_hat: initial mode value
    :return: TimeSeries
    """
    if lam < 0.0:
        raise DomainError("direct_mode requires lambda >= 0")
    tg = f_hat_t.grid
    modes = _direct_modes(q, p, np.array([float(lam)]), f_hat_t.values[:, None],
                          np.array([float(phi_hat)]), tg.nodes)
    return TimeSeries(tg, modes[:, 0])

@dataclass(frozen=True, eq=False)
class DirectSolution:
    """u(t_k, .) and its modes for every time node, plus diagnostics
    """
    q: object
    p: object
    grids: SolverGrids
    u: list = field(repr=False)
    modes: np.ndarray = field(repr=False)
    phi_hat: SpectralFunction = field(repr=False)
    f_hat: np.ndarray = field(repr=False)
    diagnostics: dict

    @property
    def u_hat(self):
        return [SpectralFunction(self.grids.spectral, row) for row in self.modes]

    def spectral_columns(self):
        return {'f_hat': self.f_hat[-1], 'phi_hat': self.phi_hat.values, 'u_hat_T': self.modes[-1]}

    def solution_info(self):
        return {'problem': 'direct',
                'jacobi': self.p.params_info(),
                'params': self.q.params_info(),
                'grids': self.grids.grids_info(),
                'diagnostics': self.diagnostics}

def direct_solve(q, p, f, phi, grids):
    """Direct problem: transform, solve every mode, transform back at every time node

    :param q: ProblemParams
    :param p: JacobiParams
    :param f: SampledFunction (time-constant source) or sequence of SampledFunction, one
        per time node (piecewise linear in time)
    :param phi: SampledFunction, initial data
    :param grids: SolverGrids
    :return: DirectSolution
    """
    sources = [f] if isinstance(f, SampledFunction) else list(f)
    if len(sources) not in (1, len(grids.time)):
        raise GridMismatchError("Source has %d time slices, time grid has %d nodes" %
                                (len(sources), len(grids.time)))
    _check_setup(q, p, grids, phi, *sources)
    xg, sg, tg = grids.spatial, grids.spectral, grids.time
    log.debug("direct_solve: %s, %s, %d source slice(s)" % (p, q, len(sources)))

    K = kernel_matrix(xg, sg)
    phi_hat = SpectralFunction(sg, K @ (xg.weights * phi.values))
    f_hat = np.vstack([K @ (xg.weights * s.values) for s in sources])
    if len(sources) == 1:
        f_hat = np.repeat(f_hat, len(tg), axis=0)
    modes = _direct_modes(q, p, sg.nodes, f_hat, phi_hat.values, tg.nodes)
    if not np.all(np.isfinite(modes)):
        raise ConvergenceError("Non-finite mode solution")
    u = _slices(xg, sg, modes)

    B = ml_kernel_B(p, q, sg.nodes)
    rhs = f_hat / (1.0 + q.a * sg.eigenvalues)[None, :]
    dgamma = rhs - B[None, :] * modes
    resid = caputo_values(modes, tg.dt, q.gamma)[-1] - dgamma[-1]
    phi_norm = norm_l2_mu(phi)
    init_err = norm_l2_mu(u[0] - phi)
    diagnostics = {
        'norm_H': np.sqrt(_modes_norm_H_sq(sg, modes)).tolist(),
        'norm_dgamma_nu': np.sqrt((sg.weights[None, :] * dgamma ** 2).sum(axis=1)).tolist(),
        'initial_mismatch': init_err / phi_norm if phi_norm > 0.0 else init_err,
        'equation_residual_T': math.sqrt(float(np.dot(sg.weights, resid ** 2))),
        'equation_residual_T_max': float(np.max(np.abs(resid))),
    }
    log.debug("direct_solve: initial mismatch %.3g, equation residual at T %.3g" %
              (diagnostics['initial_mismatch'], diagnostics['equation_residual_T']))
    return DirectSolution(q, p, grids, u, modes, phi_hat, f_hat, diagnostics)

###################
# inverse problem #
###################

def _isp_modes(q, p, lam, phi_hat, psi_hat, r1, r2):
    """Vectorized inverse-problem modes u^(t) = r1 psi^ - r2 phi^, with the weights from
    isp_coefficients

    :return: tuple (modes (n_t, n_lambda), f_hat, C)
    """
    eig = lam * lam + p.rho * p.rho
    B = ml_kernel_B(p, q, lam)
    scale = 1.0 + q.a * eig
    KT = relaxation_integral(q.gamma, B, q.T)
    Q = B * KT
    # (psi - phi E_T) / K_T with 1 - E_T = B K_T
    f_hat = scale * ((psi_hat - phi_hat) / KT + B * phi_hat)
    C = (phi_hat - psi_hat) / Q
    modes = r1 * psi_hat[None, :] - r2 * phi_hat[None, :]
    return modes, f_hat, C

def isp_mode(q, p, lam, phi_hat, psi_hat, time_grid=None):
    """One spectral mode of the inverse source problem

      f^ = (lambda^2 + rho^2 + m) (psi^ - phi^ E_T) / (1 - E_T),   C = (phi^ - psi^) / (1 - E_T)
      u^(t) = f^ / (lambda^2 + rho^2 + m) + C E_{gamma,1}(-B t^gamma)

    with E_T = E_{gamma,1}(-B T^gamma).

    :param time_grid: [optional] TimeGrid on [0, q.T] (default DFLT_N_T nodes)
    :return: tuple (TimeSeries u^, f^, C)
    :raises DegenerateModeError: lambda^2 + rho^2 + m = 0
    """
    if lam < 0.0:
        raise DomainError("isp_mode requires lambda >= 0")
    if lam * lam + p.rho * p.rho + q.m == 0.0:
        raise DegenerateModeError("Mode lambda=%g carries no constraint on the source (rho = m = 0)" % (lam))
    tg = time_grid or build_time_grid(q.T)
    if tg.T != q.T:
        raise GridMismatchError("Time grid ends at %g, problem has T = %g" % (tg.T, q.T))
    lam = np.array([float(lam)])
    r1, r2 = isp_coefficients(q, p, lam, tg)
    modes, f_hat, C = _isp_modes(q, p, lam, np.array([float(phi_hat)]), np.array([float(psi_hat)]), r1, r2)
    return TimeSeries(tg, modes[:, 0]), float(f_hat[0]), float(C[0])

def isp_coefficients(q, p, lambdas, tg):
    """Weights r1 in [0, 1] and r2 = r1 - 1 in [-1, 0] of u^(t) = r1 psi^ - r2 phi^, for every
    time node and mode (lambda^2 + rho^2 + m must be > 0); r1 = 0 at t = 0 and r1 = 1 at T

    :return: tuple (r1, r2), arrays (n_t, n_lambda)
    """
    lam = np.asarray(lambdas, dtype=float)
    B = ml_kernel_B(p, q, lam)
    return mode_ratios(q.gamma, B[None, :], tg.nodes[:, None], q.T)

@dataclass(frozen=True, eq=False)
class IspSolution:
    """Recovered state u(t_k, .) and source f, with their spectral data
    """
    q: object
    p: object
    grids: SolverGrids
    u: list = field(repr=False)
    f: SampledFunction = field(repr=False)
    modes: np.ndarray = field(repr=False)
    f_hat: SpectralFunction = field(repr=False)
    C_hat: SpectralFunction = field(repr=False)
    phi_hat: SpectralFunction = field(repr=False)
    psi_hat: SpectralFunction = field(repr=False)
    coefficients: np.ndarray = field(repr=False)
    residuals: dict

    @property
    def u_hat(self):
        return [SpectralFunction(self.grids.spectral, row) for row in self.modes]

    def spectral_columns(self):
        return {'f_hat': self.f_hat.values, 'phi_hat': self.phi_hat.values,
                'psi_hat': self.psi_hat.values, 'C': self.C_hat.values}

    def solution_info(self):
        return {'problem': 'isp',
                'jacobi': self.p.params_info(),
                'params': self.q.params_info(),
                'grids': self.grids.grids_info(),
                'residuals': self.residuals}

def isp_solve(q, p, phi, psi, grids):
    """Inverse source problem: recover (u, f) from u(0) = phi and u(T) = psi

    :param q: ProblemParams
    :param p: JacobiParams
    :param phi: SampledFunction, initial data
    :param psi: SampledFunction, final-time (over-determination) data
    :param grids: SolverGrids
    :return: IspSolution
    :raises HNormError: transformed data has non-finite H-norm
    """
    _check_setup(q, p, grids, phi, psi)
    xg, sg, tg = grids.spatial, grids.spectral, grids.time
    phi_hat = forward_transform(phi, sg)
    psi_hat = forward_transform(psi, sg)
    for name, g in (('phi', phi_hat), ('psi', psi_hat)):
        if not math.isfinite(norm_H(g)):
            raise HNormError("H-norm of %s is not finite" % (name))

    lam = np.array(sg.nodes)
    degenerate = lam * lam + p.rho * p.rho + q.m == 0.0
    if degenerate.any():
        log.outlier("isp_solve: %d degenerate mode(s) evaluated at lambda = %g" % (degenerate.sum(), DEGENERATE_LAMBDA))
        lam[degenerate] = DEGENERATE_LAMBDA
    r1, r2 = isp_coefficients(q, p, lam, tg)
    modes, f_hat, C = _isp_modes(q, p, lam, phi_hat.values, psi_hat.values, r1, r2)
    if not (np.all(np.isfinite(modes)) and np.all(np.isfinite(f_hat))):
        raise ConvergenceError("Non-finite inverse-problem modes")

    f_hat = SpectralFunction(sg, f_hat)
    K = kernel_matrix(xg, sg)
    f = SampledFunction(xg, K.T @ (sg.weights * f_hat.values))
    u = _slices(xg, sg, modes)

    def _rel(err, ref):
        return err / ref if ref > 0.0 else err

    residuals = {
        'initial_mismatch': _rel(norm_l2_mu(u[0] - phi), norm_l2_mu(phi)),
        'terminal_mismatch': _rel(norm_l2_mu(u[-1] - psi), norm_l2_mu(psi)),
        'modes_initial_max': float(np.max(np.abs(modes[0] - phi_hat.values))),
        'modes_terminal_max': float(np.max(np.abs(modes[-1] - psi_hat.values))),
        'norm_H_phi': norm_H(phi_hat),
        'norm_H_psi': norm_H(psi_hat),
    }
    log.debug("isp_solve: %s, %s, terminal mismatch %.3g" % (p, q, residuals['terminal_mismatch']))
    return IspSolution(q, p, grids, u, f, modes, f_hat, SpectralFunction(sg, C),
                       phi_hat, psi_hat, r1, residuals)

#############
# stability #
#############

@dataclass(frozen=True)
class StabilityReport:
    norm_u_diff_sq: float
    norm_f_diff_sq: float
    norm_psi_diff_sq: float
    norm_phi_diff_sq: float
    ratio_u: float
    ratio_f: float
    degenerate: bool
    t_argmax: int
    norm_f_diff_sq_nu: float

    def report_info(self):
        return dict(self.__dict__)

def stability_functionals(q, p, sol1, sol2, data1, data2):
    """Squared distances between two inverse-problem solutions and their data

      ||u - u_d||^2 in C([0,T], H) (max over the time grid), ||f - f_d||^2 in L2(mu),
      ||psi - psi_d||^2 and ||phi - phi_d||^2 in H, and the ratios of the first two to
      the sum of the last two

    :param sol1: IspSolution
    :param sol2: IspSolution
    :param data1: (phi, psi) of sol1
    :param data2: (phi, psi) of sol2
    :return: StabilityReport (ratios nan and degenerate set when the data coincide)
    :raises GridMismatchError: solutions on different grids
    """
    sol1.grids.check_same(sol2.grids)
    if (sol1.q, sol1.p) != (q, p) or (sol2.q, sol2.p) != (q, p):
        raise DomainError("Solutions were computed for different problem parameters")
    grids = sol1.grids
    sg = grids.spectral

    u_sq = _modes_norm_H_sq(sg, sol1.modes - sol2.modes)
    t_argmax = int(np.argmax(u_sq))
    norm_u_sq = float(u_sq[t_argmax])
    norm_f_sq = norm_l2_mu(sol1.f - sol2.f) ** 2
    norm_f_sq_nu = float(np.dot(sg.weights, (sol1.f_hat.values - sol2.f_hat.values) ** 2))
    (phi1, psi1), (phi2, psi2) = data1, data2
    norm_phi_sq = norm_H(forward_transform(phi1 - phi2, sg)) ** 2
    norm_psi_sq = norm_H(forward_transform(psi1 - psi2, sg)) ** 2

    denom = norm_psi_sq + norm_phi_sq
    degenerate = denom == 0.0
    if degenerate:
        log.outlier("stability_functionals: identical data, ratios undefined")
        ratio_u = ratio_f = float('nan')
    else:
        ratio_u = norm_u_sq / denom
        ratio_f = norm_f_sq / denom
        if not (math.isfinite(ratio_u) and math.isfinite(ratio_f)):
            raise ConvergenceError("Non-finite stability ratios")
        if ratio_u > 1.0 + 1e-9:
            log.outlier("stability_functionals: r_u = %.12g exceeds 1" % (ratio_u))
    return StabilityReport(norm_u_sq, norm_f_sq, norm_psi_sq, norm_phi_sq, ratio_u, ratio_f,
                           degenerate, t_argmax, norm_f_sq_nu)

#############
# artifacts #
#############

def write_solution(sol, out_dir):
    """Write u_t<k>.csv per time node, f.csv (if the solution has a single source),
    spectral.csv and report.json

    :param sol: DirectSolution or IspSolution
    :param out_dir: directory (created if missing)
    """
    os.makedirs(out_dir, exist_ok=True)
    for k, u_k in enumerate(sol.u):
        write_csv(u_k, os.path.join(out_dir, 'u_t%d.csv' % (k)))

    if isinstance(sol, IspSolution):
        write_csv(sol.f, os.path.join(out_dir, 'f.csv'))

    columns = sol.spectral_columns()
    with open(os.path.join(out_dir, 'spectral.csv'), 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['lambda'] + list(columns))
        for j, lam in enumerate(sol.grids.spectral.nodes):
            writer.writerow([CSV_FMT % lam] + [CSV_FMT % col[j] for col in columns.values()])

    with open(os.path.join(out_dir, 'report.json'), 'w') as f:
        json.dump(sol.solution_info(), f, indent=2)
    log.info("Wrote %d time slices to %s" % (len(sol.u), out_dir))
