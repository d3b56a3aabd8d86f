# -*- coding: utf-8 -*-

"""Fractional calculus module

Left-sided Riemann-Liouville integrals/derivatives and Caputo derivatives on uniform time
grids, the Mittag-Leffler relaxation kernels of the mode equation

    D^gamma u(t) + B u(t) = r(t),   u(0) = u0,

an implicit L1 stepping oracle for that equation, and the ratio bounds used by the
inverse problem.
"""

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy.special import gamma as gamma_fn

from .core import log, DomainError, GridMismatchError, DFLT_N_T
from .specfun import mittag_leffler
from .transform import GridFunction

#########
# types #
#########

@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Uniform grid t_0 = 0 < ... < t_{n-1} = T
    """
    T: float
    n: int
    nodes: np.ndarray = field(repr=False)

    kind: ClassVar[str] = 't'

    def __post_init__(self):
        self.nodes.setflags(write=False)

    def __len__(self):
        return self.n

    @property
    def t_nodes(self):
        return self.nodes

    @property
    def dt(self):
        return self.T / (self.n - 1)

    @property
    def key(self):
        return (self.kind, self.T, self.n)

    def check_same(self, other):
        if self.key != getattr(other, 'key', None):
            raise GridMismatchError("Time grid mismatch: %s vs %s" % (self.key, getattr(other, 'key', None)))

def build_time_grid(T, n=DFLT_N_T):
    """
    :param T: final time (> 0)
    :param n: number of nodes (>= 2)
    :return: TimeGrid
    """
    if not (math.isfinite(T) and T > 0.0):
        raise DomainError("T must be > 0 (got %s)" % (T))
    if int(n) != n or n < 2:
        raise DomainError("Time grid needs an integer n >= 2 (got %s)" % (n))
    nodes = np.linspace(0.0, T, int(n))
    return TimeGrid(float(T), int(n), nodes)

class TimeSeries(GridFunction):
    """Function of t on a TimeGrid"""
    header = 't'

def _check_order(gamma, upper_open=False):
    ok = 0.0 < gamma < 1.0 if upper_open else 0.0 < gamma <= 1.0
    if not ok:
        raise DomainError("Fractional order %g out of range" % (gamma))

####################
# RL and Caputo    #
####################

def _rl_values(v, dt, gamma):
    """Product-trapezoid rule for I^gamma (piecewise-linear interpolant of v)
    """
    n_pts = len(v)
    out = np.zeros(n_pts)
    if n_pts < 2:
        return out
    g1 = gamma + 1.0
    n = np.arange(1, n_pts, dtype=float)
    k = np.arange(1, n_pts, dtype=float)
    c = np.empty(n_pts)
    c[0] = 1.0
    c[1:] = (k + 1.0) ** g1 - 2.0 * k ** g1 + (k - 1.0) ** g1
    a0 = (n - 1.0) ** g1 - (n - 1.0 - gamma) * n ** gamma
    conv = np.convolve(v[1:], c)[:n_pts - 1]
    out[1:] = (a0 * v[0] + conv) * dt ** gamma / gamma_fn(gamma + 2.0)
    return out

def _l1_weights(n_pts, gamma):
    k = np.arange(n_pts - 1, dtype=float)
    return (k + 1.0) ** (1.0 - gamma) - k ** (1.0 - gamma)

def caputo_values(v, dt, gamma):
    """L1 Caputo derivative of samples v along axis 0 (classical derivative for gamma = 1)

    :param v: ndarray, time along axis 0
    :param dt: time step
    :param gamma: order in (0, 1]
    :return: ndarray like v (value 0 at t = 0 for gamma < 1)
    """
    v = np.asarray(v, dtype=float)
    n_pts = v.shape[0]
    if gamma == 1.0:
        return np.gradient(v, dt, axis=0, edge_order=2 if n_pts > 2 else 1)
    b = _l1_weights(n_pts, gamma)
    dv = np.diff(v, axis=0)
    out = np.zeros_like(v)
    if v.ndim == 1:
        out[1:] = np.convolve(dv, b)[:n_pts - 1]
    else:
        out[1:] = np.apply_along_axis(lambda col: np.convolve(col, b)[:n_pts - 1], 0, dv)
    return out * dt ** -gamma / gamma_fn(2.0 - gamma)

def rl_integral_left(f, gamma):
    """Left Riemann-Liouville integral (1/Gamma(gamma)) int_0^t (t-s)^{gamma-1} f(s) ds

    :param f: TimeSeries
    :param gamma: order in (0, 1]
    :return: TimeSeries (0 at t = 0)
    """
    _check_order(gamma)
    return TimeSeries(f.grid, _rl_values(f.values, f.grid.dt, gamma))

def rl_derivative_left(f, gamma):
    """Left Riemann-Liouville derivative d/dt I^{1-gamma} f

    :param f: TimeSeries
    :param gamma: order in (0, 1)
    :return: TimeSeries
    """
    _check_order(gamma, upper_open=True)
    integral = _rl_values(f.values, f.grid.dt, 1.0 - gamma)
    edge = 2 if len(f.grid) > 2 else 1
    return TimeSeries(f.grid, np.gradient(integral, f.grid.dt, edge_order=edge))

def caputo_derivative(f, gamma):
    """Left Caputo derivative, L1 scheme (central differences for gamma = 1)

    :param f: TimeSeries
    :param gamma: order in (0, 1]
    :return: TimeSeries
    """
    _check_order(gamma)
    return TimeSeries(f.grid, caputo_values(f.values, f.grid.dt, gamma))

#######################
# relaxation kernels  #
#######################

def relaxation(gamma, B, t):
    """E_{gamma,1}(-B t^gamma), the homogeneous mode solution

    :param gamma: order in (0, 1]
    :param B: decay rate >= 0 (broadcasts against t)
    :param t: times >= 0
    :return: ndarray or float
    """
    return mittag_leffler(gamma, 1.0, -np.asarray(B) * np.asarray(t) ** gamma)

def relaxation_integral(gamma, B, t):
    """t^gamma E_{gamma,gamma+1}(-B t^gamma) = (1 - E_{gamma,1}(-B t^gamma)) / B, the
    response to a unit constant source (times 1 + a(lambda^2 + rho^2))
    """
    tg = np.asarray(t) ** gamma
    return tg * mittag_leffler(gamma, gamma + 1.0, -np.asarray(B) * tg)

def relaxation_integral2(gamma, B, t):
    """t^(gamma+1) E_{gamma,gamma+2}(-B t^gamma), the antiderivative of relaxation_integral
    """
    tg = np.asarray(t) ** gamma
    return np.asarray(t) * tg * mittag_leffler(gamma, gamma + 2.0, -np.asarray(B) * tg)

##########
# oracle #
##########

def mode_ode_oracle(B, rhs, phi0, gamma):
    """Implicit L1 time stepping for D^gamma u + B u = rhs, u(0) = phi0 (backward Euler
    for gamma = 1)

    :param B: decay rate > 0
    :param rhs: TimeSeries
    :param phi0: initial value
    :param gamma: order in (0, 1]
    :return: TimeSeries
    """
    _check_order(gamma)
    if not B > 0.0:
        raise DomainError("mode_ode_oracle requires B > 0 (got %g)" % (B))
    tg = rhs.grid
    n_pts = len(tg)
    b = _l1_weights(n_pts, gamma)
    c0 = tg.dt ** -gamma / gamma_fn(2.0 - gamma)
    r = rhs.values
    u = np.empty(n_pts)
    u[0] = phi0
    du = np.zeros(max(n_pts - 1, 0))
    for n in range(1, n_pts):
        hist = np.dot(b[n - 1:0:-1], du[:n - 1]) if n > 1 else 0.0
        u[n] = (r[n] + c0 * (u[n - 1] - hist)) / (c0 + B)
        du[n - 1] = u[n] - u[n - 1]
    return TimeSeries(tg, u)

################
# ratio bounds #
################

def mode_ratios(gamma, B, t, T):
    """Ratios of the inverse-problem solution, evaluated elementwise (B and t broadcast)

      r1 = (1 - E(-B t^gamma)) / (1 - E(-B T^gamma))
      r2 = (E(-B T^gamma) - E(-B t^gamma)) / (1 - E(-B T^gamma))

    with E = E_{gamma,1}.  r2 is computed directly (through the E values while E_T < 1/2,
    through relaxation_integral otherwise, where 1 - E cancels) and r1 = 1 + r2, so that
    r1 <= 1 holds exactly; values pushed outside [-1, 0] by rounding are clipped and logged.

    :param gamma: order in (0, 1]
    :param B: decay rates > 0
    :param t: times in [0, T]
    :param T: final time > 0
    :return: tuple of ndarrays (r1, r2)
    """
    B = np.asarray(B, dtype=float)
    t = np.asarray(t, dtype=float)
    e_T = relaxation(gamma, B, T)
    e_t = relaxation(gamma, B, t)
    k_T = relaxation_integral(gamma, B, T)
    k_t = relaxation_integral(gamma, B, t)
    with np.errstate(divide='ignore', invalid='ignore'):
        r2 = np.where(e_T < 0.5, (e_T - e_t) / (1.0 - e_T), (k_t - k_T) / k_T)
    clipped = np.clip(r2, -1.0, 0.0)
    excess = np.abs(clipped - r2)
    if np.any(excess > 0.0):
        log.outlier("Mode ratio outside [-1, 0] by up to %.3g, clipped", float(np.max(excess)))
    return 1.0 + clipped, clipped

def lemma_ratio(gamma, lambda_B, t, T):
    """Ratios r1 in (0, 1] and r2 = r1 - 1 in (-1, 0] for a single mode (see mode_ratios)

    :return: tuple (r1, r2)
    :raises DomainError: t not in (0, T), lambda_B <= 0
    """
    _check_order(gamma)
    if not lambda_B > 0.0:
        raise DomainError("lemma_ratio requires lambda_B > 0 (got %g)" % (lambda_B))
    if not (0.0 < t < T):
        raise DomainError("lemma_ratio requires 0 < t < T (got t=%g, T=%g)" % (t, T))
    r1, r2 = mode_ratios(gamma, lambda_B, t, T)
    return float(r1), float(r2)
