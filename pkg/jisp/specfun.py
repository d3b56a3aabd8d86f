# -*- coding: utf-8 -*-

"""Special functions module

Kernels for the Jacobi harmonic analysis and the fractional calculus: complex gamma,
Gauss 2F1, Mittag-Leffler E_{gamma,beta}, the Jacobi function phi_lambda^{alpha,beta},
the Harish-Chandra c-function and the weight A_{alpha,beta}.  All functions accept
scalars or numpy arrays (broadcast elementwise); scalar in, scalar out.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .core import (log, DomainError, PoleError, ConvergenceError, ResidueError,
                   IMAG_RESIDUE_TOL)
from .utils import LOV

#############
# constants #
#############

LN2          = math.log(2.0)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
EPS          = np.finfo(float).eps

POLE_RADIUS  = 1e-12

# Lanczos, g = 7 (9 coefficients)
LANCZOS_G    = 7
LANCZOS_COEF = (0.99999999999980993,
                676.5203681218851,
                -1259.1392167224028,
                771.32342877765313,
                -176.61502916214059,
                12.507343278686905,
                -0.13857109526572012,
                9.9843695780195716e-6,
                1.5056327351493116e-7)

SERIES_MAX_TERMS  = 10000
SERIES_TAIL_RTOL  = 1e-14
GAUSS_SIGNIF_RTOL = 1e-8

# Jacobi function evaluation regimes (see jacobi_phi)
PFAFF_W_MAX      = 0.5
PFAFF_GROWTH_MAX = 20.0   # lambda tanh x
SMALL_LAMBDA     = 1e-5
PHI_ABS_TOL      = 1e-11  # accepted rounding estimate of a series value
ODE_START_GROWTH = 8.0    # lambda tanh x at the start of the ODE continuation
ODE_RTOL         = 1e-13
ODE_ATOL         = 1e-15

# Mittag-Leffler evaluation
ML_SERIES_RADIUS = 1.0
ML_SERIES_RTOL   = 1e-17
ML_ASYM_TERMS    = 10
ML_ASYM_RTOL     = 1e-15
ML_ASYM_MIN_EXP  = 50.0   # gamma = 1 only: exp(-s) must be negligible
TALBOT_NODES     = 32
TALBOT_SHAPE     = (0.6122, 0.5017, 0.6407, 0.2645)  # sigma, mu, alpha, nu

MLBranch = LOV(['ZERO',
                'EXP',
                'SERIES',
                'CLOSED',
                'ASYMPTOTIC',
                'CONTOUR'], 'lower')

###########
# helpers #
###########

def _flat(*args, dtype=float):
    """Broadcast arguments and return flat copies plus the common shape
    """
    arrs = np.broadcast_arrays(*(np.asarray(a, dtype=dtype) for a in args))
    shape = arrs[0].shape
    return [np.array(a, dtype=dtype).ravel() for a in arrs], shape

def _shaped(values, shape):
    values = values.reshape(shape)
    return values[()] if shape == () else values

def _near_pole(z):
    """Mask of entries within POLE_RADIUS of a non-positive integer
    """
    nearest = np.round(z.real)
    return (nearest <= 0.0) & (np.abs(z - nearest) < POLE_RADIUS)

def _real_part(values, what):
    """Discard imaginary residues, raising if one is not negligible
    """
    resid = np.max(np.abs(values.imag), initial=0.0)
    if resid > IMAG_RESIDUE_TOL:
        raise ResidueError("Imaginary residue %.3g in %s" % (resid, what))
    if resid > 1e3 * EPS:
        log.trace("Discarding imaginary residue %.3g in %s" % (resid, what))
    return values.real

#########
# types #
#########

@dataclass(frozen=True)
class JacobiParams:
    """Parameters (alpha, beta) of the Jacobi operator; rho is derived
    """
    alpha: float = -0.5
    beta: float = -0.5

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DomainError("alpha, beta must be finite (alpha=%s, beta=%s)" % (self.alpha, self.beta))
        if not (self.alpha >= self.beta >= -0.5):
            raise DomainError("alpha >= beta >= -1/2 violated (alpha=%g, beta=%g)" % (self.alpha, self.beta))
        # normalize ints coming from config/CLI, keeps the dataclass hash stable
        object.__setattr__(self, 'alpha', float(self.alpha))
        object.__setattr__(self, 'beta', float(self.beta))
        assert self.rho >= 0.0

    @property
    def rho(self):
        return self.alpha + self.beta + 1.0

    def params_info(self):
        return {'alpha': self.alpha, 'beta': self.beta, 'rho': self.rho}

#########
# gamma #
#########

def _log_sin_pi(z):
    """log(sin(pi*z)) for complex z, without overflow for large |Im z| (the branch is
    irrelevant, callers only exponentiate)
    """
    out = np.empty_like(z)
    upper = z.imag > 0.0
    lower = z.imag < 0.0
    axis = ~(upper | lower)
    zu = z[upper]
    out[upper] = -1j * np.pi * zu + np.log(np.expm1(2j * np.pi * zu) / 2j)
    zl = z[lower]
    out[lower] = 1j * np.pi * zl + np.log(-np.expm1(-2j * np.pi * zl) / 2j)
    out[axis] = np.log(np.sin(np.pi * z[axis].real) + 0j)
    return out

def _loggamma_lanczos(z):
    """Lanczos log-gamma, valid for Re z >= 0.5
    """
    zz = z - 1.0
    acc = np.full_like(zz, LANCZOS_COEF[0])
    for i in range(1, len(LANCZOS_COEF)):
        acc = acc + LANCZOS_COEF[i] / (zz + i)
    t = zz + LANCZOS_G + 0.5
    return LOG_SQRT_2PI + (zz + 0.5) * np.log(t) - t + np.log(acc)

def loggamma_complex(z):
    """Complex log-gamma (Lanczos with reflection for Re z < 0.5)

    :param z: complex scalar or array
    :return: complex (scalar or array); the imaginary part is a valid, not
        necessarily principal, branch
    :raises PoleError: z within POLE_RADIUS of a non-positive integer
    """
    (z,), shape = _flat(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("Non-finite gamma argument")
    if np.any(_near_pole(z)):
        raise PoleError("Gamma pole at %s" % (z[_near_pole(z)][0]))
    out = np.empty_like(z)
    refl = z.real < 0.5
    out[~refl] = _loggamma_lanczos(z[~refl])
    zr = z[refl]
    out[refl] = math.log(math.pi) - _log_sin_pi(zr) - _loggamma_lanczos(1.0 - zr)
    return _shaped(out, shape)

def gamma_complex(z):
    """Complex gamma function

    :param z: complex scalar or array, off the pole set
    :return: complex
    :raises PoleError: z within POLE_RADIUS of a non-positive integer
    :raises OverflowError: result not representable
    """
    lg = np.asarray(loggamma_complex(z))
    with np.errstate(over='ignore', invalid='ignore'):
        val = np.exp(lg)
    if not np.all(np.isfinite(val)):
        raise OverflowError("Gamma overflow (max Re log-gamma %.1f)" % (np.max(lg.real)))
    return val[()] if val.shape == () else val

######################
# Gauss 2F1 (series) #
######################

def _hyp2f1_sum(a, b, c, w):
    """Sum 2F1(a,b;c;w) term by term for 0 <= w < 1 (flat arrays of equal length)

    Stops per entry once the ratio is contracting and the last term is below the tail
    tolerance (relative to the sum, or to the largest term when the sum cancels).

    :return: tuple (sum, sum of |terms|, converged mask); EPS times the second is the
        rounding error of the first
    """
    n = w.size
    total = np.ones(n, dtype=complex)
    term = np.ones(n, dtype=complex)
    abssum = np.ones(n)
    peak = np.ones(n)
    converged = np.zeros(n, dtype=bool)
    idx = np.arange(n)
    with np.errstate(over='ignore', invalid='ignore'):
        for k in range(SERIES_MAX_TERMS):
            ratio = (a[idx] + k) * (b[idx] + k) / ((c[idx] + k) * (k + 1.0)) * w[idx]
            term[idx] *= ratio
            total[idx] += term[idx]
            mag = np.abs(term[idx])
            abssum[idx] += mag
            peak[idx] = np.maximum(peak[idx], mag)
            tol = np.maximum(SERIES_TAIL_RTOL * (1.0 - w[idx]) * np.abs(total[idx]), EPS * peak[idx])
            done = (mag == 0.0) | ((np.abs(ratio) < 1.0) & (mag <= tol))
            converged[idx[done]] = True
            # overflowed entries cannot recover
            idx = idx[~done & np.isfinite(mag)]
            if idx.size == 0:
                break
    return total, abssum, converged

def _hyp2f1_series(a, b, c, w):
    """_hyp2f1_sum, raising unless every entry converged with significant digits left

    :raises ConvergenceError: iteration cap reached or cancellation beyond GAUSS_SIGNIF_RTOL
    """
    total, abssum, converged = _hyp2f1_sum(a, b, c, w)
    if not np.all(converged):
        raise ConvergenceError("2F1 series not converged after %d terms (w up to %.6f)" %
                               (SERIES_MAX_TERMS, np.max(w[~converged])))
    lost = EPS * abssum > GAUSS_SIGNIF_RTOL * np.abs(total)
    if np.any(lost):
        raise ConvergenceError("2F1 series lost significance (|terms| sum %.3g, |sum| %.3g)" %
                               (np.max(abssum[lost]), np.min(np.abs(total[lost]))))
    return total

def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1

    z <= 0 goes through the Pfaff transformation (1-z)^-a 2F1(a, c-b; c; z/(z-1)).

    :param a: complex
    :param b: complex
    :param c: complex, not a non-positive integer
    :param z: real, z < 1
    :return: complex
    :raises PoleError: c is a non-positive integer
    :raises ConvergenceError: series did not converge within SERIES_MAX_TERMS
    """
    (a, b, c, z), shape = _flat(a, b, c, z, dtype=complex)
    if np.any(_near_pole(c)):
        raise PoleError("2F1 with c at a non-positive integer (c=%s)" % (c[_near_pole(c)][0]))
    if np.any(z.imag != 0.0) or not np.all(np.isfinite(z)):
        raise DomainError("2F1 argument must be real and finite")
    z = z.real
    if np.any(z >= 1.0):
        raise DomainError("2F1 argument must be < 1 (got %g)" % (np.max(z)))

    out = np.empty(z.shape, dtype=complex)
    pos = z >= 0.0
    if pos.any():
        out[pos] = _hyp2f1_series(a[pos], b[pos], c[pos], z[pos])
    neg = ~pos
    if neg.any():
        zn = z[neg]
        pre = np.exp(-a[neg] * np.log1p(-zn))
        out[neg] = pre * _hyp2f1_series(a[neg], c[neg] - b[neg], c[neg], zn / (zn - 1.0))
    return _shaped(out, shape)

##################
# Jacobi weights #
##################

def weight_A(p, x):
    """A_{alpha,beta}(x) = 2^{2 rho} sinh(x)^{2 alpha + 1} cosh(x)^{2 beta + 1}

    :param p: JacobiParams
    :param x: real >= 0 (scalar or array)
    :return: real >= 0
    :raises OverflowError: sinh/cosh powers overflow
    """
    (x,), shape = _flat(x)
    if np.any(x < 0.0) or not np.all(np.isfinite(x)):
        raise DomainError("weight_A requires finite x >= 0")
    with np.errstate(over='ignore', invalid='ignore'):
        val = 2.0 ** (2.0 * p.rho) * np.sinh(x) ** (2.0 * p.alpha + 1.0) * np.cosh(x) ** (2.0 * p.beta + 1.0)
    if not np.all(np.isfinite(val)):
        raise OverflowError("weight_A overflows at x = %g" % (np.max(x)))
    return _shaped(val, shape)

def harish_chandra_c(p, lam):
    """Harish-Chandra c-function

      c(lambda) = 2^{rho - i lambda} Gamma(i lambda) Gamma(alpha+1)
                  / (Gamma((rho + i lambda)/2) Gamma((alpha - beta + 1 + i lambda)/2))

    evaluated in log space (principal branch of 2^{rho - i lambda}).

    :param p: JacobiParams
    :param lam: real > 0 (scalar or array)
    :return: complex
    :raises PoleError: lambda <= 0
    """
    (lam,), shape = _flat(lam)
    if np.any(lam <= 0.0):
        raise PoleError("c-function has a pole at lambda = 0 (got lambda <= 0)")
    il = 1j * lam
    logc = ((p.rho - il) * LN2
            + loggamma_complex(il)
            + special.gammaln(p.alpha + 1.0)
            - loggamma_complex(0.5 * (p.rho + il))
            - loggamma_complex(0.5 * (p.alpha - p.beta + 1.0 + il)))
    return _shaped(np.exp(logc), shape)

def spectral_density(p, lam):
    """nu-density (2 pi)^{-1/2} |c(lambda)|^{-2}, set to 0 at lambda = 0

    :param p: JacobiParams
    :param lam: real >= 0 (scalar or array)
    :return: real >= 0
    """
    (lam,), shape = _flat(lam)
    if np.any(lam < 0.0):
        raise DomainError("spectral density requires lambda >= 0")
    dens = np.zeros_like(lam)
    pos = lam > 0.0
    if pos.any():
        dens[pos] = np.abs(harish_chandra_c(p, lam[pos])) ** -2.0 / math.sqrt(2.0 * math.pi)
    return _shaped(dens, shape)

###################
# Jacobi function #
###################

def _log_cosh(x):
    return x + np.log1p(np.exp(-2.0 * x)) - LN2

def _pfaff_phi(p, lam, x):
    """cosh(x)^{-rho - i lambda} 2F1(a, alpha + 1 - (rho - i lambda)/2; alpha + 1; tanh^2 x)

    :return: tuple (complex values, absolute rounding estimate; inf where not converged)
    """
    th = np.tanh(x)
    a = 0.5 * (p.rho + 1j * lam)
    b = p.alpha + 1.0 - np.conj(a)
    c = np.full(a.shape, p.alpha + 1.0, dtype=complex)
    total, abssum, ok = _hyp2f1_sum(a, b, c, th * th)
    lc = _log_cosh(x)
    with np.errstate(over='ignore', invalid='ignore'):
        vals = np.exp(-2.0 * a * lc) * total
        err = EPS * abssum * np.exp(-p.rho * lc)
    return vals, np.where(ok & np.isfinite(vals) & np.isfinite(err), err, np.inf)

def _expansion_phi(p, lam, x):
    """Harish-Chandra expansion 2 Re(c(lambda) Phi_lambda(x)) for lambda > 0, x > 0

    :return: tuple (values, absolute rounding estimate; inf where not converged)
    """
    il = 1j * lam
    y = np.cosh(x) ** -2.0
    a = 0.5 * (p.rho - il)
    b = 0.5 * (p.alpha - p.beta + 1.0 - il)
    total, abssum, ok = _hyp2f1_sum(a, b, 1.0 - il, y)
    log2cosh = x + np.log1p(np.exp(-2.0 * x))
    cf = harish_chandra_c(p, lam)
    with np.errstate(over='ignore', invalid='ignore'):
        vals = 2.0 * (cf * np.exp((il - p.rho) * log2cosh) * total).real
        err = 2.0 * EPS * abssum * np.abs(cf) * np.exp(-p.rho * log2cosh)
    return vals, np.where(ok & np.isfinite(vals) & np.isfinite(err), err, np.inf)

def _ode_phi(p, lam, xs):
    """Continue phi_lambda from a point where the Pfaff series is accurate by integrating

      phi'' + ((2 alpha + 1) coth x + (2 beta + 1) tanh x) phi' + (lambda^2 + rho^2) phi = 0

    :param lam: real > 0 (scalar)
    :param xs: sorted array of x > 0
    :return: ndarray, phi_lambda(xs)
    :raises ConvergenceError: start value inaccurate or integrator failure
    """
    th0 = min(ODE_START_GROWTH / lam, math.sqrt(PFAFF_W_MAX))
    x0 = min(math.atanh(th0), float(xs[0]))
    lam_a = np.array([lam])
    start, err = _pfaff_phi(p, lam_a, np.array([x0]))
    if not err[0] <= PHI_ABS_TOL:
        raise ConvergenceError("No accurate start value for phi_%g (x0 = %g)" % (lam, x0))
    phi0 = float(start[0].real)
    if xs[-1] <= x0:
        return np.full(xs.shape, phi0)

    # d/dx 2F1(a, b; c; -sinh^2 x) = -(ab/c) sinh(2x) 2F1(a+1, b+1; c+1; -sinh^2 x), Pfaff form
    a = 0.5 * (p.rho + 1j * lam_a)
    c1 = p.alpha + 2.0
    total, _, ok = _hyp2f1_sum(a + 1.0, p.alpha + 1.0 - np.conj(a), np.array([c1], dtype=complex),
                               np.array([math.tanh(x0) ** 2]))
    if not ok[0]:
        raise ConvergenceError("No start derivative for phi_%g (x0 = %g)" % (lam, x0))
    ab = 0.25 * (p.rho * p.rho + lam * lam)
    dphi0 = float((-(ab / (p.alpha + 1.0)) * math.sinh(2.0 * x0) *
                   np.exp(-2.0 * (a[0] + 1.0) * _log_cosh(x0)) * total[0]).real)

    k_sinh = 2.0 * p.alpha + 1.0
    k_cosh = 2.0 * p.beta + 1.0
    eig = lam * lam + p.rho * p.rho

    def rhs(x, y):
        th = math.tanh(x)
        return [y[1], -(k_sinh / th + k_cosh * th) * y[1] - eig * y[0]]

    sol = integrate.solve_ivp(rhs, (x0, float(xs[-1])), [phi0, dphi0], method='DOP853',
                              t_eval=xs, rtol=ODE_RTOL, atol=ODE_ATOL)
    if not sol.success:
        raise ConvergenceError("ODE continuation of phi_%g failed: %s" % (lam, sol.message))
    return sol.y[0]

def jacobi_phi(p, lam, x):
    """Jacobi function phi_lambda^{alpha,beta}(x) = 2F1((rho+i lambda)/2, (rho-i lambda)/2;
    alpha+1; -sinh^2 x) for real lambda >= 0, x >= 0

    Each entry takes the first route whose rounding estimate is within PHI_ABS_TOL:
      - Pfaff transformed series (tanh^2 x <= PFAFF_W_MAX, lambda tanh x <= PFAFF_GROWTH_MAX),
        cosh(x)^{-rho - i lambda} 2F1(a, alpha + 1 - (rho - i lambda)/2; alpha + 1; tanh^2 x)
      - lambda < SMALL_LAMBDA: the real 2F1 at lambda = 0 (scipy)
      - Harish-Chandra expansion 2 Re(c(lambda) Phi_lambda(x)), where
        Phi_lambda(x) = (2 cosh x)^{i lambda - rho}
                        2F1((rho - i lambda)/2, (alpha - beta + 1 - i lambda)/2; 1 - i lambda; cosh^-2 x)
      - integration of the Jacobi ODE from a Pfaff start value (large lambda at moderate x,
        where both series cancel)

    :param p: JacobiParams
    :param lam: real >= 0 (scalar or array)
    :param x: real >= 0 (scalar or array)
    :return: real (|phi| <= 1)
    :raises ConvergenceError: no route reached tolerance
    """
    (lam, x), shape = _flat(lam, x)
    if np.any(lam < 0.0) or not np.all(np.isfinite(lam)):
        raise DomainError("jacobi_phi requires finite lambda >= 0")
    if np.any(x < 0.0) or not np.all(np.isfinite(x)):
        raise DomainError("jacobi_phi requires finite x >= 0")

    th = np.tanh(x)
    out = np.empty_like(x)
    todo = np.ones(x.shape, dtype=bool)

    idx = np.flatnonzero((th * th <= PFAFF_W_MAX) & (lam * th <= PFAFF_GROWTH_MAX))
    if idx.size:
        vals, err = _pfaff_phi(p, lam[idx], x[idx])
        good = err <= PHI_ABS_TOL
        out[idx[good]] = _real_part(vals[good], "jacobi_phi (Pfaff series)")
        todo[idx[good]] = False
    n_pfaff = x.size - todo.sum()

    small = todo & (lam < SMALL_LAMBDA)
    if small.any():
        out[small] = special.hyp2f1(0.5 * p.rho, 0.5 * p.rho, p.alpha + 1.0, -np.sinh(x[small]) ** 2)
        todo &= ~small

    idx = np.flatnonzero(todo)
    if idx.size:
        vals, err = _expansion_phi(p, lam[idx], x[idx])
        good = err <= PHI_ABS_TOL
        out[idx[good]] = vals[good]
        todo[idx[good]] = False
    n_expand = idx.size - todo.sum()

    idx = np.flatnonzero(todo)
    for lam_u in np.unique(lam[idx]):
        sel = idx[lam[idx] == lam_u]
        xs, inv = np.unique(x[sel], return_inverse=True)
        out[sel] = _ode_phi(p, float(lam_u), xs)[inv]
    log.trace("jacobi_phi%s: %d pfaff, %d small-lambda, %d expansion, %d ode" %
              ((p.alpha, p.beta), n_pfaff, small.sum(), n_expand, idx.size))
    return _shaped(out, shape)

###################
# Mittag-Leffler #
###################

def _ml_series(gamma, beta, t):
    """Power series sum_k t^k / Gamma(gamma k + beta) with compensated summation
    (flat array t, no zeros)
    """
    logabs = np.log(np.abs(t))
    neg = t < 0.0
    total = np.zeros_like(t)
    comp = np.zeros_like(t)
    # the terms decrease once gamma k + beta passes |t|^(1/gamma)
    k_peak = (np.abs(t) ** (1.0 / gamma) + 1.0 - beta) / gamma
    idx = np.arange(t.size)
    for k in range(SERIES_MAX_TERMS):
        arg = gamma * k + beta
        with np.errstate(over='ignore'):
            mag = np.exp(k * logabs[idx] - special.gammaln(arg))
        sign = special.gammasgn(arg) * np.where(neg[idx] & (k % 2 == 1), -1.0, 1.0)
        term = np.where(mag == 0.0, 0.0, sign * mag)
        # Kahan summation
        y = term - comp[idx]
        s = total[idx] + y
        comp[idx] = (s - total[idx]) - y
        total[idx] = s
        if not np.all(np.isfinite(s)):
            raise OverflowError("Mittag-Leffler series overflows (gamma=%g, beta=%g, t up to %g)" %
                                (gamma, beta, np.max(t[idx])))
        done = (k >= k_peak[idx]) & (mag <= ML_SERIES_RTOL * np.abs(s))
        idx = idx[~done]
        if idx.size == 0:
            return total
    raise ConvergenceError("Mittag-Leffler series not converged (gamma=%g, beta=%g)" % (gamma, beta))

def _ml_asymptotic(gamma, beta, s):
    """E_{gamma,beta}(-s) ~ sum_{k=1..K} (-1)^{k+1} s^{-k} / Gamma(beta - gamma k), plus a
    bound on the omitted remainder (magnitude of the next two terms)
    """
    total = np.zeros_like(s)
    for k in range(1, ML_ASYM_TERMS + 1):
        total += (-1.0) ** (k + 1) * s ** -float(k) * special.rgamma(beta - gamma * k)
    err = np.zeros_like(s)
    for k in (ML_ASYM_TERMS + 1, ML_ASYM_TERMS + 2):
        err = np.maximum(err, np.abs(s ** -float(k) * special.rgamma(beta - gamma * k)))
    return total, err

def _ml_contour(gamma, beta, s):
    """E_{gamma,beta}(-s) as the inverse Laplace transform of z^{gamma-beta}/(z^gamma + s)
    at t = 1, midpoint rule on an optimized Talbot contour

    The first K asymptotic terms are split off exactly (their transforms z^{gamma k - beta}
    invert to 1/Gamma(beta - gamma k)), leaving the contour with the remainder
    (-z^gamma/s)^K z^{gamma-beta}/(z^gamma + s).  K <= ML_ASYM_TERMS is chosen per entry
    to minimize the rounding estimate.
    """
    sigma, mu, alpha, nu = TALBOT_SHAPE
    n = TALBOT_NODES
    theta = -np.pi + (np.arange(n) + 0.5) * (2.0 * np.pi / n)
    z = n * (-sigma + mu * theta / np.tan(alpha * theta) + 1j * nu * theta)
    dz = n * (mu / np.tan(alpha * theta) - mu * alpha * theta / np.sin(alpha * theta) ** 2 + 1j * nu)
    zg = z ** gamma
    rem = (np.exp(z) * z ** (gamma - beta) * dz / n)[None, :] / (zg[None, :] + s[:, None])
    q = -zg[None, :] / s[:, None]
    best = rem.sum(axis=1).imag
    best_err = EPS * np.abs(rem).sum(axis=1)
    partial = np.zeros_like(s)
    partial_abs = np.zeros_like(s)
    for k in range(1, ML_ASYM_TERMS + 1):
        term = (-1.0) ** (k + 1) * s ** -float(k) * special.rgamma(beta - gamma * k)
        partial += term
        partial_abs += np.abs(term)
        rem = rem * q
        err = EPS * (np.abs(rem).sum(axis=1) + partial_abs)
        better = err < best_err
        best = np.where(better, partial + rem.sum(axis=1).imag, best)
        best_err = np.where(better, err, best_err)
    return best

def mittag_leffler(gamma, beta, t):
    """Two-parameter Mittag-Leffler function E_{gamma,beta}(t) = sum_k t^k / Gamma(gamma k + beta)

    Branches: exp for (1, 1); power series for |t| <= 1 and t > 0; closed forms for
    gamma = 1, beta in (2, 3); for t < -1 the asymptotic expansion where its remainder bound
    is negligible, else a Talbot contour integral.

    :param gamma: real in (0, 1]
    :param beta: real
    :param t: real (scalar or array)
    :return: real
    :raises ConvergenceError: no branch reached tolerance
    :raises OverflowError: result not representable (large positive t)
    """
    if not (0.0 < gamma <= 1.0):
        raise DomainError("Mittag-Leffler requires 0 < gamma <= 1 (got %g)" % (gamma))
    if not math.isfinite(beta):
        raise DomainError("Mittag-Leffler requires finite beta")
    (t,), shape = _flat(t)
    if not np.all(np.isfinite(t)):
        raise DomainError("Mittag-Leffler argument must be finite")
    out = np.empty_like(t)

    if gamma == 1.0 and beta == 1.0:
        log.trace("mittag_leffler(1, 1): branch %s" % (MLBranch.EXP))
        with np.errstate(over='ignore'):
            out = np.exp(t)
        if not np.all(np.isfinite(out)):
            raise OverflowError("exp overflow at t = %g" % (np.max(t)))
        return _shaped(out, shape)

    zero = t == 0.0
    out[zero] = special.rgamma(beta)
    series = ~zero & ((np.abs(t) <= ML_SERIES_RADIUS) | (t > 0.0))
    if series.any():
        out[series] = _ml_series(gamma, beta, t[series])
    rest = ~(zero | series)
    log.trace("mittag_leffler(%g, %g): %d %s, %d %s, %d remaining" %
              (gamma, beta, zero.sum(), MLBranch.ZERO, series.sum(), MLBranch.SERIES, rest.sum()))
    if not rest.any():
        return _shaped(out, shape)

    s = -t[rest]
    if gamma == 1.0 and beta in (2.0, 3.0):
        em1 = np.expm1(-s)
        out[rest] = -em1 / s if beta == 2.0 else (em1 + s) / (s * s)
        log.trace("mittag_leffler(1, %g): branch %s" % (beta, MLBranch.CLOSED))
        return _shaped(out, shape)

    vals = np.empty_like(s)
    asym, err = _ml_asymptotic(gamma, beta, s)
    ok = (err <= ML_ASYM_RTOL * np.abs(asym)) & (asym != 0.0)
    if gamma == 1.0:
        ok &= s >= ML_ASYM_MIN_EXP
    vals[ok] = asym[ok]
    if (~ok).any():
        vals[~ok] = _ml_contour(gamma, beta, s[~ok])
    log.trace("mittag_leffler(%g, %g): %d %s, %d %s" %
              (gamma, beta, ok.sum(), MLBranch.ASYMPTOTIC, (~ok).sum(), MLBranch.CONTOUR))
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("Mittag-Leffler evaluation failed for gamma=%g, beta=%g" % (gamma, beta))
    out[rest] = vals
    return _shaped(out, shape)

###############
# mode kernel #
###############

def ml_kernel_B(p, q, lam):
    """B(lambda) = (lambda^2 + rho^2 + m) / (1 + a (lambda^2 + rho^2))

    :param p: JacobiParams
    :param q: ProblemParams (uses a, m)
    :param lam: real >= 0 (scalar or array)
    :return: real
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0.0):
        raise DomainError("ml_kernel_B requires lambda >= 0")
    eig = lam * lam + p.rho * p.rho
    val = (eig + q.m) / (1.0 + q.a * eig)
    return val[()] if val.shape == () else val
