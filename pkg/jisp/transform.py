# -*- coding: utf-8 -*-

"""Transform module

Quadrature grids carrying the mu- and nu-measures, functions sampled on them, the
Fourier-Jacobi transform pair and the L2(mu), L2(nu) and H norms.

  forward:  f^(lambda) = int_0^inf f(x) phi_lambda(x) dmu(x),   dmu = (2 pi)^-1/2 A(x) dx
  inverse:  f(x)       = int_0^inf f^(lambda) phi_lambda(x) dnu(lambda),
                                                            dnu = (2 pi)^-1/2 |c(lambda)|^-2 dlambda
"""

import csv
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy.special import roots_legendre

from .core import (log, worker_count, DomainError, ParamMismatchError, GridMismatchError,
                   DFLT_X_MAX, DFLT_N_X, DFLT_LAMBDA_MAX, DFLT_N_LAMBDA)
from .specfun import JacobiParams, jacobi_phi, weight_A, spectral_density

SQRT_2PI    = math.sqrt(2.0 * math.pi)
PANEL_NODES = 16
CSV_FMT     = '%.17g'
NODE_RTOL   = 1e-12

##############
# quadrature #
##############

def composite_gauss_legendre(upper, n):
    """Composite Gauss-Legendre rule on [0, upper] with PANEL_NODES-point panels

    :param upper: right endpoint (> 0)
    :param n: minimum number of nodes
    :return: tuple (nodes, weights), ceil(n / PANEL_NODES) panels
    """
    panels = max(1, -(-int(n) // PANEL_NODES))
    x, w = roots_legendre(PANEL_NODES)
    edges = np.linspace(0.0, upper, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights

#########
# grids #
#########

@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature grid on [0, upper]; weights carry the measure density
    """
    params: JacobiParams
    upper: float
    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    quad_weights: np.ndarray = field(repr=False)

    kind: ClassVar[str] = None

    def __post_init__(self):
        for name in ('nodes', 'weights', 'quad_weights'):
            getattr(self, name).setflags(write=False)

    def __len__(self):
        return len(self.nodes)

    @property
    def key(self):
        return (self.kind, self.params, self.upper, self.n)

    def check_same(self, other):
        """
        :raises GridMismatchError: other is a different grid
        """
        if self.key != other.key:
            raise GridMismatchError("Grid mismatch: %s vs %s" % (self.key, other.key))

    def grid_info(self):
        return {'kind': self.kind, 'upper': self.upper, 'n_requested': self.n, 'nodes': len(self),
                'params': self.params.params_info()}

@dataclass(frozen=True, eq=False)
class SpatialGrid(Grid):
    kind: ClassVar[str] = 'x'

    @property
    def x_max(self):
        return self.upper

@dataclass(frozen=True, eq=False)
class SpectralGrid(Grid):
    kind: ClassVar[str] = 'lambda'

    @property
    def lambda_max(self):
        return self.upper

    @property
    def eigenvalues(self):
        """lambda^2 + rho^2 (minus the eigenvalues of the Jacobi operator)
        """
        return self.nodes ** 2 + self.params.rho ** 2

def _check_grid_args(what, upper, n):
    if not (math.isfinite(upper) and upper > 0.0):
        raise DomainError("%s must be > 0 (got %s)" % (what, upper))
    if int(n) != n or n < 8:
        raise DomainError("Grid size must be an integer >= 8 (got %s)" % (n))

def build_spatial_grid(p, x_max=DFLT_X_MAX, n=DFLT_N_X):
    """
    :param p: JacobiParams
    :param x_max: truncation point of [0, inf)
    :param n: minimum number of nodes (>= 8)
    :return: SpatialGrid with weights = GL weights * (2 pi)^-1/2 A(x)
    :raises OverflowError: weight_A overflows at x_max
    """
    _check_grid_args('x_max', x_max, n)
    weight_A(p, x_max)
    nodes, quad = composite_gauss_legendre(x_max, n)
    weights = quad * weight_A(p, nodes) / SQRT_2PI
    return SpatialGrid(p, float(x_max), int(n), nodes, weights, quad)

def build_spectral_grid(p, lambda_max=DFLT_LAMBDA_MAX, n=DFLT_N_LAMBDA):
    """
    :param p: JacobiParams
    :param lambda_max: truncation point of [0, inf)
    :param n: minimum number of nodes (>= 8)
    :return: SpectralGrid with weights = GL weights * (2 pi)^-1/2 |c(lambda)|^-2
    """
    _check_grid_args('lambda_max', lambda_max, n)
    nodes, quad = composite_gauss_legendre(lambda_max, n)
    weights = quad * spectral_density(p, nodes)
    return SpectralGrid(p, float(lambda_max), int(n), nodes, weights, quad)

##################
# grid functions #
##################

@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values, one per grid node (read-only)
    """
    grid: Grid
    values: np.ndarray

    header: ClassVar[str] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise GridMismatchError("%d values for a grid of %d nodes" % (values.size, len(self.grid)))
        if not np.all(np.isfinite(values)):
            raise DomainError("Non-finite values in %s" % (type(self).__name__))
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def _other_values(self, other):
        if isinstance(other, GridFunction):
            if type(other) is not type(self):
                raise GridMismatchError("Cannot combine %s with %s" % (type(self).__name__, type(other).__name__))
            self.grid.check_same(other.grid)
            return other.values
        return other

    def __add__(self, other):
        return type(self)(self.grid, self.values + self._other_values(other))

    def __sub__(self, other):
        return type(self)(self.grid, self.values - self._other_values(other))

    def __mul__(self, scalar):
        return type(self)(self.grid, scalar * self.values)

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(self.grid, -self.values)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(len(grid)))

    @classmethod
    def from_callable(cls, grid, func):
        """Sample func (vectorized over numpy arrays) at the grid nodes
        """
        return cls(grid, func(np.asarray(grid.nodes)))

class SampledFunction(GridFunction):
    """Function of x on a SpatialGrid"""
    header = 'x'

class SpectralFunction(GridFunction):
    """Function of lambda on a SpectralGrid"""
    header = 'lambda'

#######
# I/O #
#######

def write_csv(fn, out):
    """Write "<node>,value" rows at full double precision

    :param fn: GridFunction
    :param out: path or open text file
    """
    if hasattr(out, 'write'):
        _write_rows(fn, out)
    else:
        with open(out, 'w', newline='') as f:
            _write_rows(fn, f)

def _write_rows(fn, f):
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow([fn.header, 'value'])
    for node, value in zip(fn.grid.nodes, fn.values):
        writer.writerow([CSV_FMT % node, CSV_FMT % value])

def read_csv(path, grid, cls=None):
    """Read a "<node>,value" file written for grid

    :param path: CSV file path
    :param grid: grid the file must match
    :param cls: [optional] GridFunction subclass (default by grid type)
    :return: SampledFunction, SpectralFunction (or cls)
    :raises GridMismatchError: header or nodes do not match the grid
    """
    if cls is None:
        cls = SampledFunction if isinstance(grid, SpatialGrid) else SpectralFunction
    with open(path, newline='') as f:
        rows = list(csv.reader(f))
    if not rows or [h.strip() for h in rows[0]] != [cls.header, 'value']:
        raise GridMismatchError("%s: expected header '%s,value'" % (path, cls.header))
    try:
        data = np.array([[float(r[0]), float(r[1])] for r in rows[1:] if r], dtype=float).reshape(-1, 2)
    except (ValueError, IndexError):
        raise DomainError("%s: malformed numeric row" % (path))
    if len(data) != len(grid) or not np.allclose(data[:, 0], grid.nodes, rtol=NODE_RTOL, atol=0.0):
        raise GridMismatchError("%s: nodes do not match the configured %s grid (%d rows, %d nodes)" %
                                (path, grid.kind, len(data), len(grid)))
    return cls(grid, data[:, 1])

##############
# transforms #
##############

def _check_params(xg, sg):
    if xg.params != sg.params:
        raise ParamMismatchError("Grids built for different Jacobi parameters (%s vs %s)" %
                                 (xg.params, sg.params))

@functools.lru_cache(maxsize=8)
def _kernel_matrix(params, x_max, n_x, lambda_max, n_lambda):
    x, _ = composite_gauss_legendre(x_max, n_x)
    lam, _ = composite_gauss_legendre(lambda_max, n_lambda)
    workers = max(1, min(worker_count(), len(lam)))
    chunks = np.array_split(np.arange(len(lam)), workers)
    log.debug("Building %dx%d Jacobi kernel for %s (%d workers)" % (len(lam), len(x), params, workers))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda idx: jacobi_phi(params, lam[idx, None], x[None, :]), chunks))
    phi = np.vstack(rows)
    phi.setflags(write=False)
    return phi

def kernel_matrix(xg, sg):
    """Phi[j, i] = phi_{lambda_j}(x_i), cached per grid pair

    :param xg: SpatialGrid
    :param sg: SpectralGrid
    :return: read-only ndarray (n_lambda, n_x)
    """
    _check_params(xg, sg)
    return _kernel_matrix(xg.params, xg.x_max, xg.n, sg.lambda_max, sg.n)

def forward_transform(f, sg):
    """Fourier-Jacobi transform, f^(lambda_j) = sum_i w_i f(x_i) phi_{lambda_j}(x_i)

    :param f: SampledFunction
    :param sg: SpectralGrid
    :return: SpectralFunction
    :raises ParamMismatchError: grids carry different JacobiParams
    """
    xg = f.grid
    return SpectralFunction(sg, kernel_matrix(xg, sg) @ (xg.weights * f.values))

def inverse_transform(g, xg):
    """Inverse Fourier-Jacobi transform, f(x_i) = sum_j nu_j g(lambda_j) phi_{lambda_j}(x_i)

    :param g: SpectralFunction
    :param xg: SpatialGrid
    :return: SampledFunction
    :raises ParamMismatchError: grids carry different JacobiParams
    """
    sg = g.grid
    return SampledFunction(xg, kernel_matrix(xg, sg).T @ (sg.weights * g.values))

def cosine_transform(f, lambdas):
    """Fourier-cosine transform (2 pi)^-1/2 int_0^x_max cos(lambda x) f(x) dx, computed
    with the plain quadrature weights (no Jacobi functions involved)

    :param f: SampledFunction
    :param lambdas: array of frequencies
    :return: ndarray
    """
    x = f.grid.nodes
    lambdas = np.asarray(lambdas, dtype=float)
    return np.cos(np.outer(lambdas, x)) @ (f.grid.quad_weights * f.values) / SQRT_2PI

def apply_operator(g, m):
    """Spectral form of (m - Delta): g^ -> (lambda^2 + rho^2 + m) g^

    :param g: SpectralFunction
    :param m: reaction coefficient
    :return: SpectralFunction
    """
    return SpectralFunction(g.grid, (g.grid.eigenvalues + m) * g.values)

#########
# norms #
#########

def norm_l2_mu(f):
    """
    :param f: SampledFunction
    :return: (sum_i w_i f(x_i)^2)^1/2
    """
    return math.sqrt(float(np.dot(f.grid.weights, f.values ** 2)))

def norm_l2_nu(g):
    """
    :param g: SpectralFunction
    :return: (sum_j nu_j g(lambda_j)^2)^1/2
    """
    return math.sqrt(float(np.dot(g.grid.weights, g.values ** 2)))

def norm_H(g):
    """
    :param g: SpectralFunction
    :return: (sum_j nu_j ((lambda_j^2 + rho^2) g(lambda_j))^2)^1/2
    """
    return math.sqrt(float(np.dot(g.grid.weights, (g.grid.eigenvalues * g.values) ** 2)))
