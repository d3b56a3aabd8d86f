# -*- coding: utf-8 -*-

import io
import math

import numpy as np
import pytest

from jisp.core import DomainError, ParamMismatchError, GridMismatchError
from jisp.specfun import JacobiParams
from jisp.transform import (composite_gauss_legendre, build_spatial_grid, build_spectral_grid,
                            SampledFunction, SpectralFunction, forward_transform, inverse_transform,
                            cosine_transform, apply_operator, kernel_matrix, norm_l2_mu, norm_l2_nu,
                            norm_H, write_csv, read_csv, PANEL_NODES, SQRT_2PI)

def gaussian_cosine_transform(lam, k=1.0):
    # (2 pi)^-1/2 int_0^inf cos(lambda x) exp(-k x^2) dx
    return 0.5 * math.sqrt(math.pi / k) * np.exp(-lam * lam / (4.0 * k)) / SQRT_2PI

##############
# quadrature #
##############

def test_gauss_legendre_polynomial():
    nodes, weights = composite_gauss_legendre(2.0, 40)
    assert len(nodes) == PANEL_NODES * 3
    assert weights.sum() == pytest.approx(2.0, rel=1e-14)
    assert np.dot(weights, nodes ** 5) == pytest.approx(64.0 / 6.0, rel=1e-13)
    assert np.all(np.diff(nodes) > 0.0) and nodes[0] > 0.0 and nodes[-1] < 2.0

def test_gauss_legendre_oscillatory():
    nodes, weights = composite_gauss_legendre(10.0, 512)
    assert np.dot(weights, np.cos(30.0 * nodes)) == pytest.approx(math.sin(300.0) / 30.0, abs=1e-13)

#########
# grids #
#########

def test_grid_args(cosine):
    with pytest.raises(DomainError):
        build_spatial_grid(cosine, 0.0, 64)
    with pytest.raises(DomainError):
        build_spatial_grid(cosine, 10.0, 4)
    with pytest.raises(DomainError):
        build_spectral_grid(cosine, float('inf'), 64)
    with pytest.raises(DomainError):
        build_spectral_grid(cosine, 30.0, 64.5)

def test_grid_overflow(jacobi00):
    with pytest.raises(OverflowError):
        build_spatial_grid(jacobi00, 400.0, 64)

def test_grid_info(coarse_cosine_grids):
    info = coarse_cosine_grids.spatial.grid_info()
    assert info['kind'] == 'x'
    assert info['nodes'] == 256
    assert coarse_cosine_grids.spectral.lambda_max == 30.0
    np.testing.assert_allclose(coarse_cosine_grids.spectral.eigenvalues, coarse_cosine_grids.spectral.nodes ** 2)

def test_grid_read_only(coarse_cosine_grids):
    with pytest.raises(ValueError):
        coarse_cosine_grids.spatial.nodes[0] = 1.0

##################
# grid functions #
##################

def test_function_arithmetic(coarse_cosine_grids, gaussian):
    xg = coarse_cosine_grids.spatial
    f = SampledFunction.from_callable(xg, gaussian())
    g = 2.0 * f - f
    np.testing.assert_allclose(g.values, f.values)
    np.testing.assert_allclose((-f + 1.0).values, 1.0 - f.values)
    assert np.all(SampledFunction.zeros(xg).values == 0.0)

def test_function_checks(coarse_cosine_grids, coarse_jacobi00_grids, gaussian):
    xg = coarse_cosine_grids.spatial
    with pytest.raises(GridMismatchError):
        SampledFunction(xg, np.zeros(10))
    with pytest.raises(DomainError):
        SampledFunction(xg, np.full(len(xg), np.nan))
    f = SampledFunction.from_callable(xg, gaussian())
    other = SampledFunction.from_callable(coarse_jacobi00_grids.spatial, gaussian())
    with pytest.raises(GridMismatchError):
        f + other
    with pytest.raises(GridMismatchError):
        f + SpectralFunction.zeros(coarse_cosine_grids.spectral)

##############
# transforms #
##############

def test_forward_cosine_closed_form(cosine_grids, gaussian):
    xg, sg = cosine_grids.spatial, cosine_grids.spectral
    f_hat = forward_transform(SampledFunction.from_callable(xg, gaussian()), sg)
    np.testing.assert_allclose(f_hat.values, gaussian_cosine_transform(sg.nodes), rtol=0.0, atol=1e-9)

def test_forward_refinement(cosine, gaussian):
    sg = build_spectral_grid(cosine, 10.0, 64)
    errs = []
    for n in (32, 64, 128, 256):
        xg = build_spatial_grid(cosine, 10.0, n)
        f_hat = forward_transform(SampledFunction.from_callable(xg, gaussian()), sg)
        errs.append(float(np.max(np.abs(f_hat.values - gaussian_cosine_transform(sg.nodes)))))
    for coarse, fine in zip(errs, errs[1:]):
        assert fine <= max(coarse, 1e-10)
    assert errs[-1] <= 1e-9

def test_cosine_transform_oracle(cosine_grids, gaussian):
    xg, sg = cosine_grids.spatial, cosine_grids.spectral
    f = SampledFunction.from_callable(xg, gaussian(0.7))
    np.testing.assert_allclose(cosine_transform(f, sg.nodes), forward_transform(f, sg).values, rtol=0.0, atol=1e-10)

def test_forward_linear(coarse_jacobi00_grids, gaussian):
    xg, sg = coarse_jacobi00_grids.spatial, coarse_jacobi00_grids.spectral
    f = SampledFunction.from_callable(xg, gaussian(1.0))
    g = SampledFunction.from_callable(xg, gaussian(2.0))
    lhs = forward_transform(2.0 * f + g, sg).values
    rhs = 2.0 * forward_transform(f, sg).values + forward_transform(g, sg).values
    np.testing.assert_allclose(lhs, rhs, rtol=0.0, atol=1e-13)

@pytest.mark.parametrize('params', [(-0.5, -0.5), (0.0, 0.0)])
@pytest.mark.parametrize('k', [0.5, 1.0, 2.5])
def test_plancherel(params, k, gaussian):
    p = JacobiParams(*params)
    xg = build_spatial_grid(p, 10.0, 512)
    sg = build_spectral_grid(p, 30.0, 512)
    f = SampledFunction.from_callable(xg, gaussian(k))
    n_mu = norm_l2_mu(f)
    assert abs(norm_l2_nu(forward_transform(f, sg)) - n_mu) / n_mu <= 1e-4

@pytest.mark.parametrize('grids', ['coarse_cosine_grids', 'coarse_jacobi00_grids'])
def test_round_trip(grids, gaussian, request):
    g = request.getfixturevalue(grids)
    f = SampledFunction.from_callable(g.spatial, gaussian())
    back = inverse_transform(forward_transform(f, g.spectral), g.spatial)
    assert np.max(np.abs(back.values - f.values)) <= 1e-5

def test_param_mismatch(coarse_cosine_grids, coarse_jacobi00_grids, gaussian):
    f = SampledFunction.from_callable(coarse_cosine_grids.spatial, gaussian())
    with pytest.raises(ParamMismatchError):
        forward_transform(f, coarse_jacobi00_grids.spectral)
    with pytest.raises(ParamMismatchError):
        kernel_matrix(coarse_cosine_grids.spatial, coarse_jacobi00_grids.spectral)

def test_kernel_cached(coarse_cosine_grids):
    xg, sg = coarse_cosine_grids.spatial, coarse_cosine_grids.spectral
    assert kernel_matrix(xg, sg) is kernel_matrix(xg, sg)
    assert kernel_matrix(xg, sg).shape == (len(sg), len(xg))

def test_apply_operator(coarse_jacobi00_grids):
    sg = coarse_jacobi00_grids.spectral
    g = SpectralFunction(sg, np.exp(-sg.nodes))
    np.testing.assert_allclose(apply_operator(g, 2.0).values, (sg.nodes ** 2 + 1.0 + 2.0) * g.values)

#########
# norms #
#########

def test_norms(cosine_grids, gaussian):
    xg, sg = cosine_grids.spatial, cosine_grids.spectral
    f = SampledFunction.from_callable(xg, gaussian())
    # int_0^inf exp(-2 x^2) dx / sqrt(2 pi)
    assert norm_l2_mu(f) ** 2 == pytest.approx(0.25 * math.sqrt(2.0 * math.pi) / SQRT_2PI, rel=1e-12)
    f_hat = forward_transform(f, sg)
    # int lambda^4 exp(-lambda^2 / 2) dlambda * (pi / 4) / (2 pi) * 4 / sqrt(2 pi) = 3/4
    assert norm_H(f_hat) ** 2 == pytest.approx(0.75, rel=1e-6)
    assert norm_H(SpectralFunction.zeros(sg)) == 0.0

#######
# CSV #
#######

def test_csv_round_trip(tmp_path, coarse_jacobi00_grids, gaussian):
    xg = coarse_jacobi00_grids.spatial
    f = SampledFunction.from_callable(xg, gaussian())
    path = tmp_path / 'f.csv'
    write_csv(f, str(path))
    g = read_csv(str(path), xg)
    assert isinstance(g, SampledFunction)
    assert np.array_equal(g.values, f.values)

def test_csv_stream(coarse_cosine_grids):
    buf = io.StringIO()
    write_csv(SpectralFunction.zeros(coarse_cosine_grids.spectral), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == 'lambda,value'
    assert len(lines) == 257

def test_csv_mismatch(tmp_path, coarse_cosine_grids, cosine_grids, gaussian):
    path = tmp_path / 'f.csv'
    write_csv(SampledFunction.from_callable(coarse_cosine_grids.spatial, gaussian()), str(path))
    with pytest.raises(GridMismatchError):
        read_csv(str(path), cosine_grids.spatial)
    with pytest.raises(GridMismatchError):
        read_csv(str(path), coarse_cosine_grids.spectral)

def test_csv_malformed(tmp_path, coarse_cosine_grids):
    path = tmp_path / 'bad.csv'
    path.write_text('x,value\n0.1,abc\n')
    with pytest.raises(DomainError):
        read_csv(str(path), coarse_cosine_grids.spatial)
