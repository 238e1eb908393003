import numpy as np
import pytest

from monofunnel.model import ModelParams, p3
from monofunnel.fem import build_mesh, assemble
from monofunnel.spectral import (build_basis, mode_shape, output_gamma,
                                 project_nodal, p3_project, spectral_rhs)


@pytest.fixture(scope="module")
def basis(params):
    return build_basis(4, 4, params)


def test_mode_ordering_and_eigenvalues(params, basis):
    assert basis.n_modes == 25
    assert np.array_equal(basis.modes[0], [0, 0])
    assert basis.alphas[0] == 0.0
    assert np.all(np.diff(basis.alphas) >= 0.0)
    i10 = np.flatnonzero((basis.modes[:, 0] == 1)
                         & (basis.modes[:, 1] == 0))[0]
    assert basis.alphas[i10] == pytest.approx(0.14804406601634038,
                                              rel=1e-15)
    # equal eigenvalues tie-break on j, so (0, 1) sorts before (1, 0)
    assert np.array_equal(basis.modes[1], [0, 1])
    assert i10 == 2


def test_modes_orthonormal_under_quadrature(basis):
    pts = np.column_stack([np.repeat(basis.qx, basis.qy.size),
                           np.tile(basis.qy, basis.qx.size)])
    w = basis.qweights.ravel()
    vals = basis.eval_modes(pts)
    gram = vals.T * w @ vals
    assert np.allclose(gram, np.eye(basis.n_modes), atol=1e-12)


def test_mode_shape_matches_basis(basis, rng):
    pts = rng.uniform(0.0, 1.0, size=(40, 2))
    vals = basis.eval_modes(pts)
    for i in (0, 1, 7, 24):
        j, k = basis.modes[i]
        assert np.allclose(vals[:, i], mode_shape(pts, j, k),
                           rtol=1e-14, atol=1e-14)


def test_constant_mode_is_one():
    pts = np.array([[0.3, 0.7], [0.0, 0.0]])
    assert np.allclose(mode_shape(pts, 0, 0), 1.0, rtol=1e-15)


def test_boundary_gammas_analytic(basis):
    # side integrals vanish unless the cross index is zero
    gammas = output_gamma(basis)
    for i in range(basis.n_modes):
        j, k = basis.modes[i]
        norm = basis.norms[i]
        expected = [
            norm * (-1.0) ** j * (1.0 if k == 0 else 0.0),
            norm * (-1.0) ** k * (1.0 if j == 0 else 0.0),
            norm * (1.0 if k == 0 else 0.0),
            norm * (1.0 if j == 0 else 0.0),
        ]
        assert np.allclose(gammas[i], expected, atol=1e-15)


def test_boundary_gammas_match_quadrature(params):
    basis = build_basis(3, 3, params)
    xq, wq = np.polynomial.legendre.leggauss(24)
    s = 0.5 * (xq + 1.0)  # [0, 1]
    w = 0.5 * wq
    sides = {
        0: np.column_stack([np.ones_like(s), s]),   # x = lx
        1: np.column_stack([s, np.ones_like(s)]),   # y = ly
        2: np.column_stack([np.zeros_like(s), s]),  # x = 0
        3: np.column_stack([s, np.zeros_like(s)]),  # y = 0
    }
    for side, pts in sides.items():
        vals = basis.eval_modes(pts)
        numeric = vals.T @ w
        assert np.allclose(numeric, basis.gammas[:, side], atol=1e-13)


def test_constant_field_boundary_outputs(basis):
    mu = np.zeros(basis.n_modes)
    mu[0] = 1.0  # v identically 1
    y = basis.gammas.T @ mu
    assert np.allclose(y, np.ones(4), atol=1e-15)


def test_grid_scatter_roundtrip(basis, rng):
    mu = rng.standard_normal(basis.n_modes)
    assert np.allclose(basis.from_grid(basis.to_grid(mu)), mu, rtol=1e-16)


def test_cubic_projection_of_single_mode(params, basis):
    # constant field: projection of p3(a) lands on the constant mode
    a = 1.7
    mu = np.zeros(basis.n_modes)
    mu[0] = a
    proj = p3_project(basis, mu, params)
    assert proj[0] == pytest.approx(p3(a, params), rel=1e-13)
    assert np.max(np.abs(proj[1:])) < 1e-13


def test_cubic_projection_against_dense_quadrature(params, rng):
    basis = build_basis(3, 3, params)
    mu = 0.5 * rng.standard_normal(basis.n_modes)
    proj = p3_project(basis, mu, params)
    pts = np.column_stack([np.repeat(basis.qx, basis.qy.size),
                           np.tile(basis.qy, basis.qx.size)])
    vals = basis.eval_modes(pts)
    v = vals @ mu
    dense = vals.T * basis.qweights.ravel() @ p3(v, params)
    assert np.allclose(proj, dense, rtol=1e-12, atol=1e-13)


def test_quadrature_resolution_guard(params):
    with pytest.raises(ValueError):
        build_basis(3, 3, params, quad_points=7)
    basis = build_basis(3, 3, params, quad_points=8)
    assert basis.qx.size == 8
    default = build_basis(3, 3, params)
    assert default.qx.size == max(2 * 4, 4 * 3 + 8)


def test_anisotropic_tensor_rejected():
    with pytest.raises(ValueError):
        build_basis(2, 2, ModelParams(d11=0.02, d12=0.001, d22=0.01))


def test_rhs_pure_diffusion(params, basis, rng):
    mu = rng.standard_normal(basis.n_modes)
    nu = rng.standard_normal(basis.n_modes)
    dmu, dnu = spectral_rhs(basis, params, mu, nu, include_reaction=False,
                            include_recovery=False)
    assert np.allclose(dmu, -basis.alphas * mu, rtol=1e-15)
    assert np.array_equal(dnu, np.zeros_like(nu))


def test_rhs_recovery_coupling(params, basis, rng):
    mu = rng.standard_normal(basis.n_modes)
    nu = rng.standard_normal(basis.n_modes)
    dmu, dnu = spectral_rhs(basis, params, mu, nu, include_reaction=False)
    assert np.allclose(dmu, -basis.alphas * mu - nu, rtol=1e-14)
    assert np.allclose(dnu, params.c5 * mu - params.c4 * nu, rtol=1e-15)


def test_rhs_boundary_injection(params, basis):
    mu = np.zeros(basis.n_modes)
    nu = np.zeros(basis.n_modes)
    i_se = np.array([1.0, 0.0, 0.0, 0.0])
    dmu, _ = spectral_rhs(basis, params, mu, nu, i_se=i_se,
                          include_reaction=False, include_recovery=False)
    # injecting on one side adds that side's trace functional
    assert np.allclose(dmu, basis.gammas[:, 0], atol=1e-15)


def test_nodal_projection_recovers_mode(params, mesh64, ops64):
    basis = build_basis(4, 4, params)
    v = mode_shape(mesh64.nodes, 1, 0)
    coeffs = project_nodal(v, mesh64, ops64, basis)
    i10 = np.flatnonzero((basis.modes[:, 0] == 1)
                         & (basis.modes[:, 1] == 0))[0]
    # limited by nodal interpolation of the cosine on a 64x64 grid
    assert coeffs[i10] == pytest.approx(1.0, abs=1e-3)
    others = np.delete(coeffs, i10)
    assert np.max(np.abs(others)) < 1e-3
