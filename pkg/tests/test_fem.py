import numpy as np
import pytest
import scipy.linalg

from monofunnel.model import ModelParams
from monofunnel.fem import (build_mesh, triangle_areas, assemble,
                            boundary_output, distributed_output,
                            control_injection)


def test_mesh_shape_and_indexing():
    mesh = build_mesh(4, 3, lx=2.0, ly=1.5)
    assert mesh.n_nodes == 5 * 4
    assert mesh.triangles.shape == (2 * 4 * 3, 3)
    assert mesh.node_index(0, 0) == 0
    assert mesh.node_index(4, 0) == 4
    assert mesh.node_index(0, 1) == 5
    # nodes row-major, x fastest
    assert np.array_equal(mesh.nodes[mesh.node_index(2, 1)],
                          [1.0, 0.5])


def test_triangle_areas_uniform():
    mesh = build_mesh(5, 7, lx=1.0, ly=2.0)
    areas = triangle_areas(mesh)
    assert areas.shape == (70,)
    assert np.allclose(areas, 2.0 / 70.0, rtol=1e-14)
    assert np.all(areas > 0.0)  # consistent orientation


def test_mass_matrix_partition_of_unity(mesh8, ops8):
    ones = np.ones(mesh8.n_nodes)
    assert ones @ (ops8.mass @ ones) == pytest.approx(1.0, rel=1e-14)
    assert ops8.lumped_mass.sum() == pytest.approx(1.0, rel=1e-14)
    # lumping by row sums
    rows = np.asarray(ops8.mass.sum(axis=1)).ravel()
    assert np.allclose(ops8.lumped_mass, rows, rtol=1e-15)


def test_stiffness_annihilates_constants(mesh8, ops8):
    ones = np.ones(mesh8.n_nodes)
    assert np.max(np.abs(ops8.stiffness @ ones)) == 0.0


def test_stiffness_symmetric_nonnegative(params):
    mesh = build_mesh(4, 4)
    ops = assemble(mesh, params)
    k = ops.stiffness.toarray()
    assert np.allclose(k, k.T, atol=1e-16)
    eig = np.linalg.eigvalsh(k)
    assert eig.min() > -1e-14


def test_stiffness_linear_in_diffusion():
    mesh = build_mesh(6, 6)
    base = assemble(mesh, ModelParams())
    double = assemble(mesh, ModelParams(d11=0.03, d22=0.03))
    assert np.allclose(double.stiffness.toarray(),
                       2.0 * base.stiffness.toarray(), rtol=1e-13)
    # mass does not depend on the tensor
    assert np.array_equal(double.mass.toarray(), base.mass.toarray())


def test_anisotropic_tensor_enters_assembly():
    mesh = build_mesh(6, 6)
    iso = assemble(mesh, ModelParams())
    aniso = assemble(mesh, ModelParams(d11=0.015, d12=0.005, d22=0.015))
    assert not np.allclose(aniso.stiffness.toarray(),
                           iso.stiffness.toarray())


def test_boundary_output_of_linear_field(mesh8):
    out = boundary_output(mesh8)
    assert out.m == 4
    v = mesh8.nodes[:, 0]  # v(x, y) = x, trapezoid rule exact
    y = out.apply(v)
    assert np.allclose(y, [1.0, 0.5, 0.0, 0.5], atol=1e-14)


def test_boundary_output_of_bilinear_field(mesh8):
    out = boundary_output(mesh8)
    v = mesh8.nodes[:, 0] * mesh8.nodes[:, 1]  # v = x*y
    y = out.apply(v)
    # trapezoid on the two touched sides integrates y and x exactly
    assert np.allclose(y, [0.5, 0.5, 0.0, 0.0], atol=1e-14)


def test_boundary_output_counts_corners_once_per_side():
    mesh = build_mesh(2, 2)
    out = boundary_output(mesh)
    ones = np.ones(mesh.n_nodes)
    assert np.allclose(out.apply(ones), [1.0, 1.0, 1.0, 1.0], atol=1e-15)
    # column weights per side sum to the side length
    assert np.allclose(out.columns.sum(axis=0), np.ones(4), atol=1e-15)


def test_distributed_output_is_mass_weighted(mesh8, ops8):
    mask = (mesh8.nodes[:, 0] <= 0.5).astype(float)
    out = distributed_output(mesh8, ops8, mask)
    assert out.m == 1
    v = np.ones(mesh8.n_nodes)
    # integral of the interpolated indicator: the half plus one ramp cell
    assert out.apply(v)[0] == pytest.approx(0.5 + 0.125 / 2.0, abs=1e-12)


def test_control_injection_collocated(mesh8):
    out = boundary_output(mesh8)
    b = control_injection(out)
    assert b is out.columns


def test_neumann_eigenvalue_convergence(params):
    # generalized problem K x = lam M x approaches d*pi^2 from above
    target = 0.14804406601634038
    errs = []
    for n in (4, 8, 16):
        mesh = build_mesh(n, n)
        ops = assemble(mesh, params)
        lam = scipy.linalg.eigh(ops.stiffness.toarray(),
                                ops.mass.toarray(),
                                eigvals_only=True)
        lam1 = np.sort(lam)[1]  # first nonzero
        errs.append(abs(lam1 - target) / target)
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 5e-3


def test_mesh_validation():
    with pytest.raises(ValueError):
        build_mesh(0, 4)
    with pytest.raises(ValueError):
        build_mesh(4, 4, lx=-1.0)
