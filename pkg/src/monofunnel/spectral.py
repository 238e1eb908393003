"""Cosine spectral basis for the Neumann Laplacian on a rectangle.

The eigenfunctions theta_{jk}(x, y) = n_{jk} cos(j pi x / lx)
cos(k pi y / ly) diagonalize -div(d grad .) with natural boundary
conditions when the diffusion tensor is isotropic, with eigenvalues
alpha_{jk} = d pi^2 (j^2/lx^2 + k^2/ly^2).  Nonlinear terms are projected
with a tensor Gauss-Legendre rule; the boundary output integrals of each
mode are evaluated analytically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import p3

__all__ = [
    "SpectralBasis",
    "build_basis",
    "mode_shape",
    "output_gamma",
    "project_nodal",
    "p3_project",
    "spectral_rhs",
]


@dataclass(frozen=True)
class SpectralBasis:
    """Truncated cosine basis with quadrature and output data.

    Modes are ordered by eigenvalue, ties broken lexicographically by
    (j, k).  Arrays indexed by mode follow that order; the 2-d coefficient
    layout used internally for quadrature is (j, k) row-major.
    """

    lx: float
    ly: float
    max_j: int
    max_k: int
    modes: np.ndarray    # (n, 2) integer frequency pairs
    alphas: np.ndarray   # (n,) diffusion eigenvalues
    norms: np.ndarray    # (n,) L2 normalization factors
    gammas: np.ndarray   # (n, 4) boundary output integrals per side
    qx: np.ndarray       # x quadrature points
    qy: np.ndarray
    ex: np.ndarray       # (len(qx), max_j+1) 1-d mode values on qx
    ey: np.ndarray
    qweights: np.ndarray  # (len(qx), len(qy)) tensor weights

    @property
    def n_modes(self):
        return self.modes.shape[0]

    def to_grid(self, coeffs):
        """Scatter mode-ordered coefficients into the (j, k) layout."""
        grid = np.zeros((self.max_j + 1, self.max_k + 1))
        grid[self.modes[:, 0], self.modes[:, 1]] = coeffs
        return grid

    def from_grid(self, grid):
        """Gather a (j, k) layout back into mode order."""
        return grid[self.modes[:, 0], self.modes[:, 1]]

    def eval_modes(self, points):
        """Evaluate all modes at an (npts, 2) array of points."""
        points = np.asarray(points, dtype=float)
        j = self.modes[:, 0]
        k = self.modes[:, 1]
        cx = np.cos(points[:, 0:1] * (j * np.pi / self.lx)[None, :])
        cy = np.cos(points[:, 1:2] * (k * np.pi / self.ly)[None, :])
        return self.norms[None, :] * cx * cy


def mode_shape(points, j, k, lx=1.0, ly=1.0):
    """Values of the normalized cosine mode (j, k) at given points."""
    points = np.asarray(points, dtype=float)
    norm = np.sqrt((2.0 if j > 0 else 1.0) * (2.0 if k > 0 else 1.0)
                   / (lx * ly))
    return norm * np.cos(j * np.pi * points[..., 0] / lx) \
        * np.cos(k * np.pi * points[..., 1] / ly)


def _gauss_rule(npts, length):
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * length * (x + 1.0), 0.5 * length * w


def build_basis(max_j, max_k, params, lx=1.0, ly=1.0, quad_points=None):
    """Build the basis with modes j <= max_j, k <= max_k.

    quad_points sets the Gauss-Legendre count per axis.  The default
    resolves the full bandwidth of cubic products (4*max frequency);
    anything below the hard floor 2*(max+1) is rejected as too coarse.
    """
    if max_j < 0 or max_k < 0:
        raise ValueError("mode bounds must be nonnegative")
    if not (lx > 0.0 and ly > 0.0):
        raise ValueError("side lengths must be strictly positive")
    d = params.isotropic_diffusion  # anisotropic tensors are unsupported here

    jj, kk = np.meshgrid(np.arange(max_j + 1), np.arange(max_k + 1),
                         indexing="ij")
    modes = np.column_stack([jj.ravel(), kk.ravel()])
    alphas = d * np.pi ** 2 * ((modes[:, 0] / lx) ** 2
                               + (modes[:, 1] / ly) ** 2)
    order = np.lexsort((modes[:, 1], modes[:, 0], alphas))
    modes = modes[order]
    alphas = alphas[order]

    norms = np.sqrt(np.where(modes[:, 0] > 0, 2.0, 1.0)
                    * np.where(modes[:, 1] > 0, 2.0, 1.0) / (lx * ly))

    # analytic side integrals: cos integrates to zero unless the
    # tangential frequency vanishes
    j = modes[:, 0]
    k = modes[:, 1]
    sx = np.where(j % 2 == 0, 1.0, -1.0)   # cos(j pi)
    sy = np.where(k % 2 == 0, 1.0, -1.0)
    gammas = np.zeros((modes.shape[0], 4))
    gammas[:, 0] = norms * sx * np.where(k == 0, ly, 0.0)   # x = lx
    gammas[:, 1] = norms * sy * np.where(j == 0, lx, 0.0)   # y = ly
    gammas[:, 2] = norms * np.where(k == 0, ly, 0.0)        # x = 0
    gammas[:, 3] = norms * np.where(j == 0, lx, 0.0)        # y = 0

    def default_pts(mmax):
        return max(2 * (mmax + 1), 4 * mmax + 8)

    if quad_points is None:
        npx, npy = default_pts(max_j), default_pts(max_k)
    else:
        npx = npy = int(quad_points)
        if npx < 2 * (max(max_j, max_k) + 1):
            raise ValueError(
                f"quadrature grid too coarse: need at least "
                f"{2 * (max(max_j, max_k) + 1)} points per axis")
    qx, wx = _gauss_rule(npx, lx)
    qy, wy = _gauss_rule(npy, ly)
    nx1 = np.sqrt(np.where(np.arange(max_j + 1) > 0, 2.0, 1.0) / lx)
    ny1 = np.sqrt(np.where(np.arange(max_k + 1) > 0, 2.0, 1.0) / ly)
    ex = nx1[None, :] * np.cos(np.outer(qx, np.arange(max_j + 1) * np.pi / lx))
    ey = ny1[None, :] * np.cos(np.outer(qy, np.arange(max_k + 1) * np.pi / ly))
    qweights = np.outer(wx, wy)

    return SpectralBasis(lx=float(lx), ly=float(ly), max_j=max_j, max_k=max_k,
                         modes=modes, alphas=alphas, norms=norms,
                         gammas=gammas, qx=qx, qy=qy, ex=ex, ey=ey,
                         qweights=qweights)


def output_gamma(basis):
    """Per-mode boundary output integrals, one row per mode."""
    return basis.gammas.copy()


def project_nodal(v_nodal, mesh, ops, basis):
    """L2 coefficients <v, theta_i> of a nodal finite element field."""
    v_nodal = np.asarray(v_nodal, dtype=float)
    if v_nodal.shape != (mesh.n_nodes,):
        raise ValueError("nodal field has wrong length")
    e_nodes = basis.eval_modes(mesh.nodes)
    return e_nodes.T @ (ops.mass @ v_nodal)


def p3_project(basis, coeffs, params):
    """Quadrature projection of p3(sum coeffs_i theta_i) onto the basis."""
    grid = basis.to_grid(coeffs)
    values = basis.ex @ grid @ basis.ey.T
    weighted = basis.qweights * p3(values, params)
    return basis.from_grid(basis.ex.T @ weighted @ basis.ey)


def spectral_rhs(basis, params, mu, nu, i_se=None, isi=None,
                 include_reaction=True, include_recovery=True):
    """Coefficient dynamics of the semidiscrete system.

    dmu_j = -alpha_j mu_j - nu_j + <p3(v), theta_j> + <i_si, theta_j>
            + sum_i i_se[i] gamma_j[i]
    dnu_j = c5 mu_j - c4 nu_j

    i_se is the boundary input vector (length 4) and isi the coefficient
    vector of the interior stimulus; either may be None.  The reaction
    and recovery couplings can be disabled for pure-diffusion runs.
    """
    dmu = -basis.alphas * mu
    if include_recovery:
        dmu = dmu - nu
        dnu = params.c5 * mu - params.c4 * nu
    else:
        dnu = np.zeros_like(nu)
    if include_reaction:
        dmu = dmu + p3_project(basis, mu, params)
    if isi is not None:
        dmu = dmu + isi
    if i_se is not None:
        dmu = dmu + basis.gammas @ i_se
    return dmu, dnu
