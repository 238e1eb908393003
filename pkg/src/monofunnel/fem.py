"""P1 finite elements on a structured triangulation of a rectangle.

The mesh splits every grid cell along the same diagonal, so meshes are
deterministic functions of (nx, ny, lx, ly).  Assembly returns the
consistent mass matrix, the diffusion stiffness matrix and the lumped
mass vector (row sums of the mass matrix).  Output functionals are
boundary line integrals over the four sides evaluated with the
trapezoidal rule, which is exact for P1 traces; the same vectors act as
control injection columns, so actuation and sensing are collocated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Mesh",
    "AssembledOperators",
    "OutputOperator",
    "build_mesh",
    "assemble",
    "boundary_output",
    "distributed_output",
    "control_injection",
]


@dataclass(frozen=True)
class Mesh:
    """Structured triangulation of [0, lx] x [0, ly].

    Nodes are numbered row-major with x fastest: node(ix, iy) has index
    iy*(nx+1) + ix.  Every cell is split along its lower-left to
    upper-right diagonal into two positively oriented triangles.
    """

    nx: int
    ny: int
    lx: float
    ly: float
    nodes: np.ndarray      # (n_nodes, 2) coordinates
    triangles: np.ndarray  # (2*nx*ny, 3) node indices, counterclockwise

    @property
    def n_nodes(self):
        return (self.nx + 1) * (self.ny + 1)

    def node_index(self, ix, iy):
        return iy * (self.nx + 1) + ix


@dataclass(frozen=True)
class AssembledOperators:
    """Consistent mass, stiffness and lumped mass of a mesh."""

    mass: sp.csr_matrix
    stiffness: sp.csr_matrix
    lumped_mass: np.ndarray


@dataclass(frozen=True)
class OutputOperator:
    """Linear output y = columns.T @ v.

    kind is "boundary" (four side integrals) or "distributed" (a single
    mass-weighted interior average).  The columns double as control
    injection directions.
    """

    kind: str
    columns: np.ndarray  # (n_nodes, m)

    @property
    def m(self):
        return self.columns.shape[1]

    def apply(self, v):
        return self.columns.T @ v


def build_mesh(nx, ny, lx=1.0, ly=1.0):
    """Build the structured triangulation with nx x ny cells."""
    if nx < 1 or ny < 1:
        raise ValueError("mesh must have at least one cell per direction")
    if not (lx > 0.0 and ly > 0.0):
        raise ValueError("side lengths must be strictly positive")
    xs = np.linspace(0.0, lx, nx + 1)
    ys = np.linspace(0.0, ly, ny + 1)
    gx, gy = np.meshgrid(xs, ys)
    nodes = np.column_stack([gx.ravel(), gy.ravel()])

    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny))
    ix = ix.ravel()
    iy = iy.ravel()
    a = iy * (nx + 1) + ix          # lower left
    b = a + 1                       # lower right
    c = a + nx + 2                  # upper right
    d = a + nx + 1                  # upper left
    lower = np.column_stack([a, b, c])
    upper = np.column_stack([a, c, d])
    triangles = np.empty((2 * nx * ny, 3), dtype=np.int64)
    triangles[0::2] = lower
    triangles[1::2] = upper
    return Mesh(nx=nx, ny=ny, lx=float(lx), ly=float(ly), nodes=nodes,
                triangles=triangles)


def triangle_areas(mesh):
    """Signed areas of all triangles (positive for this mesh family)."""
    p = mesh.nodes[mesh.triangles]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def assemble(mesh, params):
    """Assemble mass and stiffness for the diffusion tensor in params."""
    tris = mesh.triangles
    p = mesh.nodes[tris]                      # (nt, 3, 2)
    area = triangle_areas(mesh)               # (nt,)
    if np.any(area <= 0.0):
        raise ValueError("triangulation contains degenerate or inverted cells")

    # P1 gradients: grad(lambda_i) is constant per triangle.
    x = p[:, :, 0]
    y = p[:, :, 1]
    gx = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]],
                  axis=1) / (2.0 * area)[:, None]
    gy = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]],
                  axis=1) / (2.0 * area)[:, None]

    d = params.diffusion
    # element stiffness: area * grad_i . D grad_j
    dgx = d[0, 0] * gx + d[0, 1] * gy
    dgy = d[1, 0] * gx + d[1, 1] * gy
    ke = area[:, None, None] * (gx[:, :, None] * dgx[:, None, :]
                                + gy[:, :, None] * dgy[:, None, :])

    # element mass: area/12 * (1 + delta_ij)
    me_unit = (np.ones((3, 3)) + np.eye(3)) / 12.0
    me = area[:, None, None] * me_unit[None, :, :]

    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    n = mesh.n_nodes
    stiffness = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    mass = sp.coo_matrix((me.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    lumped = np.asarray(mass.sum(axis=1)).ravel()
    return AssembledOperators(mass=mass, stiffness=stiffness, lumped_mass=lumped)


def _side_nodes_and_weights(mesh, side):
    """Node indices along one side plus trapezoidal weights.

    Sides are numbered 1: x = lx, 2: y = ly, 3: x = 0, 4: y = 0.  Corner
    nodes belong to both adjacent sides.
    """
    nx, ny = mesh.nx, mesh.ny
    if side == 1:
        idx = np.array([mesh.node_index(nx, iy) for iy in range(ny + 1)])
        h = mesh.ly / ny
    elif side == 2:
        idx = np.array([mesh.node_index(ix, ny) for ix in range(nx + 1)])
        h = mesh.lx / nx
    elif side == 3:
        idx = np.array([mesh.node_index(0, iy) for iy in range(ny + 1)])
        h = mesh.ly / ny
    elif side == 4:
        idx = np.array([mesh.node_index(ix, 0) for ix in range(nx + 1)])
        h = mesh.lx / nx
    else:
        raise ValueError("side must be 1, 2, 3 or 4")
    w = np.full(idx.shape, h)
    w[0] = w[-1] = 0.5 * h
    return idx, w


def boundary_output(mesh):
    """Output operator of the four side integrals (trapezoidal rule)."""
    columns = np.zeros((mesh.n_nodes, 4))
    for side in (1, 2, 3, 4):
        idx, w = _side_nodes_and_weights(mesh, side)
        columns[idx, side - 1] += w
    return OutputOperator(kind="boundary", columns=columns)


def distributed_output(mesh, ops, mask):
    """Single-output operator <v, mask> with the P1 mass inner product."""
    mask = np.asarray(mask, dtype=float)
    if mask.shape != (mesh.n_nodes,):
        raise ValueError("mask must be a nodal vector")
    return OutputOperator(kind="distributed",
                          columns=(ops.mass @ mask)[:, None])


def control_injection(output):
    """Injection columns dual to an output operator (collocated)."""
    return output.columns
