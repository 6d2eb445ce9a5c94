"""Assembly of the weighted linear system for one reweighting step.

Each grid cell couples to its four axis-aligned neighbors through per-edge
weights; edges leaving the domain simply do not exist, which realizes the
zero-flux boundary condition. The structure (offsets/indices) depends only on
the grid size and is cached; per-iteration assembly only rewrites values.
"""

import functools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidParameterError
from .grid import GradientField
from .sparse import SparseMatrix


@dataclass
class WeightField:
    """Per-edge weights in (0, 1]: ``u`` on horizontal edges (rows x cols-1),
    ``v`` on vertical edges (rows-1 x cols)."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.float64)
        self.v = np.asarray(self.v, dtype=np.float64)
        for name, w in (("u", self.u), ("v", self.v)):
            if not np.all(np.isfinite(w)) or np.any(w <= 0.0) or np.any(w > 1.0):
                raise InvalidParameterError(f"weights {name} must lie in (0, 1]")


@dataclass
class LinearSystem:
    matrix: SparseMatrix
    rhs: np.ndarray


def stencil_nnz(rows: int, cols: int) -> int:
    """Stored entries of the 5-point stencil matrix on a rows x cols grid."""
    return 5 * rows * cols - 2 * (rows + cols)


@functools.lru_cache(maxsize=8)
def _stencil_structure(rows: int, cols: int):
    """Cached CSR structure of the 5-point stencil plus the slot map used to
    scatter per-edge values into the flat value array."""
    n = rows * cols
    r = np.repeat(np.arange(rows), cols)
    c = np.tile(np.arange(cols), rows)
    ids = np.arange(n)
    # neighbor column candidates in ascending order: up, left, self, right, down
    cand = np.stack([ids - cols, ids - 1, ids, ids + 1, ids + cols], axis=1)
    valid = np.stack([r > 0, c > 0, np.ones(n, bool), c < cols - 1, r < rows - 1], axis=1)
    counts = valid.sum(axis=1)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    indices = cand[valid].astype(np.int64)
    assert indices.shape[0] == stencil_nnz(rows, cols)
    valid_flat = valid.ravel().copy()
    offsets.flags.writeable = False
    indices.flags.writeable = False
    valid_flat.flags.writeable = False
    return offsets, indices, valid_flat


def compute_weights(phi: np.ndarray, grads: GradientField, p: float, tau: float) -> WeightField:
    """Smoothed reweighting of every edge from the current solution residuals:
    w = tau / (|residual|^(2-p) + tau), which is 1 at zero residual and decays
    toward 0 as the residual grows."""
    if p >= 2.0:
        raise InvalidParameterError(f"p must be < 2, got {p}")
    if tau <= 0.0:
        raise InvalidParameterError(f"tau must be > 0, got {tau}")
    rows, cols = grads.rows, grads.cols
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape == (rows * cols,):
        phi = phi.reshape(rows, cols)
    if phi.shape != (rows, cols):
        raise DimensionMismatchError(
            f"phi has shape {phi.shape}, expected ({rows}, {cols}) or ({rows * cols},)"
        )
    rx = np.abs(phi[:, 1:] - phi[:, :-1] - grads.dx)
    ry = np.abs(phi[1:, :] - phi[:-1, :] - grads.dy)
    e = 2.0 - p
    return WeightField(tau / (rx**e + tau), tau / (ry**e + tau))


def assemble_system(
    weights: WeightField, grads: GradientField, out: LinearSystem | None = None
) -> LinearSystem:
    """Build the weighted stencil system: off-diagonals hold -weight for each
    incident edge, the diagonal the sum of incident weights, and the right-hand
    side the weighted divergence of the gradient data. Passing ``out`` rewrites
    the values of a previously assembled system in place."""
    u, v = weights.u, weights.v
    rows = u.shape[0]
    cols = v.shape[1]
    if u.shape != (rows, cols - 1) or v.shape != (rows - 1, cols):
        raise DimensionMismatchError("weight field shapes are inconsistent")
    if grads.dx.shape != u.shape or grads.dy.shape != v.shape:
        raise DimensionMismatchError("gradient and weight shapes differ")
    n = rows * cols

    # incident-edge weights per cell, zero where the edge does not exist
    u_left = np.zeros((rows, cols))
    u_left[:, 1:] = u
    u_right = np.zeros((rows, cols))
    u_right[:, :-1] = u
    v_up = np.zeros((rows, cols))
    v_up[1:, :] = v
    v_down = np.zeros((rows, cols))
    v_down[:-1, :] = v

    offsets, indices, valid_flat = _stencil_structure(rows, cols)
    vals5 = np.empty((n, 5))
    vals5[:, 0] = -v_up.ravel()
    vals5[:, 1] = -u_left.ravel()
    vals5[:, 2] = (u_left + u_right + v_up + v_down).ravel()
    vals5[:, 3] = -u_right.ravel()
    vals5[:, 4] = -v_down.ravel()
    values = vals5.ravel()[valid_flat]

    px = u * grads.dx
    py = v * grads.dy
    bx_l = np.zeros((rows, cols))
    bx_l[:, 1:] = px
    bx_r = np.zeros((rows, cols))
    bx_r[:, :-1] = px
    by_u = np.zeros((rows, cols))
    by_u[1:, :] = py
    by_d = np.zeros((rows, cols))
    by_d[:-1, :] = py
    b = (bx_l - bx_r + by_u - by_d).ravel()

    if out is not None:
        if out.matrix.n != n or out.matrix.nnz != values.shape[0]:
            raise DimensionMismatchError("out system does not match the grid size")
        out.matrix.values[:] = values
        out.rhs[:] = b
        return out
    matrix = SparseMatrix(n, offsets, indices, values)
    return LinearSystem(matrix, b)


def objective(phi: np.ndarray, grads: GradientField, p: float) -> float:
    """Diagnostic value of the data-mismatch functional: the sum of per-edge
    |residual|^p over both edge directions. Requires p > 0."""
    if p <= 0.0:
        raise InvalidParameterError(f"objective requires p > 0, got {p}")
    rows, cols = grads.rows, grads.cols
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape == (rows * cols,):
        phi = phi.reshape(rows, cols)
    rx = np.abs(phi[:, 1:] - phi[:, :-1] - grads.dx)
    ry = np.abs(phi[1:, :] - phi[:-1, :] - grads.dy)
    return float((rx**p).sum() + (ry**p).sum())
