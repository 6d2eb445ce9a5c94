"""Shared builders for randomized sparse test systems."""

import numpy as np
import pytest

from lpunwrap.assemble import WeightField, assemble_system
from lpunwrap.grid import GradientField
from lpunwrap.sparse import SparseMatrix, _diag_positions


def stencil_matrix(rng, rows, cols, diag_shift=0.0):
    """Random positive-weight 5-point stencil matrix; a positive diag_shift
    turns the singular zero-row-sum operator into an SPD one."""
    u = rng.uniform(0.1, 1.0, (rows, cols - 1))
    v = rng.uniform(0.1, 1.0, (rows - 1, cols))
    dx = rng.uniform(-0.5, 0.5, (rows, cols - 1))
    dy = rng.uniform(-0.5, 0.5, (rows - 1, cols))
    system = assemble_system(WeightField(u, v), GradientField(dx, dy))
    if diag_shift:
        system.matrix.values[_diag_positions(system.matrix)] += diag_shift
    return system


def chain_matrix(rng, n, diag_shift=0.0):
    """Tridiagonal stencil matrix (a 1-column grid)."""
    return stencil_matrix(rng, n, 1, diag_shift=diag_shift)


def random_lower(rng, n, density=0.3, unit_diag=False):
    """Random sparse lower-triangular matrix; with ``unit_diag`` the diagonal
    is left unstored (implicitly 1), otherwise it is set away from zero."""
    dense = np.tril(rng.normal(size=(n, n)) * (rng.random((n, n)) < density), k=-1)
    if not unit_diag:
        dense[np.diag_indices(n)] = rng.uniform(1.0, 2.0, n) * rng.choice([-1.0, 1.0], n)
    return SparseMatrix.from_dense(dense)


def relerr(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
