"""Compressed-row symmetric sparse matrix and the kernels the solver needs:
matrix-vector product, diagonal extraction, and triangular solves."""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DimensionMismatchError, SingularFactorError, StructureError


@dataclass
class SparseMatrix:
    """Square sparse matrix in compressed row form with sorted column indices.

    Index arrays are immutable after construction; ``values`` stays writable so
    a cached structure can be refilled in place (see assemble.assemble_system).
    """

    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.row_offsets = np.ascontiguousarray(self.row_offsets, dtype=np.int64)
        self.col_indices = np.ascontiguousarray(self.col_indices, dtype=np.int64)
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.row_offsets.shape != (self.n + 1,):
            raise StructureError("row_offsets must have length n+1")
        if self.row_offsets[0] != 0 or self.row_offsets[-1] != self.col_indices.shape[0]:
            raise StructureError("row_offsets must start at 0 and end at nnz")
        if np.any(np.diff(self.row_offsets) < 0):
            raise StructureError("row_offsets must be nondecreasing")
        if self.values.shape != self.col_indices.shape:
            raise StructureError("values and col_indices must have equal length")
        if self.col_indices.size:
            if self.col_indices.min() < 0 or self.col_indices.max() >= self.n:
                raise StructureError("column indices out of range")
            # strictly increasing within each row: the only allowed decreases in
            # the flat index stream are at row boundaries
            dec = np.nonzero(np.diff(self.col_indices) <= 0)[0] + 1
            if not np.all(np.isin(dec, self.row_offsets[1:-1])):
                raise StructureError("column indices must be strictly increasing per row")
        if not np.all(np.isfinite(self.values)):
            raise StructureError("matrix values must be finite")
        self.row_offsets.flags.writeable = False
        self.col_indices.flags.writeable = False

    @property
    def nnz(self) -> int:
        return int(self.col_indices.shape[0])

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "SparseMatrix":
        dense = np.asarray(dense, dtype=np.float64)
        n = dense.shape[0]
        if dense.shape != (n, n):
            raise StructureError("from_dense requires a square array")
        mask = dense != 0.0
        counts = mask.sum(axis=1)
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        cols = np.nonzero(mask)[1].astype(np.int64)
        vals = dense[mask]
        return cls(n, offsets, cols, vals)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), np.diff(self.row_offsets))
        out[rows, self.col_indices] = self.values
        return out

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        t_off, t_idx, perm = transpose_structure(self)
        if not (np.array_equal(t_off, self.row_offsets) and np.array_equal(t_idx, self.col_indices)):
            return False
        return bool(np.max(np.abs(self.values - self.values[perm]), initial=0.0) <= tol)


def _check_vector(A: SparseMatrix, x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.n,):
        raise DimensionMismatchError(
            f"{name} has length {x.shape}, expected ({A.n},)"
        )
    return x


def spmv(A: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """Sparse matrix-vector product with deterministic per-row summation order."""
    x = _check_vector(A, x, "x")
    out = np.empty(A.n)
    _kernels.csr_matvec(A.row_offsets, A.col_indices, A.values, x, out)
    return out


def _diag_positions(A: SparseMatrix) -> np.ndarray:
    pos = A._cache.get("diag_pos")
    if pos is None:
        pos = np.empty(A.n, dtype=np.int64)
        _kernels.csr_diag_positions(A.row_offsets, A.col_indices, pos)
        A._cache["diag_pos"] = pos
    return pos


def diagonal(A: SparseMatrix) -> np.ndarray:
    """The diagonal entries a_ii in row order; every one must be structurally present."""
    pos = _diag_positions(A)
    missing = np.nonzero(pos < 0)[0]
    if missing.size:
        raise StructureError(f"diagonal entry missing at row {int(missing[0])}")
    return A.values[pos]


def _check_triangular(A: SparseMatrix, lower: bool) -> None:
    key = "is_lower" if lower else "is_upper"
    flag = A._cache.get(key)
    if flag is None:
        rows = np.repeat(np.arange(A.n), np.diff(A.row_offsets))
        flag = bool(np.all(A.col_indices <= rows) if lower else np.all(A.col_indices >= rows))
        A._cache[key] = flag
    if not flag:
        raise StructureError("matrix is not triangular in the required orientation")


def lower_solve(L: SparseMatrix, b: np.ndarray, unit_diag: bool = False) -> np.ndarray:
    """Solve L x = b by forward substitution. With ``unit_diag`` the diagonal is
    taken as 1 whether or not it is stored."""
    b = _check_vector(L, b, "b")
    _check_triangular(L, lower=True)
    out = np.empty(L.n)
    bad = _kernels.csr_lower_solve(L.row_offsets, L.col_indices, L.values, b, out, unit_diag)
    if bad >= 0:
        raise SingularFactorError(f"zero pivot in lower solve at row {bad}", index=int(bad))
    return out


def upper_solve(U: SparseMatrix, b: np.ndarray, unit_diag: bool = False) -> np.ndarray:
    """Solve U x = b by backward substitution (mirror of lower_solve)."""
    b = _check_vector(U, b, "b")
    _check_triangular(U, lower=False)
    out = np.empty(U.n)
    bad = _kernels.csr_upper_solve(U.row_offsets, U.col_indices, U.values, b, out, unit_diag)
    if bad >= 0:
        raise SingularFactorError(f"zero pivot in upper solve at row {bad}", index=int(bad))
    return out


def transpose_structure(A: SparseMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """CSR structure of A^T plus the permutation taking A.values to A^T values.

    Cached on the matrix: the permutation only depends on the pattern, so
    refilled values transpose with a single fancy-indexing gather.
    """
    cached = A._cache.get("transpose")
    if cached is None:
        rows = np.repeat(np.arange(A.n), np.diff(A.row_offsets))
        order = np.argsort(A.col_indices, kind="stable")
        t_idx = rows[order]
        counts = np.bincount(A.col_indices, minlength=A.n)
        t_off = np.zeros(A.n + 1, dtype=np.int64)
        np.cumsum(counts, out=t_off[1:])
        cached = (t_off, t_idx.astype(np.int64), order.astype(np.int64))
        A._cache["transpose"] = cached
    return cached


def write_matrix_market(A: SparseMatrix, path) -> None:
    """Coordinate-format export (symmetric header, lower triangle only)."""
    rows = np.repeat(np.arange(A.n), np.diff(A.row_offsets))
    keep = A.col_indices <= rows
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
        fh.write(f"{A.n} {A.n} {int(keep.sum())}\n")
        for r, c, v in zip(rows[keep], A.col_indices[keep], A.values[keep]):
            fh.write(f"{r + 1} {c + 1} {v:.17g}\n")
