"""Numba-compiled CSR kernels.

All loops are serial with a fixed traversal order (ascending column index per
row), so repeated runs on the same platform are bit-reproducible. Kernels
return a status index instead of raising; wrappers in sparse.py / precond.py
translate failures into exceptions.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def csr_matvec(indptr, indices, data, x, out):
    n = indptr.shape[0] - 1
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        out[i] = acc


@njit(cache=True)
def csr_lower_solve(indptr, indices, data, b, out, unit_diag):
    """Forward substitution for a lower-triangular CSR matrix.

    Columns are sorted, so the diagonal (when used) is the last entry of its
    row. Returns -1 on success or the row index of a zero pivot.
    """
    n = indptr.shape[0] - 1
    for i in range(n):
        s = b[i]
        end = indptr[i + 1]
        if unit_diag:
            for k in range(indptr[i], end):
                j = indices[k]
                if j >= i:
                    break
                s -= data[k] * out[j]
            out[i] = s
        else:
            if end == indptr[i] or indices[end - 1] != i:
                return i
            for k in range(indptr[i], end - 1):
                s -= data[k] * out[indices[k]]
            d = data[end - 1]
            if d == 0.0:
                return i
            out[i] = s / d
    return -1


@njit(cache=True)
def csr_upper_solve(indptr, indices, data, b, out, unit_diag):
    """Backward substitution for an upper-triangular CSR matrix (diagonal first
    in each row when used). Returns -1 or the zero-pivot row index."""
    n = indptr.shape[0] - 1
    for i in range(n - 1, -1, -1):
        s = b[i]
        start = indptr[i]
        end = indptr[i + 1]
        if unit_diag:
            for k in range(start, end):
                j = indices[k]
                if j > i:
                    s -= data[k] * out[j]
            out[i] = s
        else:
            if end == start or indices[start] != i:
                return i
            for k in range(start + 1, end):
                s -= data[k] * out[indices[k]]
            d = data[start]
            if d == 0.0:
                return i
            out[i] = s / d
    return -1


@njit(cache=True)
def csr_diag_positions(indptr, indices, out):
    """Position of each diagonal entry in the CSR arrays; -1 where missing."""
    n = indptr.shape[0] - 1
    for i in range(n):
        out[i] = -1
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] == i:
                out[i] = k
                break


@njit(cache=True)
def ilu0_factor(indptr, indices, diag_pos, data):
    """In-place IKJ incomplete LU elimination restricted to the given pattern.

    On return ``data`` holds the unit-lower multipliers in the strict lower
    positions and U in the diagonal/upper positions. Returns -1 on success or
    the pivot row index on a zero/negative pivot.
    """
    n = indptr.shape[0] - 1
    pos = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        for k in range(indptr[i], indptr[i + 1]):
            pos[indices[k]] = k
        for k in range(indptr[i], diag_pos[i]):
            j = indices[k]
            piv = data[diag_pos[j]]
            if piv <= 0.0:
                for m in range(indptr[i], indptr[i + 1]):
                    pos[indices[m]] = -1
                return j
            lij = data[k] / piv
            data[k] = lij
            for m in range(diag_pos[j] + 1, indptr[j + 1]):
                p = pos[indices[m]]
                if p >= 0:
                    data[p] -= lij * data[m]
        for k in range(indptr[i], indptr[i + 1]):
            pos[indices[k]] = -1
    for i in range(n):
        if data[diag_pos[i]] <= 0.0:
            return i
    return -1


@njit(cache=True)
def ic0_factor(lptr, lidx, ldata):
    """In-place incomplete Cholesky on the lower triangle (diagonal last per
    row), fill positions discarded. Returns -1 or the failing pivot row."""
    n = lptr.shape[0] - 1
    pos = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        for k in range(lptr[i], lptr[i + 1]):
            pos[lidx[k]] = k
        for k in range(lptr[i], lptr[i + 1] - 1):
            j = lidx[k]
            s = ldata[k]
            for m in range(lptr[j], lptr[j + 1] - 1):
                p = pos[lidx[m]]
                if p >= 0:
                    s -= ldata[p] * ldata[m]
            ljj = ldata[lptr[j + 1] - 1]
            ldata[k] = s / ljj
        s = ldata[lptr[i + 1] - 1]
        for k in range(lptr[i], lptr[i + 1] - 1):
            s -= ldata[k] * ldata[k]
        if s <= 0.0:
            for k in range(lptr[i], lptr[i + 1]):
                pos[lidx[k]] = -1
            return i
        ldata[lptr[i + 1] - 1] = np.sqrt(s)
        for k in range(lptr[i], lptr[i + 1]):
            pos[lidx[k]] = -1
    return -1
