"""Low-level CSR compute kernels.

The loop kernels below are JIT-compiled with numba when it is available.
Setting the environment variable ``CROSSBAR_PRECOND_NUMBA=0`` (before import)
forces the pure-numpy/Python fallback path; ``benchmarks/kernel_bench.py``
compares the two.
"""

import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("CROSSBAR_PRECOND_NUMBA", "1") != "0"


def _csr_matvec_loop(n_rows, indptr, indices, data, x):
    out = np.empty(n_rows)
    for i in range(n_rows):
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        out[i] = acc
    return out


def _csr_matvec_numpy(n_rows, indptr, indices, data, x):
    # bincount handles empty rows (including trailing ones) with no special
    # cases, unlike add.reduceat.
    row_ids = np.repeat(np.arange(n_rows), np.diff(indptr))
    return np.bincount(row_ids, weights=data * x[indices], minlength=n_rows)


def _ilu0_loop(n, indptr, indices, data, diag_ptr):
    """In-place IKJ incomplete LU restricted to the CSR pattern.

    ``data`` holds A on entry and the combined factors on exit: strictly
    lower entries are the L multipliers (unit diagonal implicit), the rest
    is U. Returns -1 on success, else the row index of a zero pivot.
    """
    for i in range(n):
        for p in range(indptr[i], diag_ptr[i]):
            k = indices[p]
            pivot = data[diag_ptr[k]]
            if pivot == 0.0:
                return k
            mult = data[p] / pivot
            data[p] = mult
            # subtract mult * U(k, j) from row i wherever (i, j) exists
            for q in range(diag_ptr[k] + 1, indptr[k + 1]):
                j = indices[q]
                lo = p + 1
                hi = indptr[i + 1]
                while lo < hi:
                    mid = (lo + hi) // 2
                    if indices[mid] < j:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < indptr[i + 1] and indices[lo] == j:
                    data[lo] -= mult * data[q]
        if data[diag_ptr[i]] == 0.0:
            return i
    return -1


def _solve_lower_unit_loop(n, indptr, indices, data, b):
    x = b.copy()
    for i in range(n):
        acc = x[i]
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j >= i:
                break
            acc -= data[p] * x[j]
        x[i] = acc
    return x


def _solve_upper_loop(n, indptr, indices, data, diag_ptr, b):
    x = b.copy()
    for i in range(n - 1, -1, -1):
        acc = x[i]
        for p in range(diag_ptr[i] + 1, indptr[i + 1]):
            acc -= data[p] * x[indices[p]]
        x[i] = acc / data[diag_ptr[i]]
    return x


if USE_NUMBA:
    csr_matvec = njit(cache=True)(_csr_matvec_loop)
    ilu0_inplace = njit(cache=True)(_ilu0_loop)
    solve_lower_unit = njit(cache=True)(_solve_lower_unit_loop)
    solve_upper = njit(cache=True)(_solve_upper_loop)
else:
    csr_matvec = _csr_matvec_numpy
    ilu0_inplace = _ilu0_loop
    solve_lower_unit = _solve_lower_unit_loop
    solve_upper = _solve_upper_loop
