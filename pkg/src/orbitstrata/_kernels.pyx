# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernel for grid scans of the ground-state exponent.

Mirrors ``_kernels_py.sigma_batch``: per field, build the coupling matrix R
and flattened curvature B, eigendecompose R.R with LAPACK dsyev, and sum the
projected inverse square root.  Self-contained so a scan never re-enters
Python between grid points.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt
from scipy.linalg.cython_lapack cimport dsyev

cnp.import_array()


def sigma_batch(fields, f, double g, double eig_rtol, double proj_rtol):
    """Spectral exponent for a batch of constant fields.

    Same contract as the numpy fallback: ``fields`` is (N, 3, dim),
    ``f`` is (dim, dim, dim); returns (sigma, divergent).
    """
    fields = np.ascontiguousarray(fields, dtype=np.float64)
    f = np.ascontiguousarray(f, dtype=np.float64)

    cdef const double[:, :, ::1] A = fields
    cdef const double[:, :, ::1] fc = f
    cdef Py_ssize_t n = A.shape[0]
    cdef int dim = <int> fc.shape[0]
    cdef int d = 3 * dim

    sigma_arr = np.empty(n, dtype=np.float64)
    div_arr = np.zeros(n, dtype=np.uint8)
    cdef double[::1] sigma = sigma_arr
    cdef unsigned char[::1] divergent = div_arr

    # eps[nn, mm, kk] sign for the block (nn, kk) with mm = 3 - nn - kk
    cdef int[3][3] sign_table
    sign_table[0][0] = 0;  sign_table[0][1] = -1; sign_table[0][2] = 1
    sign_table[1][0] = 1;  sign_table[1][1] = 0;  sign_table[1][2] = -1
    sign_table[2][0] = -1; sign_table[2][1] = 1;  sign_table[2][2] = 0

    cdef double[:, :, ::1] fm = np.empty((3, dim, dim))
    cdef double[:, ::1] r = np.zeros((d, d))
    cdef double[:, ::1] m = np.empty((d, d))
    cdef double[::1] b = np.empty(d)
    cdef double[::1] w = np.empty(d)

    # LAPACK workspace query
    cdef char jobz = b'V'
    cdef char uplo = b'L'
    cdef int info = 0
    cdef int lwork = -1
    cdef double wkopt = 0.0
    dsyev(&jobz, &uplo, &d, &m[0, 0], &d, &w[0], &wkopt, &lwork, &info)
    lwork = <int> wkopt
    cdef double[::1] work = np.empty(lwork)

    cdef Py_ssize_t p
    cdef int mm, nn, kk, aa, bb, cc, gg, i, j, k, jj, kk2, s
    cdef double acc, bnorm2, eig_tol, proj_tol, pr, total
    cdef int isdiv, failed = 0

    with nogil:
        for p in range(n):
            for mm in range(3):
                for aa in range(dim):
                    for bb in range(dim):
                        acc = 0.0
                        for gg in range(dim):
                            acc += fc[aa, bb, gg] * A[p, mm, gg]
                        fm[mm, aa, bb] = acc

            for nn in range(3):
                for kk in range(3):
                    if nn == kk:
                        continue
                    mm = 3 - nn - kk
                    s = sign_table[nn][kk]
                    for aa in range(dim):
                        for bb in range(dim):
                            r[nn * dim + aa, kk * dim + bb] = -g * s * fm[mm, aa, bb]

            bnorm2 = 0.0
            for i in range(3):
                jj = (i + 1) % 3
                kk2 = (i + 2) % 3
                for cc in range(dim):
                    acc = 0.0
                    for aa in range(dim):
                        for bb in range(dim):
                            acc += fc[aa, bb, cc] * A[p, jj, aa] * A[p, kk2, bb]
                    acc = -g * acc
                    b[i * dim + cc] = acc
                    bnorm2 += acc * acc

            for i in range(d):
                for j in range(d):
                    acc = 0.0
                    for k in range(d):
                        acc += r[i, k] * r[k, j]
                    m[i, j] = acc

            # row-major symmetric buffer doubles as column-major input;
            # eigenvector i comes back as row i, eigenvalues ascend in w
            dsyev(&jobz, &uplo, &d, &m[0, 0], &d, &w[0], &work[0], &lwork, &info)
            if info != 0:
                failed = 1
                break

            eig_tol = eig_rtol * (w[d - 1] if w[d - 1] > 1.0 else 1.0)
            proj_tol = proj_rtol * bnorm2
            total = 0.0
            isdiv = 0
            for i in range(d):
                pr = 0.0
                for k in range(d):
                    pr += b[k] * m[i, k]
                pr = pr * pr
                if w[i] <= eig_tol:
                    if pr > proj_tol:
                        isdiv = 1
                        break
                else:
                    total += pr / sqrt(w[i])
            if isdiv:
                sigma[p] = INFINITY
                divergent[p] = 1
            else:
                sigma[p] = total / g if total > 0.0 else 0.0

    if failed:
        raise RuntimeError("LAPACK dsyev failed to converge on a grid point")
    return sigma_arr, div_arr.astype(bool)
