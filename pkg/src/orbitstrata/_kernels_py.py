"""Pure-numpy batch kernel for grid scans of the ground-state exponent.

Semantically identical to the compiled extension in ``_kernels``; the
backend is selected at import time in ``_backend``.  Work is chunked so a
million-point scan never materializes the full stack of matrices at once.
"""
from __future__ import annotations

import numpy as np

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_k, _j, _i] = -1.0

_CHUNK = 8192


def sigma_batch(fields, f, g, eig_rtol, proj_rtol):
    """Spectral exponent for a batch of constant fields.

    Parameters
    ----------
    fields : (N, 3, dim) float array of basis coefficients
    f : (dim, dim, dim) structure constants
    g : coupling, must be positive
    eig_rtol, proj_rtol : kernel-detection thresholds

    Returns
    -------
    sigma : (N,) float array, +inf where divergent
    divergent : (N,) bool array
    """
    fields = np.ascontiguousarray(fields, dtype=np.float64)
    f = np.ascontiguousarray(f, dtype=np.float64)
    n = fields.shape[0]
    dim = f.shape[0]
    d = 3 * dim
    sigma = np.empty(n)
    divergent = np.empty(n, dtype=bool)

    for start in range(0, n, _CHUNK):
        a = fields[start : start + _CHUNK]
        p = a.shape[0]

        fm = np.einsum("abg,pmg->pmab", f, a)
        r = -g * np.einsum("nmk,pmab->pnakb", LEVI_CIVITA, fm).reshape(p, d, d)

        br = np.einsum("abc,pja,pkb->pjkc", f, a, a)
        b = (-0.5 * g * np.einsum("ijk,pjkc->pic", LEVI_CIVITA, br)).reshape(p, d)

        mu, vecs = np.linalg.eigh(r @ r)
        proj = np.einsum("pd,pdi->pi", b, vecs) ** 2

        eig_tol = eig_rtol * np.maximum(1.0, mu[:, -1])
        proj_tol = proj_rtol * np.einsum("pd,pd->p", b, b)
        on_kernel = mu <= eig_tol[:, None]
        div = np.any(on_kernel & (proj > proj_tol[:, None]), axis=1)

        safe_mu = np.where(on_kernel, 1.0, mu)
        total = np.sum(np.where(on_kernel, 0.0, proj / np.sqrt(safe_mu)), axis=1)
        vals = np.where(total > 0.0, total / g, 0.0)
        sigma[start : start + p] = np.where(div, np.inf, vals)
        divergent[start : start + p] = div

    return sigma, divergent
