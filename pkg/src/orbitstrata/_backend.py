"""Backend selection for the scan kernel.

Prefers the compiled extension when it was built; falls back to the numpy
implementation otherwise.  Set ``ORBITSTRATA_PURE_PYTHON=1`` to force the
fallback (used by the benchmark and for cross-checking the two paths).
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("ORBITSTRATA_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def sigma_batch(fields, f, g, eig_rtol, proj_rtol):
    return _impl.sigma_batch(fields, f, g, eig_rtol, proj_rtol)


def available_backends() -> dict:
    """Importable kernel implementations, keyed by backend name."""
    impls = {"python": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]

        impls["cython"] = _kernels
    except ImportError:
        pass
    return impls
