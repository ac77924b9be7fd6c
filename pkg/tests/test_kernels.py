"""Consistency of the compiled scan kernel against the numpy fallback."""
import numpy as np
import pytest

from orbitstrata import _backend, su2, su3
from orbitstrata._kernels_py import sigma_batch as python_sigma_batch
from orbitstrata.groundstate import KERNEL_EIG_RTOL, KERNEL_PROJ_RTOL, sigma_spectral
from orbitstrata.strata import ConstantField


def _batch(impl, fields, spec, g=1.0):
    return impl(fields, np.asarray(spec.f), g, KERNEL_EIG_RTOL, KERNEL_PROJ_RTOL)


@pytest.mark.parametrize("group", ["su2", "su3"])
def test_python_kernel_matches_single_point_path(group, rng):
    spec = su2() if group == "su2" else su3()
    fields = rng.normal(size=(64, 3, spec.dim))
    fields[0] = 0.0
    sigma, divergent = _batch(python_sigma_batch, fields, spec)
    for coeffs, s, d in zip(fields, sigma, divergent):
        ref = sigma_spectral(ConstantField.from_coeffs(spec, coeffs))
        assert d == ref.divergent
        assert s == pytest.approx(ref.sigma, rel=1e-12, abs=1e-13)


def test_python_kernel_respects_coupling(rng):
    spec = su2()
    fields = rng.normal(size=(16, 3, 3))
    s1, _ = _batch(python_sigma_batch, fields, spec, g=1.0)
    s2, _ = _batch(python_sigma_batch, fields, spec, g=2.5)
    assert np.allclose(s1, s2, rtol=1e-12)


def test_backend_selection_reports_a_known_name():
    assert _backend.BACKEND in ("cython", "python")
    impls = _backend.available_backends()
    assert "python" in impls


@pytest.mark.parametrize("group", ["su2", "su3"])
def test_compiled_kernel_agrees_with_python_kernel(group, rng):
    impls = _backend.available_backends()
    if "cython" not in impls:
        pytest.skip("compiled kernel not built")
    spec = su2() if group == "su2" else su3()
    fields = rng.normal(size=(256, 3, spec.dim))
    fields[3] = 0.0
    fields[4, 1:] = 0.0
    s_py, d_py = _batch(impls["python"].sigma_batch, fields, spec)
    s_cy, d_cy = _batch(impls["cython"].sigma_batch, fields, spec)
    assert np.array_equal(d_py, d_cy)
    finite = np.isfinite(s_py)
    assert np.all(np.isfinite(s_cy) == finite)
    assert np.max(np.abs(s_py[finite] - s_cy[finite]) / (1.0 + s_py[finite])) <= 1e-11


def test_kernels_accept_readonly_inputs(rng):
    spec = su3()
    fields = rng.normal(size=(8, 3, 8))
    fields.setflags(write=False)
    for impl in _backend.available_backends().values():
        sigma, _ = _batch(impl.sigma_batch, fields, spec)
        assert np.all(np.isfinite(sigma))
