"""Acceptance suite: one test per criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v`` to get one pass/fail line per
criterion (each test also prints a summary line, visible with ``-rA``/``-s``).
"""
import math
import time

import numpy as np
import pytest

from orbitstrata import (
    ClosedFormCase,
    ConstantField,
    HolonomyMode,
    build_ansatz,
    classify,
    closed_form,
    resolvent_form,
    scan_grid,
    sigma_quadrature,
    sigma_spectral,
    su2,
    su3,
)
from orbitstrata.constraints import (
    dual_inner,
    jprime,
    jprime_adjoint,
    pair_inner,
    qc_check,
    random_background,
    random_dual,
    random_tangent,
    symmetry_space,
    verify_splittings,
    zero_background,
    TangentPair,
)
from orbitstrata.liealg import nullspace


def _report(num, text):
    print(f"[criterion {num}] PASS - {text}")


def su2_diag(a1, a2, a3):
    return build_ansatz("SU2_DIAG", [a1, a2, a3])


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q.T


def test_criterion_1_closed_form_regression_on_a_grid():
    grid = np.linspace(0.1, 3.0, 21)[1:]  # 20 points in (0.1, 3]
    start = time.perf_counter()
    worst = 0.0
    for a2 in grid:
        for a3 in grid:
            sigma = sigma_spectral(su2_diag(0.0, a2, a3)).sigma
            exact = a2**2 * a3**2 / math.sqrt(a2**2 + a3**2)
            worst = max(worst, abs(sigma - exact) / exact)
    elapsed = time.perf_counter() - start
    assert worst <= 1e-8, f"worst relative error {worst:.3e}"
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    _report(1, f"20x20 grid, worst rel err {worst:.2e}, {elapsed*1e3:.0f} ms")


def test_criterion_2_resolvent_matches_closed_forms():
    rng = np.random.default_rng(2)

    def field_for(case, params):
        if case is ClosedFormCase.SU2_DIAG:
            return build_ansatz("SU2_DIAG", params)
        if case is ClosedFormCase.SU3_II:
            return build_ansatz("SU3_II", params)
        if case is ClosedFormCase.SU3_III:
            return build_ansatz("SU3_III", params)
        if case is ClosedFormCase.SU3_IV:
            return build_ansatz("SU3_IV", params)
        if case is ClosedFormCase.SU3_III_A4ZERO:
            return build_ansatz("SU3_III", [0.0, params[0], params[1]])
        if case is ClosedFormCase.SU3_III_A5ZERO:
            return build_ansatz("SU3_III", [params[0], 0.0, params[1]])
        return build_ansatz("SU3_III", [params[0], params[1], 0.0])

    worst = 0.0
    for case in ClosedFormCase:
        arity = 2 if case in (
            ClosedFormCase.SU3_IV,
            ClosedFormCase.SU3_III_A4ZERO,
            ClosedFormCase.SU3_III_A5ZERO,
            ClosedFormCase.SU3_III_A8ZERO,
        ) else 3
        for _ in range(100):
            params = rng.uniform(0.2, 2.0, size=arity)
            lam = float(rng.uniform(0.0, 5.0))
            oracle = closed_form(case, params, lam)
            value = resolvent_form(field_for(case, list(params)), lam)
            worst = max(worst, abs(value - oracle) / abs(oracle))
    assert worst <= 1e-10, f"worst relative error {worst:.3e}"

    # spot values: the two internally-consistent families as originally stated
    assert resolvent_form(su2_diag(1, 1, 1), 1.0) == pytest.approx(0.6, rel=1e-10)
    assert resolvent_form(build_ansatz("SU3_II", [1, 1, 0.7]), 0.0) == pytest.approx(0.5, rel=1e-10)

    # the asymmetric family and the three-parameter limits were originally
    # stated with an exact spurious factor of 4; the independently derived
    # correction divides it out and the relationship itself is pinned here
    assert closed_form("SU3_IV", [1, 1], 0.0, uncorrected=True) == pytest.approx(6.0)
    assert resolvent_form(build_ansatz("SU3_IV", [1, 1]), 0.0) == pytest.approx(6.0 / 4.0, rel=1e-10)
    assert closed_form("SU3_III_A4ZERO", [1, 1], 0.0, uncorrected=True) == pytest.approx(12.0 / 7.0)
    assert resolvent_form(build_ansatz("SU3_III", [0, 1, 1]), 0.0) == pytest.approx(3.0 / 7.0, rel=1e-10)
    for case in ("SU3_IV", "SU3_III_A4ZERO", "SU3_III_A5ZERO", "SU3_III_A8ZERO"):
        params = rng.uniform(0.2, 2.0, size=2)
        lam = float(rng.uniform(0.0, 4.0))
        assert closed_form(case, params, lam, uncorrected=True) == pytest.approx(
            4.0 * closed_form(case, params, lam), rel=1e-12
        )
    # malformed-token resolution in the full three-parameter form: the
    # variants agree (up to the factor 4) exactly at unit shift, not elsewhere
    p = [0.9, 1.3, 0.7]
    assert closed_form("SU3_III", p, 1.0, uncorrected=True) == pytest.approx(
        4.0 * closed_form("SU3_III", p, 1.0), rel=1e-12
    )
    assert abs(
        closed_form("SU3_III", p, 2.0, uncorrected=True) - 4.0 * closed_form("SU3_III", p, 2.0)
    ) > 1e-3
    _report(2, f"7 closed forms x 100 samples, worst rel err {worst:.2e}; factor-4 correction pinned")


def test_criterion_3_measure_concentration_ridge():
    for eps in (1e-2, 1e-3):
        for k in (0.5, 1.0, 2.0):
            field = su2_diag(0.0, eps, k / eps)
            sigma = sigma_spectral(field).sigma
            assert abs(sigma - eps * k) <= 1e-2 * (eps * k), (eps, k, sigma)
            report = classify(field, HolonomyMode.CURVATURE_SPAN)
            assert report.isotropy_label == "U(1)"
            assert report.stratum_index == 2
    _report(3, "sigma(0, eps, K/eps) = eps*K within 1% and the abelian stratum is reported")


def test_criterion_4_exponent_surface_reproduction(tmp_path):
    start = time.perf_counter()
    out = tmp_path / "surface.csv"
    result = scan_grid(
        "SU2_DIAG", {"a2": (0.0, 2.0, 101), "a3": (0.0, 2.0, 101)}, {"a1": 0.0}, out=out
    )
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"took {elapsed:.2f}s"

    lines = out.read_text().splitlines()
    assert lines[0] == "a2,a3,sigma,divergent"
    assert len(lines) == 1 + 101 * 101

    table = result.sigma.reshape(101, 101)
    a = np.linspace(0.0, 2.0, 101)
    assert np.all(table[0, :] == 0.0)
    assert np.all(table[:, 0] == 0.0)
    assert np.all(table[1:, 1:] > 0.0)
    diagonal = np.diagonal(table)
    assert np.all(np.diff(diagonal) > 0.0)
    assert not result.divergent.any()
    # spot-check the surface against the closed form
    assert table[50, 101 // 2] == pytest.approx(a[50] ** 4 / (math.sqrt(2.0) * a[50]), rel=1e-10)
    _report(4, f"101x101 surface in {elapsed:.2f}s: zero on the axes, positive and ridged elsewhere")


def test_criterion_5_all_table_rows_are_reachable():
    su2_cases = [
        (su2_diag(1.0, 1.0, 1.0), 1, "Z_2", "SU(2)"),
        (su2_diag(0.0, 1e-3, 1e3), 2, "U(1)", "U(1)"),
        (su2_diag(0.0, 0.0, 0.0), 3, "SU(2)", "Z_2"),
    ]
    rng = np.random.default_rng(5)
    generic_su3 = ConstantField.from_coeffs(su3(), rng.normal(size=(3, 8)))
    su3_cases = [
        (generic_su3, 1, "Z_3", "SU(3)"),
        (build_ansatz("SU3_III", [0.7, 1.1, 0.6]), 2, "U(1)", "U(2)"),
        (build_ansatz("SU3_II", [1.0, 0.8, 0.5]), 3, "U(1)xU(1)", "U(1)xU(1)"),
        (build_ansatz("SU3_IV", [0.8, 1.1]), 4, "U(2)", "U(1)"),
        (ConstantField.from_coeffs(su3(), np.zeros((3, 8))), 5, "SU(3)", "Z_3"),
    ]
    hits = 0
    for field, index, isotropy, subbundle in su2_cases + su3_cases:
        report = classify(field)
        assert report.stratum_index == index
        assert report.isotropy_label == isotropy
        assert report.subbundle_label == subbundle
        hits += 1
    assert hits == 8
    _report(5, "3/3 su(2) rows and 5/5 su(3) rows classified with matching labels")


def test_criterion_6_constraint_suite_identities():
    spec = su2()
    rng = np.random.default_rng(6)
    start = time.perf_counter()

    basis = symmetry_space(zero_background(spec, 3))
    assert len(basis) == 3

    worst_adj = 0.0
    for _ in range(20):
        bg = random_background(spec, 3, rng)
        for _ in range(3):
            t = random_tangent(bg, rng)
            v = random_dual(bg, rng)
            lhs = dual_inner(jprime(bg, t), v, bg.spacing)
            rhs = pair_inner(t, jprime_adjoint(bg, v), bg.spacing)
            worst_adj = max(worst_adj, abs(lhs - rhs) / max(1.0, abs(lhs)))
        report = verify_splittings(bg)
        assert report.dim_ker_jprime + report.dim_im_jprime_adj == report.dim_total
        assert report.dim_ker_jprime_adj + report.dim_im_jprime == 81
        assert report.orth_residual <= 1e-8
    elapsed = time.perf_counter() - start
    assert worst_adj <= 1e-10
    assert elapsed < 30.0, f"took {elapsed:.2f}s"
    _report(6, f"20 backgrounds: adjointness {worst_adj:.2e}, exact rank-nullity, {elapsed:.1f}s")


def test_criterion_7_quadratic_constraint_discrimination():
    spec = su2()
    L = 3
    rng = np.random.default_rng(7)
    bg = zero_background(spec, L)

    n = L**3
    cols = np.empty((3 * n, n))
    for idx in range(3 * n):
        e = np.zeros(3 * n)
        e[idx] = 1.0
        e = e.reshape(L, L, L, 3)
        div = sum(
            (np.roll(e[..., i], -1, axis=i) - np.roll(e[..., i], 1, axis=i)) / 2.0
            for i in range(3)
        )
        cols[idx] = div.ravel()
    div_free = nullspace(cols.T)

    def sample_divergence_free():
        combo = rng.normal(size=div_free.shape[0]) @ div_free
        return combo.reshape(L, L, L, 3)

    color = np.array([0.6, -0.2, 1.0])
    aligned = TangentPair(
        sample_divergence_free()[..., None] * color,
        sample_divergence_free()[..., None] * color,
    )
    report = qc_check(bg, aligned, tol=1e-8)
    assert report.member, report

    a = np.zeros(bg.field_shape)
    e = np.zeros(bg.field_shape)
    a[..., 0] = sample_divergence_free()
    e[..., 1] = sample_divergence_free()
    report = qc_check(bg, TangentPair(a, e), tol=1e-8)
    assert report.slice_residual <= 1e-8
    assert report.linear_residual <= 1e-8
    assert report.quadratic_residual > 1e-8
    assert not report.member
    _report(7, "aligned pair is a member; non-aligned pair fails only the quadratic condition")


def test_criterion_8_invariance_suite():
    rng = np.random.default_rng(8)
    fields = [
        su2_diag(0.7, 1.1, 1.9),
        build_ansatz("SU3_III", [0.7, 1.1, 0.6]),
    ]
    worst = 0.0
    for field in fields:
        base_sigma = sigma_spectral(field).sigma
        base_index = classify(field).stratum_index
        for _ in range(25):
            g = field.spec.random_group_element(rng)
            rotated = field.rotated_in_color(g)
            worst = max(worst, abs(sigma_spectral(rotated).sigma - base_sigma) / base_sigma)
            assert classify(rotated).stratum_index == base_index
        for _ in range(25):
            rotated = field.rotated_spatially(random_rotation(rng))
            worst = max(worst, abs(sigma_spectral(rotated).sigma - base_sigma) / base_sigma)
            assert classify(rotated).stratum_index == base_index
    assert worst <= 1e-9, f"worst relative drift {worst:.3e}"
    _report(8, f"50 gauge + 50 spatial transformations, worst sigma drift {worst:.2e}")


def test_criterion_9_spectral_quadrature_cross_validation():
    rng = np.random.default_rng(9)
    spec = su3()
    checked = 0
    worst = 0.0
    while checked < 100:
        field = ConstantField.from_coeffs(spec, rng.normal(size=(3, 8)))
        s = sigma_spectral(field)
        q = sigma_quadrature(field)
        assert s.divergent == q.divergent
        if s.divergent:
            continue
        worst = max(worst, abs(s.sigma - q.sigma) / s.sigma)
        checked += 1
    assert worst <= 1e-7, f"worst relative disagreement {worst:.3e}"
    _report(9, f"100 fields, spectral vs quadrature worst rel diff {worst:.2e}")
