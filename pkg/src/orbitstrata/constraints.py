"""Discretized momentum-map apparatus on a periodic cubic lattice.

The Gauss constraint map, its linearization, the adjoint of the
linearization, the complex structure, and the quadratic charge form are all
realized with central differences on a periodic L^3 lattice.  The central
difference operator is exactly antisymmetric there, so the adjoint identity
and the induced orthogonal splittings hold in exact arithmetic (up to
roundoff) rather than up to discretization error.

Note: on even L the central difference annihilates checkerboard modes, so
zero-background symmetry counts match the continuum (= algebra dimension)
only for odd L; the suite pins its exact-dimension statements at L = 3.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liealg import SVD_RTOL, GroupId, GroupSpec, nullspace

__all__ = [
    "LatticeBackground",
    "TangentPair",
    "DualSection",
    "ConstraintReport",
    "SplittingReport",
    "ResourceLimitError",
    "zero_background",
    "random_background",
    "momentum_map",
    "jprime",
    "jprime_adjoint",
    "apply_complex_structure",
    "wedge",
    "quadratic_form",
    "qc_check",
    "gauge_variation",
    "symmetry_space",
    "verify_splittings",
    "same_symmetry_tangents",
    "pair_inner",
    "dual_inner",
    "pair_norm",
    "dual_norm",
]

MEMBERSHIP_TOL = 1e-8

# Dense assembly caps keeping operators at <= ~1e4 columns.
_MAX_L = {GroupId.SU2: 6, GroupId.SU3: 4}


class ResourceLimitError(RuntimeError):
    """The lattice is too large for dense subspace extraction."""


@dataclass(frozen=True, eq=False)
class LatticeBackground:
    """Background canonical pair on a periodic cubic lattice.

    ``A`` and ``E`` have shape (L, L, L, 3, dim): site, spatial direction,
    color.  Site arithmetic wraps modulo L along every axis.
    """

    spec: GroupSpec
    L: int
    A: np.ndarray
    E: np.ndarray
    spacing: float = 1.0
    g: float = 1.0

    def __post_init__(self):
        shape = (self.L, self.L, self.L, 3, self.spec.dim)
        if self.L < 2:
            raise ValueError("lattice needs L >= 2 sites per axis")
        if self.spacing <= 0:
            raise ValueError("lattice spacing must be positive")
        for name, arr in (("A", self.A), ("E", self.E)):
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")

    @property
    def n_sites(self) -> int:
        return self.L**3

    @property
    def field_shape(self) -> tuple:
        return (self.L, self.L, self.L, 3, self.spec.dim)

    @property
    def dual_shape(self) -> tuple:
        return (self.L, self.L, self.L, self.spec.dim)


@dataclass(frozen=True, eq=False)
class TangentPair:
    """Perturbation (a, e) of a background canonical pair."""

    a: np.ndarray
    e: np.ndarray

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.a.ravel(), self.e.ravel()])


@dataclass(frozen=True, eq=False)
class DualSection:
    """Section of the dual algebra: one color vector per site."""

    v: np.ndarray

    def flatten(self) -> np.ndarray:
        return self.v.ravel()


def zero_background(spec: GroupSpec, L: int, spacing: float = 1.0, g: float = 1.0) -> LatticeBackground:
    shape = (L, L, L, 3, spec.dim)
    return LatticeBackground(spec, L, np.zeros(shape), np.zeros(shape), spacing, g)


def random_background(
    spec: GroupSpec,
    L: int,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    spacing: float = 1.0,
    g: float = 1.0,
) -> LatticeBackground:
    shape = (L, L, L, 3, spec.dim)
    return LatticeBackground(
        spec, L, amplitude * rng.normal(size=shape), amplitude * rng.normal(size=shape), spacing, g
    )


def random_tangent(bg: LatticeBackground, rng: np.random.Generator, amplitude: float = 1.0) -> TangentPair:
    return TangentPair(
        amplitude * rng.normal(size=bg.field_shape),
        amplitude * rng.normal(size=bg.field_shape),
    )


def random_dual(bg: LatticeBackground, rng: np.random.Generator, amplitude: float = 1.0) -> DualSection:
    return DualSection(amplitude * rng.normal(size=bg.dual_shape))


def _ddc(arr: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Central difference along a lattice axis, periodic wrap."""
    return (np.roll(arr, -1, axis=axis) - np.roll(arr, 1, axis=axis)) / (2.0 * h)


def _check_field_shape(bg: LatticeBackground, arr: np.ndarray, name: str) -> None:
    if arr.shape != bg.field_shape:
        raise ValueError(f"{name} must have shape {bg.field_shape}, got {arr.shape}")


def _check_dual_shape(bg: LatticeBackground, arr: np.ndarray, name: str) -> None:
    if arr.shape != bg.dual_shape:
        raise ValueError(f"{name} must have shape {bg.dual_shape}, got {arr.shape}")


def momentum_map(bg: LatticeBackground) -> DualSection:
    """Gauss constraint Gamma_b = div E_b + f_bca A_c^i E_a^i."""
    div = sum(_ddc(bg.E[..., i, :], i, bg.spacing) for i in range(3))
    br = np.einsum("bca,xyzic,xyzia->xyzb", bg.spec.f, bg.A, bg.E)
    return DualSection(div + br)


def jprime(bg: LatticeBackground, t: TangentPair) -> DualSection:
    """Linearized constraint: div e_b + f_bca (A_c^k e_a^k + a_c^k E_a^k)."""
    _check_field_shape(bg, t.a, "a")
    _check_field_shape(bg, t.e, "e")
    div = sum(_ddc(t.e[..., i, :], i, bg.spacing) for i in range(3))
    br = np.einsum("bca,xyzkc,xyzka->xyzb", bg.spec.f, bg.A, t.e)
    br += np.einsum("bca,xyzkc,xyzka->xyzb", bg.spec.f, t.a, bg.E)
    return DualSection(div + br)


def jprime_adjoint(bg: LatticeBackground, v: DualSection) -> TangentPair:
    """Adjoint of the linearized constraint under the discrete metrics.

    The a-slot is f_bac E_c^k v_b; the e-slot is -grad_k v_a + f_bca A_c^k v_b.
    The sign of the gradient term is fixed by the adjoint identity
    <jprime(t), v> = <<t, jprime_adjoint(v)>>, which holds to roundoff on the
    periodic lattice.
    """
    _check_dual_shape(bg, v.v, "v")
    f = bg.spec.f
    a_part = np.einsum("bac,xyzkc,xyzb->xyzka", f, bg.E, v.v)
    grad = np.stack([_ddc(v.v, k, bg.spacing) for k in range(3)], axis=3)
    e_part = -grad + np.einsum("bca,xyzkc,xyzb->xyzka", f, bg.A, v.v)
    return TangentPair(a_part, e_part)


def apply_complex_structure(t: TangentPair) -> TangentPair:
    """(a, e) -> (-e, a); squares to minus the identity."""
    return TangentPair(-t.e, t.a)


def wedge(t: TangentPair, spec: GroupSpec) -> DualSection:
    """Pointwise gluonic charge [a ^ e]_b = f_bca a_c^k e_a^k."""
    return DualSection(np.einsum("bca,xyzkc,xyzka->xyzb", spec.f, t.a, t.e))


def quadratic_form(t1: TangentPair, t2: TangentPair, spec: GroupSpec) -> DualSection:
    """Symmetric form [a1 ^ e2] + [a2 ^ e1]; its diagonal is 2 [a ^ e]."""
    if t1.a.shape != t2.a.shape or t1.e.shape != t2.e.shape:
        raise ValueError("tangent pairs must have matching shapes")
    first = np.einsum("bca,xyzkc,xyzka->xyzb", spec.f, t1.a, t2.e)
    second = np.einsum("bca,xyzkc,xyzka->xyzb", spec.f, t2.a, t1.e)
    return DualSection(first + second)


def gauge_variation(bg: LatticeBackground, dalpha: DualSection) -> TangentPair:
    """Infinitesimal gauge transformation generated by a dual section.

    da_a^i = -grad_i dalpha_a + f_bca dalpha_b A_c^i,
    de_a^i =                    f_bca dalpha_b E_c^i.
    """
    _check_dual_shape(bg, dalpha.v, "dalpha")
    f = bg.spec.f
    grad = np.stack([_ddc(dalpha.v, k, bg.spacing) for k in range(3)], axis=3)
    da = -grad + np.einsum("bca,xyzb,xyzic->xyzia", f, dalpha.v, bg.A)
    de = np.einsum("bca,xyzb,xyzic->xyzia", f, dalpha.v, bg.E)
    return TangentPair(da, de)


# ---------------------------------------------------------------------------
# Discrete L2 inner products (volume weight h^3 per site)
# ---------------------------------------------------------------------------


def dual_inner(v1: DualSection, v2: DualSection, spacing: float = 1.0) -> float:
    return spacing**3 * float(np.sum(v1.v * v2.v))


def pair_inner(t1: TangentPair, t2: TangentPair, spacing: float = 1.0) -> float:
    return spacing**3 * float(np.sum(t1.a * t2.a) + np.sum(t1.e * t2.e))


def dual_norm(v: DualSection, spacing: float = 1.0) -> float:
    return float(np.sqrt(dual_inner(v, v, spacing)))


def pair_norm(t: TangentPair, spacing: float = 1.0) -> float:
    return float(np.sqrt(pair_inner(t, t, spacing)))


# ---------------------------------------------------------------------------
# Constraint membership
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintReport:
    """Residuals of the slice, linearized, and quadratic conditions."""

    slice_residual: float
    linear_residual: float
    quadratic_residual: float
    member: bool
    tolerance: float


def qc_check(bg: LatticeBackground, t: TangentPair, tol: float = MEMBERSHIP_TOL) -> ConstraintReport:
    """Membership of a perturbation in the quadratically-constrained set.

    The slice and linearized conditions are derived from the defining
    operators as jprime(Jt) = 0 and jprime(t) = 0; the quadratic condition is
    the vanishing of the pointwise charge [a ^ e].
    """
    h = bg.spacing
    slice_res = dual_norm(jprime(bg, apply_complex_structure(t)), h)
    linear_res = dual_norm(jprime(bg, t), h)
    quad_res = dual_norm(wedge(t, bg.spec), h)
    member = slice_res <= tol and linear_res <= tol and quad_res <= tol
    return ConstraintReport(slice_res, linear_res, quad_res, member, tol)


# ---------------------------------------------------------------------------
# Dense subspace extraction
# ---------------------------------------------------------------------------


def _check_dense_capacity(bg: LatticeBackground) -> None:
    max_l = _MAX_L[bg.spec.group_id]
    if bg.L > max_l:
        raise ResourceLimitError(
            f"dense assembly is capped at L <= {max_l} for {bg.spec.group_id.value}; got L = {bg.L}"
        )


def _n_dual(bg: LatticeBackground) -> int:
    return bg.n_sites * bg.spec.dim


def _n_tangent(bg: LatticeBackground) -> int:
    return 2 * bg.n_sites * 3 * bg.spec.dim


def _jprime_matrix(bg: LatticeBackground) -> np.ndarray:
    """Dense (n_dual, n_tangent) matrix of the linearized constraint."""
    nt = _n_tangent(bg)
    half = nt // 2
    cols = np.empty((nt, _n_dual(bg)))
    zero = np.zeros(bg.field_shape)
    for idx in range(half):
        basis = np.zeros(half)
        basis[idx] = 1.0
        t = TangentPair(basis.reshape(bg.field_shape), zero)
        cols[idx] = jprime(bg, t).flatten()
    for idx in range(half):
        basis = np.zeros(half)
        basis[idx] = 1.0
        t = TangentPair(zero, basis.reshape(bg.field_shape))
        cols[half + idx] = jprime(bg, t).flatten()
    return cols.T


def _jprime_adjoint_matrix(bg: LatticeBackground) -> np.ndarray:
    """Dense (n_tangent, n_dual) matrix of the adjoint map."""
    nd = _n_dual(bg)
    cols = np.empty((nd, _n_tangent(bg)))
    for idx in range(nd):
        basis = np.zeros(nd)
        basis[idx] = 1.0
        cols[idx] = jprime_adjoint(bg, DualSection(basis.reshape(bg.dual_shape))).flatten()
    return cols.T


def _rank(svals: np.ndarray) -> int:
    if svals.size == 0:
        return 0
    thresh = SVD_RTOL * max(1.0, svals[0])
    return int(np.sum(svals > thresh))


def symmetry_space(bg: LatticeBackground) -> list[DualSection]:
    """Orthonormal basis of the infinitesimal symmetries, Ker of the adjoint.

    Assembled densely and extracted by SVD; vectors are orthonormal in
    lattice coordinates.
    """
    _check_dense_capacity(bg)
    rows = nullspace(_jprime_adjoint_matrix(bg))
    return [DualSection(r.reshape(bg.dual_shape)) for r in rows]


@dataclass(frozen=True)
class SplittingReport:
    """Rank and orthogonality bookkeeping for the tangent-space splittings."""

    dim_total: int
    dim_ker_jprime: int
    dim_im_jprime_adj: int
    dim_ker_jprime_adj: int
    dim_im_jprime: int
    orth_residual: float


def verify_splittings(bg: LatticeBackground) -> SplittingReport:
    """Ranks and nullities of the two independently assembled operators.

    Checks that tangent space splits as Ker(jprime) + Im(jprime_adjoint) and
    the dual space as Ker(jprime_adjoint) + Im(jprime); the orthogonality
    residual is the largest metric inner product between a kernel vector of
    jprime and an image vector of jprime_adjoint.
    """
    _check_dense_capacity(bg)
    m = _jprime_matrix(bg)
    madj = _jprime_adjoint_matrix(bg)

    _, s1, vh1 = np.linalg.svd(m, full_matrices=True)
    r1 = _rank(s1)
    ker_jprime = vh1[r1:]

    u2, s2, _ = np.linalg.svd(madj, full_matrices=True)
    r2 = _rank(s2)
    im_adj = u2[:, :r2]

    orth = 0.0
    if ker_jprime.shape[0] and r2:
        orth = float(np.max(np.abs(ker_jprime @ im_adj))) * bg.spacing**3

    return SplittingReport(
        dim_total=_n_tangent(bg),
        dim_ker_jprime=_n_tangent(bg) - r1,
        dim_im_jprime_adj=r2,
        dim_ker_jprime_adj=_n_dual(bg) - r2,
        dim_im_jprime=r1,
        orth_residual=orth,
    )


def same_symmetry_tangents(bg: LatticeBackground) -> list[TangentPair]:
    """Basis of the degeneracy space of the quadratic form inside the
    intersection Ker(jprime o J) with Ker(jprime).

    A tangent t belongs when quadratic_form(t, s) vanishes identically for
    every s in an intersection basis.  Quadratic in the intersection
    dimension, so capped tighter than the linear suite.
    """
    _check_dense_capacity(bg)
    m = _jprime_matrix(bg)
    half = _n_tangent(bg) // 2
    # matrix of jprime o J: J sends (a, e) to (-e, a)
    mj = np.hstack([m[:, half:], -m[:, :half]])
    k_basis = nullspace(np.vstack([m, mj]))
    n_k = k_basis.shape[0]
    if n_k == 0:
        return []
    if n_k * n_k * _n_dual(bg) > 5e7:
        raise ResourceLimitError(
            f"degeneracy-space extraction needs {n_k}^2 x {_n_dual(bg)} pairings; "
            "reduce the lattice size"
        )
    a_parts = k_basis[:, :half].reshape((n_k,) + bg.field_shape)
    e_parts = k_basis[:, half:].reshape((n_k,) + bg.field_shape)
    cross = np.einsum("bca,Ixyzkc,Jxyzka->IJxyzb", bg.spec.f, a_parts, e_parts)
    q_all = cross + cross.transpose(1, 0, 2, 3, 4, 5)  # Q(k_I, k_J)
    stacked = q_all.transpose(1, 2, 3, 4, 5, 0).reshape(-1, n_k)
    coeff_rows = nullspace(stacked)
    out = []
    for c in coeff_rows:
        vec = c @ k_basis
        out.append(
            TangentPair(vec[:half].reshape(bg.field_shape), vec[half:].reshape(bg.field_shape))
        )
    return out
