"""Exact-convention su(2) and su(3) linear algebra.

The basis is antihermitian, ``t_a = -(i/2) * m_a`` with ``m_a`` the Pauli or
Gell-Mann matrices, normalized so that ``tr(t_a t_b^H) = delta_ab / 2``.
Structure constants are derived numerically from the hardcoded matrices at
construction time (no transcribed tables), which fixes ``f_123 = +1`` for
su(2) and the standard Gell-Mann values for su(3).

All operations are pure functions; a :class:`GroupSpec` is immutable and safe
to share across threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

__all__ = [
    "GroupId",
    "GroupSpec",
    "AlgebraElement",
    "Subalgebra",
    "su2",
    "su3",
    "trace_inner",
    "trace_norm",
    "bracket",
    "generated_subalgebra",
    "closed_span",
    "centralizer",
    "adjoint_rotate",
    "adjoint_matrix",
    "group_exp",
    "nullspace",
]

# Singular values below SVD_RTOL * max(largest, 1) count as zero.  All inputs
# in this package are O(1)..O(1e2) dense matrices of dimension <= ~1e4.
SVD_RTOL = 1e-9

# Acceptance threshold for a new direction in modified Gram-Schmidt.
_GS_TOL = 1e-9

_UNITARY_TOL = 1e-12


class GroupId(Enum):
    SU2 = "SU2"
    SU3 = "SU3"


_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

_S3 = 1.0 / np.sqrt(3.0)
_GELL_MANN = np.array(
    [
        [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
        [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]],
        [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
        [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
        [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]],
        [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
        [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]],
        [[_S3, 0, 0], [0, _S3, 0], [0, 0, -2 * _S3]],
    ],
    dtype=complex,
)


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """Fixed basis and structure constants for su(2) or su(3).

    ``basis`` has shape (dim, n, n) and holds antihermitian traceless
    matrices; ``f`` has shape (dim, dim, dim) and is totally antisymmetric,
    with ``[t_a, t_b] = sum_c f[a, b, c] t_c``.
    """

    group_id: GroupId
    n: int
    dim: int
    basis: np.ndarray
    f: np.ndarray

    def element(self, coeffs) -> "AlgebraElement":
        """Algebra element with the given real coefficient vector."""
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (self.dim,):
            raise ValueError(
                f"coefficient vector must have shape ({self.dim},), got {c.shape}"
            )
        return AlgebraElement(self, c)

    def basis_element(self, a: int) -> "AlgebraElement":
        """The a-th basis element t_a (0-based index)."""
        return self.element(np.eye(self.dim)[a])

    def zero(self) -> "AlgebraElement":
        return self.element(np.zeros(self.dim))

    def from_matrix(self, mat: np.ndarray) -> "AlgebraElement":
        """Project an antihermitian traceless matrix onto the basis."""
        # coeffs_a = 2 Re tr(X t_a^H)
        coeffs = 2.0 * np.real(np.einsum("ij,aij->a", mat, self.basis.conj()))
        return self.element(coeffs)

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> "AlgebraElement":
        return self.element(rng.normal(scale=scale, size=self.dim))

    def random_group_element(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        """A random unitary obtained by exponentiating a random algebra element."""
        return group_exp(self.random_element(rng, scale))


def _structure_constants(basis: np.ndarray) -> np.ndarray:
    dim = basis.shape[0]
    f = np.zeros((dim, dim, dim))
    for a in range(dim):
        for b in range(dim):
            comm = basis[a] @ basis[b] - basis[b] @ basis[a]
            # f_abc = 2 tr([t_a, t_b] t_c^H) under the tr(t_a t_b^H) = delta/2 norm
            f[a, b] = 2.0 * np.real(np.einsum("ij,cij->c", comm, basis.conj()))
    return f


def _make_spec(group_id: GroupId, hermitian_mats: np.ndarray) -> GroupSpec:
    basis = -0.5j * hermitian_mats
    f = _structure_constants(basis)
    dim, n = basis.shape[0], basis.shape[1]

    gram = np.einsum("aij,bij->ab", basis, basis.conj()).real
    if not np.allclose(gram, 0.5 * np.eye(dim), atol=1e-14):
        raise AssertionError("basis is not trace-orthogonal with norm 1/2")
    for a in range(dim):
        for b in range(dim):
            comm = basis[a] @ basis[b] - basis[b] @ basis[a]
            rec = np.einsum("c,cij->ij", f[a, b], basis)
            if np.max(np.abs(comm - rec)) > 1e-12:
                raise AssertionError(f"structure constants do not close at ({a}, {b})")
    if not (
        np.allclose(f, -f.transpose(1, 0, 2), atol=1e-13)
        and np.allclose(f, -f.transpose(0, 2, 1), atol=1e-13)
    ):
        raise AssertionError("structure constants are not totally antisymmetric")

    basis = basis.copy()
    basis.setflags(write=False)
    f.setflags(write=False)
    return GroupSpec(group_id=group_id, n=n, dim=dim, basis=basis, f=f)


@lru_cache(maxsize=None)
def su2() -> GroupSpec:
    """The su(2) spec (Pauli basis, f = Levi-Civita)."""
    return _make_spec(GroupId.SU2, _PAULI)


@lru_cache(maxsize=None)
def su3() -> GroupSpec:
    """The su(3) spec (Gell-Mann basis)."""
    return _make_spec(GroupId.SU3, _GELL_MANN)


def get_spec(group_id) -> GroupSpec:
    gid = GroupId(group_id) if not isinstance(group_id, GroupId) else group_id
    return su2() if gid is GroupId.SU2 else su3()


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A Lie-algebra element as a real coefficient vector in the fixed basis."""

    spec: GroupSpec
    coeffs: np.ndarray

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_same_spec(self, other)
        return AlgebraElement(self.spec, self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_same_spec(self, other)
        return AlgebraElement(self.spec, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "AlgebraElement":
        return AlgebraElement(self.spec, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.spec, -self.coeffs)

    @property
    def matrix(self) -> np.ndarray:
        """The antihermitian matrix realization sum_a coeffs[a] t_a."""
        return np.einsum("a,aij->ij", self.coeffs, self.spec.basis)

    def norm(self) -> float:
        """Norm under the trace form, sqrt(tr(X X^H)) = |coeffs| / sqrt(2)."""
        return float(np.linalg.norm(self.coeffs)) / np.sqrt(2.0)

    def is_zero(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeffs), initial=0.0) <= tol)


def _check_same_spec(x: AlgebraElement, y: AlgebraElement) -> None:
    if x.spec.group_id is not y.spec.group_id:
        raise ValueError(
            f"mismatched group specs: {x.spec.group_id.value} vs {y.spec.group_id.value}"
        )


def trace_inner(x: AlgebraElement, y: AlgebraElement) -> float:
    """Trace-form inner product Re tr(X Y^H) = coeffs_x . coeffs_y / 2."""
    _check_same_spec(x, y)
    return 0.5 * float(x.coeffs @ y.coeffs)


def trace_norm(x: AlgebraElement) -> float:
    return x.norm()


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Lie bracket [x, y], with z_c = sum_ab f_abc x_a y_b."""
    _check_same_spec(x, y)
    z = np.einsum("abc,a,b->c", x.spec.f, x.coeffs, y.coeffs)
    return AlgebraElement(x.spec, z)


def _bracket_rows(f: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.einsum("abc,a,b->c", f, x, y)


def _orthonormalize_rows(rows: np.ndarray, dim: int) -> np.ndarray:
    """Deterministic modified Gram-Schmidt under the trace form.

    Processes rows in the given order; returns rows with trace-form norm 1
    (coefficient norm sqrt(2)).  Directions whose residual is below _GS_TOL
    relative to the incoming vector scale are dropped.
    """
    basis: list[np.ndarray] = []
    for r in rows:
        v = np.asarray(r, dtype=float).copy()
        scale = max(1.0, np.linalg.norm(v))
        for b in basis:
            v -= (0.5 * (v @ b)) * b  # trace-form projection; b has |b| = sqrt(2)
        n = np.linalg.norm(v)
        if n > _GS_TOL * scale:
            basis.append(v * (np.sqrt(2.0) / n))
    if not basis:
        return np.zeros((0, dim))
    return np.array(basis)


@dataclass(frozen=True, eq=False)
class Subalgebra:
    """A subspace of the algebra with a trace-orthonormal basis.

    ``vectors`` holds the basis as rows of coefficient vectors; each row has
    coefficient norm sqrt(2), i.e. trace-form norm 1.
    """

    spec: GroupSpec
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def basis_vectors(self) -> list[AlgebraElement]:
        return [AlgebraElement(self.spec, v) for v in self.vectors]

    def project_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        """Orthogonal projection of a coefficient vector onto the subspace."""
        if self.dim == 0:
            return np.zeros_like(coeffs)
        return 0.5 * (self.vectors @ coeffs) @ self.vectors

    def contains(self, x: AlgebraElement, tol: float = 1e-9) -> bool:
        resid = x.coeffs - self.project_coeffs(x.coeffs)
        return bool(np.linalg.norm(resid) <= tol * max(1.0, np.linalg.norm(x.coeffs)))

    def contains_subspace(self, other: "Subalgebra", tol: float = 1e-9) -> bool:
        return all(self.contains(v, tol) for v in other.basis_vectors)


def closed_span(
    gens,
    spec: GroupSpec,
    ad_generators=(),
) -> Subalgebra:
    """Smallest subspace containing the generators, closed under the bracket
    and under x -> [y, x] for each y in ``ad_generators``.

    Iterates bracket-and-reorthonormalize in a fixed order until the
    dimension stabilizes, so the resulting basis is reproducible.
    """
    rows = np.array([g.coeffs for g in gens], dtype=float).reshape(-1, spec.dim)
    ad_rows = [np.asarray(y.coeffs, dtype=float) for y in ad_generators]
    basis = _orthonormalize_rows(rows, spec.dim)
    while True:
        candidates = list(basis)
        k = len(basis)
        for i in range(k):
            for j in range(i + 1, k):
                candidates.append(_bracket_rows(spec.f, basis[i], basis[j]))
        for y in ad_rows:
            for i in range(k):
                candidates.append(_bracket_rows(spec.f, y, basis[i]))
        new_basis = _orthonormalize_rows(
            np.array(candidates).reshape(-1, spec.dim), spec.dim
        )
        if new_basis.shape[0] == basis.shape[0]:
            return Subalgebra(spec, new_basis)
        basis = new_basis


def generated_subalgebra(gens, spec: GroupSpec) -> Subalgebra:
    """Smallest bracket-closed subspace containing the span of ``gens``."""
    return closed_span(gens, spec)


def nullspace(mat: np.ndarray, rtol: float = SVD_RTOL) -> np.ndarray:
    """Orthonormal rows spanning the nullspace of ``mat`` (SVD threshold)."""
    m = np.asarray(mat, dtype=float)
    if m.size == 0:
        return np.eye(m.shape[1]) if m.ndim == 2 else np.zeros((0, 0))
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    thresh = rtol * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > thresh))
    return vh[rank:]


def centralizer(elems, spec: GroupSpec) -> Subalgebra:
    """Elements commuting with every member of ``elems``.

    Computed as the nullspace of the stacked linear maps x -> [x, s_k] via
    singular-value decomposition.  An empty ``elems`` yields the full algebra.
    """
    elems = list(elems)
    if not elems:
        return Subalgebra(spec, np.sqrt(2.0) * np.eye(spec.dim))
    # ([x, s])_c = f_abc x_a s_b  =>  row block M[c, a] = sum_b f[a, b, c] s_b
    blocks = [np.einsum("abc,b->ca", spec.f, np.asarray(s.coeffs, float)) for s in elems]
    null_rows = nullspace(np.vstack(blocks))
    return Subalgebra(spec, np.sqrt(2.0) * null_rows)


def adjoint_rotate(x: AlgebraElement, g: np.ndarray) -> AlgebraElement:
    """Coefficients of g X g^{-1} for a unitary g; preserves the trace norm."""
    g = np.asarray(g, dtype=complex)
    spec = x.spec
    if g.shape != (spec.n, spec.n):
        raise ValueError(f"group element must be {spec.n}x{spec.n}, got {g.shape}")
    if np.max(np.abs(g @ g.conj().T - np.eye(spec.n))) > _UNITARY_TOL:
        raise ValueError("group element is not unitary")
    rotated = g @ x.matrix @ g.conj().T
    return spec.from_matrix(rotated)


def adjoint_matrix(g: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """The (dim x dim) matrix M of Ad_g, acting as coeffs -> M @ coeffs."""
    rotated = np.einsum("ip,apq,jq->aij", g, spec.basis, g.conj())
    # M[b, a] = 2 Re tr((g t_a g^H) t_b^H)
    return 2.0 * np.real(np.einsum("aij,bij->ba", rotated, spec.basis.conj()))


def group_exp(x: AlgebraElement) -> np.ndarray:
    """Matrix exponential of an algebra element; a unitary group element."""
    return expm(x.matrix)
