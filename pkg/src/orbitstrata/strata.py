"""Classification of constant gauge fields into orbit-space strata.

A constant field is three Lie-algebra-valued spatial components.  Its
chromomagnetic curvature generates a holonomy algebra; the centralizer of
that algebra is the isotropy algebra, whose dimension selects a unique row
of the SU(2) or SU(3) stratum table.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import liealg
from .liealg import AlgebraElement, GroupId, GroupSpec, Subalgebra

__all__ = [
    "HolonomyMode",
    "ConstantField",
    "StratumReport",
    "TypeOrder",
    "curvature",
    "holonomy_algebra",
    "classify",
    "type_order",
    "canonicalize_spatial",
]


class HolonomyMode(Enum):
    """How the holonomy algebra of a constant field is generated.

    CURVATURE_SPAN closes the span of the three curvature components under
    the bracket only.  AMBROSE_SINGER additionally closes under x -> [A_j, x]
    for every field component, which can only enlarge the result.
    """

    CURVATURE_SPAN = "curvature"
    AMBROSE_SINGER = "ambrose-singer"


@dataclass(frozen=True, eq=False)
class ConstantField:
    """Constant gauge field: three algebra-valued spatial components."""

    spec: GroupSpec
    a: tuple[AlgebraElement, AlgebraElement, AlgebraElement]
    g: float = 1.0
    volume: float = 1.0

    def __post_init__(self):
        if len(self.a) != 3:
            raise ValueError("a constant field has exactly three spatial components")
        for comp in self.a:
            if comp.spec.group_id is not self.spec.group_id:
                raise ValueError("all field components must share the group spec")

    @classmethod
    def from_coeffs(cls, spec: GroupSpec, coeffs, g: float = 1.0, volume: float = 1.0):
        """Build from a (3, dim) array of basis coefficients."""
        arr = np.asarray(coeffs, dtype=float)
        if arr.shape != (3, spec.dim):
            raise ValueError(f"coefficients must have shape (3, {spec.dim}), got {arr.shape}")
        comps = tuple(spec.element(arr[i]) for i in range(3))
        return cls(spec=spec, a=comps, g=float(g), volume=float(volume))

    @property
    def coeff_matrix(self) -> np.ndarray:
        """The (3, dim) array of component coefficients."""
        return np.array([c.coeffs for c in self.a])

    def rotated_spatially(self, rot: np.ndarray) -> "ConstantField":
        """Field with components A'_i = sum_j rot[i, j] A_j."""
        return ConstantField.from_coeffs(
            self.spec, np.asarray(rot) @ self.coeff_matrix, g=self.g, volume=self.volume
        )

    def rotated_in_color(self, g: np.ndarray) -> "ConstantField":
        """Field with every component conjugated by the group element g."""
        comps = tuple(liealg.adjoint_rotate(c, g) for c in self.a)
        return replace(self, a=comps)


def curvature(field: ConstantField):
    """Chromomagnetic components B_i = -(g/2) eps_ijk [A_j, A_k].

    The derivative part vanishes for constant fields.  Returns a tuple of
    three algebra elements.
    """
    a1, a2, a3 = field.a
    g = field.g
    return (
        -g * liealg.bracket(a2, a3),
        -g * liealg.bracket(a3, a1),
        -g * liealg.bracket(a1, a2),
    )


def holonomy_algebra(field: ConstantField, mode: HolonomyMode = HolonomyMode.CURVATURE_SPAN) -> Subalgebra:
    """Holonomy algebra generated by the curvature of a constant field."""
    b = curvature(field)
    if mode is HolonomyMode.CURVATURE_SPAN:
        return liealg.closed_span(b, field.spec)
    return liealg.closed_span(b, field.spec, ad_generators=field.a)


@dataclass(frozen=True)
class StratumReport:
    """Outcome of classifying a constant field."""

    group_id: GroupId
    stratum_index: int
    isotropy_label: str
    isotropy_dim: int
    subbundle_label: str
    holonomy_dim: int
    mode: HolonomyMode


# Stratum tables: (index, isotropy label, isotropy dim, maximal-subbundle label).
# Isotropy dimensions identify rows uniquely within each group.
_SU2_TABLE = (
    (1, "Z_2", 0, "SU(2)"),
    (2, "U(1)", 1, "U(1)"),
    (3, "SU(2)", 3, "Z_2"),
)
_SU3_TABLE = (
    (1, "Z_3", 0, "SU(3)"),
    (2, "U(1)", 1, "U(2)"),
    (3, "U(1)xU(1)", 2, "U(1)xU(1)"),
    (4, "U(2)", 4, "U(1)"),
    (5, "SU(3)", 8, "Z_3"),
)


def _table(group_id: GroupId):
    return _SU2_TABLE if group_id is GroupId.SU2 else _SU3_TABLE


def classify(field: ConstantField, mode: HolonomyMode = HolonomyMode.CURVATURE_SPAN) -> StratumReport:
    """Stratum of a constant field from the centralizer of its holonomy."""
    hol = holonomy_algebra(field, mode)
    iso = liealg.centralizer(hol.basis_vectors, field.spec)
    for index, label, dim, subbundle in _table(field.spec.group_id):
        if dim == iso.dim:
            return StratumReport(
                group_id=field.spec.group_id,
                stratum_index=index,
                isotropy_label=label,
                isotropy_dim=dim,
                subbundle_label=subbundle,
                holonomy_dim=hol.dim,
                mode=mode,
            )
    raise RuntimeError(
        f"no stratum row with isotropy dimension {iso.dim} for {field.spec.group_id.value}"
    )


class TypeOrder(Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def type_order(r1: StratumReport, r2: StratumReport) -> TypeOrder:
    """Partial order of stratum types by reverse isotropy containment.

    For SU(2) and SU(3) the table isotropies form a chain under containment
    up to conjugacy, so the order is total: a larger isotropy group means a
    smaller type, and the generic stratum (index 1) is maximal.
    """
    if r1.group_id is not r2.group_id:
        raise ValueError("cannot order strata of different groups")
    if r1.stratum_index == r2.stratum_index:
        return TypeOrder.EQUAL
    return TypeOrder.LESS if r1.stratum_index > r2.stratum_index else TypeOrder.GREATER


def _fix_eigvec_signs(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Make the first nonzero component of each row non-negative."""
    out = vectors.copy()
    for row in out:
        nz = np.nonzero(np.abs(row) > tol)[0]
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    return out


def canonicalize_spatial(field: ConstantField):
    """Rotate space so the Gram matrix M_ij = A_i . A_j is diagonal.

    Eigenvalues are sorted in descending order.  For SU(2), whose components
    become mutually orthogonal color vectors after the rotation, an adjoint
    color rotation additionally aligns component i with color axis i, giving
    the diagonal normal form.  Returns the rotated field and the 3x3 spatial
    rotation applied to it.
    """
    coeffs = field.coeff_matrix
    gram = coeffs @ coeffs.T
    evals, evecs = np.linalg.eigh(gram)
    order = np.argsort(evals)[::-1]
    rot = _fix_eigvec_signs(evecs[:, order].T)
    if np.linalg.det(rot) < 0:
        rot[2] *= -1.0  # keep a proper rotation; rows 1-2 stay sign-fixed
    rotated = field.rotated_spatially(rot)

    if field.spec.group_id is GroupId.SU2:
        rotated = _align_su2_colors(rotated)
    return rotated, rot


def _align_su2_colors(field: ConstantField) -> ConstantField:
    """Adjoint color rotation taking orthogonal su(2) color vectors to axes.

    The adjoint action of SU(2) realizes all of SO(3) on coefficient space,
    so an orthonormal frame built from the component directions maps each
    nonzero component onto its own color axis; zero components get filler
    axes from the complement.
    """
    coeffs = field.coeff_matrix
    frame: list[np.ndarray | None] = [None, None, None]
    used: list[np.ndarray] = []
    filler: list[int] = []
    for i in range(3):
        v = coeffs[i].copy()
        for b in used:
            v -= (v @ b) * b
        n = np.linalg.norm(v)
        if n > 1e-12 * max(1.0, np.linalg.norm(coeffs[i])):
            frame[i] = v / n
            used.append(frame[i])
        else:
            filler.append(i)
    for i in filler:
        for cand in np.eye(3):
            w = cand.copy()
            for b in used:
                w -= (w @ b) * b
            n = np.linalg.norm(w)
            if n > 1e-9:
                frame[i] = w / n
                used.append(frame[i])
                break
    rot = np.array(frame)
    if np.linalg.det(rot) < 0:
        # flipping a filler axis leaves the field unchanged; otherwise the
        # sign lands in the third component, which stays axis-aligned
        rot[filler[0] if filler else 2] *= -1.0
    new_coeffs = coeffs @ rot.T
    return ConstantField.from_coeffs(field.spec, new_coeffs, g=field.g, volume=field.volume)
