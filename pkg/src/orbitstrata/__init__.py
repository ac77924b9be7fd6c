"""Numerical toolkit for gauge orbit strata, vacuum exponents, and lattice
constraint checks for SU(2) and SU(3) constant fields."""

from ._backend import BACKEND
from .liealg import (
    AlgebraElement,
    GroupId,
    GroupSpec,
    Subalgebra,
    adjoint_rotate,
    bracket,
    centralizer,
    generated_subalgebra,
    group_exp,
    su2,
    su3,
)
from .strata import (
    ConstantField,
    HolonomyMode,
    StratumReport,
    TypeOrder,
    canonicalize_spatial,
    classify,
    curvature,
    holonomy_algebra,
    type_order,
)
from .groundstate import (
    AnsatzCase,
    ClosedFormCase,
    DivergenceError,
    NumericalError,
    QuadratureConfig,
    ROperator,
    ScanResult,
    SigmaMethod,
    SigmaResult,
    build_ansatz,
    build_r,
    closed_form,
    resolvent_form,
    scan_grid,
    sigma_quadrature,
    sigma_spectral,
)
from .constraints import (
    ConstraintReport,
    DualSection,
    LatticeBackground,
    ResourceLimitError,
    SplittingReport,
    TangentPair,
    apply_complex_structure,
    gauge_variation,
    jprime,
    jprime_adjoint,
    momentum_map,
    qc_check,
    quadratic_form,
    same_symmetry_tangents,
    symmetry_space,
    verify_splittings,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # liealg
    "AlgebraElement", "GroupId", "GroupSpec", "Subalgebra", "adjoint_rotate",
    "bracket", "centralizer", "generated_subalgebra", "group_exp", "su2", "su3",
    # strata
    "ConstantField", "HolonomyMode", "StratumReport", "TypeOrder",
    "canonicalize_spatial", "classify", "curvature", "holonomy_algebra", "type_order",
    # groundstate
    "AnsatzCase", "ClosedFormCase", "DivergenceError", "NumericalError",
    "QuadratureConfig", "ROperator", "ScanResult", "SigmaMethod", "SigmaResult",
    "build_ansatz", "build_r", "closed_form", "resolvent_form", "scan_grid",
    "sigma_quadrature", "sigma_spectral",
    # constraints
    "ConstraintReport", "DualSection", "LatticeBackground", "ResourceLimitError",
    "SplittingReport", "TangentPair", "apply_complex_structure", "gauge_variation",
    "jprime", "jprime_adjoint", "momentum_map", "qc_check", "quadratic_form",
    "same_symmetry_tangents", "symmetry_space", "verify_splittings",
]
