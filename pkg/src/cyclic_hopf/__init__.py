"""Hopf-admissible spatio-temporal symmetry pairs for cyclic permutation actions.

Decide which (H, K) pairs of Z_k or Z_l x Z_k acting by cyclic permutation
are admissible, then realise each admissible pair by an explicit equivariant
polynomial ODE whose periodic orbit carries exactly those symmetries.
"""

from .admissibility import (
    AdmissibilityReport,
    ClassificationTable,
    abelian_vs_cyclic_gap,
    check_cyclic_hopf,
    check_hmodk,
    classify_all,
    theorem_equi_predicate,
)
from .dynamics import (
    OrbitNotFound,
    PeriodicOrbit,
    SymmetryReport,
    Trajectory,
    detect_symmetries,
    find_periodic_orbit,
    floquet_multipliers,
    hopf_crossing_check,
    integrate,
)
from .groups import GroupSpec, Subgroup, ThetaHom, enumerate_subgroups, theta_homomorphisms
from .polynomial import PolyVectorField
from .representation import PermAction, find_h_simple, fix_subspace, is_isotropy, variety_LK
from .synthesis import (
    HopfFamilyNumeric,
    equivariant_symmetrize,
    hermite_interpolate,
    hopf_family,
    prescribed_linearization_field,
    verify_equivariance,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "HopfFamilyNumeric",
    "ClassificationTable",
    "GroupSpec",
    "OrbitNotFound",
    "PeriodicOrbit",
    "PermAction",
    "PolyVectorField",
    "Subgroup",
    "SymmetryReport",
    "ThetaHom",
    "Trajectory",
    "abelian_vs_cyclic_gap",
    "check_cyclic_hopf",
    "check_hmodk",
    "classify_all",
    "detect_symmetries",
    "enumerate_subgroups",
    "equivariant_symmetrize",
    "find_h_simple",
    "find_periodic_orbit",
    "fix_subspace",
    "floquet_multipliers",
    "hermite_interpolate",
    "hopf_crossing_check",
    "hopf_family",
    "integrate",
    "is_isotropy",
    "prescribed_linearization_field",
    "theorem_equi_predicate",
    "theta_homomorphisms",
    "variety_LK",
    "verify_equivariance",
]
