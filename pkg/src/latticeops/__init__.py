"""Verification kernel for orthogonal polynomials on quadratic and q-quadratic lattices."""

from .scalars import (
    BackendMismatch,
    BigFloatField,
    ExactField,
    QRational,
    ScalarDomainError,
    make_field,
)
from .polynomials import Polynomial, interpolate
from .lattice import Lattice, LatticeConstants, LatticeError
from .operators import (
    OPERATOR_IDENTITIES,
    IdentityReport,
    MonomialAction,
    dx,
    dx_power,
    monomial_action,
    sx,
    tnk,
    verify_operator_identity,
)
from .functionals import (
    FUNCTIONAL_IDENTITIES,
    AdmissibilityError,
    HorizonError,
    MomentFunctional,
    NotRegularError,
    OPSequence,
    TTRRCoeffs,
    dual_dx,
    dual_sx,
    hankel_dets,
    left_mul,
    ttrr_oracle,
    verify_functional_identity,
)
from .classical import (
    AsymptoticsReport,
    PearsonPair,
    RegularityReport,
    RodriguesReport,
    admissibility,
    asymptotics,
    regularity,
    rodrigues_verify,
    ttrr_from_pearson,
    witness_point,
)
from .families import (
    FAMILY_NAMES,
    FamilyError,
    FamilySpec,
    check_restrictions,
    make_family,
)
from .characterize import (
    RELATIONS,
    FirstCharacterization,
    StructureReport,
    SystemReport,
    check_meixner_linear,
    check_structure,
    check_system,
    counterexample_ttrr,
    pearson_from_ttrr,
    solve_first_characterization,
)

__version__ = "0.1.0"

__all__ = [
    "BackendMismatch",
    "BigFloatField",
    "ExactField",
    "QRational",
    "ScalarDomainError",
    "make_field",
    "Polynomial",
    "interpolate",
    "Lattice",
    "LatticeConstants",
    "LatticeError",
    "OPERATOR_IDENTITIES",
    "IdentityReport",
    "MonomialAction",
    "dx",
    "dx_power",
    "monomial_action",
    "sx",
    "tnk",
    "verify_operator_identity",
    "FUNCTIONAL_IDENTITIES",
    "AdmissibilityError",
    "HorizonError",
    "MomentFunctional",
    "NotRegularError",
    "OPSequence",
    "TTRRCoeffs",
    "dual_dx",
    "dual_sx",
    "hankel_dets",
    "left_mul",
    "ttrr_oracle",
    "verify_functional_identity",
    "AsymptoticsReport",
    "PearsonPair",
    "RegularityReport",
    "RodriguesReport",
    "admissibility",
    "asymptotics",
    "regularity",
    "rodrigues_verify",
    "ttrr_from_pearson",
    "witness_point",
    "FAMILY_NAMES",
    "FamilyError",
    "FamilySpec",
    "check_restrictions",
    "make_family",
    "RELATIONS",
    "FirstCharacterization",
    "StructureReport",
    "SystemReport",
    "check_meixner_linear",
    "check_structure",
    "check_system",
    "counterexample_ttrr",
    "pearson_from_ttrr",
    "solve_first_characterization",
    "__version__",
]
