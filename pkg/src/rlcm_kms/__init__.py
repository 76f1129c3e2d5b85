"""Right LCM semigroups with a generalised scale: structure checks and KMS states."""

from .analysis import (
    check_admissible,
    check_almost_free,
    check_faithful,
    check_propagation,
    fixed_sets,
    kappa_table,
    product_rule,
)
from .core import (
    Certificate,
    ConstructionError,
    Disjoint,
    Element,
    Factorization,
    Lcm,
    RlcmError,
    Semigroup,
    SizingError,
    UsageError,
)
from .families import build, spec_from_dict
from .kms import (
    Canonical,
    Rho,
    StateValue,
    Table,
    boundary_factoring,
    classify,
    critical_beta,
    foundation_sum,
    ground_state_value,
    kms_value,
    zeta,
)
from .rep import build_rep, verify_reconstruction, verify_relations

__version__ = "0.1.0"

__all__ = [
    "Canonical",
    "Certificate",
    "ConstructionError",
    "Disjoint",
    "Element",
    "Factorization",
    "Lcm",
    "Rho",
    "RlcmError",
    "Semigroup",
    "SizingError",
    "StateValue",
    "Table",
    "UsageError",
    "boundary_factoring",
    "build",
    "build_rep",
    "check_admissible",
    "check_almost_free",
    "check_faithful",
    "check_propagation",
    "classify",
    "critical_beta",
    "fixed_sets",
    "foundation_sum",
    "ground_state_value",
    "kappa_table",
    "kms_value",
    "product_rule",
    "spec_from_dict",
    "verify_reconstruction",
    "verify_relations",
    "zeta",
]
