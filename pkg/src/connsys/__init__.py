"""Connectivity systems: branch width, tangles and canonical decompositions."""

from ._backend import BACKEND
from .core import (
    LIMITS,
    ConnectivitySystem,
    Limits,
    PropertyReport,
    Universe,
    check_properties,
    from_table,
    leftmost_min_separation,
    lipschitz_check,
)
from .branchdec import (
    AtomFamily,
    DirectedDecomposition,
    UndirectedDecomposition,
    WidthCertificate,
    branch_width,
    exactify,
    width,
)
from .canonical import (
    NestedSeparationSet,
    TangleTreeDecomposition,
    canonical_decomposition,
    canonicity_test,
    coherent_nested_set,
    treedec_from_nested,
)
from .duality import branch_width_via_tangles, duality_check
from .errors import (
    ConnsysError,
    EvaluationError,
    InternalInconsistency,
    PreconditionError,
    SizeLimitError,
    ValidationError,
)
from .tangles import Tangle, enumerate_tangles, is_tangle, maximal_tangles

__all__ = [
    "AtomFamily",
    "DirectedDecomposition",
    "NestedSeparationSet",
    "Tangle",
    "TangleTreeDecomposition",
    "UndirectedDecomposition",
    "WidthCertificate",
    "branch_width",
    "branch_width_via_tangles",
    "canonical_decomposition",
    "canonicity_test",
    "coherent_nested_set",
    "duality_check",
    "enumerate_tangles",
    "exactify",
    "is_tangle",
    "maximal_tangles",
    "treedec_from_nested",
    "width",
    "BACKEND",
    "LIMITS",
    "ConnectivitySystem",
    "ConnsysError",
    "EvaluationError",
    "InternalInconsistency",
    "Limits",
    "PreconditionError",
    "PropertyReport",
    "SizeLimitError",
    "Universe",
    "ValidationError",
    "check_properties",
    "from_table",
    "leftmost_min_separation",
    "lipschitz_check",
]
