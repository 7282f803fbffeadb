"""contourcalc: contour-integral equations compiled to real-time rules.

The package turns equations over multi-point contour functions (Keldysh or
extended contour) into real-time expressions built from components and
retarded compositions of the individual sub-functions, and verifies every
generated rule against an exact branch-splitting oracle and a discrete
numeric evaluator.
"""

from .ir import (
    ContourEquation,
    ContourError,
    CoverError,
    Factor,
    LinearCombination,
    Mats,
    Plain,
    RealTimeExpression,
    RealTimeTerm,
    Ret,
    SubFunction,
    SuperIndex,
    ValidationError,
    canonicalize,
    connectivity,
    to_hacek,
    to_labeled,
    validate_equation,
)
from .combinatorics import (
    Permutation,
    ShuffleClass,
    commutator_slice,
    enumerate_shuffles,
    nested_commutator,
    theta_product_decompose,
)
from .engine import (
    Composition,
    component_representation,
    composition_representation,
    expand_retarded,
    nested_expand,
    representation,
)
from .compiler import (
    NamingUnavailable,
    ProductComposition,
    commutator_prune,
    component_of_product,
    derive_rule,
    distribute_matsubara,
    emit,
    separate,
    vanishes,
)
from .oracle import (
    ComponentTable,
    DiscreteContour,
    GridTieError,
    NotFullyExpanded,
    UnknownComponent,
    branch_split_oracle,
    evaluate_contour_side,
    evaluate_realtime_side,
    normal_form,
    normal_form_equal,
    verify,
)
from .parser import ArityMismatch, EquationSyntaxError, parse_equation, parse_file, parse_superindex, pretty

__all__ = [name for name in dir() if not name.startswith("_")]
