"""Container machines for permutation classes.

A container machine moves an increasing input stream to its output through
a holding container: letters may bypass it, be pushed into it (each push
must leave the container's contents order-isomorphic to a member of a fixed
pattern class), or be popped from its front.  The package provides

* perms — permutation/pattern primitives and the exhaustive oracle,
* machine — the generic machine simulator and the skeleton transport,
* engines — specialized exact counting engines (with vectorized
  multi-modular backends for thousand-term runs),
* systems — catalytic functional-equation systems iterated to a fixpoint,
* series, guess — truncated series tools and exact relation fitting,
* cli — the `avmachine` command.
"""

from .engines import ENGINES, engine_counts
from .guess import (
    AdeRelation,
    InsufficientTerms,
    PolyRelation,
    guess_ade,
    guess_algebraic,
    verify_ade,
    verify_algebraic,
)
from .machine import (
    MachineBudgetError,
    MachineError,
    canonical_sequence,
    legal_actions,
    machine_class_counts,
    transport,
    validate_sequence,
)
from .perms import (
    Perm,
    avoids,
    avoids_all,
    contains,
    enumerate_av,
    left_to_right_maxima,
    normalize_basis,
    one_skew_basis,
    parse_permutation,
)
from .series import GrowthEstimate, MultiSeries, RationalSeries, growth_estimate
from .systems import SYSTEMS, SystemStabilityError, iterate_system

__version__ = "0.1.0"

__all__ = [
    "AdeRelation",
    "ENGINES",
    "GrowthEstimate",
    "InsufficientTerms",
    "MachineBudgetError",
    "MachineError",
    "MultiSeries",
    "Perm",
    "PolyRelation",
    "RationalSeries",
    "SYSTEMS",
    "SystemStabilityError",
    "avoids",
    "avoids_all",
    "canonical_sequence",
    "contains",
    "engine_counts",
    "enumerate_av",
    "growth_estimate",
    "guess_ade",
    "guess_algebraic",
    "iterate_system",
    "left_to_right_maxima",
    "legal_actions",
    "machine_class_counts",
    "normalize_basis",
    "one_skew_basis",
    "parse_permutation",
    "transport",
    "validate_sequence",
    "verify_ade",
    "verify_algebraic",
    "__version__",
]
