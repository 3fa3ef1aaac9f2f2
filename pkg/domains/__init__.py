"""Closure-operator machinery used as the simulation oracle."""

from .closure import (
    ClosureFamily,
    PartitionView,
    apply,
    disjunctive_completion,
    family_from_sets,
    forward_shell,
    induced_partition,
    moore_closure,
    pre_closure_iterates,
    preorder_from_closure,
)
from .pairs import check_pre_completeness, closure_of_pair, pair_of_closure

__all__ = [
    "ClosureFamily",
    "PartitionView",
    "apply",
    "disjunctive_completion",
    "family_from_sets",
    "forward_shell",
    "induced_partition",
    "moore_closure",
    "pre_closure_iterates",
    "preorder_from_closure",
    "check_pre_completeness",
    "closure_of_pair",
    "pair_of_closure",
]
