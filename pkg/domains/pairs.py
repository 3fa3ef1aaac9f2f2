"""Conversions between partition-relation pairs and closure families."""

from __future__ import annotations

import numpy as np

from domains.closure import ClosureFamily, close_under, apply, induced_partition
from engine.relation import PartitionRelationPair
from model.kripke import KripkeStructure, StateSet, pre_mask
from settings import SHELL_MAX_STATES, check_guard


def _reflexive_transitive(table: np.ndarray) -> np.ndarray:
    closure = table | np.eye(len(table), dtype=bool)
    for k in range(len(closure)):
        closure |= closure[:, k : k + 1] & closure[k : k + 1, :]
    return closure


def closure_of_pair(pr: PartitionRelationPair) -> ClosureFamily:
    """Closure whose singleton images are ∪R*(B); disjunctive by construction."""
    n = pr.num_states
    check_guard("closure_of_pair", n, SHELL_MAX_STATES)
    handles = pr.partition.handles()
    star = _reflexive_transitive(pr.rel.submatrix(handles))
    block_bits = [StateSet.from_indices(n, pr.partition.states_of(h).tolist()).bits for h in handles]
    images = []
    for i in range(len(handles)):
        bits = 0
        for j in np.flatnonzero(star[i]).tolist():
            bits |= block_bits[j]
        images.append(bits)
    return ClosureFamily(n, close_under(images, int.__or__, [0, (1 << n) - 1]))


def pair_of_closure(cf: ClosureFamily) -> PartitionRelationPair:
    """⟨P_μ, R_μ⟩: the induced partition, with (B, C) related iff C ⊆ μ(B)."""
    blocks = induced_partition(cf).blocks
    pairs = []
    for i, b in enumerate(blocks):
        image = apply(cf, b)
        pairs.extend((i, j) for j, c in enumerate(blocks) if c <= image)
    return PartitionRelationPair.from_blocks(cf.num_states, [b.indices() for b in blocks], pairs)


def check_pre_completeness(pr: PartitionRelationPair, ks: KripkeStructure) -> bool:
    """True iff C ∩ pre(B) ≠ ∅ implies ∪R(C) ⊆ pre(∪R(B)) for all blocks B, C."""
    partition = pr.partition
    unions = {h: pr.union_rel_mask(h) for h in partition.handles()}
    for b, union in unions.items():
        splitter = pre_mask(ks, union)
        hit = np.unique(partition.block_of[pre_mask(ks, partition.block_mask(b))])
        for c in hit.tolist():
            if np.any(unions[c] & ~splitter):
                return False
    return True
