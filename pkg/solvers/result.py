"""Run statistics and the block-level result shared by every solver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel

from engine.relation import PartitionRelationPair
from model.kripke import KripkeStructure


class RunStats(BaseModel):
    algorithm: str = ""
    outer_iterations: int = 0
    blocks_created: int = 0
    matrix_insertions: int = 0
    remove_volume: int = 0
    rel_entries_cleared: int = 0
    initial_blocks: int = 0
    final_blocks: int = 0
    wall_time: float = 0.0


@dataclass
class SimResult:
    """Final partition and block relation.

    ``blocks`` are sorted tuples ordered by smallest state; ``relation[i, j]``
    means every state of ``blocks[i]`` is simulated by every state of
    ``blocks[j]``.
    """

    num_states: int
    blocks: list[tuple[int, ...]]
    relation: np.ndarray
    stats: RunStats

    @property
    def block_of(self) -> np.ndarray:
        owner = np.empty(self.num_states, dtype=np.int64)
        for index, block in enumerate(self.blocks):
            owner[list(block)] = index
        return owner

    def simulates(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in np.argwhere(self.relation)]


def result_from_pair(pr: PartitionRelationPair, stats: RunStats) -> SimResult:
    blocks, pairs = pr.canonical()
    relation = np.zeros((len(blocks), len(blocks)), dtype=bool)
    for i, j in pairs:
        relation[i, j] = True
    return SimResult(pr.num_states, list(blocks), relation, stats)


def result_from_preorder(matrix: np.ndarray, stats: RunStats) -> SimResult:
    """Collapse a state preorder into its equivalence classes."""
    n = len(matrix)
    equivalent = matrix & matrix.T
    seen = np.zeros(n, dtype=bool)
    blocks: list[tuple[int, ...]] = []
    for s in range(n):
        if seen[s]:
            continue
        members = np.flatnonzero(equivalent[s])
        seen[members] = True
        blocks.append(tuple(members.tolist()))
    reps = [block[0] for block in blocks]
    relation = matrix[np.ix_(reps, reps)].copy() if reps else np.zeros((0, 0), dtype=bool)
    stats.final_blocks = len(blocks)
    return SimResult(n, blocks, relation, stats)


def expand_preorder(res: SimResult) -> np.ndarray:
    """State-level preorder: ``(s, t)`` iff (block(s), block(t)) is related."""
    owner = res.block_of
    return res.relation[np.ix_(owner, owner)]


def quotient(ks: KripkeStructure, res: SimResult) -> KripkeStructure:
    """Structure over the blocks with B → C iff some state of B steps into C."""
    owner = res.block_of
    edges = np.unique(np.stack([owner[ks.sources], owner[ks.targets]], axis=1), axis=0)
    atoms = [sorted(ks.atoms_of(block[0])) for block in res.blocks]
    return KripkeStructure.build(len(res.blocks), edges, atoms)
