"""Block relation table and partition-relation pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from engine.partition import Partition, SplitOutcome
from model.kripke import StateSet


class BlockRelation:
    """Square boolean table indexed by block handles, grown by doubling.

    ``table[b, c]`` means states of block ``c`` may simulate states of ``b``.
    """

    def __init__(self, capacity: int = 4):
        self._table = np.zeros((max(capacity, 1),) * 2, dtype=bool)
        self.insertions = 0

    @property
    def capacity(self) -> int:
        return self._table.shape[0]

    def _ensure(self, handle: int) -> None:
        if handle < self.capacity:
            return
        size = self.capacity
        while size <= handle:
            size *= 2
        grown = np.zeros((size, size), dtype=bool)
        grown[: self.capacity, : self.capacity] = self._table
        self._table = grown

    def __getitem__(self, key: tuple[int, int]) -> bool:
        b, c = key
        return bool(self._table[b, c])

    def __setitem__(self, key: tuple[int, int], value: bool) -> None:
        b, c = key
        self._ensure(max(b, c))
        self._table[b, c] = value

    def row(self, b: int) -> np.ndarray:
        return self._table[b]

    def add_block_entry(self, parent: int, child: int) -> None:
        """Give ``child`` a copy of ``parent``'s row and column."""
        self._ensure(child)
        table = self._table
        table[:, child] = table[:, parent]
        table[child, :] = table[parent, :]
        self.insertions += 1

    def submatrix(self, handles: Sequence[int]) -> np.ndarray:
        idx = np.asarray(handles, dtype=np.int64)
        return self._table[np.ix_(idx, idx)].copy()


def add_block_entry(rel: BlockRelation, parent: int, child: int) -> None:
    rel.add_block_entry(parent, child)


@dataclass
class PartitionRelationPair:
    partition: Partition
    rel: BlockRelation

    @classmethod
    def identity(cls, partition: Partition) -> "PartitionRelationPair":
        rel = BlockRelation(capacity=2 * len(partition.blocks))
        for handle in partition.handles():
            rel[handle, handle] = True
        return cls(partition, rel)

    @classmethod
    def from_blocks(
        cls,
        num_states: int,
        blocks: Sequence[Iterable[int]],
        pairs: Iterable[tuple[int, int]] = (),
    ) -> "PartitionRelationPair":
        """Pair over ``blocks`` (handles follow list order) with ``pairs`` plus identity."""
        pr = cls.identity(Partition(num_states, blocks))
        for b, c in pairs:
            pr.rel[b, c] = True
        return pr

    @property
    def num_states(self) -> int:
        return self.partition.num_states

    def rel_blocks(self, b: int) -> list[int]:
        row = self.rel.row(b)
        return [c for c in self.partition.handles() if row[c]]

    def union_rel_mask(self, b: int) -> np.ndarray:
        row = self.rel.row(b)
        return row[self.partition.block_of]

    def union_rel(self, b: int) -> StateSet:
        return StateSet.from_mask(self.union_rel_mask(b))

    def splitting_procedure(self, states: Iterable[int]) -> SplitOutcome:
        """Split the partition and give every child its parent's relation entries."""
        outcome = self.partition.split(states)
        for parent, child in outcome:
            self.rel.add_block_entry(parent, child)
        return outcome

    def relation_size(self) -> int:
        handles = self.partition.handles()
        return int(self.rel.submatrix(handles).sum())

    def is_reflexive(self) -> bool:
        return all(self.rel[h, h] for h in self.partition.handles())

    def canonical(self) -> tuple[tuple[tuple[int, ...], ...], frozenset[tuple[int, int]]]:
        """Handle-free form: sorted blocks and relation pairs over their indices."""
        handles = sorted(self.partition.handles(), key=self.partition.min_state)
        blocks = tuple(tuple(sorted(self.partition.states_of(h).tolist())) for h in handles)
        table = self.rel.submatrix(handles)
        return blocks, frozenset((int(i), int(j)) for i, j in np.argwhere(table))

    def debug_dump(self) -> list[str]:
        lines = self.partition.debug_dump()
        handles = self.partition.handles()
        lines.extend(f"rel {b} {c}" for b in handles for c in handles if self.rel[b, c])
        return lines


def rel_blocks(pr: PartitionRelationPair, b: int) -> list[int]:
    return pr.rel_blocks(b)


def union_rel(pr: PartitionRelationPair, b: int) -> StateSet:
    return pr.union_rel(b)
