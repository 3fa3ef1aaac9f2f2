"""Partition data structure, block relation and partition-relation pairs."""

from .partition import Block, Partition, SplitOutcome, mark_nonempty_remove, split
from .relation import BlockRelation, PartitionRelationPair, add_block_entry, rel_blocks, union_rel

__all__ = [
    "Block",
    "Partition",
    "SplitOutcome",
    "mark_nonempty_remove",
    "split",
    "BlockRelation",
    "PartitionRelationPair",
    "add_block_entry",
    "rel_blocks",
    "union_rel",
]
