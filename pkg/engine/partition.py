"""Mutable partition with contiguous block segments and O(1) state moves.

``state_order`` is a permutation of the states in which every live block
occupies the segment ``[first, last]``. Blocks are arena handles that are
never reused, so a split's parent stays addressable. Live blocks are also
threaded on a doubly linked scan list that drives SA's worklist: a block is
moved to the tail when its Remove set becomes nonempty, and a split child is
prepended when its parent's Remove set is empty and appended otherwise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from settings import InvariantViolation

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class Block:
    handle: int
    first: int
    last: int
    remove: list[int] = field(default_factory=list)
    in_remove: set[int] = field(default_factory=set)
    rel_count: Optional[np.ndarray] = None
    # states of this block moved to the front during the current split
    marked: int = 0
    prev: Optional[int] = None
    next: Optional[int] = None

    @property
    def size(self) -> int:
        return self.last - self.first + 1


@dataclass
class SplitOutcome:
    """(parent, child) handle pairs created by one split call."""

    new_blocks: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.new_blocks)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.new_blocks)

    def children(self) -> list[int]:
        return [child for _, child in self.new_blocks]


class Partition:
    def __init__(self, num_states: int, blocks: Iterable[Iterable[int]]):
        self.num_states = num_states
        self.blocks: list[Block] = []
        self.block_of = np.full(num_states, -1, dtype=np.int64)
        self._head: Optional[int] = None
        self._tail: Optional[int] = None
        self._cursor: Optional[int] = None
        self._live = 0

        order: list[int] = []
        for states in blocks:
            members = sorted({int(s) for s in states})
            if not members:
                raise ValueError("partition blocks must be nonempty")
            block = self._new_block(len(order), len(order) + len(members) - 1)
            for s in members:
                if not 0 <= s < num_states:
                    raise ValueError(f"state {s} outside 0..{num_states - 1}")
                if self.block_of[s] != -1:
                    raise ValueError(f"state {s} appears in two blocks")
                self.block_of[s] = block.handle
            order.extend(members)
            self._link_tail(block.handle)
        if len(order) != num_states:
            raise ValueError("blocks do not cover every state")
        self.state_order = np.array(order, dtype=np.int64)
        self.position_of = np.empty(num_states, dtype=np.int64)
        self.position_of[self.state_order] = np.arange(num_states, dtype=np.int64)

    # --- block records and the scan list ---

    def _new_block(self, first: int, last: int) -> Block:
        block = Block(handle=len(self.blocks), first=first, last=last)
        self.blocks.append(block)
        self._live += 1
        return block

    def _link_tail(self, handle: int) -> None:
        block = self.blocks[handle]
        block.prev, block.next = self._tail, None
        if self._tail is None:
            self._head = handle
        else:
            self.blocks[self._tail].next = handle
        self._tail = handle

    def _link_head(self, handle: int) -> None:
        block = self.blocks[handle]
        block.prev, block.next = None, self._head
        if self._head is None:
            self._tail = handle
        else:
            self.blocks[self._head].prev = handle
        self._head = handle

    def _unlink(self, handle: int) -> None:
        block = self.blocks[handle]
        if block.prev is None:
            self._head = block.next
        else:
            self.blocks[block.prev].next = block.next
        if block.next is None:
            self._tail = block.prev
        else:
            self.blocks[block.next].prev = block.prev
        block.prev = block.next = None

    def __len__(self) -> int:
        return self._live

    def block(self, handle: int) -> Block:
        return self.blocks[handle]

    def handles(self) -> list[int]:
        """Live block handles in scan order."""
        out = []
        handle = self._head
        while handle is not None:
            out.append(handle)
            handle = self.blocks[handle].next
        return out

    def live_blocks(self) -> Iterator[Block]:
        for handle in self.handles():
            yield self.blocks[handle]

    def states_of(self, handle: int) -> np.ndarray:
        block = self.blocks[handle]
        return self.state_order[block.first : block.last + 1].copy()

    def first_state(self, handle: int) -> int:
        return int(self.state_order[self.blocks[handle].first])

    def min_state(self, handle: int) -> int:
        return int(self.states_of(handle).min())

    def block_mask(self, handle: int) -> np.ndarray:
        mask = np.zeros(self.num_states, dtype=bool)
        mask[self.states_of(handle)] = True
        return mask

    # --- splitting ---

    def split(self, states: Iterable[int]) -> SplitOutcome:
        """Cut every block along ``states`` in O(|states|).

        Members of ``states`` are swapped to the front of their block; a block
        that is only partly covered gives its front part to a fresh child.
        """
        touched: list[Block] = []
        order, position, block_of = self.state_order, self.position_of, self.block_of
        for s in states:
            s = int(s)
            block = self.blocks[block_of[s]]
            pos = int(position[s])
            if pos < block.first + block.marked:
                continue
            if block.marked == 0:
                touched.append(block)
            target = block.first + block.marked
            other = int(order[target])
            order[target], order[pos] = s, other
            position[s], position[other] = target, pos
            block.marked += 1

        outcome = SplitOutcome()
        for block in touched:
            moved, block.marked = block.marked, 0
            # fully covered: the child collapses back into the parent
            if moved == block.size:
                continue
            child = self._new_block(block.first, block.first + moved - 1)
            block.first += moved
            block_of[order[child.first : child.last + 1]] = child.handle
            child.remove = list(block.remove)
            child.in_remove = set(block.in_remove)
            if block.rel_count is not None:
                child.rel_count = block.rel_count.copy()
            if block.remove:
                self._link_tail(child.handle)
            else:
                self._link_head(child.handle)
            outcome.new_blocks.append((block.handle, child.handle))
        if outcome.new_blocks:
            logger.debug("split created %d block(s), %d live", len(outcome), self._live)
        return outcome

    # --- Remove sets and the worklist ---

    def mark_nonempty_remove(self, handle: int) -> None:
        """Move a block whose Remove set just became nonempty to the scan tail."""
        if handle == self._tail:
            return
        if handle == self._cursor:
            self._cursor = self.blocks[handle].next
        self._unlink(handle)
        self._link_tail(handle)

    def add_to_remove(self, handle: int, states: Iterable[int]) -> None:
        block = self.blocks[handle]
        was_empty = not block.remove
        for s in states:
            s = int(s)
            if s in block.in_remove:
                continue
            block.in_remove.add(s)
            block.remove.append(s)
        if was_empty and block.remove:
            self.mark_nonempty_remove(handle)

    def take_remove(self, handle: int) -> list[int]:
        block = self.blocks[handle]
        remove, block.remove, block.in_remove = block.remove, [], set()
        return remove

    def scan(self) -> Iterator[Block]:
        """Yield blocks with a nonempty Remove set, front to back.

        Every block in front of the cursor has an empty Remove set: blocks
        whose set fills up are moved behind it, and children placed in front
        of it inherit an empty set. A tail block that refills is yielded again.
        """
        self._cursor = self._head
        while self._cursor is not None:
            block = self.blocks[self._cursor]
            if not block.remove:
                self._cursor = block.next
                continue
            yield block
            if self._cursor == block.handle and not block.remove:
                self._cursor = block.next

    # --- views and checks ---

    def as_blocks(self) -> list[tuple[int, ...]]:
        """Blocks as sorted tuples, ordered by smallest state."""
        return sorted((tuple(sorted(self.states_of(h).tolist())) for h in self.handles()), key=lambda b: b[0])

    def _blocks_from_block_of(self) -> list[tuple[int, ...]]:
        groups: dict[int, list[int]] = {}
        for state, handle in enumerate(self.block_of.tolist()):
            groups.setdefault(handle, []).append(state)
        return sorted((tuple(g) for g in groups.values()), key=lambda b: b[0])

    def check_consistency(self) -> None:
        """Segments, block_of and position_of must describe the same partition."""
        covered = 0
        for handle in self.handles():
            block = self.blocks[handle]
            if block.size <= 0:
                raise InvariantViolation(f"block {handle} is empty but linked")
            segment = self.state_order[block.first : block.last + 1]
            if np.any(self.block_of[segment] != handle):
                raise InvariantViolation(f"block_of disagrees with the segment of block {handle}")
            covered += block.size
        if covered != self.num_states:
            raise InvariantViolation("live segments do not tile the state order")
        if not np.array_equal(self.position_of[self.state_order], np.arange(self.num_states)):
            raise InvariantViolation("position_of is not the inverse of state_order")
        if self.as_blocks() != self._blocks_from_block_of():
            raise InvariantViolation("segment view and block_of view disagree")

    def debug_dump(self) -> list[str]:
        return [
            f"block {h}: " + " ".join(map(str, sorted(self.states_of(h).tolist())))
            for h in self.handles()
        ]


def split(p: Partition, s: Iterable[int]) -> SplitOutcome:
    return p.split(s)


def mark_nonempty_remove(p: Partition, b: int) -> None:
    p.mark_nonempty_remove(b)
