"""Partition-relation simulation solvers: BasicSA, RefinedSA and SA.

All three refine a partition-relation pair ⟨P, Rel⟩ until it is closed under
union and predecessors; on the label pair ⟨P_ℓ, id⟩ the result is the
simulation equivalence partition with the simulation preorder on its blocks.
"""

from __future__ import annotations

import logging
import time
from typing import Optional

import numpy as np

from domains.pairs import check_pre_completeness
from engine.relation import PartitionRelationPair
from model.kripke import KripkeStructure, initial_partition, pre_mask
from settings import DEBUG_MAX_STATES, InvariantViolation, RemoveInit
from solvers.result import RunStats, SimResult, result_from_pair

logger = logging.getLogger(__name__)


def _starting_pair(ks: KripkeStructure, init: Optional[PartitionRelationPair]) -> PartitionRelationPair:
    if init is None:
        return PartitionRelationPair.identity(initial_partition(ks))
    if init.num_states != ks.num_states:
        raise ValueError("initial pair and structure disagree on the state space")
    blocks, pairs = init.canonical()
    return PartitionRelationPair.from_blocks(ks.num_states, blocks, pairs)


class _PairSolver:
    """Shared set-up, bookkeeping and termination checks."""

    name = ""

    def __init__(
        self,
        ks: KripkeStructure,
        init: Optional[PartitionRelationPair] = None,
        *,
        debug: bool = False,
    ):
        self.ks = ks
        self.pr = _starting_pair(ks, init)
        self.debug = debug and ks.num_states <= DEBUG_MAX_STATES
        self.stats = RunStats(algorithm=self.name, initial_blocks=len(self.pr.partition))

    def _split(self, states: np.ndarray) -> list[tuple[int, int]]:
        outcome = self.pr.splitting_procedure(states)
        self.stats.blocks_created += 2 * len(outcome)
        return outcome.new_blocks

    def _hit_blocks(self, prev_states: np.ndarray) -> np.ndarray:
        """Blocks of the current partition meeting pre(prev_states)."""
        return np.unique(self.pr.partition.block_of[self.ks.predecessors_of(prev_states)])

    def _check_loop_head(self) -> None:
        self.pr.partition.check_consistency()
        if not self.pr.is_reflexive():
            raise InvariantViolation(f"{self.name}: block relation lost reflexivity")

    def _finish(self, started: float) -> SimResult:
        stats = self.stats
        stats.final_blocks = len(self.pr.partition)
        stats.matrix_insertions = self.pr.rel.insertions
        stats.wall_time = time.perf_counter() - started
        grown = stats.final_blocks - stats.initial_blocks
        if stats.blocks_created != 2 * grown:
            raise InvariantViolation(
                f"{self.name}: blocks_created={stats.blocks_created} but partition grew by {grown}"
            )
        if stats.matrix_insertions != grown:
            raise InvariantViolation(
                f"{self.name}: {stats.matrix_insertions} matrix insertions for {grown} new blocks"
            )
        if self.debug:
            if not check_pre_completeness(self.pr, self.ks):
                raise InvariantViolation(f"{self.name}: result is not pre-complete")
            for line in self.pr.debug_dump():
                logger.debug("%s final %s", self.name, line)
        logger.info(
            "%s: %d states, %d transitions, %d -> %d blocks, %d iterations, %.4fs",
            self.name,
            self.ks.num_states,
            self.ks.num_transitions,
            stats.initial_blocks,
            stats.final_blocks,
            stats.outer_iterations,
            stats.wall_time,
        )
        return result_from_pair(self.pr, stats)


class BasicSASolver(_PairSolver):
    """Split by pre(∪Rel(B)) for any B whose predecessor blocks violate pre-completeness."""

    name = "basic"

    def _select(self) -> Optional[tuple[int, np.ndarray]]:
        pr, partition = self.pr, self.pr.partition
        unions = {h: pr.union_rel_mask(h) for h in partition.handles()}
        for b in partition.handles():
            splitter = pre_mask(self.ks, unions[b])
            for c in self._hit_blocks(partition.states_of(b)).tolist():
                if np.any(unions[c] & ~splitter):
                    return b, splitter
        return None

    def run(self) -> SimResult:
        started = time.perf_counter()
        pr, partition = self.pr, self.pr.partition
        while True:
            if self.debug:
                self._check_loop_head()
                measure = (len(partition), pr.relation_size())
            selected = self._select()
            if selected is None:
                break
            b, splitter = selected
            self.stats.outer_iterations += 1
            prev_states = partition.states_of(b)
            self._split(np.flatnonzero(splitter))
            handles = partition.handles()
            outside = [d for d in handles if not splitter[partition.first_state(d)]]
            for c in self._hit_blocks(prev_states).tolist():
                for d in outside:
                    if pr.rel[c, d]:
                        pr.rel[c, d] = False
                        self.stats.rel_entries_cleared += 1
            logger.debug("basic iteration %d on block %d: %d blocks", self.stats.outer_iterations, b, len(partition))
            if self.debug:
                blocks, size = len(partition), pr.relation_size()
                if not (blocks > measure[0] or (blocks == measure[0] and size < measure[1])):
                    raise InvariantViolation("basic: iteration neither refined P nor shrank Rel")
        return self._finish(started)


class RefinedSASolver(_PairSolver):
    """BasicSA with the last splitter ppRel(B) stored per block."""

    name = "refined"

    def __init__(self, ks: KripkeStructure, init: Optional[PartitionRelationPair] = None, *, debug: bool = False):
        super().__init__(ks, init, debug=debug)
        full = np.ones(ks.num_states, dtype=bool)
        self.pp_rel = {h: full.copy() for h in self.pr.partition.handles()}

    def _check_pp_rel(self, unions: dict[int, np.ndarray]) -> None:
        partition = self.pr.partition
        for b in partition.handles():
            for c in self._hit_blocks(partition.states_of(b)).tolist():
                if np.any(unions[c] & ~self.pp_rel[b]):
                    raise InvariantViolation(f"refined: ∪Rel({c}) escapes ppRel({b})")

    def run(self) -> SimResult:
        started = time.perf_counter()
        pr, partition = self.pr, self.pr.partition
        while True:
            unions = {h: pr.union_rel_mask(h) for h in partition.handles()}
            if self.debug:
                self._check_loop_head()
                self._check_pp_rel(unions)
            selected = None
            for b in partition.handles():
                splitter = pre_mask(self.ks, unions[b])
                if not np.array_equal(splitter, self.pp_rel[b]):
                    selected = b, splitter
                    break
            if selected is None:
                break
            b, splitter = selected
            self.stats.outer_iterations += 1
            remove = self.pp_rel[b] & ~splitter
            self.stats.remove_volume += int(remove.sum())
            self.pp_rel[b] = splitter
            prev_states = partition.states_of(b)
            for parent, child in self._split(np.flatnonzero(splitter)):
                self.pp_rel[child] = self.pp_rel[parent].copy()
            removed = [d for d in partition.handles() if remove[partition.states_of(d)].any()]
            for c in self._hit_blocks(prev_states).tolist():
                for d in removed:
                    if pr.rel[c, d]:
                        pr.rel[c, d] = False
                        self.stats.rel_entries_cleared += 1
            logger.debug("refined iteration %d on block %d: %d blocks", self.stats.outer_iterations, b, len(partition))
        return self._finish(started)


class SASolver(_PairSolver):
    """SA: Remove sets driven by per-block RelCount counters.

    ``remove_init`` picks the initial Remove(B): ``FIGURE`` uses
    pre(Σ)∖pre(∪Rel(B)) after separating deadlock states, ``ALGORITHM`` uses
    Σ∖pre(∪Rel(B)).
    """

    name = "sa"

    def __init__(
        self,
        ks: KripkeStructure,
        init: Optional[PartitionRelationPair] = None,
        *,
        remove_init: RemoveInit = RemoveInit.FIGURE,
        debug: bool = False,
    ):
        super().__init__(ks, init, debug=debug)
        self.remove_init = RemoveInit(remove_init)
        # ghost of the last splitter per block, kept only when debugging
        self.pp_rel: dict[int, np.ndarray] = {}
        self._selections: list[tuple[int, int]] = []

    def _separate_deadlocks(self, has_succ: np.ndarray) -> None:
        if has_succ.all() or not has_succ.any():
            return
        pr, partition = self.pr, self.pr.partition
        self._split(np.flatnonzero(has_succ))
        handles = partition.handles()
        sinks = [h for h in handles if not has_succ[partition.first_state(h)]]
        for c in handles:
            if not has_succ[partition.first_state(c)]:
                continue
            for d in sinks:
                if pr.rel[c, d]:
                    pr.rel[c, d] = False
                    self.stats.rel_entries_cleared += 1
        logger.debug("separated deadlock states: %d blocks", len(partition))

    def _initialize(self) -> None:
        ks, pr, partition = self.ks, self.pr, self.pr.partition
        has_succ = ks.successors_count > 0
        if self.remove_init is RemoveInit.FIGURE:
            self._separate_deadlocks(has_succ)
            base = has_succ
        else:
            base = np.ones(ks.num_states, dtype=bool)
        for block in partition.live_blocks():
            union = pr.union_rel_mask(block.handle)
            block.rel_count = np.bincount(ks.sources[union[ks.targets]], minlength=ks.num_states)
            initial = np.flatnonzero(base & (block.rel_count == 0)).tolist()
            block.remove, block.in_remove = initial, set(initial)
            if self.debug:
                self.pp_rel[block.handle] = base.copy()

    def _check_sa_loop_head(self) -> None:
        self._check_loop_head()
        ks, pr, partition = self.ks, self.pr, self.pr.partition
        for block in partition.live_blocks():
            union = pr.union_rel_mask(block.handle)
            expected = np.bincount(ks.sources[union[ks.targets]], minlength=ks.num_states)
            if not np.array_equal(block.rel_count, expected):
                raise InvariantViolation(f"sa: RelCount of block {block.handle} is stale")
            remove = np.zeros(ks.num_states, dtype=bool)
            remove[block.remove] = True
            pp = self.pp_rel[block.handle]
            if not np.array_equal(remove, pp & ~pre_mask(ks, union)):
                raise InvariantViolation(f"sa: Remove({block.handle}) differs from ppRel ∖ pre(∪Rel)")
            for h in partition.handles():
                members = pp[partition.states_of(h)]
                if members.any() and not members.all():
                    raise InvariantViolation(f"sa: ppRel({block.handle}) cuts block {h}")

    def _record_selection(self, states: np.ndarray, remove: np.ndarray) -> None:
        state_bits = sum(1 << int(s) for s in states)
        remove_bits = sum(1 << int(s) for s in remove)
        for earlier_states, earlier_remove in self._selections:
            if state_bits & ~earlier_states == 0 and remove_bits & earlier_remove:
                raise InvariantViolation("sa: Remove sets of nested selections overlap")
        self._selections.append((state_bits, remove_bits))

    def run(self) -> SimResult:
        started = time.perf_counter()
        ks, pr, partition = self.ks, self.pr, self.pr.partition
        self._initialize()
        if self.debug:
            self._check_sa_loop_head()
        for block in partition.scan():
            b = block.handle
            remove = np.asarray(partition.take_remove(b), dtype=np.int64)
            self.stats.outer_iterations += 1
            self.stats.remove_volume += len(remove)
            prev_states = partition.states_of(b)
            if self.debug:
                self.pp_rel[b] = pre_mask(ks, pr.union_rel_mask(b))
                self._record_selection(prev_states, remove)

            for parent, child in self._split(remove):
                if self.debug:
                    self.pp_rel[child] = self.pp_rel[parent].copy()

            remove_list = np.unique(partition.block_of[remove])
            if sum(partition.block(d).size for d in remove_list.tolist()) != len(remove):
                raise InvariantViolation("sa: Remove is not a union of blocks after splitting")

            for c in self._hit_blocks(prev_states).tolist():
                counts = partition.block(c).rel_count
                for d in remove_list.tolist():
                    if not pr.rel[c, d]:
                        continue
                    pr.rel[c, d] = False
                    self.stats.rel_entries_cleared += 1
                    sources, hits = np.unique(ks.predecessors_of(partition.states_of(d)), return_counts=True)
                    counts[sources] -= hits
                    zeroed = sources[counts[sources] == 0]
                    if zeroed.size:
                        partition.add_to_remove(c, zeroed)
            logger.debug(
                "sa iteration %d on block %d: |Remove|=%d, %d blocks",
                self.stats.outer_iterations,
                b,
                len(remove),
                len(partition),
            )
            if self.debug:
                self._check_sa_loop_head()
        return self._finish(started)


def basic_sa(ks: KripkeStructure, init: Optional[PartitionRelationPair] = None, *, debug: bool = False) -> SimResult:
    return BasicSASolver(ks, init, debug=debug).run()


def refined_sa(ks: KripkeStructure, init: Optional[PartitionRelationPair] = None, *, debug: bool = False) -> SimResult:
    return RefinedSASolver(ks, init, debug=debug).run()


def sa(
    ks: KripkeStructure,
    init: Optional[PartitionRelationPair] = None,
    *,
    remove_init: RemoveInit = RemoveInit.FIGURE,
    debug: bool = False,
) -> SimResult:
    return SASolver(ks, init, remove_init=remove_init, debug=debug).run()
