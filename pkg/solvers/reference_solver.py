"""State-level simulation solvers kept as references for the block solvers.

Each solver keeps ``sim`` as an n×n boolean matrix where row ``v`` is Sim(v),
the states currently believed to simulate ``v``. Nondeterministic choices are
resolved lowest index first unless an ``rng`` is supplied.
"""

from __future__ import annotations

import heapq
import logging
import random
import time
from typing import Optional

import numpy as np

from model.kripke import KripkeStructure, StateSet, pre_mask
from settings import DEBUG_MAX_STATES, InvariantViolation
from solvers.result import RunStats

logger = logging.getLogger(__name__)


def initial_sim(ks: KripkeStructure) -> np.ndarray:
    """Sim(v) = [v]_ℓ, intersected with pre(Σ) unless v is a deadlock."""
    has_succ = ks.successors_count > 0
    sim = ks.same_label_matrix()
    sim[has_succ] &= has_succ[None, :]
    return sim


def sim_sets(sim: np.ndarray) -> list[StateSet]:
    return [StateSet.from_mask(row) for row in sim]


class _SimSolver:
    name = ""

    def __init__(self, ks: KripkeStructure, *, rng: Optional[random.Random] = None):
        self.ks = ks
        self.rng = rng
        self.sim = np.zeros((ks.num_states, ks.num_states), dtype=bool)
        self.stats = RunStats(algorithm=self.name)

    def _pick(self, candidates: np.ndarray) -> int:
        if self.rng is None:
            return int(candidates[0])
        return int(self.rng.choice(candidates.tolist()))

    def _done(self, started: float) -> list[StateSet]:
        self.stats.wall_time = time.perf_counter() - started
        logger.info(
            "%s: %d states, %d transitions, %d iterations, %.4fs",
            self.name,
            self.ks.num_states,
            self.ks.num_transitions,
            self.stats.outer_iterations,
            self.stats.wall_time,
        )
        return sim_sets(self.sim)


class SchematicSolver(_SimSolver):
    """Drop w from Sim(v) while some v → u has post(w) ∩ Sim(u) = ∅."""

    name = "schematic"

    def run(self) -> list[StateSet]:
        started = time.perf_counter()
        ks = self.ks
        self.sim = ks.same_label_matrix()
        sources = np.repeat(np.arange(ks.num_states), ks.successors_count)
        edges = list(zip(sources.tolist(), ks.succ_targets.tolist()))
        changed = True
        while changed:
            changed = False
            if self.rng is not None:
                self.rng.shuffle(edges)
            for v, u in edges:
                bad = self.sim[v] & ~pre_mask(ks, self.sim[u])
                if bad.any():
                    self.sim[v] &= ~bad
                    self.stats.rel_entries_cleared += int(bad.sum())
                    changed = True
            self.stats.outer_iterations += 1
        return self._done(started)


class RefinedSimilaritySolver(_SimSolver):
    """prevSim-driven refinement.

    With ``buggy`` the prevSim(v) update runs after the inner loop, which
    misses removals when v is its own predecessor.
    """

    name = "refined-hhk"

    def __init__(
        self,
        ks: KripkeStructure,
        *,
        buggy: bool = False,
        rng: Optional[random.Random] = None,
        debug: bool = False,
    ):
        super().__init__(ks, rng=rng)
        self.buggy = buggy
        self.debug = debug and not buggy and ks.num_states <= DEBUG_MAX_STATES

    def run(self) -> list[StateSet]:
        started = time.perf_counter()
        ks = self.ks
        sim = self.sim = initial_sim(ks)
        prev = np.ones_like(sim)
        while True:
            if self.debug and np.any(sim & ~prev):
                raise InvariantViolation("refined-hhk: Sim(v) outgrew prevSim(v)")
            pending = np.flatnonzero((sim != prev).any(axis=1))
            if not pending.size:
                break
            v = self._pick(pending)
            self.stats.outer_iterations += 1
            remove = pre_mask(ks, prev[v]) & ~pre_mask(ks, sim[v])
            self.stats.remove_volume += int(remove.sum())
            if not self.buggy:
                prev[v] = sim[v]
            for u in ks.predecessors(v).tolist():
                cleared = sim[u] & remove
                sim[u] &= ~remove
                self.stats.rel_entries_cleared += int(cleared.sum())
            if self.buggy:
                prev[v] = sim[v]
        return self._done(started)


class HHKSolver(_SimSolver):
    """HHK with Count(w, u) = |post(w) ∩ Sim(u)| for O(1) membership tests.

    With ``buggy`` Remove(v) is cleared after the outer loop, dropping states
    added to it while v was being processed.
    """

    name = "hhk"

    def __init__(
        self,
        ks: KripkeStructure,
        *,
        buggy: bool = False,
        rng: Optional[random.Random] = None,
        debug: bool = False,
    ):
        super().__init__(ks, rng=rng)
        self.buggy = buggy
        self.debug = debug and not buggy and ks.num_states <= DEBUG_MAX_STATES
        self.count = np.zeros((ks.num_states, ks.num_states), dtype=np.int32)
        self.remove = np.zeros((ks.num_states, ks.num_states), dtype=bool)

    def _count_column(self, u: int) -> np.ndarray:
        ks = self.ks
        return np.bincount(ks.sources[self.sim[u][ks.targets]], minlength=ks.num_states)

    def _initialize(self) -> None:
        ks = self.ks
        self.sim = initial_sim(ks)
        has_succ = ks.successors_count > 0
        for u in range(ks.num_states):
            self.count[:, u] = self._count_column(u)
            self.remove[u] = has_succ & (self.count[:, u] == 0)

    def _check_loop_head(self, prev: np.ndarray) -> None:
        ks = self.ks
        for v in range(ks.num_states):
            if not np.array_equal(self.count[:, v], self._count_column(v)):
                raise InvariantViolation(f"hhk: Count(·, {v}) is stale")
            expected = pre_mask(ks, prev[v]) & ~pre_mask(ks, self.sim[v])
            if not np.array_equal(self.remove[v], expected):
                raise InvariantViolation(f"hhk: Remove({v}) differs from pre(prevSim) ∖ pre(Sim)")

    def _next(self, heap: list[int]) -> Optional[int]:
        if self.rng is not None:
            pending = np.flatnonzero(self.remove.any(axis=1))
            return self._pick(pending) if pending.size else None
        while heap:
            v = heapq.heappop(heap)
            if self.remove[v].any():
                return v
        return None

    def run(self) -> list[StateSet]:
        started = time.perf_counter()
        ks = self.ks
        self._initialize()
        sim, count, remove = self.sim, self.count, self.remove
        heap = np.flatnonzero(remove.any(axis=1)).tolist()
        heapq.heapify(heap)
        prev = np.ones_like(sim) if self.debug else None
        consumed = np.zeros_like(sim) if self.debug else None
        while True:
            if self.debug:
                self._check_loop_head(prev)
            v = self._next(heap)
            if v is None:
                break
            self.stats.outer_iterations += 1
            rem = remove[v].copy()
            self.stats.remove_volume += int(rem.sum())
            if self.debug:
                if np.any(consumed[v] & rem):
                    raise InvariantViolation(f"hhk: Remove({v}) repeats an earlier removal")
                consumed[v] |= rem
                prev[v] = sim[v]
            if not self.buggy:
                remove[v] = False
            for u in ks.predecessors(v).tolist():
                dropped = np.flatnonzero(rem & sim[u])
                if not dropped.size:
                    continue
                sim[u, dropped] = False
                self.stats.rel_entries_cleared += int(dropped.size)
                sources, hits = np.unique(ks.predecessors_of(dropped), return_counts=True)
                count[sources, u] -= hits
                zeroed = sources[count[sources, u] == 0]
                if zeroed.size:
                    was_empty = not remove[u].any()
                    remove[u, zeroed] = True
                    if was_empty:
                        heapq.heappush(heap, u)
            if self.buggy:
                remove[v] = False
        return self._done(started)


def schematic_similarity(ks: KripkeStructure, *, rng: Optional[random.Random] = None) -> list[StateSet]:
    return SchematicSolver(ks, rng=rng).run()


def refined_similarity(
    ks: KripkeStructure, buggy: bool = False, *, rng: Optional[random.Random] = None, debug: bool = False
) -> list[StateSet]:
    return RefinedSimilaritySolver(ks, buggy=buggy, rng=rng, debug=debug).run()


def hhk(
    ks: KripkeStructure, buggy: bool = False, *, rng: Optional[random.Random] = None, debug: bool = False
) -> list[StateSet]:
    return HHKSolver(ks, buggy=buggy, rng=rng, debug=debug).run()
