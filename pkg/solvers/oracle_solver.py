"""Slow, obviously-correct simulation oracles used for verification."""

from __future__ import annotations

import logging
import time

import numpy as np

from domains.closure import ClosureFamily, forward_shell, moore_closure, preorder_from_closure
from model.kripke import KripkeStructure, LabelledTS, StateSet, label_classes
from settings import ORACLE_MAX_STATES, SHELL_MAX_STATES, check_guard
from solvers.result import RunStats

logger = logging.getLogger(__name__)


def _refine(relation: np.ndarray, adjacency: np.ndarray) -> np.ndarray:
    """Pairs (s, s') of ``relation`` where every s → t is matched by some s' → t' with (t, t') related."""
    adj = adjacency.astype(np.float32)
    # matched[t, s']: some successor of s' is related to t
    matched = (relation.astype(np.float32) @ adj.T) > 0
    violated = (adj @ (~matched).astype(np.float32)) > 0
    return relation & ~violated


class NaiveOracleSolver:
    """Greatest fixpoint of the simulation conditions, starting from Σ×Σ."""

    name = "oracle"

    def __init__(self, ks: KripkeStructure):
        check_guard("naive oracle", ks.num_states, ORACLE_MAX_STATES)
        self.ks = ks
        self.iterations = 0
        self.stats = RunStats(algorithm=self.name)

    def run(self) -> np.ndarray:
        started = time.perf_counter()
        adjacency = self.ks.adjacency_matrix()
        relation = self.ks.same_label_matrix()
        self.iterations = 1
        while True:
            refined = _refine(relation, adjacency)
            if np.array_equal(refined, relation):
                break
            relation = refined
            self.iterations += 1
        self.stats.outer_iterations = self.iterations
        self.stats.wall_time = time.perf_counter() - started
        logger.info("oracle: %d states, %d rounds, %.4fs", self.ks.num_states, self.iterations, self.stats.wall_time)
        return relation


class ShellOracleSolver:
    """Simulation preorder read off the forward {∪, pre}-complete shell of μ_ℓ."""

    name = "shell"

    def __init__(self, ks: KripkeStructure):
        check_guard("shell oracle", ks.num_states, SHELL_MAX_STATES)
        self.ks = ks
        self.shell: ClosureFamily | None = None
        self.stats = RunStats(algorithm=self.name)

    def label_closure(self) -> ClosureFamily:
        n = self.ks.num_states
        return moore_closure((StateSet.from_indices(n, block) for block in label_classes(self.ks)), n)

    def run(self) -> np.ndarray:
        started = time.perf_counter()
        self.shell = forward_shell(self.label_closure(), self.ks)
        self.stats.wall_time = time.perf_counter() - started
        logger.info("shell: %d states, %d closed sets, %.4fs", self.ks.num_states, len(self.shell), self.stats.wall_time)
        return preorder_from_closure(self.shell)


def naive_oracle(ks: KripkeStructure) -> np.ndarray:
    """``matrix[s, t]`` iff t simulates s."""
    return NaiveOracleSolver(ks).run()


def shell_oracle(ks: KripkeStructure) -> np.ndarray:
    return ShellOracleSolver(ks).run()


def labelled_simulation_oracle(lts: LabelledTS) -> np.ndarray:
    """Labelled simulation preorder of an LTS: every s -a-> t matched by s' -a-> t'."""
    n = lts.num_states
    check_guard("labelled oracle", n, ORACLE_MAX_STATES)
    per_label = np.zeros((len(lts.label_names), n, n), dtype=bool)
    for src, label, dst in lts.transitions:
        per_label[label, src, dst] = True
    relation = np.ones((n, n), dtype=bool)
    while True:
        refined = relation.copy()
        for adjacency in per_label:
            refined = _refine(refined, adjacency)
        if np.array_equal(refined, relation):
            return relation
        relation = refined
