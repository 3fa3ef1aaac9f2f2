"""Shared fixtures and hypothesis strategies."""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Callable

import numpy as np
import pytest
from hypothesis import strategies as st

from engine.relation import PartitionRelationPair
from model.kripke import KripkeStructure
from tools.generator_tool import GenSpec, Totality, generate

# edges 1→1, 1→3, 2→3, 3→4, 4→4 shifted to 0-based states
FOUR_STATE_EDGES = [(0, 0), (0, 2), (1, 2), (2, 3), (3, 3)]
FOUR_STATE_LABELS = [("p",), ("p",), ("p",), ("q",)]
# (s, t) means t simulates s
FOUR_STATE_PREORDER = {(0, 0), (1, 1), (1, 0), (2, 2), (3, 3)}
FOUR_STATE_BUGGY_SIM = [{0, 1}, {0, 1}, {2}, {3}]

FOUR_STATE_KRIPKE = """kripke v1
states 4
label 0 p
label 1 p
label 2 p
label 3 q
edge 0 0
edge 0 2
edge 1 2
edge 2 3
edge 3 3
"""


def build_four_state() -> KripkeStructure:
    return KripkeStructure.build(4, FOUR_STATE_EDGES, FOUR_STATE_LABELS)


@pytest.fixture
def four_state() -> KripkeStructure:
    return build_four_state()


@pytest.fixture
def write_file(tmp_path: Path) -> Callable[[str, str], Path]:
    def write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write


def preorder_pairs(matrix: np.ndarray) -> set[tuple[int, int]]:
    return {(int(s), int(t)) for s, t in np.argwhere(matrix)}


def is_preorder(matrix: np.ndarray) -> bool:
    if not matrix.diagonal().all():
        return False
    squared = (matrix.astype(np.int64) @ matrix.astype(np.int64)) > 0
    return bool(np.all(matrix | ~squared))


def sim_matrix(sets) -> np.ndarray:
    """Stack per-state Sim sets into a preorder matrix."""
    return np.array([s.to_mask() for s in sets], dtype=bool).reshape(len(sets), len(sets))


@st.composite
def kripke_structures(draw: st.DrawFn, max_states: int = 8, max_labels: int = 3) -> KripkeStructure:
    n = draw(st.integers(min_value=1, max_value=max_states))
    k = draw(st.integers(min_value=1, max_value=max_labels))
    labels = draw(st.lists(st.integers(min_value=0, max_value=k - 1), min_size=n, max_size=n))
    pairs = list(itertools.product(range(n), repeat=2))
    edges = draw(st.lists(st.sampled_from(pairs), max_size=3 * n, unique=True))
    return KripkeStructure.build(n, edges, [(f"p{x}",) for x in labels])


@st.composite
def partial_order_pairs(draw: st.DrawFn, max_states: int = 6, num_states: int | None = None) -> PartitionRelationPair:
    """A random partition with a partial order on its blocks."""
    n = num_states if num_states is not None else draw(st.integers(min_value=1, max_value=max_states))
    owner = draw(st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n))
    groups: dict[int, list[int]] = {}
    for state, key in enumerate(owner):
        groups.setdefault(key, []).append(state)
    blocks = list(groups.values())
    k = len(blocks)
    table = np.zeros((k, k), dtype=bool)
    for i, j in itertools.combinations(range(k), 2):
        table[i, j] = draw(st.booleans())
    np.fill_diagonal(table, True)
    for m in range(k):
        table |= table[:, m : m + 1] & table[m : m + 1, :]
    pairs = [(int(i), int(j)) for i, j in np.argwhere(table)]
    return PartitionRelationPair.from_blocks(n, blocks, pairs)


@st.composite
def structures_with_pairs(draw: st.DrawFn, max_states: int = 7) -> tuple[KripkeStructure, PartitionRelationPair]:
    """An unlabelled structure together with an arbitrary starting pair over its states."""
    n = draw(st.integers(min_value=1, max_value=max_states))
    pairs = list(itertools.product(range(n), repeat=2))
    edges = draw(st.lists(st.sampled_from(pairs), max_size=3 * n, unique=True))
    return KripkeStructure.build(n, edges), draw(partial_order_pairs(num_states=n))


DENSITIES = (0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9)


def sweep_spec(seed: int) -> GenSpec:
    """The seeded instance used by the oracle sweep; parameters cycle with the seed."""
    return GenSpec(
        num_states=1 + seed % 8,
        num_labels=1 + (seed // 8) % 3,
        edge_density=DENSITIES[(seed // 24) % len(DENSITIES)],
        totality=Totality.FORCE_TOTAL if seed % 2 else Totality.ALLOW_NON_TOTAL,
        seed=seed,
    )


def structured_family(max_states: int = 6) -> list[KripkeStructure]:
    """Chains, cycles, stars and seeded random graphs over one or two labels."""
    family: list[KripkeStructure] = []
    for n in range(1, max_states + 1):
        for labelling in ((0,) * n, tuple(i % 2 for i in range(n))):
            atoms = [(f"p{x}",) for x in labelling]
            chain = [(i, i + 1) for i in range(n - 1)]
            family.append(KripkeStructure.build(n, chain, atoms))
            family.append(KripkeStructure.build(n, chain + [(n - 1, 0)], atoms))
            family.append(KripkeStructure.build(n, [(0, i) for i in range(n)], atoms))
            family.append(KripkeStructure.build(n, [(i, i) for i in range(0, n, 2)], atoms))
    seed = 0
    while len(family) < 200:
        spec = GenSpec(
            num_states=2 + seed % (max_states - 1),
            num_labels=1 + seed % 2,
            edge_density=DENSITIES[seed % len(DENSITIES)],
            totality=Totality.FORCE_TOTAL if seed % 3 == 0 else Totality.ALLOW_NON_TOTAL,
            seed=seed,
        )
        family.append(generate(spec))
        seed += 1
    return family
