"""Kripke structures, labelled transition systems and state sets.

States are dense 0-based indices. A structure keeps its (deduplicated) edge
list twice, once grouped by target for predecessor scans and once grouped by
source for successor scans, as CSR offset arrays.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Iterator, Optional, Sequence

import numpy as np

from settings import InvariantViolation

if TYPE_CHECKING:
    from engine.partition import Partition

logger = logging.getLogger(__name__)

# Atom given to every original state by lts_to_kripke
STATE_ATOM = "#state"
MAX_BITMASK_ATOMS = 64


class StateSet:
    """Dense bitset over ``range(capacity)`` backed by a Python int."""

    __slots__ = ("capacity", "bits")

    def __init__(self, capacity: int, bits: int = 0):
        if bits < 0 or bits >> capacity:
            raise ValueError(f"bits outside capacity {capacity}")
        self.capacity = capacity
        self.bits = bits

    @classmethod
    def empty(cls, capacity: int) -> "StateSet":
        return cls(capacity, 0)

    @classmethod
    def full(cls, capacity: int) -> "StateSet":
        return cls(capacity, (1 << capacity) - 1)

    @classmethod
    def from_indices(cls, capacity: int, indices: Iterable[int]) -> "StateSet":
        bits = 0
        for i in indices:
            i = int(i)
            if not 0 <= i < capacity:
                raise ValueError(f"state {i} outside capacity {capacity}")
            bits |= 1 << i
        return cls(capacity, bits)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "StateSet":
        packed = np.packbits(np.asarray(mask, dtype=bool), bitorder="little")
        return cls(len(mask), int.from_bytes(packed.tobytes(), "little"))

    def to_mask(self) -> np.ndarray:
        nbytes = (self.capacity + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.capacity].astype(bool)

    def indices(self) -> list[int]:
        return list(self)

    def _check(self, other: "StateSet") -> None:
        if other.capacity != self.capacity:
            raise ValueError(f"capacity mismatch: {self.capacity} vs {other.capacity}")

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, state: object) -> bool:
        return isinstance(state, (int, np.integer)) and 0 <= state < self.capacity and bool(self.bits >> int(state) & 1)

    def __or__(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.capacity, self.bits | other.bits)

    def __and__(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.capacity, self.bits & other.bits)

    def __sub__(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.capacity, self.bits & ~other.bits)

    def __le__(self, other: "StateSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def issubset(self, other: "StateSet") -> bool:
        return self <= other

    def complement(self) -> "StateSet":
        return StateSet(self.capacity, ((1 << self.capacity) - 1) & ~self.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateSet):
            return NotImplemented
        return self.capacity == other.capacity and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.capacity, self.bits))

    def __repr__(self) -> str:
        return f"StateSet({self.capacity}, {{{', '.join(map(str, self))}}})"


class LabelMode(str, Enum):
    # labels[s] is a bitmask over atom ids
    BITMASK = "bitmask"
    # labels[s] is an index into class_table
    CLASS = "class"


def _csr_offsets(keys: np.ndarray, size: int) -> np.ndarray:
    offsets = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=size), out=offsets[1:])
    return offsets


def _gather(offsets: np.ndarray, values: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Concatenate ``values[offsets[s]:offsets[s+1]]`` over ``states``."""
    states = np.asarray(states, dtype=np.int64)
    if states.size == 0:
        return np.empty(0, dtype=np.int64)
    starts = offsets[states]
    lengths = offsets[states + 1] - starts
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    shift = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
    return values[shift + np.arange(total, dtype=np.int64)]


@dataclass(frozen=True, eq=False)
class KripkeStructure:
    """Immutable finite Kripke structure (Σ, →, ℓ).

    Edges are stored sorted by (target, source); ``sources``/``targets`` are
    parallel arrays, ``pred_offsets`` indexes them by target. The successor
    view ``succ_targets`` is indexed by ``succ_offsets``.
    """

    num_states: int
    sources: np.ndarray
    targets: np.ndarray
    pred_offsets: np.ndarray
    succ_offsets: np.ndarray
    succ_targets: np.ndarray
    labels: tuple[int, ...]
    atom_names: tuple[str, ...]
    label_mode: LabelMode = LabelMode.BITMASK
    class_table: tuple[frozenset[int], ...] = ()

    @classmethod
    def build(
        cls,
        num_states: int,
        edges: Iterable[Sequence[int]] | np.ndarray,
        state_atoms: Optional[Sequence[Iterable[str]]] = None,
    ) -> "KripkeStructure":
        """Build a structure from an edge list and per-state atom names.

        Duplicate edges are dropped with a warning. Up to 64 distinct atoms are
        encoded as bitmasks, larger alphabets fall back to label classes.
        """
        if num_states < 0:
            raise ValueError("num_states must be non-negative")
        pairs = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
        pairs = pairs.reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= num_states):
            raise ValueError(f"edge endpoint outside 0..{num_states - 1}")

        keys = np.unique(pairs[:, 1] * num_states + pairs[:, 0]) if num_states else np.empty(0, np.int64)
        duplicates = len(pairs) - len(keys)
        if duplicates:
            logger.warning("dropped %d duplicate edge(s)", duplicates)
        targets = (keys // num_states) if num_states else keys
        sources = (keys % num_states) if num_states else keys
        order = np.lexsort((targets, sources))

        atoms_per_state = [tuple(a) for a in state_atoms] if state_atoms is not None else [()] * num_states
        if len(atoms_per_state) != num_states:
            raise ValueError("state_atoms must have one entry per state")
        atom_ids: dict[str, int] = {}
        for atoms in atoms_per_state:
            for atom in atoms:
                atom_ids.setdefault(atom, len(atom_ids))
        id_sets = [frozenset(atom_ids[a] for a in atoms) for atoms in atoms_per_state]

        if len(atom_ids) <= MAX_BITMASK_ATOMS:
            labels = tuple(sum(1 << i for i in ids) for ids in id_sets)
            mode, table = LabelMode.BITMASK, ()
        else:
            classes: dict[frozenset[int], int] = {}
            labels = tuple(classes.setdefault(ids, len(classes)) for ids in id_sets)
            mode, table = LabelMode.CLASS, tuple(classes)

        ks = cls(
            num_states=num_states,
            sources=sources,
            targets=targets,
            pred_offsets=_csr_offsets(targets, num_states),
            succ_offsets=_csr_offsets(sources, num_states),
            succ_targets=targets[order],
            labels=labels,
            atom_names=tuple(atom_ids),
            label_mode=mode,
            class_table=table,
        )
        for arr in (ks.sources, ks.targets, ks.pred_offsets, ks.succ_offsets, ks.succ_targets):
            arr.flags.writeable = False
        return ks

    @property
    def num_transitions(self) -> int:
        return int(self.sources.size)

    @property
    def successors_count(self) -> np.ndarray:
        return np.diff(self.succ_offsets)

    def label_keys(self) -> np.ndarray:
        """Dense per-state label ids; equal ids mean equal labels."""
        interned: dict[int, int] = {}
        return np.array([interned.setdefault(k, len(interned)) for k in self.labels], dtype=np.int64)

    def predecessors(self, state: int) -> np.ndarray:
        return self.sources[self.pred_offsets[state] : self.pred_offsets[state + 1]]

    def successors(self, state: int) -> np.ndarray:
        return self.succ_targets[self.succ_offsets[state] : self.succ_offsets[state + 1]]

    def predecessors_of(self, states: np.ndarray | Sequence[int]) -> np.ndarray:
        """Predecessors of every state in ``states``, with multiplicity."""
        return _gather(self.pred_offsets, self.sources, np.asarray(states, dtype=np.int64))

    def atoms_of(self, state: int) -> frozenset[str]:
        key = self.labels[state]
        ids = self.class_table[key] if self.label_mode is LabelMode.CLASS else StateSet(64, key)
        return frozenset(self.atom_names[i] for i in ids)

    def same_label_matrix(self) -> np.ndarray:
        keys = self.label_keys()
        return keys[:, None] == keys[None, :]

    def adjacency_matrix(self) -> np.ndarray:
        adj = np.zeros((self.num_states, self.num_states), dtype=bool)
        adj[self.sources, self.targets] = True
        return adj

    def validate(self) -> None:
        """Cross-check the redundant adjacency views; raises InvariantViolation."""
        n = self.num_states
        if self.sources.size and (self.sources.max() >= n or self.targets.max() >= n):
            raise InvariantViolation("edge endpoint out of range")
        if int(self.pred_offsets[-1]) != self.num_transitions:
            raise InvariantViolation("predecessor lists do not cover the transition count")
        if int(self.succ_offsets[-1]) != self.num_transitions:
            raise InvariantViolation("successor lists do not cover the transition count")
        out_degree = np.bincount(self.sources, minlength=n)
        if not np.array_equal(out_degree, self.successors_count):
            raise InvariantViolation("successors_count disagrees with predecessor lists")
        if len(self.labels) != n:
            raise InvariantViolation("labels must have one entry per state")


@dataclass(frozen=True)
class LabelledTS:
    num_states: int
    transitions: tuple[tuple[int, int, int], ...]
    label_names: tuple[str, ...]
    initial_state: int = 0

    def __post_init__(self) -> None:
        for src, label, dst in self.transitions:
            if not (0 <= src < self.num_states and 0 <= dst < self.num_states):
                raise ValueError(f"transition ({src}, {label}, {dst}) outside 0..{self.num_states - 1}")
            if not 0 <= label < len(self.label_names):
                raise ValueError(f"unknown label id {label}")

    @property
    def num_transitions(self) -> int:
        return len(self.transitions)


def pre_mask(ks: KripkeStructure, mask: np.ndarray) -> np.ndarray:
    """Boolean-mask version of :func:`pre`."""
    out = np.zeros(ks.num_states, dtype=bool)
    out[ks.sources[mask[ks.targets]]] = True
    return out


def post_mask(ks: KripkeStructure, mask: np.ndarray) -> np.ndarray:
    out = np.zeros(ks.num_states, dtype=bool)
    out[ks.targets[mask[ks.sources]]] = True
    return out


def pre(ks: KripkeStructure, ys: StateSet) -> StateSet:
    """{a | ∃b ∈ ys. a → b}"""
    if ys.capacity != ks.num_states:
        raise ValueError("state set capacity differs from the structure size")
    return StateSet.from_mask(pre_mask(ks, ys.to_mask()))


def post(ks: KripkeStructure, ys: StateSet) -> StateSet:
    """{b | ∃a ∈ ys. a → b}"""
    if ys.capacity != ks.num_states:
        raise ValueError("state set capacity differs from the structure size")
    return StateSet.from_mask(post_mask(ks, ys.to_mask()))


def label_classes(ks: KripkeStructure) -> list[list[int]]:
    """States grouped by label, groups ordered by their smallest state."""
    groups: dict[int, list[int]] = {}
    for state, key in enumerate(ks.labels):
        groups.setdefault(key, []).append(state)
    return list(groups.values())


def initial_partition(ks: KripkeStructure) -> "Partition":
    """The label partition P_ℓ."""
    # engine imports this module, so the import is deferred
    from engine.partition import Partition

    return Partition(ks.num_states, label_classes(ks))


def lts_to_kripke(lts: LabelledTS) -> KripkeStructure:
    """Move transition labels onto fresh states.

    Every ``s -l-> t`` becomes ``s -> n -> t`` where the fresh state ``n`` is
    labelled ``{l}``; original states all carry ``STATE_ATOM``.
    """
    n, m = lts.num_states, lts.num_transitions
    trans = np.asarray(lts.transitions, dtype=np.int64).reshape(-1, 3)
    fresh = n + np.arange(m, dtype=np.int64)
    edges = np.concatenate(
        [np.stack([trans[:, 0], fresh], axis=1), np.stack([fresh, trans[:, 2]], axis=1)]
    )
    state_atoms: list[tuple[str, ...]] = [(STATE_ATOM,)] * n
    state_atoms.extend((lts.label_names[label],) for label in trans[:, 1].tolist())
    ks = KripkeStructure.build(n + m, edges, state_atoms)
    logger.debug("transformed LTS (%d states, %d transitions) into %d Kripke states", n, m, ks.num_states)
    return ks
