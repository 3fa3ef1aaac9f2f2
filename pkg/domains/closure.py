"""Upper closure operators on ℘(Σ) given by their image (Moore families).

Subsets are Python ints used as bitsets; a family is a frozenset of them.
Everything here is exponential in the worst case and guarded to small Σ.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from cachetools import LRUCache, cached

from model.kripke import KripkeStructure, StateSet, pre
from settings import SHELL_MAX_STATES, check_guard

logger = logging.getLogger(__name__)

PRE_CACHE_SIZE = 1 << 14


def _bits(x: StateSet | int) -> int:
    return x.bits if isinstance(x, StateSet) else int(x)


@dataclass(frozen=True)
class ClosureFamily:
    num_states: int
    members: frozenset[int]

    def __post_init__(self) -> None:
        if self.universe not in self.members:
            raise ValueError("a closure family must contain the whole state space")
        if any(m >> self.num_states for m in self.members):
            raise ValueError("family member outside the state space")

    @property
    def universe(self) -> int:
        return (1 << self.num_states) - 1

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: object) -> bool:
        if isinstance(x, StateSet):
            return x.capacity == self.num_states and x.bits in self.members
        return x in self.members

    def sets(self) -> list[StateSet]:
        ordered = sorted(self.members, key=lambda m: (m.bit_count(), m))
        return [StateSet(self.num_states, m) for m in ordered]

    def is_moore(self) -> bool:
        members = self.members
        return all(a & b in members for a in members for b in members)

    def is_union_closed(self) -> bool:
        members = self.members
        return 0 in members and all(a | b in members for a in members for b in members)

    def dump(self) -> list[str]:
        return [" ".join(map(str, s)) for s in self.sets()]


@dataclass(frozen=True)
class PartitionView:
    blocks: tuple[StateSet, ...]

    def as_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(b) for b in self.blocks]


def close_under(generators: Iterable[int], op: Callable[[int, int], int], seeds: Iterable[int]) -> frozenset[int]:
    family = set(seeds)
    family.update(generators)
    work = list(family)
    while work:
        a = work.pop()
        for b in list(family):
            m = op(a, b)
            if m not in family:
                family.add(m)
                work.append(m)
    return frozenset(family)


def _moore(num_states: int, generators: Iterable[int]) -> ClosureFamily:
    universe = (1 << num_states) - 1
    return ClosureFamily(num_states, close_under(generators, int.__and__, [universe]))


def family_from_sets(num_states: int, sets: Iterable[Iterable[int] | StateSet]) -> ClosureFamily:
    """Build a family from explicit subsets; they must already be Moore-closed."""
    members = frozenset(_bits(s) if isinstance(s, StateSet) else StateSet.from_indices(num_states, s).bits for s in sets)
    cf = ClosureFamily(num_states, members)
    if not cf.is_moore():
        raise ValueError("sets are not closed under intersection")
    return cf


def apply(cf: ClosureFamily, x: StateSet) -> StateSet:
    """Least member of the family containing ``x``."""
    result = cf.universe
    for m in cf.members:
        if x.bits & ~m == 0:
            result &= m
    return StateSet(cf.num_states, result)


def moore_closure(sets: Iterable[StateSet | int], num_states: int) -> ClosureFamily:
    check_guard("moore_closure", num_states, SHELL_MAX_STATES)
    return _moore(num_states, (_bits(s) for s in sets))


def disjunctive_completion(cf: ClosureFamily) -> ClosureFamily:
    check_guard("disjunctive_completion", cf.num_states, SHELL_MAX_STATES)
    return ClosureFamily(cf.num_states, close_under(cf.members, int.__or__, [0]))


def induced_partition(cf: ClosureFamily) -> PartitionView:
    """States grouped by the image of their singleton."""
    groups: dict[int, int] = {}
    for state in range(cf.num_states):
        key = apply(cf, StateSet(cf.num_states, 1 << state)).bits
        groups[key] = groups.get(key, 0) | 1 << state
    return PartitionView(tuple(StateSet(cf.num_states, bits) for bits in groups.values()))


def _pre_bits(ks: KripkeStructure) -> Callable[[int], int]:
    @cached(cache=LRUCache(maxsize=PRE_CACHE_SIZE))
    def pre_bits(bits: int) -> int:
        return pre(ks, StateSet(ks.num_states, bits)).bits

    return pre_bits


def pre_closure_iterates(cf: ClosureFamily, ks: KripkeStructure) -> list[ClosureFamily]:
    """μ0 = cf, μ(i+1) = Cl∩(μi ∪ pre(μi)), up to the first repeated iterate."""
    if cf.num_states != ks.num_states:
        raise ValueError("closure family and structure disagree on the state space")
    check_guard("forward_shell", ks.num_states, SHELL_MAX_STATES)
    pre_bits = _pre_bits(ks)
    iterates = [cf]
    while True:
        current = iterates[-1]
        images = {pre_bits(m) for m in current.members}
        if images <= current.members:
            break
        iterates.append(_moore(cf.num_states, current.members | images))
    logger.debug("pre-closure stabilised after %d iterate(s)", len(iterates) - 1)
    return iterates


def forward_shell(cf: ClosureFamily, ks: KripkeStructure) -> ClosureFamily:
    """Most abstract refinement of ``cf`` closed under union and pre."""
    return disjunctive_completion(pre_closure_iterates(cf, ks)[-1])


def preorder_from_closure(cf: ClosureFamily) -> np.ndarray:
    """``matrix[s, t]`` iff ``t`` lies in the closure of ``{s}``."""
    n = cf.num_states
    matrix = np.zeros((n, n), dtype=bool)
    for s in range(n):
        matrix[s] = apply(cf, StateSet(n, 1 << s)).to_mask()
    return matrix
