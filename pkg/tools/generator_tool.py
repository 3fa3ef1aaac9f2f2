"""Seeded random Kripke structures and the synthetic scaling family."""

from __future__ import annotations

import logging
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from model.kripke import KripkeStructure
from tools.kripke_io_tool import format_kripke

logger = logging.getLogger(__name__)


class Totality(str, Enum):
    FORCE_TOTAL = "force-total"
    ALLOW_NON_TOTAL = "allow-non-total"


class GenSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    num_states: int = Field(ge=1)
    num_labels: int = Field(default=1, ge=1)
    edge_density: float = Field(default=0.3, ge=0.0, le=1.0)
    totality: Totality = Totality.ALLOW_NON_TOTAL
    seed: int = 0


def generate(spec: GenSpec) -> KripkeStructure:
    """Labels uniform over ``p0..p{k-1}``, each ordered pair an edge with probability ``edge_density``."""
    rng = np.random.default_rng(spec.seed)
    n = spec.num_states
    labels = rng.integers(spec.num_labels, size=n)
    adjacency = rng.random((n, n)) < spec.edge_density
    if spec.totality is Totality.FORCE_TOTAL:
        sinks = np.flatnonzero(~adjacency.any(axis=1))
        adjacency[sinks, rng.integers(n, size=sinks.size)] = True
    atoms = [(f"p{k}",) for k in labels.tolist()]
    return KripkeStructure.build(n, np.argwhere(adjacency), atoms)


def write_generated(spec: GenSpec, path: Path) -> KripkeStructure:
    ks = generate(spec)
    Path(path).write_text(format_kripke(ks), encoding="utf-8")
    logger.info("wrote %d states, %d transitions to %s", ks.num_states, ks.num_transitions, path)
    return ks


def replicate(ks: KripkeStructure, copies: int) -> KripkeStructure:
    """Disjoint union of ``copies`` copies of ``ks``."""
    if copies < 1:
        raise ValueError("copies must be at least 1")
    n = ks.num_states
    offsets = np.repeat(np.arange(copies, dtype=np.int64) * n, ks.num_transitions)
    sources = np.tile(ks.sources, copies) + offsets
    targets = np.tile(ks.targets, copies) + offsets
    atoms = [tuple(sorted(ks.atoms_of(s))) for s in range(n)] * copies
    return KripkeStructure.build(n * copies, np.stack([sources, targets], axis=1), atoms)


def gadget() -> KripkeStructure:
    """Fixed eight-state structure over three labels used as the replication unit."""
    edges = [
        (0, 0), (0, 3), (1, 3), (1, 4), (2, 4),
        (3, 5), (4, 5), (4, 6), (5, 5), (6, 7),
        (2, 0), (7, 6),
    ]
    labels = ["p", "p", "p", "q", "q", "r", "r", "p"]
    return KripkeStructure.build(8, edges, [(a,) for a in labels])


def scaling_family(copies: int, base: Optional[KripkeStructure] = None) -> KripkeStructure:
    """Copies of one gadget: simulation classes stay fixed while |Σ| and |→| grow."""
    return replicate(base if base is not None else gadget(), copies)
