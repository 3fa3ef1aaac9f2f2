"""Benchmark harness producing one table row per model.

Rows carry the structural columns (|Σ|, |→|, |P_in|, |P_sim|), one wall time
per algorithm and SA's instrumented counters. Times are reported, never
checked.
"""

from __future__ import annotations

import csv
import logging
import time
import tracemalloc
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, TextIO

from pydantic import BaseModel, ConfigDict, Field, model_validator

from model.kripke import KripkeStructure, label_classes
from settings import Algorithm, vlts_dir
from solvers.dispatch import solve
from tools.generator_tool import GenSpec, generate, scaling_family
from tools.kripke_io_tool import load_structure

try:
    import resource
except ImportError:  # not available on Windows
    resource = None

logger = logging.getLogger(__name__)

# HHK keeps |Σ|×|Σ| tables; larger models get an empty time column
HHK_BENCH_MAX_STATES = 8000

BASE_COLUMNS = ["model", "states", "transitions", "initial_blocks", "sim_blocks", "blocks_created", "remove_volume"]


class BenchModel(BaseModel):
    """One row source: a file, a VLTS name, a random spec or scaling copies."""

    model_config = ConfigDict(frozen=True)

    name: str
    path: Optional[Path] = None
    aut: bool = True
    generator: Optional[GenSpec] = None
    copies: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _one_source(self) -> "BenchModel":
        sources = sum(x is not None for x in (self.path, self.generator, self.copies))
        if sources > 1:
            raise ValueError(f"model {self.name!r} names more than one source")
        return self


class BenchSpec(BaseModel):
    models: list[BenchModel]
    algorithms: list[Algorithm] = Field(default_factory=lambda: [Algorithm.SA, Algorithm.HHK])
    jobs: int = Field(default=1, ge=1)
    trace_memory: bool = False

    @classmethod
    def from_file(cls, path: Path) -> "BenchSpec":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


def load_model(model: BenchModel) -> KripkeStructure:
    if model.generator is not None:
        return generate(model.generator)
    if model.copies is not None:
        return scaling_family(model.copies)
    path = model.path if model.path is not None else vlts_dir() / f"{model.name}.aut"
    return load_structure(path, aut=model.aut)


def peak_rss_kb() -> Optional[int]:
    if resource is None:
        return None
    return int(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)


def _timed(ks: KripkeStructure, algorithm: Algorithm, trace_memory: bool):
    if trace_memory:
        tracemalloc.start()
    started = time.perf_counter()
    try:
        res = solve(ks, algorithm)
    finally:
        elapsed = time.perf_counter() - started
        peak = tracemalloc.get_traced_memory()[1] if trace_memory else None
        if trace_memory:
            tracemalloc.stop()
    return res, elapsed, peak


class BenchTool:
    def __init__(self, spec: BenchSpec):
        self.spec = spec

    def columns(self) -> list[str]:
        columns = list(BASE_COLUMNS)
        for algorithm in self.spec.algorithms:
            columns.append(f"time_{algorithm.value}")
            if self.spec.trace_memory:
                columns.append(f"peak_bytes_{algorithm.value}")
        columns.append("peak_rss_kb")
        return columns

    def row(self, model: BenchModel) -> dict[str, object]:
        ks = load_model(model)
        row: dict[str, object] = {
            "model": model.name,
            "states": ks.num_states,
            "transitions": ks.num_transitions,
            "initial_blocks": len(label_classes(ks)),
        }
        for algorithm in self.spec.algorithms:
            key = algorithm.value
            if algorithm is Algorithm.HHK and ks.num_states > HHK_BENCH_MAX_STATES:
                logger.warning("%s: skipping hhk on %d states", model.name, ks.num_states)
                row[f"time_{key}"] = ""
                continue
            res, elapsed, peak = _timed(ks, algorithm, self.spec.trace_memory)
            row[f"time_{key}"] = f"{elapsed:.6f}"
            if peak is not None:
                row[f"peak_bytes_{key}"] = peak
            row.setdefault("sim_blocks", len(res.blocks))
            if algorithm is Algorithm.SA:
                row["blocks_created"] = res.stats.blocks_created
                row["remove_volume"] = res.stats.remove_volume
        row["peak_rss_kb"] = peak_rss_kb() or ""
        logger.info("benched %s (%d states, %d transitions)", model.name, ks.num_states, ks.num_transitions)
        return row

    def run(self) -> list[dict[str, object]]:
        models = self.spec.models
        if self.spec.jobs > 1 and len(models) > 1:
            with ProcessPoolExecutor(max_workers=self.spec.jobs) as pool:
                return list(pool.map(self.row, models))
        return [self.row(model) for model in models]

    def write_table(self, rows: list[dict[str, object]], out: TextIO) -> None:
        writer = csv.DictWriter(out, fieldnames=self.columns(), delimiter="\t", restval="", lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def bench(spec: BenchSpec) -> list[dict[str, object]]:
    return BenchTool(spec).run()
