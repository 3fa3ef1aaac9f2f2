"""tools package exports

File formats, model generation, benchmarking and model download.
"""

from .bench_tool import BenchModel, BenchSpec, BenchTool, bench
from .generator_tool import GenSpec, Totality, generate, replicate, scaling_family, write_generated
from .kripke_io_tool import (
    format_aut,
    format_kripke,
    format_result,
    load_structure,
    parse_aut,
    parse_kripke,
    parse_result,
)
from .vlts_fetch_tool import VLTSFetchTool

__all__ = [
    "BenchModel",
    "BenchSpec",
    "BenchTool",
    "bench",
    "GenSpec",
    "Totality",
    "generate",
    "replicate",
    "scaling_family",
    "write_generated",
    "format_aut",
    "format_kripke",
    "format_result",
    "load_structure",
    "parse_aut",
    "parse_kripke",
    "parse_result",
    "VLTSFetchTool",
]
