"""simshell: simulation preorders of Kripke structures and labelled transition systems.

    python main.py run --input model.aut --format aut --algo sa --emit all --verify
    python main.py gen --states 8 --labels 2 --density 0.3 --seed 1 --out m.kripke
    python main.py bench --spec bench.json --algos sa,hhk
    python main.py fetch vasy_0_1
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

import numpy as np
from pydantic import ValidationError

from model.kripke import KripkeStructure
from settings import (
    SHELL_MAX_STATES,
    Algorithm,
    GuardError,
    InputFormat,
    InvariantViolation,
    OutputFormat,
    RemoveInit,
    RunConfig,
    SimshellError,
    guard_lifted,
)
from solvers.dispatch import solve
from solvers.oracle_solver import naive_oracle, shell_oracle
from solvers.result import SimResult, expand_preorder, quotient
from tools.bench_tool import BenchSpec, BenchTool
from tools.generator_tool import GenSpec, Totality, generate, write_generated
from tools.kripke_io_tool import emitted_preorder_pairs, format_kripke, format_result, load_structure
from tools.vlts_fetch_tool import TABLE_MODELS, VLTSFetchTool

logger = logging.getLogger("simshell")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GUARD = 3
EXIT_MISMATCH = 4
EXIT_INVARIANT = 5


def load_input(cfg: RunConfig) -> KripkeStructure:
    if cfg.input_format is InputFormat.KRIPKE and cfg.transform:
        raise SimshellError("--transform only applies to .aut input")
    return load_structure(cfg.input_path, aut=cfg.input_format is InputFormat.AUT)


def _write_text(res: SimResult, ks: KripkeStructure, cfg: RunConfig, out: TextIO) -> None:
    """Human-readable report."""
    if "partition" in cfg.emit:
        for i, block in enumerate(res.blocks):
            out.write(f"Block {i}: {{{', '.join(map(str, block))}}}\n")
    if "relation" in cfg.emit:
        for i, j in res.simulates():
            if i != j:
                out.write(f"Block {i} is simulated by block {j}\n")
    if "preorder" in cfg.emit:
        for s, t in emitted_preorder_pairs(res):
            out.write(f"State {t} simulates state {s}\n")
    if "quotient" in cfg.emit:
        q = quotient(ks, res)
        for s, t in zip(q.sources.tolist(), q.targets.tolist()):
            out.write(f"Block {s} -> block {t}\n")
    if "stats" in cfg.emit:
        for name, value in res.stats.model_dump().items():
            out.write(f"{name}: {value}\n")


def verify(res: SimResult, ks: KripkeStructure) -> dict[str, bool]:
    """Compare the expanded preorder with the oracles that fit within their guards."""
    computed = expand_preorder(res)
    verdicts = {"naive": bool(np.array_equal(computed, naive_oracle(ks)))}
    if ks.num_states <= SHELL_MAX_STATES or guard_lifted():
        verdicts["shell"] = bool(np.array_equal(computed, shell_oracle(ks)))
    return verdicts


def run(cfg: RunConfig, out: TextIO = sys.stdout) -> int:
    text = cfg.output_format is OutputFormat.TEXT
    ks = load_input(cfg)
    if text:
        out.write(f"[SYSTEM]: Loaded {ks.num_states} states, {ks.num_transitions} transitions\n")
        out.write(f"[SYSTEM]: Running {cfg.algorithm.value}...\n")
    rng = random.Random(cfg.seed) if cfg.seed is not None else None
    res = solve(
        ks,
        cfg.algorithm,
        buggy=cfg.buggy,
        debug=cfg.debug_invariants,
        remove_init=cfg.remove_init,
        rng=rng,
    )
    if text:
        _write_text(res, ks, cfg, out)
    else:
        out.write(format_result(res, cfg.emit, ks))

    if not cfg.verify:
        return EXIT_OK
    verdicts = verify(res, ks)
    for oracle, match in verdicts.items():
        verdict = "MATCH" if match else "MISMATCH"
        out.write(f"[SYSTEM]: Verification against {oracle} oracle: {verdict}\n" if text else f"verify {oracle} {verdict}\n")
    return EXIT_OK if all(verdicts.values()) else EXIT_MISMATCH


# --- argument parsing ---


def _csv_algorithms(value: str) -> list[Algorithm]:
    return [Algorithm(a.strip()) for a in value.split(",") if a.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simshell", description="Simulation preorder computation.")
    parser.add_argument("--log-level", default="WARNING", help="logging level (default: WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="compute the simulation preorder of one input")
    p_run.add_argument("--input", required=True, type=Path)
    p_run.add_argument("--format", choices=[f.value for f in InputFormat], default=InputFormat.KRIPKE.value)
    p_run.add_argument("--transform", action="store_true", help="apply the LTS-to-Kripke transform (implied by aut)")
    p_run.add_argument("--algo", choices=[a.value for a in Algorithm], default=Algorithm.SA.value)
    p_run.add_argument("--buggy", action="store_true", help="original statement placement (hhk, refined-hhk)")
    p_run.add_argument("--verify", action="store_true")
    p_run.add_argument("--debug-invariants", action="store_true")
    p_run.add_argument("--emit", default="partition,relation,stats", help="comma list or 'all'")
    p_run.add_argument("--seed", type=int, default=None, help="seed for the randomized scheduler")
    p_run.add_argument("--remove-init", choices=[r.value for r in RemoveInit], default=RemoveInit.FIGURE.value)
    p_run.add_argument("--output", choices=[o.value for o in OutputFormat], default=OutputFormat.MACHINE.value)

    p_gen = sub.add_parser("gen", help="write a seeded random Kripke structure")
    p_gen.add_argument("--states", type=int, required=True)
    p_gen.add_argument("--labels", type=int, default=1)
    p_gen.add_argument("--density", type=float, default=0.3)
    p_gen.add_argument("--total", action="store_true", help="give every deadlock state one successor")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", type=Path, default=None)

    p_bench = sub.add_parser("bench", help="run the benchmark table")
    p_bench.add_argument("--spec", type=Path, required=True)
    p_bench.add_argument("--algos", type=_csv_algorithms, default=None)
    p_bench.add_argument("--jobs", type=int, default=None)
    p_bench.add_argument("--trace-memory", action="store_true")
    p_bench.add_argument("--out", type=Path, default=None)

    p_fetch = sub.add_parser("fetch", help="download VLTS models")
    p_fetch.add_argument("models", nargs="*", default=list(TABLE_MODELS))
    p_fetch.add_argument("--dir", type=Path, default=None)
    p_fetch.add_argument("--force", action="store_true")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        input_path=args.input,
        input_format=args.format,
        transform=args.transform,
        algorithm=args.algo,
        buggy=args.buggy,
        emit=RunConfig.parse_emit(args.emit),
        verify=args.verify,
        seed=args.seed,
        debug_invariants=args.debug_invariants,
        remove_init=args.remove_init,
        output_format=args.output,
    )


def _gen(args: argparse.Namespace, out: TextIO) -> int:
    spec = GenSpec(
        num_states=args.states,
        num_labels=args.labels,
        edge_density=args.density,
        totality=Totality.FORCE_TOTAL if args.total else Totality.ALLOW_NON_TOTAL,
        seed=args.seed,
    )
    if args.out is None:
        out.write(format_kripke(generate(spec)))
    else:
        write_generated(spec, args.out)
    return EXIT_OK


def _bench(args: argparse.Namespace, out: TextIO) -> int:
    spec = BenchSpec.from_file(args.spec)
    updates: dict[str, object] = {}
    if args.algos:
        updates["algorithms"] = args.algos
    if args.jobs is not None:
        updates["jobs"] = args.jobs
    if args.trace_memory:
        updates["trace_memory"] = True
    spec = BenchSpec.model_validate({**spec.model_dump(), **updates})
    tool = BenchTool(spec)
    rows = tool.run()
    if args.out is None:
        tool.write_table(rows, out)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            tool.write_table(rows, f)
    return EXIT_OK


def _fetch(args: argparse.Namespace, out: TextIO) -> int:
    tool = VLTSFetchTool(args.dir)
    for model in args.models:
        path = tool.fetch(model, force=args.force)
        out.write(f"[SYSTEM]: {model} -> {path}\n")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, out: TextIO = sys.stdout) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "run":
            return run(_run_config(args), out)
        if args.command == "gen":
            return _gen(args, out)
        if args.command == "bench":
            return _bench(args, out)
        return _fetch(args, out)
    except GuardError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD
    except InvariantViolation as e:
        print(f"error: invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (SimshellError, ValidationError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
