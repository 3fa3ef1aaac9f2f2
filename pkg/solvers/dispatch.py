"""One entry point that runs any solver and returns a block-level result."""

from __future__ import annotations

import random
from typing import Optional

from model.kripke import KripkeStructure
from settings import Algorithm, RemoveInit
from solvers.oracle_solver import NaiveOracleSolver, ShellOracleSolver
from solvers.reference_solver import HHKSolver, RefinedSimilaritySolver, SchematicSolver
from solvers.result import SimResult, result_from_preorder
from solvers.sa_solver import BasicSASolver, RefinedSASolver, SASolver

BUGGY_CAPABLE = frozenset({Algorithm.HHK, Algorithm.REFINED_HHK})


def solve(
    ks: KripkeStructure,
    algorithm: Algorithm | str = Algorithm.SA,
    *,
    buggy: bool = False,
    debug: bool = False,
    remove_init: RemoveInit = RemoveInit.FIGURE,
    rng: Optional[random.Random] = None,
) -> SimResult:
    algorithm = Algorithm(algorithm)
    if buggy and algorithm not in BUGGY_CAPABLE:
        raise ValueError(f"--buggy only applies to hhk and refined-hhk, not {algorithm.value}")

    if algorithm is Algorithm.SA:
        return SASolver(ks, remove_init=remove_init, debug=debug).run()
    if algorithm is Algorithm.BASIC:
        return BasicSASolver(ks, debug=debug).run()
    if algorithm is Algorithm.REFINED:
        return RefinedSASolver(ks, debug=debug).run()

    if algorithm is Algorithm.SCHEMATIC:
        solver = SchematicSolver(ks, rng=rng)
    elif algorithm is Algorithm.REFINED_HHK:
        solver = RefinedSimilaritySolver(ks, buggy=buggy, rng=rng, debug=debug)
    elif algorithm is Algorithm.HHK:
        solver = HHKSolver(ks, buggy=buggy, rng=rng, debug=debug)
    elif algorithm is Algorithm.ORACLE:
        solver = NaiveOracleSolver(ks)
        return result_from_preorder(solver.run(), solver.stats)
    else:
        solver = ShellOracleSolver(ks)
        return result_from_preorder(solver.run(), solver.stats)
    solver.run()
    return result_from_preorder(solver.sim, solver.stats)
