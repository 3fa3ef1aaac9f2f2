"""Simulation solvers.

Each solver is a class built from a Kripke structure and run with ``run()``.
"""

from .dispatch import solve
from .oracle_solver import (
    NaiveOracleSolver,
    ShellOracleSolver,
    labelled_simulation_oracle,
    naive_oracle,
    shell_oracle,
)
from .reference_solver import (
    HHKSolver,
    RefinedSimilaritySolver,
    SchematicSolver,
    hhk,
    refined_similarity,
    schematic_similarity,
)
from .result import RunStats, SimResult, expand_preorder, quotient, result_from_pair, result_from_preorder
from .sa_solver import BasicSASolver, RefinedSASolver, SASolver, basic_sa, refined_sa, sa

# short aliases
SA = SASolver
HHK = HHKSolver
Oracle = NaiveOracleSolver

__all__ = [
    "BasicSASolver",
    "RefinedSASolver",
    "SASolver",
    "SchematicSolver",
    "RefinedSimilaritySolver",
    "HHKSolver",
    "NaiveOracleSolver",
    "ShellOracleSolver",
    "SA",
    "HHK",
    "Oracle",
    "RunStats",
    "SimResult",
    "basic_sa",
    "refined_sa",
    "sa",
    "schematic_similarity",
    "refined_similarity",
    "hhk",
    "naive_oracle",
    "shell_oracle",
    "labelled_simulation_oracle",
    "expand_preorder",
    "quotient",
    "result_from_pair",
    "result_from_preorder",
    "solve",
]
