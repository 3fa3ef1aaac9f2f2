"""Run configuration, guard limits and the exception hierarchy.

Environment variables are loaded from a ``.env`` file in the working
directory (if present) the first time this module is imported.
"""

from __future__ import annotations

import os
from enum import Enum
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

load_dotenv()

# Oracle guards
SHELL_MAX_STATES = 16
ORACLE_MAX_STATES = 2000
# Invariant ghosts are only maintained below this size
DEBUG_MAX_STATES = 64
# State-level `pair` lines are only emitted below this size
PAIR_EMIT_MAX_STATES = 200

GUARD_OVERRIDE_ENV = "SIMSHELL_GUARD_OVERRIDE"
VLTS_DIR_ENV = "SIMSHELL_VLTS_DIR"
DEFAULT_VLTS_DIR = Path("data") / "vlts"

_TRUTHY = {"1", "true", "yes", "on"}


class SimshellError(Exception):
    """Base class for every error the CLI reports with a one-line message."""


class ParseError(SimshellError):
    """Malformed input file. ``line`` is 1-based (0 when not line-specific)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line else message)


class AutHeaderError(ParseError):
    pass


class AutSyntaxError(ParseError):
    pass


class AutIndexError(ParseError):
    pass


class AutCountError(ParseError):
    pass


class KripkeFormatError(ParseError):
    pass


class GuardError(SimshellError):
    """Input exceeds the size an oracle is allowed to run on."""


class FetchError(SimshellError):
    pass


class InvariantViolation(AssertionError):
    """A debug-mode invariant or an always-on counter identity failed."""


def guard_lifted() -> bool:
    return os.environ.get(GUARD_OVERRIDE_ENV, "").strip().lower() in _TRUTHY


def check_guard(what: str, num_states: int, limit: int) -> None:
    """Raise GuardError when ``num_states`` exceeds ``limit`` (unless overridden)."""
    if num_states > limit and not guard_lifted():
        raise GuardError(
            f"{what} refuses inputs with more than {limit} states "
            f"(got {num_states}); set {GUARD_OVERRIDE_ENV}=1 to lift the guard"
        )


def vlts_dir() -> Path:
    return Path(os.environ.get(VLTS_DIR_ENV, str(DEFAULT_VLTS_DIR)))


class Algorithm(str, Enum):
    SA = "sa"
    BASIC = "basic"
    REFINED = "refined"
    HHK = "hhk"
    SCHEMATIC = "schematic"
    REFINED_HHK = "refined-hhk"
    ORACLE = "oracle"
    SHELL = "shell"


class RemoveInit(str, Enum):
    """How SA's Initialize seeds Remove(B).

    FIGURE uses pre(Σ) ∖ pre(∪Rel(B)); ALGORITHM uses Σ ∖ pre(∪Rel(B)).
    """

    FIGURE = "figure"
    ALGORITHM = "algorithm"


class InputFormat(str, Enum):
    AUT = "aut"
    KRIPKE = "kripke"


class OutputFormat(str, Enum):
    TEXT = "text"
    MACHINE = "machine"


EMIT_SECTIONS = ("partition", "relation", "preorder", "stats", "quotient")


class RunConfig(BaseModel):
    """Everything `simshell run` needs to know."""

    model_config = ConfigDict(frozen=True)

    input_path: Path
    input_format: InputFormat = InputFormat.KRIPKE
    transform: bool = False
    algorithm: Algorithm = Algorithm.SA
    buggy: bool = False
    emit: frozenset[str] = Field(default_factory=lambda: frozenset({"partition", "relation", "stats"}))
    verify: bool = False
    seed: Optional[int] = None
    debug_invariants: bool = False
    remove_init: RemoveInit = RemoveInit.FIGURE
    output_format: OutputFormat = OutputFormat.MACHINE

    @field_validator("emit")
    @classmethod
    def _known_sections(cls, value: frozenset[str]) -> frozenset[str]:
        unknown = set(value) - set(EMIT_SECTIONS)
        if unknown:
            raise ValueError(f"unknown emit section(s): {', '.join(sorted(unknown))}")
        return value

    @classmethod
    def parse_emit(cls, value: str) -> frozenset[str]:
        """Turn ``partition,relation`` (or ``all``) into a section set."""
        parts = {p.strip() for p in value.split(",") if p.strip()}
        if "all" in parts:
            return frozenset(EMIT_SECTIONS)
        unknown = parts - set(EMIT_SECTIONS)
        if unknown:
            raise ValueError(f"unknown emit section(s): {', '.join(sorted(unknown))}")
        return frozenset(parts)
