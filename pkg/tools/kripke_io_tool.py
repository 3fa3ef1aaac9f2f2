"""Readers and writers for `.aut` files, the native Kripke format and results.

Native Kripke format::

    kripke v1
    states <N>
    label <state> <atom> [<atom> ...]
    edge <src> <dst>

Machine result format, one item per line::

    block <id>: <state> ...
    simulates <idA> <idB>      every state of A is simulated by every state of B
    pair <s> <t>               t simulates s
    quotient <idA> <idB>       some state of A steps into B
    stat <name> <value>
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from model.kripke import KripkeStructure, LabelMode, LabelledTS, StateSet, lts_to_kripke
from settings import (
    PAIR_EMIT_MAX_STATES,
    AutCountError,
    AutHeaderError,
    AutIndexError,
    AutSyntaxError,
    KripkeFormatError,
    ParseError,
)
from solvers.result import RunStats, SimResult, expand_preorder, quotient

logger = logging.getLogger(__name__)

AUT_HEADER = re.compile(r"^des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$")
AUT_EDGE = re.compile(r'^\(\s*(\d+)\s*,\s*(".*"|[^",]*?)\s*,\s*(\d+)\s*\)$')


# --- .aut ---


def parse_aut(text: str) -> LabelledTS:
    lines = text.splitlines()
    first = next((i for i, line in enumerate(lines) if line.strip()), None)
    if first is None:
        raise AutHeaderError("empty file, expected `des (<init>, <ntrans>, <nstates>)`", 1)
    header = AUT_HEADER.match(lines[first].strip())
    if header is None:
        raise AutHeaderError(f"malformed header {lines[first].strip()!r}", first + 1)
    init, declared, num_states = (int(g) for g in header.groups())
    if num_states < 1:
        raise AutHeaderError("an .aut file needs at least one state", first + 1)
    if init >= num_states:
        raise AutIndexError(f"initial state {init} outside 0..{num_states - 1}", first + 1)

    labels: dict[str, int] = {}
    transitions: list[tuple[int, int, int]] = []
    last_line = first + 1
    for number, raw in enumerate(lines[first + 1 :], start=first + 2):
        line = raw.strip()
        if not line:
            continue
        last_line = number
        edge = AUT_EDGE.match(line)
        if edge is None:
            raise AutSyntaxError(f"expected `(<src>, <label>, <dst>)`, got {line!r}", number)
        src, label, dst = int(edge.group(1)), edge.group(2), int(edge.group(3))
        for state in (src, dst):
            if state >= num_states:
                raise AutIndexError(f"state {state} outside 0..{num_states - 1}", number)
        if len(label) >= 2 and label[0] == label[-1] == '"':
            label = label[1:-1]
        transitions.append((src, labels.setdefault(label, len(labels)), dst))

    if len(transitions) != declared:
        raise AutCountError(f"header declares {declared} transitions, found {len(transitions)}", last_line)
    logger.debug("parsed .aut: %d states, %d transitions, %d labels", num_states, declared, len(labels))
    return LabelledTS(num_states, tuple(transitions), tuple(labels), init)


def format_aut(lts: LabelledTS) -> str:
    out = [f"des ({lts.initial_state}, {lts.num_transitions}, {lts.num_states})"]
    out.extend(f'({s}, "{lts.label_names[a]}", {t})' for s, a, t in lts.transitions)
    return "\n".join(out) + "\n"


# --- native Kripke format ---


def _state(token: str, num_states: int, line: int) -> int:
    if not token.isdigit():
        raise KripkeFormatError(f"expected a state index, got {token!r}", line)
    state = int(token)
    if state >= num_states:
        raise KripkeFormatError(f"state {state} outside 0..{num_states - 1}", line)
    return state


def parse_kripke(text: str) -> KripkeStructure:
    num_states: Optional[int] = None
    atoms: list[list[str]] = []
    edges: list[tuple[int, int]] = []
    seen_directive = False
    for number, raw in enumerate(text.splitlines(), start=1):
        words = raw.split()
        if not words:
            continue
        directive, args = words[0], words[1:]
        if directive == "kripke":
            if seen_directive:
                raise KripkeFormatError("`kripke` header must be the first line", number)
            if args != ["v1"]:
                raise KripkeFormatError(f"unsupported format version {' '.join(args)!r}", number)
        elif directive == "states":
            if num_states is not None:
                raise KripkeFormatError("duplicate `states` line", number)
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise KripkeFormatError("`states` needs one positive count", number)
            num_states = int(args[0])
            atoms = [[] for _ in range(num_states)]
        elif directive in ("label", "edge"):
            if num_states is None:
                raise KripkeFormatError(f"`{directive}` before `states`", number)
            if directive == "label":
                if len(args) < 2:
                    raise KripkeFormatError("`label` needs a state and at least one atom", number)
                state = _state(args[0], num_states, number)
                atoms[state].extend(a for a in args[1:] if a not in atoms[state])
            else:
                if len(args) != 2:
                    raise KripkeFormatError("`edge` needs a source and a target", number)
                edges.append((_state(args[0], num_states, number), _state(args[1], num_states, number)))
        else:
            raise KripkeFormatError(f"unknown directive {directive!r}", number)
        seen_directive = True
    if num_states is None:
        raise KripkeFormatError("missing `states` line")
    return KripkeStructure.build(num_states, edges, atoms)


def _ordered_atoms(ks: KripkeStructure, state: int) -> list[str]:
    key = ks.labels[state]
    ids = ks.class_table[key] if ks.label_mode is LabelMode.CLASS else StateSet(64, key)
    return [ks.atom_names[i] for i in sorted(ids)]


def format_kripke(ks: KripkeStructure) -> str:
    out = ["kripke v1", f"states {ks.num_states}"]
    for state in range(ks.num_states):
        atoms = _ordered_atoms(ks, state)
        if atoms:
            out.append(f"label {state} " + " ".join(atoms))
    for state in range(ks.num_states):
        out.extend(f"edge {state} {t}" for t in ks.successors(state).tolist())
    return "\n".join(out) + "\n"


def load_structure(path: Path, *, aut: bool) -> KripkeStructure:
    """Read ``path`` as a Kripke file, or as `.aut` followed by the label transform."""
    text = Path(path).read_text(encoding="utf-8")
    return lts_to_kripke(parse_aut(text)) if aut else parse_kripke(text)


# --- results ---


def emitted_preorder_pairs(res: SimResult) -> list[tuple[int, int]]:
    """State pairs (s, t), t simulating s, or nothing above PAIR_EMIT_MAX_STATES."""
    if res.num_states > PAIR_EMIT_MAX_STATES:
        logger.warning("preorder section skipped: %d states exceed %d", res.num_states, PAIR_EMIT_MAX_STATES)
        return []
    return [(s, t) for s, t in np.argwhere(expand_preorder(res)).tolist()]


def format_result(
    res: SimResult,
    sections: Iterable[str] = ("partition", "relation", "stats"),
    ks: Optional[KripkeStructure] = None,
) -> str:
    sections = set(sections)
    out: list[str] = []
    if "partition" in sections:
        out.extend(f"block {i}: " + " ".join(map(str, block)) for i, block in enumerate(res.blocks))
    if "relation" in sections:
        out.extend(f"simulates {i} {j}" for i, j in res.simulates())
    if "preorder" in sections:
        out.extend(f"pair {s} {t}" for s, t in emitted_preorder_pairs(res))
    if "quotient" in sections:
        if ks is None:
            raise ValueError("the quotient section needs the input structure")
        q = quotient(ks, res)
        out.extend(f"quotient {s} {t}" for s, t in zip(q.sources.tolist(), q.targets.tolist()))
    if "stats" in sections:
        for name, value in res.stats.model_dump().items():
            shown = f"{value:.6f}" if isinstance(value, float) else value
            out.append(f"stat {name} {shown}")
    return "\n".join(out) + ("\n" if out else "")


@dataclass
class ParsedResult:
    blocks: list[tuple[int, ...]] = field(default_factory=list)
    simulates: set[tuple[int, int]] = field(default_factory=set)
    pairs: set[tuple[int, int]] = field(default_factory=set)
    quotient: set[tuple[int, int]] = field(default_factory=set)
    stats: dict[str, str] = field(default_factory=dict)

    def run_stats(self) -> RunStats:
        return RunStats.model_validate(self.stats)


def _ints(words: list[str], count: int, line: int) -> list[int]:
    if len(words) != count or not all(w.isdigit() for w in words):
        raise ParseError(f"expected {count} integer(s), got {' '.join(words)!r}", line)
    return [int(w) for w in words]


def parse_result(text: str) -> ParsedResult:
    parsed = ParsedResult()
    for number, raw in enumerate(text.splitlines(), start=1):
        words = raw.split()
        if not words:
            continue
        kind, rest = words[0], words[1:]
        if kind == "block":
            if not rest or not rest[0].endswith(":"):
                raise ParseError("expected `block <id>: <states>`", number)
            index = _ints([rest[0][:-1]], 1, number)[0]
            if index != len(parsed.blocks):
                raise ParseError(f"block {index} out of order", number)
            parsed.blocks.append(tuple(_ints(rest[1:], len(rest) - 1, number)))
        elif kind == "simulates":
            parsed.simulates.add(tuple(_ints(rest, 2, number)))
        elif kind == "pair":
            parsed.pairs.add(tuple(_ints(rest, 2, number)))
        elif kind == "quotient":
            parsed.quotient.add(tuple(_ints(rest, 2, number)))
        elif kind == "stat":
            if len(rest) != 2:
                raise ParseError("expected `stat <name> <value>`", number)
            parsed.stats[rest[0]] = rest[1]
        else:
            raise ParseError(f"unknown result line {kind!r}", number)
    return parsed
