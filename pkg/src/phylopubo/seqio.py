"""Alignment ingest, site-pattern compression and step-matrix configuration."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import (
    AlignmentRaggedError,
    EmptyInputError,
    FragmentTooLongError,
    InputError,
    ParseError,
    StepMatrixInvalidError,
    TooFewTaxaError,
)

log = logging.getLogger(__name__)

STATES = ("A", "C", "G", "T", "-")
STATE_INDEX = {s: i for i, s in enumerate(STATES)}
GAP = STATE_INDEX["-"]

# Table of transitions (1), transversions (2) and gap events (4).
_TABLE1 = (
    (0, 2, 1, 2, 4),
    (2, 0, 2, 1, 4),
    (1, 2, 0, 2, 4),
    (2, 1, 2, 0, 4),
    (4, 4, 4, 4, 0),
)


def state_code(ch: str) -> int:
    return STATE_INDEX.get(ch.upper(), GAP)


@dataclass(frozen=True)
class Alignment:
    """Named, equal-length rows over ``ACGT-``."""

    taxa: tuple[str, ...]
    rows: tuple[str, ...]

    def __post_init__(self):
        if not self.taxa:
            raise EmptyInputError("alignment has no sequences")
        if len(self.taxa) != len(self.rows):
            raise InputError("taxa and rows differ in length")
        if len(set(self.taxa)) != len(self.taxa):
            raise InputError("duplicate taxon names")
        lengths = {len(r) for r in self.rows}
        if len(lengths) != 1:
            raise AlignmentRaggedError(f"rows have unequal lengths {sorted(lengths)}")
        if 0 in lengths:
            raise EmptyInputError("alignment rows are empty")
        if len(self.taxa) < 3:
            raise TooFewTaxaError(f"need at least 3 taxa, got {len(self.taxa)}")
        bad = set("".join(self.rows)) - set(STATES)
        if bad:
            raise InputError(f"characters outside alphabet: {sorted(bad)}")

    @classmethod
    def from_rows(cls, taxa, rows) -> "Alignment":
        """Build from raw strings, folding case and unknown characters to '-'."""
        return cls(tuple(taxa), tuple(_normalise(r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.taxa)

    @property
    def m(self) -> int:
        return len(self.rows[0])

    def codes(self) -> np.ndarray:
        """``(n, m)`` int8 matrix of state indices."""
        return np.array([[STATE_INDEX[c] for c in r] for r in self.rows], dtype=np.int8)

    def column(self, site: int) -> tuple[int, ...]:
        return tuple(STATE_INDEX[r[site]] for r in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(s) for s in range(self.m)]

    def slice(self, start: int, stop: int) -> "Alignment":
        return Alignment(self.taxa, tuple(r[start:stop] for r in self.rows))

    def reorder(self, order) -> "Alignment":
        return Alignment(tuple(self.taxa[i] for i in order), tuple(self.rows[i] for i in order))


def _normalise(row: str) -> str:
    row = "".join(row.split()).upper()
    out = []
    mapped = set()
    for ch in row:
        if ch in STATE_INDEX:
            out.append(ch)
        else:
            mapped.add(ch)
            out.append("-")
    for ch in sorted(mapped):
        log.info("mapped character %r to '-'", ch)
    return "".join(out)


def parse_fasta(text) -> Alignment:
    """Parse FASTA text (``str`` or ``bytes``) into an :class:`Alignment`.

    Sequence lines may wrap; names are the first whitespace-delimited token
    after ``>``. Order of first appearance is preserved.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    names: list[str] = []
    chunks: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith(">"):
            name = line[1:].strip().split()[0] if line[1:].strip() else ""
            if not name:
                raise ParseError("FASTA record without a name")
            names.append(name)
            chunks.append([])
        else:
            if not names:
                raise ParseError("sequence data before first '>' header")
            chunks[-1].append(line)
    if not names:
        raise EmptyInputError("no FASTA records found")
    return Alignment.from_rows(names, ["".join(c) for c in chunks])


def read_fasta(path) -> Alignment:
    return parse_fasta(Path(path).read_bytes())


def format_fasta(a: Alignment, width: int = 0) -> str:
    lines = []
    for name, row in zip(a.taxa, a.rows):
        lines.append(f">{name}")
        if width > 0:
            lines.extend(row[i : i + width] for i in range(0, len(row), width))
        else:
            lines.append(row)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class StepMatrix:
    """Symmetric 5x5 integer substitution cost table over ``ACGT-``."""

    cost: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        grid = self.cost
        if len(grid) != 5 or any(len(r) != 5 for r in grid):
            raise StepMatrixInvalidError("step matrix must be 5x5")
        for i in range(5):
            if grid[i][i] != 0:
                raise StepMatrixInvalidError(f"nonzero diagonal at {STATES[i]}")
            for j in range(5):
                v = grid[i][j]
                if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                    raise StepMatrixInvalidError(f"non-integer cost at ({STATES[i]},{STATES[j]})")
                if v < 0:
                    raise StepMatrixInvalidError(f"negative cost at ({STATES[i]},{STATES[j]})")
                if v != grid[j][i]:
                    raise StepMatrixInvalidError(f"asymmetric at ({STATES[i]},{STATES[j]})")

    def __call__(self, a, b) -> int:
        if isinstance(a, str):
            a = STATE_INDEX[a]
        if isinstance(b, str):
            b = STATE_INDEX[b]
        return self.cost[a][b]

    def as_array(self) -> np.ndarray:
        return np.array(self.cost, dtype=np.int64)

    @property
    def max_entry(self) -> int:
        return max(max(r) for r in self.cost)

    def to_dict(self) -> dict:
        return {"states": list(STATES), "cost": [list(r) for r in self.cost]}


def default_step_matrix() -> StepMatrix:
    return StepMatrix(_TABLE1)


def uniform_step_matrix() -> StepMatrix:
    """Unit cost for every change; makes Sankoff agree with Fitch."""
    return StepMatrix(tuple(tuple(int(i != j) for j in range(5)) for i in range(5)))


def load_step_matrix(config) -> StepMatrix:
    """Load a step matrix from YAML/JSON text, a path, or an already parsed mapping.

    Expected keys: ``states`` (the five labels in any order) and ``cost``
    (a 5x5 integer grid in that order).
    """
    if isinstance(config, Path):
        config = config.read_text()
    if isinstance(config, (str, bytes)):
        config = yaml.safe_load(config)
    if not isinstance(config, dict) or "cost" not in config:
        raise StepMatrixInvalidError("config must map 'states' and 'cost'")
    labels = [str(s).upper() for s in config.get("states", STATES)]
    grid = config["cost"]
    if sorted(labels) != sorted(STATES):
        raise StepMatrixInvalidError(f"states must be a permutation of {STATES}, got {labels}")
    if len(grid) != 5 or any(len(r) != 5 for r in grid):
        raise StepMatrixInvalidError("cost grid must be 5x5")
    pos = [labels.index(s) for s in STATES]
    try:
        cost = tuple(tuple(grid[pos[i]][pos[j]] for j in range(5)) for i in range(5))
    except (TypeError, IndexError) as exc:
        raise StepMatrixInvalidError(str(exc)) from exc
    return StepMatrix(cost)


@dataclass(frozen=True)
class PatternTable:
    patterns: tuple[tuple[int, ...], ...]
    weights: tuple[int, ...]
    site_index_map: tuple[int, ...] = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(zip(self.patterns, self.weights))


def compress_patterns(a: Alignment) -> PatternTable:
    index: dict[tuple[int, ...], int] = {}
    weights: list[int] = []
    site_map = []
    for col in a.columns():
        pid = index.setdefault(col, len(index))
        if pid == len(weights):
            weights.append(0)
        weights[pid] += 1
        site_map.append(pid)
    return PatternTable(tuple(index), tuple(weights), tuple(site_map))


def window_fragments(a: Alignment, length: int, stride: int) -> list[Alignment]:
    """Sliding-window fragments ``[k*stride, k*stride + length)`` that fit entirely."""
    if length < 1 or stride < 1:
        raise InputError("window length and stride must be >= 1")
    if length > a.m:
        raise FragmentTooLongError(f"window {length} exceeds alignment length {a.m}")
    return [a.slice(s, s + length) for s in range(0, a.m - length + 1, stride)]
