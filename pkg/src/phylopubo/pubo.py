"""Multilinear polynomials over binary variables (PUBO).

A model is a map from sorted variable-index tuples to integer coefficients;
the empty tuple holds the constant. Products are folded with ``x*x = x`` as
they are built, so the stored form is canonical.

Text format::

    pubo <num_vars>
    <coeff>                 # constant term
    <coeff> i1 i2 ... ik    # one monomial per line

Lines are ordered by degree, then lexicographically by index tuple.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ArityError, ParseError, TooManyVariablesError

Monomial = tuple[int, ...]

MAX_TABLE_VARS = 26


def _fold(vars_: Iterable[int]) -> Monomial:
    return tuple(sorted(set(vars_)))


def poly_mul(p: Mapping[Monomial, int], q: Mapping[Monomial, int]) -> dict[Monomial, int]:
    out: dict[Monomial, int] = defaultdict(int)
    for mp, cp in p.items():
        for mq, cq in q.items():
            out[_fold(mp + mq)] += cp * cq
    return {k: v for k, v in out.items() if v}


def linear(target: int, vars_: Iterable, coeff: int = -1) -> dict[Monomial, int]:
    """``target + coeff * sum(vars)`` where each entry of ``vars_`` is an index or a monomial."""
    out: dict[Monomial, int] = defaultdict(int)
    if target:
        out[()] += target
    for v in vars_:
        mono = (v,) if isinstance(v, (int, np.integer)) else _fold(v)
        out[mono] += coeff
    return {k: c for k, c in out.items() if c}


class PuboBuilder:
    """Accumulates terms; :meth:`build` freezes them into a :class:`PuboModel`."""

    def __init__(self, num_vars: int):
        self.num_vars = num_vars
        self._terms: dict[Monomial, int] = defaultdict(int)

    def add(self, coeff: int, *vars_: int) -> None:
        if coeff:
            self._terms[_fold(vars_)] += coeff

    def add_poly(self, poly: Mapping[Monomial, int], scale: int = 1) -> None:
        for mono, c in poly.items():
            if c:
                self._terms[_fold(mono)] += c * scale

    def add_square(self, poly: Mapping[Monomial, int], scale: int = 1) -> None:
        """Add ``scale * poly**2``."""
        self.add_poly(poly_mul(poly, poly), scale)

    def build(self, layout=None) -> "PuboModel":
        return PuboModel(self.num_vars, self._terms, layout)


class PuboModel:
    """Immutable canonical PUBO. ``layout`` is optional metadata, not part of equality."""

    __slots__ = ("num_vars", "terms", "layout", "_groups")

    def __init__(self, num_vars: int, terms: Mapping[Monomial, int], layout=None):
        canon: dict[Monomial, int] = defaultdict(int)
        for mono, c in terms.items():
            mono = _fold(mono)
            if mono and (mono[0] < 0 or mono[-1] >= num_vars):
                raise ValueError(f"monomial {mono} out of range for {num_vars} variables")
            canon[mono] += int(c)
        object.__setattr__(self, "num_vars", int(num_vars))
        object.__setattr__(self, "terms", {k: canon[k] for k in sorted(canon, key=_order) if canon[k]})
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "_groups", None)

    def __setattr__(self, name, value):
        raise AttributeError("PuboModel is immutable")

    def __eq__(self, other):
        if not isinstance(other, PuboModel):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.num_vars, tuple(self.terms.items())))

    def __repr__(self):
        return f"PuboModel(num_vars={self.num_vars}, terms={len(self.terms)})"

    def __add__(self, other: "PuboModel") -> "PuboModel":
        merged = defaultdict(int, self.terms)
        for k, v in other.terms.items():
            merged[k] += v
        return PuboModel(max(self.num_vars, other.num_vars), merged, self.layout)

    def scaled(self, factor: int) -> "PuboModel":
        return PuboModel(self.num_vars, {k: v * factor for k, v in self.terms.items()}, self.layout)

    @property
    def constant(self) -> int:
        return self.terms.get((), 0)

    @property
    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def degree_groups(self):
        """``{k: (indices (T,k) int array, coeffs (T,) int64)}`` for vectorised evaluation."""
        if self._groups is None:
            by_deg: dict[int, list] = defaultdict(list)
            for mono, c in self.terms.items():
                by_deg[len(mono)].append((mono, c))
            groups = {}
            for k, items in by_deg.items():
                idx = np.array([m for m, _ in items], dtype=np.int64).reshape(len(items), k)
                coeffs = np.array([c for _, c in items], dtype=np.int64)
                groups[k] = (idx, coeffs)
            object.__setattr__(self, "_groups", groups)
        return self._groups

    def evaluate(self, a) -> int:
        return evaluate(self, a)


    def restrict(self, values: Mapping[int, int]) -> tuple["PuboModel", list[int]]:
        """Substitute fixed 0/1 ``values`` and renumber the remaining variables.

        Returns the reduced model and ``free``, where reduced variable ``k``
        is original variable ``free[k]``.
        """
        free = [i for i in range(self.num_vars) if i not in values]
        new_index = {v: k for k, v in enumerate(free)}
        out: dict[Monomial, int] = defaultdict(int)
        for mono, c in self.terms.items():
            if all(values.get(i, 1) for i in mono):
                out[tuple(new_index[i] for i in mono if i in new_index)] += c
        return PuboModel(len(free), out), free


def _order(mono: Monomial):
    return (len(mono), mono)


def evaluate(model: PuboModel, a) -> int:
    """Energy of one assignment: ``sum(coeff * prod(bits))``."""
    a = np.asarray(a)
    if a.ndim != 1 or a.shape[0] != model.num_vars:
        raise ArityError(f"assignment length {a.shape} != num_vars {model.num_vars}")
    bits = a.astype(bool)
    total = 0
    for k, (idx, coeffs) in model.degree_groups().items():
        if k == 0:
            total += int(coeffs.sum())
        else:
            total += int(coeffs[bits[idx].all(axis=1)].sum())
    return total


def evaluate_many(model: PuboModel, batch) -> np.ndarray:
    """Energies of a ``(N, num_vars)`` batch of assignments."""
    batch = np.asarray(batch).astype(bool)
    if batch.ndim != 2 or batch.shape[1] != model.num_vars:
        raise ArityError(f"batch shape {batch.shape} incompatible with {model.num_vars} variables")
    out = np.zeros(batch.shape[0], dtype=np.int64)
    for k, (idx, coeffs) in model.degree_groups().items():
        if k == 0:
            out += coeffs.sum()
        else:
            out += batch[:, idx].all(axis=2).astype(np.int64) @ coeffs
    return out


def index_to_bits(index: int, num_vars: int) -> np.ndarray:
    """Variable ``i`` is bit ``i`` of ``index`` (little-endian)."""
    return np.array([(index >> i) & 1 for i in range(num_vars)], dtype=np.uint8)


def bits_to_index(bits) -> int:
    return int(sum(int(b) << i for i, b in enumerate(bits)))


def energy_table(model: PuboModel, max_vars: int = MAX_TABLE_VARS) -> np.ndarray:
    """Energy of every assignment, indexed little-endian (variable i = bit i).

    Uses the superset-sum (zeta) transform: scatter coefficients by monomial
    mask, then fold each variable in once, ``O(q * 2**q)``.
    """
    q = model.num_vars
    if q > max_vars:
        raise TooManyVariablesError(f"{q} variables exceed table bound {max_vars}")
    table = np.zeros(1 << q, dtype=np.int64)
    for mono, c in model.terms.items():
        mask = 0
        for i in mono:
            mask |= 1 << i
        table[mask] += c
    for i in range(q):
        view = table.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return table


@dataclass(frozen=True)
class PuboStats:
    num_vars: int
    num_terms: int
    terms_by_degree: dict
    max_degree: int


def stats(model: PuboModel) -> PuboStats:
    by_deg: dict[int, int] = defaultdict(int)
    for mono in model.terms:
        by_deg[len(mono)] += 1
    return PuboStats(model.num_vars, len(model.terms), dict(sorted(by_deg.items())), model.degree)


def serialize(model: PuboModel) -> str:
    lines = [f"pubo {model.num_vars}"]
    for mono, c in model.terms.items():
        lines.append(" ".join([str(c), *map(str, mono)]))
    return "\n".join(lines) + "\n"


def parse(text: str) -> PuboModel:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("empty pubo text")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "pubo":
        raise ParseError(f"bad header {lines[0]!r}")
    try:
        num_vars = int(head[1])
    except ValueError:
        raise ParseError(f"bad variable count {head[1]!r}") from None
    if num_vars < 0:
        raise ParseError("negative variable count")
    terms: dict[Monomial, int] = defaultdict(int)
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            fields = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer token in {line!r}") from None
        coeff, idx = fields[0], fields[1:]
        for i in idx:
            if not 0 <= i < num_vars:
                raise ParseError(f"line {lineno}: index {i} out of range for {num_vars} variables")
        terms[_fold(idx)] += coeff
    return PuboModel(num_vars, terms)


def read_pubo(path) -> PuboModel:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def write_pubo(model: PuboModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(model))
