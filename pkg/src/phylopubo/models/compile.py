"""Compile an alignment and step matrix into penalty-form PUBO models.

Each compiler keeps the parsimony objective and the (unscaled) constraint
penalty as separate polynomials; the solver-facing model is
``objective + P * penalty``. Leaf states are constants, never variables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..pubo import PuboBuilder, PuboModel, evaluate, linear, poly_mul
from ..seqio import Alignment, StepMatrix, default_step_matrix, load_step_matrix
from .layout import NUM_STATES, VariableLayout


def default_penalty(a: Alignment, s: StepMatrix) -> int:
    """``1 + (2n-3) * m * max(S)``: larger than the objective of any feasible tree."""
    return 1 + (2 * a.n - 3) * a.m * s.max_entry


@dataclass(frozen=True)
class CompiledModel:
    layout: VariableLayout
    penalty: int
    objective: PuboModel
    constraints: PuboModel
    alignment: Alignment
    step: StepMatrix
    model: PuboModel = field(init=False, repr=False)

    def __post_init__(self):
        full = self.objective + self.constraints.scaled(self.penalty)
        object.__setattr__(self, "model", PuboModel(full.num_vars, full.terms, self.layout))

    @property
    def kind(self) -> str:
        return self.layout.kind

    @property
    def num_vars(self) -> int:
        return self.layout.total_vars

    def leaf_state(self, leaf_node: int, site: int) -> int:
        return self.alignment.column(site)[leaf_node - (self.layout.n - 2)]

    def meta(self) -> dict:
        """JSON-ready description sufficient to recompile this model."""
        return {
            "layout": self.layout.to_dict(),
            "penalty": self.penalty,
            "taxa": list(self.alignment.taxa),
            "rows": list(self.alignment.rows),
            "step_matrix": self.step.to_dict(),
        }


def compile_from_meta(meta: dict) -> CompiledModel:
    a = Alignment(tuple(meta["taxa"]), tuple(meta["rows"]))
    s = load_step_matrix(meta["step_matrix"])
    return compile_model(meta["layout"]["kind"], a, s, meta["penalty"])


def meta_json(cm: CompiledModel) -> str:
    return json.dumps(cm.meta(), indent=2)


def _sq(builder: PuboBuilder, target: int, vars_) -> None:
    builder.add_square(linear(target, vars_))


def compile_branch(a: Alignment, s: StepMatrix | None = None, penalty: int | None = None) -> CompiledModel:
    """Branch encoding; multi-site objective when ``a.m > 1``."""
    s = s or default_step_matrix()
    penalty = default_penalty(a, s) if penalty is None else penalty
    n, m = a.n, a.m
    lay = VariableLayout("branch", n, m)
    S = s.as_array()
    codes = a.codes()
    obj = PuboBuilder(lay.total_vars)
    pen = PuboBuilder(lay.total_vars)

    for u, v in lay.edge_keys():
        e = lay.edge(u, v)
        for site in range(m):
            if lay.is_leaf(v):
                g = codes[v - (n - 2), site]
                for b in range(NUM_STATES):
                    obj.add(int(S[g, b]), e, lay.base(u, site, b))
            else:
                for b in range(NUM_STATES):
                    for b2 in range(NUM_STATES):
                        obj.add(int(S[b, b2]), e, lay.base(u, site, b), lay.base(v, site, b2))

    for v in range(1, 2 * n - 2):
        _sq(pen, 1, [lay.edge(u, v) for u in range(min(v, n - 2))])
    for u in range(1, n - 2):
        _sq(pen, 2, [lay.edge(u, v) for v in range(u + 1, 2 * n - 2)])
    for u in lay.internal:
        for site in range(m):
            _sq(pen, 1, [lay.base(u, site, b) for b in range(NUM_STATES)])

    return CompiledModel(lay, penalty, obj.build(lay), pen.build(lay), a, s)


def compile_depth(a: Alignment, s: StepMatrix | None = None, penalty: int | None = None) -> CompiledModel:
    """Depth encoding (single site).

    The reference node sits at depth 0: its depth-0 indicator is the constant
    1, every other node's depth-0 indicator is 0, and the reference has no
    indicators for depth >= 1.
    """
    s = s or default_step_matrix()
    penalty = default_penalty(a, s) if penalty is None else penalty
    n = a.n
    lay = VariableLayout("depth", n, a.m)
    S = s.as_array()
    g = a.codes()[:, 0]
    V = lay.num_nodes
    obj = PuboBuilder(lay.total_vars)
    pen = PuboBuilder(lay.total_vars)

    for u in lay.internal:
        for v in range(V):
            e = lay.edge(u, v)
            if lay.is_leaf(v):
                for b in range(NUM_STATES):
                    obj.add(int(S[g[v - (n - 2)], b]), e, lay.base(u, 0, b))
            else:
                for b in range(NUM_STATES):
                    for b2 in range(NUM_STATES):
                        obj.add(int(S[b, b2]), e, lay.base(u, 0, b), lay.base(v, 0, b2))

    def depth_poly(w, d):
        if d == 0:
            return {(): 1} if w == 0 else {}
        if w == 0:
            return {}
        return {(lay.depth(w, d),): 1}

    for u in range(1, V):
        _sq(pen, 1, [lay.depth(u, d) for d in range(1, n - 1)])
    for u in range(V):
        pen.add(1, lay.edge(u, 0))
    _sq(pen, 3, [lay.edge(0, v) for v in range(V)])
    for v in range(1, V):
        _sq(pen, 1, [lay.edge(u, v) for u in range(V)])
    for u in range(1, n - 2):
        _sq(pen, 2, [lay.edge(u, v) for v in range(V)])
    for u in lay.leaves:
        for v in range(V):
            pen.add(1, lay.edge(u, v))
    for u in range(V):
        for v in range(V):
            link: dict = {(): 1}
            for d in range(1, n - 1):
                for mono, c in poly_mul(depth_poly(u, d - 1), depth_poly(v, d)).items():
                    link[mono] = link.get(mono, 0) - c
            pen.add_poly(poly_mul({(lay.edge(u, v),): 1}, poly_mul(link, link)))
    for u in lay.internal:
        _sq(pen, 1, [lay.base(u, 0, b) for b in range(NUM_STATES)])

    return CompiledModel(lay, penalty, obj.build(lay), pen.build(lay), a, s)


def compile_position(a: Alignment, s: StepMatrix | None = None, penalty: int | None = None) -> CompiledModel:
    """Position encoding (single site).

    The reference occupies position 0 (constant indicator); other internal
    nodes take positions ``1 .. n-3``. The cycle-blocking term is
    ``e[p, u] * sum(x[u, p'] for p' in 0..p)``.
    """
    s = s or default_step_matrix()
    penalty = default_penalty(a, s) if penalty is None else penalty
    n = a.n
    lay = VariableLayout("position", n, a.m)
    S = s.as_array()
    g = a.codes()[:, 0]
    V = lay.num_nodes
    obj = PuboBuilder(lay.total_vars)
    pen = PuboBuilder(lay.total_vars)

    def pos_vars(u, p):
        """Monomial for x[u, p], or None when the indicator is the constant 0."""
        if u == 0:
            return () if p == 0 else None
        if p == 0:
            return None
        return (lay.position(u, p),)

    for u in lay.internal:
        for p in range(n - 2):
            xp = pos_vars(u, p)
            if xp is None:
                continue
            for v in range(1, V):
                e = lay.edge(p, v)
                if lay.is_leaf(v):
                    for b in range(NUM_STATES):
                        obj.add(int(S[g[v - (n - 2)], b]), *xp, e, lay.base(u, 0, b))
                else:
                    for b in range(NUM_STATES):
                        for b2 in range(NUM_STATES):
                            obj.add(int(S[b, b2]), *xp, e, lay.base(u, 0, b), lay.base(v, 0, b2))

    movable = range(1, n - 2)
    for p in movable:
        _sq(pen, 1, [lay.position(u, p) for u in movable])
    for u in movable:
        _sq(pen, 1, [lay.position(u, p) for p in movable])
    for u in range(1, V):
        _sq(pen, 1, [lay.edge(p, u) for p in range(n - 2)])
    for p in movable:
        _sq(pen, 2, [lay.edge(p, u) for u in range(1, V)])
    for p in range(n - 2):
        for u in movable:
            for p2 in range(1, p + 1):
                pen.add(1, lay.edge(p, u), lay.position(u, p2))
    for u in lay.internal:
        _sq(pen, 1, [lay.base(u, 0, b) for b in range(NUM_STATES)])

    return CompiledModel(lay, penalty, obj.build(lay), pen.build(lay), a, s)


COMPILERS = {"branch": compile_branch, "depth": compile_depth, "position": compile_position}


def compile_model(kind: str, a: Alignment, s: StepMatrix | None = None,
                  penalty: int | None = None) -> CompiledModel:
    VariableLayout(kind, a.n, a.m)  # validates the (kind, m) combination
    return COMPILERS[kind](a, s, penalty)


def objective_part(cm: CompiledModel, bits) -> int:
    return evaluate(cm.objective, np.asarray(bits))
