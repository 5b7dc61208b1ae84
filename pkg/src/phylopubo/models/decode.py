"""Constraint residuals, decoding of assignments into trees, and the inverse encoding.

Residuals are computed straight from the bits, without touching the compiled
polynomials, so ``P * sum(r**2 for r in residuals)`` is an independent check
on the penalty part of a model's energy. Constraints that the models penalise
linearly (edges into the reference, leaf out-edges, position ordering) are
reported per offending product so that each residual is 0 or 1 and its square
equals its penalty contribution.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..tree import UnrootedTree
from .compile import CompiledModel
from .layout import NUM_STATES, VariableLayout


class Violation(NamedTuple):
    constraint: str
    residual: int


@dataclass(frozen=True)
class DecodedSolution:
    tree: UnrootedTree | None
    ancestral_states: tuple | None
    violations: list = field(default_factory=list)
    raw_parsimony: int | None = None
    feasible: bool = False
    edges: tuple = ()

    @property
    def penalty_residual(self) -> int:
        return sum(v.residual ** 2 for v in self.violations)


def _check(out, cid, residual):
    if residual:
        out.append(Violation(cid, int(residual)))


def _one_hot(bits, lay, out):
    for u in lay.internal:
        for s in range(lay.m):
            total = sum(bits[lay.base(u, s, b)] for b in range(NUM_STATES))
            _check(out, f"one_hot[{u},{s}]", total - 1)


def _branch_violations(bits, lay):
    n = lay.n
    out = []
    for v in range(1, 2 * n - 2):
        _check(out, f"in_degree[{v}]", sum(bits[lay.edge(u, v)] for u in range(min(v, n - 2))) - 1)
    for u in range(1, n - 2):
        _check(out, f"out_degree[{u}]", sum(bits[lay.edge(u, v)] for v in range(u + 1, 2 * n - 2)) - 2)
    _one_hot(bits, lay, out)
    return out


def _depth_indicator(bits, lay, w, d):
    if d == 0:
        return int(w == 0)
    if w == 0:
        return 0
    return int(bits[lay.depth(w, d)])


def _depth_violations(bits, lay):
    n = lay.n
    V = lay.num_nodes
    out = []
    for u in range(1, V):
        _check(out, f"depth_assign[{u}]", sum(bits[lay.depth(u, d)] for d in range(1, n - 1)) - 1)
    for u in range(V):
        _check(out, f"root_in[{u}]", bits[lay.edge(u, 0)])
    _check(out, "root_out", sum(bits[lay.edge(0, v)] for v in range(V)) - 3)
    for v in range(1, V):
        _check(out, f"in_degree[{v}]", sum(bits[lay.edge(u, v)] for u in range(V)) - 1)
    for u in range(1, n - 2):
        _check(out, f"out_degree[{u}]", sum(bits[lay.edge(u, v)] for v in range(V)) - 2)
    for u in lay.leaves:
        for v in range(V):
            _check(out, f"leaf_out[{u},{v}]", bits[lay.edge(u, v)])
    for u in range(V):
        for v in range(V):
            if bits[lay.edge(u, v)]:
                link = sum(_depth_indicator(bits, lay, u, d - 1) * _depth_indicator(bits, lay, v, d)
                           for d in range(1, n - 1))
                _check(out, f"depth_link[{u},{v}]", link - 1)
    _one_hot(bits, lay, out)
    return out


def _position_violations(bits, lay):
    n = lay.n
    V = lay.num_nodes
    movable = range(1, n - 2)
    out = []
    for p in movable:
        _check(out, f"position_fill[{p}]", sum(bits[lay.position(u, p)] for u in movable) - 1)
    for u in movable:
        _check(out, f"position_assign[{u}]", sum(bits[lay.position(u, p)] for p in movable) - 1)
    for u in range(1, V):
        _check(out, f"in_degree[{u}]", sum(bits[lay.edge(p, u)] for p in range(n - 2)) - 1)
    for p in movable:
        _check(out, f"out_degree[{p}]", sum(bits[lay.edge(p, u)] for u in range(1, V)) - 2)
    for p in range(n - 2):
        for u in movable:
            if bits[lay.edge(p, u)]:
                for p2 in range(1, p + 1):
                    _check(out, f"order[{p},{u},{p2}]", bits[lay.position(u, p2)])
    _one_hot(bits, lay, out)
    return out


_VIOLATIONS = {"branch": _branch_violations, "depth": _depth_violations,
               "position": _position_violations}


def feasibility(assignment, lay: VariableLayout) -> list[Violation]:
    """Every nonzero constraint residual of ``assignment``; empty iff feasible."""
    bits = np.asarray(assignment).astype(np.int64)
    if bits.shape != (lay.total_vars,):
        raise ValueError(f"assignment length {bits.shape} != {lay.total_vars}")
    return _VIOLATIONS[lay.kind](bits, lay)


def directed_edges(bits, lay: VariableLayout) -> list[tuple[int, int]]:
    """Active (parent, child) node pairs encoded by ``bits``."""
    bits = np.asarray(bits)
    if lay.kind != "position":
        return [(u, v) for (u, v) in lay.edge_keys() if bits[lay.edge(u, v)]]
    holder = {0: 0}
    for u in range(1, lay.n - 2):
        for p in range(1, lay.n - 2):
            if bits[lay.position(u, p)]:
                holder.setdefault(p, u)
    return [(holder[p], v) for (p, v) in lay.edge_keys()
            if bits[lay.edge(p, v)] and p in holder]


def _states(bits, lay):
    out = []
    for u in lay.internal:
        row = []
        for s in range(lay.m):
            hot = [b for b in range(NUM_STATES) if bits[lay.base(u, s, b)]]
            row.append(hot[0] if len(hot) == 1 else None)
        out.append(tuple(row))
    return tuple(out)


def decode(assignment, cm: CompiledModel) -> DecodedSolution:
    """Extract edges, states and residuals; build the tree when feasible."""
    lay = cm.layout
    bits = np.asarray(assignment).astype(np.int64)
    violations = feasibility(bits, lay)
    edges = directed_edges(bits, lay)
    states = _states(bits, lay)
    raw = int(cm.objective.evaluate(bits))
    if violations:
        return DecodedSolution(None, states, violations, raw, False, tuple(edges))
    root_out = sum(1 for u, _ in edges if u == 0)
    # out-degree of the reference is implied: (2n-3) - 2(n-3) = 3
    assert root_out == (2 * lay.n - 3) - 2 * (lay.n - 3) == 3, root_out
    tree = UnrootedTree(lay.n, tuple(edges), cm.alignment.taxa, states)
    return DecodedSolution(tree, states, [], raw, True, tuple(edges))


def edge_cost(tree: UnrootedTree, cm: CompiledModel) -> int:
    """Step-cost sum over the tree's edges using its ancestral states."""
    n = tree.n
    total = 0
    for site in range(cm.alignment.m):
        col = cm.alignment.column(site)

        def state(node):
            return col[node - (n - 2)] if tree.is_leaf(node) else tree.ancestral_states[node][site]

        total += sum(cm.step(state(u), state(v)) for u, v in tree.edges)
    return total


def bfs_relabel(tree: UnrootedTree, reference: int = 0) -> tuple[UnrootedTree, list[tuple[int, int]]]:
    """Renumber internal nodes in BFS order from ``reference``.

    Returns the relabelled tree and its parent->child edges; every child has
    a larger index than its parent.
    """
    adj = tree.adjacency()
    order = []
    parent = {reference: -1}
    todo = deque([reference])
    while todo:
        u = todo.popleft()
        order.append(u)
        for v in sorted(adj[u]):
            if v not in parent and not tree.is_leaf(v):
                parent[v] = u
                todo.append(v)
    new = {old: i for i, old in enumerate(order)}
    for leaf in range(tree.n - 2, 2 * tree.n - 2):
        new[leaf] = leaf
    edges = []
    for u in order:
        for v in adj[u]:
            if v != parent[u]:
                edges.append((new[u], new[v]))
    states = None
    if tree.ancestral_states is not None:
        states = [None] * (tree.n - 2)
        for old, i in new.items():
            if not tree.is_leaf(old):
                states[i] = tree.ancestral_states[old]
    return UnrootedTree(tree.n, tuple(edges), tree.leaf_labels, states), edges


def encode(tree: UnrootedTree, lay: VariableLayout, states=None, reference: int = 0) -> np.ndarray:
    """Feasible assignment realising ``tree`` (and ``states`` per internal node and site)."""
    states = states if states is not None else tree.ancestral_states
    if states is None:
        states = [(0,) * lay.m] * (tree.n - 2)
    relabelled, edges = bfs_relabel(tree.with_states(states), reference)
    bits = np.zeros(lay.total_vars, dtype=np.uint8)
    if lay.kind == "branch":
        for u, v in edges:
            bits[lay.edge(u, v)] = 1
    elif lay.kind == "depth":
        depth = {0: 0}
        for u, v in edges:
            depth[v] = depth[u] + 1
            bits[lay.edge(u, v)] = 1
        for v, d in depth.items():
            if v:
                bits[lay.depth(v, d)] = 1
    else:
        for u, v in edges:
            bits[lay.edge(u, v)] = 1
        for u in range(1, lay.n - 2):
            bits[lay.position(u, u)] = 1
    for u in range(lay.n - 2):
        for s in range(lay.m):
            bits[lay.base(u, s, relabelled.ancestral_states[u][s])] = 1
    return bits
