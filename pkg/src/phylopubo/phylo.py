"""Exact maximum-parsimony oracle: topology enumeration plus Fitch/Sankoff scoring."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import BigCountError, EnumerationTooLargeError
from .seqio import Alignment, StepMatrix, compress_patterns
from .tree import UnrootedTree

DEFAULT_MAX_ENUM = 10
NATIVE_MAX = 2**63 - 1


def max_enum() -> int:
    """Topology-enumeration bound; ``PARSIMONY_MAX_ENUM`` overrides the default of 10."""
    raw = os.environ.get("PARSIMONY_MAX_ENUM")
    return int(raw) if raw else DEFAULT_MAX_ENUM


@dataclass(frozen=True)
class ScoredTree:
    tree: UnrootedTree
    score: int


def count_topologies(n: int, limit: int = NATIVE_MAX) -> int:
    """Number of unrooted binary topologies on ``n`` labelled leaves, ``(2n-5)!!``."""
    if n < 3:
        raise ValueError("n must be >= 3")
    total = 1
    for k in range(3, 2 * n - 4, 2):
        total *= k
        if total > limit:
            raise BigCountError(f"(2*{n}-5)!! exceeds {limit}", saturated=True)
    return total


def enumerate_topologies(n: int, labels=None, bound: int | None = None) -> Iterator[UnrootedTree]:
    """Yield every unrooted binary topology on ``n`` leaves exactly once.

    Leaves are inserted one at a time into every edge of each partial tree,
    starting from the 3-leaf star.
    """
    bound = max_enum() if bound is None else bound
    if n < 3:
        raise ValueError("n must be >= 3")
    if n > bound:
        raise EnumerationTooLargeError(
            f"n={n} exceeds enumeration bound {bound} (set PARSIMONY_MAX_ENUM to raise it)")
    labels = tuple(labels) if labels is not None else tuple(f"t{i}" for i in range(n))
    first_leaf = n - 2
    start = [(0, first_leaf), (0, first_leaf + 1), (0, first_leaf + 2)]

    def grow(edges, k):
        if k == n:
            yield UnrootedTree(n, tuple(edges), labels)
            return
        w = k - 2
        leaf = first_leaf + k
        for i, (a, b) in enumerate(edges):
            rest = edges[:i] + edges[i + 1 :]
            yield from grow(rest + [(a, w), (w, b), (w, leaf)], k + 1)

    yield from grow(start, 3)


def _rooted_order(tree: UnrootedTree, root: int, parent: int = -1):
    """Post-order list of (node, parent) pairs below ``root``."""
    adj = tree.adjacency()
    order = []
    stack = [(root, parent, False)]
    while stack:
        node, par, done = stack.pop()
        if done:
            order.append((node, par))
            continue
        stack.append((node, par, True))
        for c in adj[node]:
            if c != par:
                stack.append((c, node, False))
    return order, adj


def fitch_score(tree: UnrootedTree, pattern) -> int:
    """Minimum number of changes under unit costs, gap treated as a fifth state."""
    leaf0 = tree.leaf_node(0)
    adj = tree.adjacency()
    (top,) = adj[leaf0]
    order, _ = _rooted_order(tree, top, leaf0)
    sets = {}
    changes = 0
    for node, par in order:
        if tree.is_leaf(node):
            sets[node] = 1 << pattern[node - (tree.n - 2)]
            continue
        a, b = (sets[c] for c in adj[node] if c != par)
        if a & b:
            sets[node] = a & b
        else:
            sets[node] = a | b
            changes += 1
    if not (sets[top] >> pattern[0]) & 1:
        changes += 1
    return changes


def _sankoff_tables(tree, pattern, cost, root):
    order, adj = _rooted_order(tree, root)
    offset = tree.n - 2
    tables = {}
    for node, par in order:
        if tree.is_leaf(node):
            continue
        acc = np.zeros(5, dtype=np.int64)
        for c in adj[node]:
            if c == par:
                continue
            if tree.is_leaf(c):
                acc += cost[:, pattern[c - offset]]
            else:
                acc += (cost + tables[c][None, :]).min(axis=1)
        tables[node] = acc
    return tables, order, adj


def sankoff_score(tree: UnrootedTree, pattern, s: StepMatrix, root: int = 0):
    """Weighted parsimony cost of one site and one optimal internal assignment.

    The DP is rooted at internal node ``root``; traceback breaks ties by the
    smallest state index. Returns ``(cost, states)`` where ``states[u]`` is
    the state of internal node ``u``.
    """
    cost = s.as_array()
    tables, order, adj = _sankoff_tables(tree, pattern, cost, root)
    states = [0] * (tree.n - 2)
    states[root] = int(np.argmin(tables[root]))
    total = int(tables[root][states[root]])
    for node, par in reversed(order):
        if tree.is_leaf(node) or node == root:
            continue
        states[node] = int(np.argmin(cost[states[par]] + tables[node]))
    return total, tuple(states)


def sankoff_optimal_assignments(tree: UnrootedTree, pattern, s: StepMatrix, root: int = 0):
    """All internal-state assignments achieving the Sankoff minimum.

    Returns ``(cost, [states, ...])`` with assignments in lexicographic order.
    """
    cost = s.as_array()
    tables, order, adj = _sankoff_tables(tree, pattern, cost, root)
    best = int(tables[root].min())
    pre = [(node, par) for node, par in reversed(order) if not tree.is_leaf(node) and node != root]
    out = []

    def expand(i, states):
        if i == len(pre):
            out.append(tuple(states))
            return
        node, par = pre[i]
        vals = cost[states[par]] + tables[node]
        lo = vals.min()
        for t in np.flatnonzero(vals == lo):
            states[node] = int(t)
            expand(i + 1, states)

    for r in np.flatnonzero(tables[root] == best):
        states = [0] * (tree.n - 2)
        states[root] = int(r)
        expand(0, states)
    return best, sorted(out)


def assignment_cost(tree: UnrootedTree, pattern, states, s: StepMatrix) -> int:
    """Edge-by-edge step cost of a full assignment (leaves from ``pattern``)."""
    offset = tree.n - 2

    def state(node):
        return pattern[node - offset] if tree.is_leaf(node) else states[node]

    return sum(s(state(u), state(v)) for u, v in tree.edges)


def brute_force_site(tree: UnrootedTree, pattern, s: StepMatrix) -> int:
    """Minimum over all ``5**(n-2)`` internal assignments; reference for tests."""
    return min(assignment_cost(tree, pattern, st, s)
               for st in itertools.product(range(5), repeat=tree.n - 2))


def tree_score(tree: UnrootedTree, a: Alignment, s: StepMatrix) -> ScoredTree:
    """Score every site of ``a`` on ``tree`` and attach per-site ancestral states."""
    table = compress_patterns(a)
    per_pattern = [sankoff_score(tree, p, s) for p in table.patterns]
    total = sum(c * w for (c, _), w in zip(per_pattern, table.weights))
    states = tuple(tuple(per_pattern[pid][1][u] for pid in table.site_index_map)
                   for u in range(tree.n - 2))
    return ScoredTree(tree.with_states(states), total)


def exact_mp(a: Alignment, s: StepMatrix, bound: int | None = None):
    """Global parsimony optimum over every topology.

    Returns ``(best_score, [ScoredTree, ...])`` with all co-optimal topologies.
    """
    table = compress_patterns(a)
    best = None
    winners: list[UnrootedTree] = []
    for tree in enumerate_topologies(a.n, a.taxa, bound=bound):
        score = 0
        for pattern, weight in table:
            score += sankoff_score(tree, pattern, s)[0] * weight
            if best is not None and score > best:
                break
        if best is None or score < best:
            best, winners = score, [tree]
        elif score == best:
            winners.append(tree)
    return best, [tree_score(t, a, s) for t in winners]
