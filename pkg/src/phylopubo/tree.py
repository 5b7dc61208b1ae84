"""Unrooted binary trees, split sets and Newick text."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass

from .errors import ParseError
from .seqio import STATE_INDEX, STATES


@dataclass(frozen=True)
class UnrootedTree:
    """Unrooted binary tree on ``n`` leaves.

    Node indexing: internal nodes are ``0 .. n-3`` (node 0 is the reference),
    leaves are ``n-2 .. 2n-3``; leaf ``n-2+i`` carries ``leaf_labels[i]``.
    ``ancestral_states`` optionally maps each internal node to a tuple of
    per-site state indices.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    leaf_labels: tuple[str, ...]
    ancestral_states: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        n = self.n
        if n < 3:
            raise ValueError("tree needs at least 3 leaves")
        if len(self.leaf_labels) != n:
            raise ValueError("leaf_labels must have n entries")
        edges = tuple(sorted(tuple(sorted(e)) for e in self.edges))
        object.__setattr__(self, "edges", edges)
        if len(edges) != 2 * n - 3 or len(set(edges)) != len(edges):
            raise ValueError(f"expected {2 * n - 3} distinct edges, got {len(edges)}")
        deg = [0] * (2 * n - 2)
        for u, v in edges:
            if u == v or not (0 <= u < 2 * n - 2 and 0 <= v < 2 * n - 2):
                raise ValueError(f"bad edge {(u, v)}")
            deg[u] += 1
            deg[v] += 1
        for node, d in enumerate(deg):
            want = 1 if node >= n - 2 else 3
            if d != want:
                raise ValueError(f"node {node} has degree {d}, expected {want}")
        # |E| = |V| - 1 plus connectivity => acyclic
        if len(self._reach(0)) != 2 * n - 2:
            raise ValueError("tree is not connected")
        if self.ancestral_states is not None and len(self.ancestral_states) != n - 2:
            raise ValueError("ancestral_states must cover every internal node")

    @property
    def num_nodes(self) -> int:
        return 2 * self.n - 2

    def is_leaf(self, node: int) -> bool:
        return node >= self.n - 2

    def leaf_node(self, i: int) -> int:
        return self.n - 2 + i

    def label(self, node: int) -> str:
        return self.leaf_labels[node - (self.n - 2)]

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def _reach(self, start):
        adj = self.adjacency()
        seen = {start}
        todo = deque([start])
        while todo:
            u = todo.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        return seen

    def with_states(self, states) -> "UnrootedTree":
        return UnrootedTree(self.n, self.edges, self.leaf_labels,
                            None if states is None else tuple(tuple(s) for s in states))

    def splits(self) -> frozenset:
        """Non-trivial bipartitions, each given as the side without the smallest label."""
        anchor = min(self.leaf_labels)
        adj = self.adjacency()
        out = set()
        for u, v in self.edges:
            if self.is_leaf(u) or self.is_leaf(v):
                continue
            side = _leaves_beyond(self, adj, v, u)
            if anchor in side:
                side = frozenset(self.leaf_labels) - side
            out.add(frozenset(side))
        return frozenset(out)

    def isomorphic(self, other: "UnrootedTree") -> bool:
        return (sorted(self.leaf_labels) == sorted(other.leaf_labels)
                and self.splits() == other.splits())

    def relabel(self, labels) -> "UnrootedTree":
        return UnrootedTree(self.n, self.edges, tuple(labels), self.ancestral_states)


def _leaves_beyond(tree, adj, start, parent) -> frozenset:
    out = []
    stack = [(start, parent)]
    while stack:
        node, par = stack.pop()
        if tree.is_leaf(node):
            out.append(tree.label(node))
        for nxt in adj[node]:
            if nxt != par:
                stack.append((nxt, node))
    return frozenset(out)


def star_tree(labels) -> UnrootedTree:
    labels = tuple(labels)
    if len(labels) != 3:
        raise ValueError("star tree needs exactly 3 labels")
    return UnrootedTree(3, ((0, 1), (0, 2), (0, 3)), labels)


def _state_str(states) -> str:
    return "".join(STATES[s] for s in states)


def display_root(tree: UnrootedTree) -> int:
    """Internal node attached to the lexicographically greatest leaf label."""
    leaf = tree.leaf_node(tree.leaf_labels.index(max(tree.leaf_labels)))
    return tree.adjacency()[leaf][0]


def to_newick(tree: UnrootedTree, annotate: bool = False, root: int | None = None) -> str:
    """Newick text with a trifurcation at ``root`` (default :func:`display_root`).

    Children are ordered by the smallest leaf label in their subtree, so
    isomorphic trees print identically. With ``annotate`` each internal node
    gets a ``[&states=...]`` comment holding its per-site ancestral states.
    """
    adj = tree.adjacency()
    root = display_root(tree) if root is None else root
    annotate = annotate and tree.ancestral_states is not None
    memo_min: dict[tuple[int, int], str] = {}

    def min_label(node, parent):
        key = (node, parent)
        if key not in memo_min:
            if tree.is_leaf(node):
                memo_min[key] = tree.label(node)
            else:
                memo_min[key] = min(min_label(c, node) for c in adj[node] if c != parent)
        return memo_min[key]

    def render(node, parent):
        if tree.is_leaf(node):
            return _quote(tree.label(node))
        kids = sorted((c for c in adj[node] if c != parent), key=lambda c: min_label(c, node))
        body = "(" + ",".join(render(c, node) for c in kids) + ")"
        if annotate:
            body += f"[&states={_state_str(tree.ancestral_states[node])}]"
        return body

    return render(root, -1) + ";"


_NEEDS_QUOTE = re.compile(r"[\s(),:;\[\]']")


def _quote(label: str) -> str:
    if _NEEDS_QUOTE.search(label):
        return "'" + label.replace("'", "''") + "'"
    return label


class _Node:
    __slots__ = ("label", "children", "comment")

    def __init__(self):
        self.label = None
        self.children = []
        self.comment = None


def _parse_nodes(text: str) -> _Node:
    pos = 0
    text = text.strip()

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def read_label():
        nonlocal pos
        skip_ws()
        if pos < len(text) and text[pos] == "'":
            pos += 1
            buf = []
            while True:
                if pos >= len(text):
                    raise ParseError("unterminated quoted label")
                if text[pos] == "'":
                    if pos + 1 < len(text) and text[pos + 1] == "'":
                        buf.append("'")
                        pos += 2
                        continue
                    pos += 1
                    break
                buf.append(text[pos])
                pos += 1
            return "".join(buf)
        start = pos
        while pos < len(text) and text[pos] not in "(),:;[":
            pos += 1
        return text[start:pos].strip() or None

    def read_tail(node):
        nonlocal pos
        skip_ws()
        if pos < len(text) and text[pos] not in "(),:;[":
            node.label = read_label()
        skip_ws()
        if pos < len(text) and text[pos] == "[":
            end = text.find("]", pos)
            if end < 0:
                raise ParseError("unterminated comment")
            node.comment = text[pos + 1 : end]
            pos = end + 1
        skip_ws()
        if pos < len(text) and text[pos] == ":":
            pos += 1
            while pos < len(text) and text[pos] not in "(),;[":
                pos += 1
        skip_ws()
        if pos < len(text) and text[pos] == "[":
            end = text.find("]", pos)
            if end < 0:
                raise ParseError("unterminated comment")
            node.comment = node.comment or text[pos + 1 : end]
            pos = end + 1

    def parse_subtree():
        nonlocal pos
        skip_ws()
        node = _Node()
        if pos < len(text) and text[pos] == "(":
            pos += 1
            while True:
                node.children.append(parse_subtree())
                skip_ws()
                if pos >= len(text):
                    raise ParseError("unbalanced parentheses")
                if text[pos] == ",":
                    pos += 1
                    continue
                if text[pos] == ")":
                    pos += 1
                    break
                raise ParseError(f"unexpected {text[pos]!r} at {pos}")
            read_tail(node)
        else:
            node.label = read_label()
            if node.label is None:
                raise ParseError(f"empty leaf label at {pos}")
            read_tail(node)
        return node

    root = parse_subtree()
    skip_ws()
    if pos >= len(text) or text[pos] != ";":
        raise ParseError("Newick string must end with ';'")
    return root


_STATES_RE = re.compile(r"&states=([ACGT\-]*)")


def parse_newick(text: str) -> UnrootedTree:
    """Parse a binary Newick tree (rooted or trifurcating) into an :class:`UnrootedTree`."""
    root = _parse_nodes(text)
    if len(root.children) == 2:
        # rooted binary: dissolve the root by promoting one internal child
        a, b = root.children
        if a.children:
            a, b = b, a
        if not b.children:
            raise ParseError("tree has fewer than 3 leaves")
        merged = _Node()
        merged.children = [a] + b.children
        merged.comment = b.comment
        root = merged
    if len(root.children) != 3:
        raise ParseError("root must have 2 or 3 children")

    leaves: list[_Node] = []
    internals: list[_Node] = []

    def walk(node):
        if node.children:
            if node is not root and len(node.children) != 2:
                raise ParseError("non-binary internal node")
            internals.append(node)
            for c in node.children:
                walk(c)
        else:
            leaves.append(node)

    walk(root)
    n = len(leaves)
    if len(internals) != n - 2:
        raise ParseError("not a binary tree")
    ids = {id(node): i for i, node in enumerate(internals)}
    ids.update({id(node): n - 2 + i for i, node in enumerate(leaves)})
    edges = []
    for node in internals:
        for c in node.children:
            edges.append((ids[id(node)], ids[id(c)]))
    labels = tuple(leaf.label for leaf in leaves)
    if len(set(labels)) != n:
        raise ParseError("duplicate leaf labels")
    states = None
    found = [_STATES_RE.search(node.comment or "") for node in internals]
    if all(found):
        states = tuple(tuple(STATE_INDEX[c] for c in f.group(1)) for f in found)
    return UnrootedTree(n, tuple(edges), labels, states)
