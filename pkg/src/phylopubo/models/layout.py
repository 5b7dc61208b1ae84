"""Variable layouts for the three tree encodings.

Node indexing is shared by every encoding: internal nodes ``0 .. n-3`` with
node 0 as the reference, then leaves ``n-2 .. 2n-3``. Every internal index is
therefore smaller than every leaf index, which is what lets the branch
encoding keep only ``e[u, v]`` with ``v > u``.

Indices are computed arithmetically, so building a layout is O(1) even for
hundreds of thousands of variables.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UnsupportedModelError
from ..seqio import STATES

KINDS = ("branch", "depth", "position")
NUM_STATES = len(STATES)


@dataclass(frozen=True)
class VariableLayout:
    kind: str
    n: int
    m: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedModelError(f"unknown model kind {self.kind!r}")
        if self.n < 3:
            raise UnsupportedModelError("need n >= 3 leaves")
        if self.m < 1:
            raise UnsupportedModelError("need m >= 1 sites")
        if self.kind != "branch" and self.m != 1:
            raise UnsupportedModelError(f"{self.kind} model is defined for a single site only")

    # node helpers -------------------------------------------------------
    @property
    def num_nodes(self) -> int:
        return 2 * self.n - 2

    @property
    def internal(self) -> range:
        return range(self.n - 2)

    @property
    def leaves(self) -> range:
        return range(self.n - 2, 2 * self.n - 2)

    def is_leaf(self, node: int) -> bool:
        return node >= self.n - 2

    # group sizes ----------------------------------------------------------
    @property
    def num_edge_vars(self) -> int:
        n = self.n
        if self.kind == "branch":
            return (n - 2) * (3 * n - 3) // 2
        if self.kind == "depth":
            return (2 * n - 2) ** 2
        return (n - 2) * (2 * n - 3)

    @property
    def num_order_vars(self) -> int:
        """Depth or position indicator count (zero for branch)."""
        n = self.n
        if self.kind == "depth":
            return (2 * n - 3) * (n - 2)
        if self.kind == "position":
            return (n - 3) ** 2
        return 0

    @property
    def num_base_vars(self) -> int:
        return NUM_STATES * (self.n - 2) * self.m

    @property
    def total_vars(self) -> int:
        return self.num_edge_vars + self.num_order_vars + self.num_base_vars

    def groups(self) -> dict:
        out = {"edge": self.num_edge_vars, "base": self.num_base_vars}
        if self.kind == "depth":
            out["depth"] = self.num_order_vars
        elif self.kind == "position":
            out["position"] = self.num_order_vars
        return out

    # offsets: position model keeps x before e, the others keep e first
    @property
    def _edge_offset(self) -> int:
        return self.num_order_vars if self.kind == "position" else 0

    @property
    def _order_offset(self) -> int:
        return 0 if self.kind == "position" else self.num_edge_vars

    @property
    def _base_offset(self) -> int:
        return self.num_edge_vars + self.num_order_vars

    # index maps -----------------------------------------------------------
    def edge(self, u: int, v: int) -> int:
        """Branch: e[u, v], u internal, v > u. Depth: e[u, v] over V x V.
        Position: e[p, v], p a position in 0..n-3, v != reference."""
        n = self.n
        if self.kind == "branch":
            if not (0 <= u < n - 2 and u < v < 2 * n - 2):
                raise KeyError((u, v))
            return u * (2 * n - 3) - u * (u - 1) // 2 + (v - u - 1)
        if self.kind == "depth":
            if not (0 <= u < 2 * n - 2 and 0 <= v < 2 * n - 2):
                raise KeyError((u, v))
            return u * (2 * n - 2) + v
        if not (0 <= u <= n - 3 and 1 <= v < 2 * n - 2):
            raise KeyError((u, v))
        return self._edge_offset + u * (2 * n - 3) + (v - 1)

    def depth(self, u: int, d: int) -> int:
        n = self.n
        if self.kind != "depth" or not (1 <= u < 2 * n - 2 and 1 <= d <= n - 2):
            raise KeyError((u, d))
        return self._order_offset + (u - 1) * (n - 2) + (d - 1)

    def position(self, u: int, p: int) -> int:
        n = self.n
        if self.kind != "position" or not (1 <= u <= n - 3 and 1 <= p <= n - 3):
            raise KeyError((u, p))
        return self._order_offset + (u - 1) * (n - 3) + (p - 1)

    def base(self, u: int, s: int, b: int) -> int:
        if not (0 <= u < self.n - 2 and 0 <= s < self.m and 0 <= b < NUM_STATES):
            raise KeyError((u, s, b))
        return self._base_offset + (u * self.m + s) * NUM_STATES + b

    # iteration --------------------------------------------------------------
    def edge_keys(self):
        n = self.n
        if self.kind == "branch":
            return [(u, v) for u in range(n - 2) for v in range(u + 1, 2 * n - 2)]
        if self.kind == "depth":
            return [(u, v) for u in range(2 * n - 2) for v in range(2 * n - 2)]
        return [(p, v) for p in range(n - 2) for v in range(1, 2 * n - 2)]

    def exactly_one_groups(self) -> list[list[int]]:
        """Variable groups with exactly one member set in every feasible assignment.

        Base states per (node, site) for every kind; for the branch model
        also the candidate parents of each non-reference node.
        """
        groups = [[self.base(u, s, b) for b in range(NUM_STATES)]
                  for u in self.internal for s in range(self.m)]
        if self.kind == "branch":
            for v in range(1, self.num_nodes):
                groups.append([self.edge(u, v) for u in range(min(v, self.n - 2))])
        return groups

    def describe(self, index: int) -> tuple:
        """Inverse map: ``('e', u, v)``, ``('x', u, d_or_p)`` or ``('n', u, s, b)``."""
        if not 0 <= index < self.total_vars:
            raise IndexError(index)
        if index >= self._base_offset:
            rel = index - self._base_offset
            b = rel % NUM_STATES
            us = rel // NUM_STATES
            return ("n", us // self.m, us % self.m, b)
        if self.kind == "position" and index < self.num_order_vars:
            k = self.n - 3
            return ("x", index // k + 1, index % k + 1)
        if self.kind == "depth" and index >= self.num_edge_vars:
            rel = index - self.num_edge_vars
            return ("x", rel // (self.n - 2) + 1, rel % (self.n - 2) + 1)
        rel = index - self._edge_offset
        if self.kind == "depth":
            return ("e", rel // (2 * self.n - 2), rel % (2 * self.n - 2))
        if self.kind == "position":
            return ("e", rel // (2 * self.n - 3), rel % (2 * self.n - 3) + 1)
        u = 0
        while rel >= 2 * self.n - 3 - u:
            rel -= 2 * self.n - 3 - u
            u += 1
        return ("e", u, u + 1 + rel)

    def name(self, index: int) -> str:
        kind, *args = self.describe(index)
        if kind == "n":
            u, s, b = args
            return f"n[{u},{s},{STATES[b]}]" if self.m > 1 else f"n[{u},{STATES[b]}]"
        return f"{kind}[{args[0]},{args[1]}]"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "m": self.m,
                "total_vars": self.total_vars, "groups": self.groups()}


def layout(kind: str, n: int, m: int = 1) -> VariableLayout:
    return VariableLayout(kind, n, m)
