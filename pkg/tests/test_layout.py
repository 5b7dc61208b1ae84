import pytest
from hypothesis import given, strategies as st

from phylopubo.errors import UnsupportedModelError
from phylopubo.models import KINDS, layout


def branch_count(n, m):
    return (3 * n * n + n - 14) // 2 + 5 * (n - 2) * (m - 1)


@pytest.mark.parametrize("n, branch, depth, position", [
    (3, 8, 24, 8), (4, 19, 56, 21),
    (50, 3768, 14500, 7105), (100, 15043, 59000, 29205), (500, 375243, 1495000, 746005),
])
def test_variable_counts(n, branch, depth, position):
    assert layout("branch", n).total_vars == branch
    assert layout("depth", n).total_vars == depth
    assert layout("position", n).total_vars == position


@given(st.integers(3, 300), st.integers(1, 20))
def test_count_formulas(n, m):
    assert layout("branch", n, m).total_vars == branch_count(n, m)
    assert layout("depth", n).total_vars == 6 * n * n - 10 * n
    assert layout("position", n).total_vars == 3 * n * n - 8 * n + 5


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("n", [3, 4, 6])
def test_indices_are_a_bijection(kind, n):
    lay = layout(kind, n)
    seen = set()
    for u, v in lay.edge_keys():
        seen.add(lay.edge(u, v))
    if kind == "depth":
        seen.update(lay.depth(u, d) for u in range(1, 2 * n - 2) for d in range(1, n - 1))
    if kind == "position":
        seen.update(lay.position(u, p) for u in range(1, n - 2) for p in range(1, n - 2))
    seen.update(lay.base(u, 0, b) for u in lay.internal for b in range(5))
    assert seen == set(range(lay.total_vars))
    assert sum(lay.groups().values()) == lay.total_vars
    assert len({lay.name(i) for i in range(lay.total_vars)}) == lay.total_vars


def test_branch_multisite_bases():
    lay = layout("branch", 4, 3)
    assert lay.num_base_vars == 2 * 3 * 5
    assert len({lay.base(u, s, b) for u in range(2) for s in range(3) for b in range(5)}) == 30


@pytest.mark.parametrize("kind", ["depth", "position"])
def test_single_site_only(kind):
    with pytest.raises(UnsupportedModelError):
        layout(kind, 4, 2)


def test_bad_kind_and_size():
    with pytest.raises(UnsupportedModelError):
        layout("steiner", 4)
    with pytest.raises(UnsupportedModelError):
        layout("branch", 2)


def test_describe_roundtrip():
    lay = layout("branch", 5)
    for u, v in lay.edge_keys():
        assert lay.describe(lay.edge(u, v))[1:] == (u, v)


@pytest.mark.parametrize("kind", KINDS)
def test_exactly_one_groups_hold_on_feasible_trees(kind):
    from phylopubo.models import encode
    from phylopubo.phylo import enumerate_topologies

    lay = layout(kind, 5)
    for t in enumerate_topologies(5):
        bits = encode(t, lay)
        assert all(sum(bits[v] for v in g) == 1 for g in lay.exactly_one_groups())
