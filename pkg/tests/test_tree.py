from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from phylopubo.errors import ParseError
from phylopubo.phylo import enumerate_topologies
from phylopubo.tree import UnrootedTree, display_root, parse_newick, star_tree, to_newick


@lru_cache(maxsize=None)
def all_trees(n):
    return tuple(enumerate_topologies(n))


trees = st.integers(3, 7).flatmap(
    lambda n: st.integers(0, len(all_trees(n)) - 1).map(lambda i: all_trees(n)[i]))


def test_star_tree():
    t = star_tree("abc")
    assert to_newick(t) == "(a,b,c);"
    assert t.splits() == frozenset()


def test_quartet_canonical_form():
    t = parse_newick("((c,d),(a,b));")
    assert to_newick(t) == "((a,b),c,d);"
    assert t.splits() == frozenset({frozenset({"c", "d"})})


def test_newick_is_invariant_to_input_rotation():
    a = parse_newick("((a,b),(c,(d,e)),f);")
    b = parse_newick("(f,((e,d),c),(b,a));")
    assert a.isomorphic(b)
    assert to_newick(a) == to_newick(b)


def test_parse_lengths_comments_quotes():
    t = parse_newick("(('x y':0.1,b:2)[c1],c:3,d);")
    assert sorted(t.leaf_labels) == ["b", "c", "d", "x y"]
    assert to_newick(t) == "(b,(c,d),'x y');"
    assert parse_newick(to_newick(t)).isomorphic(t)


def test_states_annotation_roundtrip():
    t = parse_newick("((a,b)[&states=AC],c,d)[&states=G-];")
    out = to_newick(t, annotate=True)
    assert "[&states=AC]" in out and "[&states=G-]" in out
    back = parse_newick(out)
    assert sorted(back.ancestral_states) == sorted(t.ancestral_states)


@pytest.mark.parametrize("text", ["(a,b);", "((a,b),c", "(a,(b,c,d),e);", "(a,a,b);", "(a,b,c)"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_newick(text)


def test_tree_validation():
    with pytest.raises(ValueError):
        UnrootedTree(3, ((0, 1), (0, 2)), ("a", "b", "c"))
    with pytest.raises(ValueError):
        UnrootedTree(4, ((0, 1), (0, 2), (0, 3), (0, 4), (1, 5)), tuple("abcd"))


@given(trees)
def test_newick_roundtrip_property(t):
    back = parse_newick(to_newick(t))
    assert back.isomorphic(t)
    assert to_newick(back) == to_newick(t)


@given(trees)
def test_split_count_and_degrees(t):
    assert len(t.splits()) == t.n - 3
    adj = t.adjacency()
    assert all(len(adj[v]) == (1 if t.is_leaf(v) else 3) for v in range(2 * t.n - 2))


@given(trees)
def test_display_root_touches_greatest_label(t):
    r = display_root(t)
    leaf = t.leaf_node(t.leaf_labels.index(max(t.leaf_labels)))
    assert leaf in t.adjacency()[r]
