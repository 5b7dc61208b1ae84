import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phylopubo.errors import BigCountError, EnumerationTooLargeError
from phylopubo.phylo import (
    assignment_cost,
    brute_force_site,
    count_topologies,
    enumerate_topologies,
    exact_mp,
    fitch_score,
    sankoff_optimal_assignments,
    sankoff_score,
    tree_score,
)
from phylopubo.seqio import default_step_matrix, uniform_step_matrix
from phylopubo.tree import parse_newick, to_newick

from conftest import alignment, columns


def double_factorial(k):
    return math.prod(range(k, 0, -2)) if k > 0 else 1


@pytest.mark.parametrize("n", range(3, 9))
def test_count_matches_double_factorial(n):
    assert count_topologies(n) == double_factorial(2 * n - 5)


def test_count_known_values():
    assert [count_topologies(n) for n in (3, 4, 5, 10)] == [1, 3, 15, 2027025]


def test_count_overflow():
    with pytest.raises(BigCountError) as info:
        count_topologies(40)
    assert info.value.saturated


@pytest.mark.parametrize("n", range(3, 8))
def test_enumeration_distinct_and_complete(n):
    trees = list(enumerate_topologies(n, bound=10))
    assert len(trees) == count_topologies(n)
    assert len({t.splits() for t in trees}) == len(trees)


def test_enumeration_bound(monkeypatch):
    with pytest.raises(EnumerationTooLargeError):
        next(iter(enumerate_topologies(11)))
    monkeypatch.setenv("PARSIMONY_MAX_ENUM", "4")
    with pytest.raises(EnumerationTooLargeError):
        list(enumerate_topologies(5))


def test_fitch_quartet():
    t = parse_newick("((a,b),c,d);")
    assert fitch_score(t, (0, 0, 2, 2)) == 1
    u = parse_newick("((a,c),b,d);")
    assert u.leaf_labels == ("a", "c", "b", "d")
    assert fitch_score(u, (0, 2, 0, 2)) == 2


def test_sankoff_three_leaves_ancestral_state():
    t = parse_newick("(a,b,c);")
    s = default_step_matrix()
    cost, states = sankoff_score(t, (0, 0, 2), s)
    assert cost == 1 and states == (0,)
    cost, assignments = sankoff_optimal_assignments(t, (0, 0, 2), s)
    assert assignments == [(0,)]
    cost, assignments = sankoff_optimal_assignments(t, (0, 1, 2), s)
    assert cost == 3 and assignments == [(0,), (2,)]


pattern4 = st.tuples(*[st.integers(0, 4)] * 4)
pattern5 = st.tuples(*[st.integers(0, 4)] * 5)


@given(pattern5, st.integers(0, 14))
def test_fitch_equals_unit_sankoff(pattern, k):
    t = list(enumerate_topologies(5))[k]
    assert fitch_score(t, pattern) == sankoff_score(t, pattern, uniform_step_matrix())[0]


@settings(max_examples=40)
@given(pattern5, st.integers(0, 14))
def test_sankoff_equals_brute_force(pattern, k):
    t = list(enumerate_topologies(5))[k]
    s = default_step_matrix()
    cost, states = sankoff_score(t, pattern, s)
    assert cost == brute_force_site(t, pattern, s)
    assert assignment_cost(t, pattern, states, s) == cost
    _, all_opt = sankoff_optimal_assignments(t, pattern, s)
    assert tuple(states) in [tuple(a) for a in all_opt]
    brute = [a for a in itertools.product(range(5), repeat=3)
             if assignment_cost(t, pattern, a, s) == cost]
    assert sorted(map(tuple, all_opt)) == sorted(brute)


@given(pattern4, st.integers(0, 2))
def test_sankoff_root_independent(pattern, k):
    t = list(enumerate_topologies(4))[k]
    s = default_step_matrix()
    assert sankoff_score(t, pattern, s, root=0)[0] == sankoff_score(t, pattern, s, root=1)[0]


def test_exact_mp_quartet():
    best, trees = exact_mp(alignment("A", "A", "G", "G"), default_step_matrix())
    assert best == 1
    assert [to_newick(t.tree) for t in trees] == ["((a,b),c,d);"]


def test_exact_mp_identical_rows_lists_all_topologies():
    best, trees = exact_mp(alignment(*["ACG"] * 6), default_step_matrix())
    assert best == 0 and len(trees) == 105


@settings(max_examples=25, deadline=None)
@given(columns(5, 3, alphabet="ACGT-"))
def test_exact_mp_is_weighted_site_sum(a):
    s = default_step_matrix()
    best, trees = exact_mp(a, s)
    for t in list(enumerate_topologies(5, labels=a.taxa)):
        score = tree_score(t, a, s).score
        assert score >= best
        per_site = sum(brute_force_site(t, col, s) for col in a.columns())
        assert score == per_site
    assert all(t.score == best for t in trees)


def test_tree_score_states_realise_score():
    a = alignment("AC", "AT", "GC", "GG")
    s = default_step_matrix()
    t = parse_newick("((a,b),c,d);").relabel(a.taxa)
    scored = tree_score(t, a, s)
    states = np.array(scored.tree.ancestral_states)
    total = sum(assignment_cost(t, col, states[:, i], s) for i, col in enumerate(a.columns()))
    assert total == scored.score
