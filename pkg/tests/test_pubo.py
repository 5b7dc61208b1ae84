import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phylopubo.errors import ArityError, ParseError, TooManyVariablesError
from phylopubo.pubo import (
    PuboBuilder,
    PuboModel,
    bits_to_index,
    energy_table,
    evaluate,
    evaluate_many,
    index_to_bits,
    linear,
    parse,
    poly_mul,
    read_pubo,
    serialize,
    stats,
    write_pubo,
)


@st.composite
def models(draw, max_vars=7):
    q = draw(st.integers(1, max_vars))
    monos = st.lists(st.integers(0, q - 1), max_size=4).map(tuple)
    terms = draw(st.dictionaries(monos, st.integers(-20, 20), max_size=12))
    return PuboModel(q, terms)


def naive_energy(model, bits):
    return sum(c * all(bits[i] for i in mono) for mono, c in model.terms.items())


def test_idempotent_folding():
    m = PuboModel(3, {(1, 1): 2, (1,): 3, (2, 0, 2): 1})
    assert m.terms == {(1,): 5, (0, 2): 1}


def test_zero_terms_dropped_and_order_canonical():
    m = PuboModel(3, {(2,): 1, (0, 1): 4, (): 7, (1,): 0, (0,): -1})
    assert list(m.terms) == [(), (0,), (2,), (0, 1)]
    assert m.constant == 7 and m.degree == 2


def test_square_of_linear_residual():
    # (1 - x0 - x1)^2 = 1 - x0 - x1 + 2 x0 x1
    b = PuboBuilder(2)
    b.add_square(linear(1, [0, 1]))
    m = b.build()
    assert m.terms == {(): 1, (0,): -1, (1,): -1, (0, 1): 2}
    assert [evaluate(m, index_to_bits(i, 2)) for i in range(4)] == [1, 0, 0, 1]


def test_poly_mul_folds():
    assert poly_mul({(0,): 1, (): 1}, {(0,): 1}) == {(0,): 2}


def test_arity_error():
    m = PuboModel(3, {(0, 2): 1})
    with pytest.raises(ArityError):
        evaluate(m, [1, 1])
    with pytest.raises(ArityError):
        evaluate_many(m, np.zeros((2, 4)))


def test_out_of_range_monomial():
    with pytest.raises(ValueError):
        PuboModel(2, {(2,): 1})


def test_equality_ignores_layout():
    assert PuboModel(2, {(0,): 1}, layout="x") == PuboModel(2, {(0,): 1})
    assert PuboModel(2, {(0,): 1}) != PuboModel(3, {(0,): 1})


@given(models())
def test_energy_table_matches_direct_evaluation(m):
    table = energy_table(m)
    for idx in range(1 << m.num_vars):
        bits = index_to_bits(idx, m.num_vars)
        assert table[idx] == naive_energy(m, bits) == evaluate(m, bits)
    assert bits_to_index(index_to_bits(5, m.num_vars + 3)) == 5


@given(models(), st.integers(0, 2**31))
def test_evaluate_many_matches_scalar(m, seed):
    batch = np.random.default_rng(seed).integers(0, 2, size=(16, m.num_vars))
    assert evaluate_many(m, batch).tolist() == [evaluate(m, b) for b in batch]


@given(models(), models())
def test_addition_is_pointwise(a, b):
    q = max(a.num_vars, b.num_vars)
    s = a + b
    for bits in itertools.product((0, 1), repeat=q):
        assert evaluate(s, bits) == naive_energy(a, bits) + naive_energy(b, bits)


@given(models())
def test_serialize_roundtrip(m):
    assert parse(serialize(m)) == m
    assert serialize(parse(serialize(m))) == serialize(m)


def test_file_roundtrip(tmp_path):
    m = PuboModel(4, {(): 3, (0, 3): -2, (1, 2, 3): 5})
    write_pubo(m, tmp_path / "m.pubo")
    assert read_pubo(tmp_path / "m.pubo") == m
    assert (tmp_path / "m.pubo").read_text() == "pubo 4\n3\n-2 0 3\n5 1 2 3\n"


def test_parse_merges_duplicates_and_folds():
    assert parse("pubo 3\n1 0 1\n2 1 0\n1 2 2\n").terms == {(2,): 1, (0, 1): 3}


@pytest.mark.parametrize("text", ["", "qubo 2\n", "pubo x\n", "pubo 2\n1 5\n", "pubo 2\n1.5 0\n"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_energy_table_bound():
    with pytest.raises(TooManyVariablesError):
        energy_table(PuboModel(30, {}))


def test_stats():
    st_ = stats(PuboModel(4, {(): 1, (0,): 1, (1,): 2, (0, 1, 2): 1}))
    assert (st_.num_terms, st_.max_degree) == (4, 3)
    assert st_.terms_by_degree == {0: 1, 1: 2, 3: 1}


@given(models(max_vars=6), st.data())
def test_restrict_agrees_with_substitution(m, data):
    fixed = data.draw(st.dictionaries(st.integers(0, m.num_vars - 1), st.integers(0, 1)))
    reduced, free = m.restrict(fixed)
    assert reduced.num_vars == m.num_vars - len(fixed)
    for idx in range(1 << reduced.num_vars):
        bits = np.zeros(m.num_vars, dtype=int)
        for k, v in enumerate(free):
            bits[v] = (idx >> k) & 1
        for v, val in fixed.items():
            bits[v] = val
        assert evaluate(reduced, index_to_bits(idx, reduced.num_vars)) == evaluate(m, bits)
