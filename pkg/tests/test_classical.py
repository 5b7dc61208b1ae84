import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phylopubo.classical import (
    AnnealSchedule,
    IncrementalState,
    check_result,
    default_schedule,
    descend,
    solve_anneal,
    solve_conditioned,
    solve_exhaustive,
    write_trace_csv,
)
from phylopubo.errors import ScheduleInvalidError, TooManyVariablesError
from phylopubo.models import compile_model, decode
from phylopubo.phylo import exact_mp
from phylopubo.pubo import PuboModel, energy_table, evaluate
from phylopubo.seqio import default_step_matrix

from conftest import alignment, random_alignment
from test_pubo import models

S = default_step_matrix()


@given(models(max_vars=8))
def test_exhaustive_finds_every_minimiser(m):
    res = solve_exhaustive(m)
    table = energy_table(m)
    assert res.best_energy == table.min()
    assert len(res.ground_set) == int((table == table.min()).sum())
    assert all(evaluate(m, g) == res.best_energy for g in res.ground_set)
    assert check_result(m, res)


def test_exhaustive_bound():
    with pytest.raises(TooManyVariablesError):
        solve_exhaustive(PuboModel(27, {}))


@settings(max_examples=30, deadline=None)
@given(models(max_vars=8), st.data())
def test_conditioned_is_exact(m, data):
    fixed = data.draw(st.lists(st.integers(0, m.num_vars - 1), max_size=4, unique=True))
    res = solve_conditioned(m, fixed)
    assert res.best_energy == energy_table(m).min()
    assert evaluate(m, res.best_assignment) == res.best_energy


@settings(max_examples=30, deadline=None)
@given(models(max_vars=8), st.integers(0, 2**16))
def test_incremental_deltas(m, seed):
    rng = np.random.default_rng(seed)
    state = IncrementalState(m, rng.integers(0, 2, m.num_vars))
    for _ in range(20):
        i = int(rng.integers(m.num_vars))
        state.flip(i)
        assert state.energy == evaluate(m, state.x)


def test_schedule_validation():
    with pytest.raises(ScheduleInvalidError):
        AnnealSchedule(0, 1.0, 0.1)
    with pytest.raises(ScheduleInvalidError):
        AnnealSchedule(10, 0.1, 1.0)
    with pytest.raises(ScheduleInvalidError):
        AnnealSchedule(10, 1.0, 0.0)
    t = AnnealSchedule(5, 8.0, 0.5).temperatures()
    assert t[0] == 8.0 and np.isclose(t[-1], 0.5) and np.all(np.diff(t) < 0)


def test_anneal_deterministic_and_trace_monotone():
    cm = compile_model("branch", alignment("AC", "AG", "GT", "GC"))
    sched = AnnealSchedule(300, cm.penalty, 0.1, restarts=3)
    a = solve_anneal(cm.model, sched, seed=7)
    b = solve_anneal(cm.model, sched, seed=7)
    assert np.array_equal(a.best_assignment, b.best_assignment)
    assert np.array_equal(a.trace, b.trace)
    assert len(a.trace) == 900
    assert np.all(np.diff(a.trace) <= 0)
    assert a.trace[-1] == a.best_energy == evaluate(cm.model, a.best_assignment)


@pytest.mark.parametrize("seed", range(3))
def test_anneal_reaches_oracle_n5(seed):
    a = random_alignment(np.random.default_rng(100 + seed), 5)
    cm = compile_model("branch", a)
    res = solve_anneal(cm.model, default_schedule(cm.num_vars, cm.penalty), seed)
    best, _ = exact_mp(a, S)
    assert res.best_energy == best
    assert decode(res.best_assignment, cm).feasible


def test_descend_reaches_local_minimum():
    cm = compile_model("branch", alignment("A", "C", "G", "T"))
    start = np.random.default_rng(0).integers(0, 2, cm.num_vars)
    res = descend(cm.model, start)
    assert np.all(np.diff(res.trace) < 0)
    state = IncrementalState(cm.model, res.best_assignment)
    assert all(state.delta(i) >= 0 for i in range(cm.num_vars))


def test_conditioned_multisite_matches_oracle():
    a = alignment("ACG", "ACT", "GTT", "GCA")
    cm = compile_model("branch", a)
    structural = range(cm.num_vars - cm.layout.num_base_vars)
    res = solve_conditioned(cm.model, structural)
    assert res.best_energy == exact_mp(a, S)[0]


def test_trace_csv(tmp_path):
    write_trace_csv(tmp_path / "t.csv", [5, 3, 3])
    assert (tmp_path / "t.csv").read_text().splitlines() == ["step,best_energy", "0,5", "1,3", "2,3"]


def test_group_swaps_solve_multisite():
    a = random_alignment(np.random.default_rng(50), 5, 3)
    cm = compile_model("branch", a)
    sched = default_schedule(cm.num_vars, cm.penalty)
    hits = sum(solve_anneal(cm.model, sched, s, cm.layout.exactly_one_groups()).best_energy
               == exact_mp(a, S)[0] for s in range(3))
    assert hits >= 2


def test_group_swaps_keep_energy_consistent():
    cm = compile_model("branch", alignment("AC", "AG", "GT", "GC"))
    res = solve_anneal(cm.model, AnnealSchedule(200, cm.penalty, 0.1, 2), 1,
                       cm.layout.exactly_one_groups())
    assert evaluate(cm.model, res.best_assignment) == res.best_energy == res.trace[-1]
    with pytest.raises(ValueError):
        solve_anneal(cm.model, AnnealSchedule(5, 1, 0.1, 1), 0, [[0, cm.num_vars]])
