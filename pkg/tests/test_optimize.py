import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phylopubo.quantum.optimize import OptimizerConfig, minimize


def rosenbrock(x):
    return float(np.sum(100 * (x[1:] - x[:-1] ** 2) ** 2 + (1 - x[:-1]) ** 2))


def test_rosenbrock_2d():
    res = minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(max_evals=5000, step=0.5))
    assert res.converged
    assert np.allclose(res.x, [1, 1], atol=1e-4)


@pytest.mark.parametrize("adaptive", [False, True])
def test_rosenbrock_higher_dim(adaptive):
    opt = OptimizerConfig(max_evals=40000, step=0.5, adaptive=adaptive, restarts=3)
    res = minimize(rosenbrock, np.zeros(6), opt)
    assert res.fun < 1e-6


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=5))
def test_quadratic_minimum(center):
    c = np.array(center)
    res = minimize(lambda x: float(np.sum((x - c) ** 2)), np.zeros_like(c),
                   OptimizerConfig(max_evals=5000, step=1.0))
    assert np.allclose(res.x, c, atol=1e-4)
    assert np.all(np.diff(res.trace) <= 0)


def test_budget_respected():
    calls = []

    def f(x):
        calls.append(1)
        return rosenbrock(x)

    res = minimize(f, np.zeros(4), OptimizerConfig(max_evals=50))
    assert not res.converged
    assert res.evals == len(calls) <= 50 + 4
    assert res.fun == min(res.trace)


def test_zero_dimensional_and_bad_start():
    assert minimize(lambda x: 3.0, []).fun == 3.0
    with pytest.raises(ValueError):
        minimize(rosenbrock, [np.nan, 0.0])
