"""Nelder-Mead simplex minimisation (gradient free).

Coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5. With
``adaptive=True`` they follow the dimension-dependent choice of Gao and Han
(2012), which behaves better above ~10 parameters. Convergence requires both
the spread of function values and the simplex diameter (max-norm from the
best vertex) to fall below their tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class OptimizerConfig:
    max_evals: int = 4000
    xtol: float = 1e-6
    ftol: float = 1e-9
    step: float = 0.1
    adaptive: bool = False
    restarts: int = 0


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    trace: list = field(default_factory=list)
    evals: int = 0
    iterations: int = 0
    converged: bool = False


def _coefficients(dim: int, adaptive: bool):
    if adaptive and dim > 0:
        return 1.0, 1.0 + 2.0 / dim, 0.75 - 1.0 / (2.0 * dim), 1.0 - 1.0 / dim
    return 1.0, 2.0, 0.5, 0.5


def minimize(f, x0, opt: OptimizerConfig | None = None) -> OptimizeResult:
    """Minimise ``f`` from ``x0``.

    ``trace`` holds the best value seen after each iteration (non-increasing).
    If ``max_evals`` runs out, the best point so far is returned with
    ``converged=False``. ``restarts`` re-seeds a fresh simplex around the
    incumbent after convergence, stopping early once a restart fails to improve.
    """
    opt = opt or OptimizerConfig()
    x0 = np.asarray(x0, dtype=float).ravel()
    if not np.all(np.isfinite(x0)):
        raise ValueError("initial point must be finite")
    dim = x0.size
    evals = 0
    trace: list[float] = []

    def call(x):
        nonlocal evals
        evals += 1
        return float(f(x))

    if dim == 0:
        fx = call(x0)
        return OptimizeResult(x0, fx, [fx], evals, 0, True)

    best_x, best_f = x0, call(x0)
    trace.append(best_f)
    iterations = 0
    converged = False
    for attempt in range(opt.restarts + 1):
        start_f = best_f
        res = _nelder_mead(call, best_x, best_f, opt, lambda: evals, trace)
        iterations += res[3]
        converged = res[2]
        if res[1] <= best_f:
            best_x, best_f = res[0], res[1]
        if not converged or evals >= opt.max_evals:
            break
        if attempt > 0 and best_f >= start_f - opt.ftol:
            break
    return OptimizeResult(best_x, best_f, trace, evals, iterations, converged)


def _nelder_mead(call, x0, f0, opt, used, trace):
    dim = x0.size
    alpha, gamma, rho, sigma = _coefficients(dim, opt.adaptive)
    simplex = np.empty((dim + 1, dim))
    fvals = np.empty(dim + 1)
    simplex[0], fvals[0] = x0, f0
    for i in range(dim):
        if used() >= opt.max_evals:
            return x0, f0, False, 0
        x = x0.copy()
        x[i] += opt.step
        simplex[i + 1] = x
        fvals[i + 1] = call(x)
    it = 0
    while True:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        best = min(fvals[0], trace[-1]) if trace else fvals[0]
        if it:
            trace.append(float(best))
        fspread = fvals[-1] - fvals[0]
        xspread = np.max(np.abs(simplex[1:] - simplex[0]))
        if fspread <= opt.ftol and xspread <= opt.xtol:
            return simplex[0].copy(), float(fvals[0]), True, it
        if used() >= opt.max_evals:
            return simplex[0].copy(), float(fvals[0]), False, it
        it += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = call(xr)
        if fvals[0] <= fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = call(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = call(xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = centroid + rho * (worst - centroid)
            fc = call(xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
                continue
        for i in range(1, dim + 1):
            simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
            fvals[i] = call(simplex[i])
