"""Classical ground-state search over PUBO models.

Randomness comes from NumPy's PCG64 generator seeded through
``SeedSequence(seed)``; each annealing restart draws from its own spawned
child sequence, so results are reproducible across platforms.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import ScheduleInvalidError, TooManyVariablesError
from .pubo import PuboModel, energy_table, evaluate, index_to_bits

DEFAULT_EXHAUSTIVE_BOUND = 26


@dataclass
class SolveResult:
    best_assignment: np.ndarray
    best_energy: int
    ground_set: np.ndarray | None = None
    trace: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    seed: int | None = None
    wall_time: float = 0.0
    method: str = ""

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "best_energy": int(self.best_energy),
            "best_assignment": "".join(str(int(b)) for b in self.best_assignment),
            "ground_set_size": None if self.ground_set is None else int(len(self.ground_set)),
            "seed": self.seed,
            "trace_length": int(len(self.trace)),
        }


@dataclass(frozen=True)
class AnnealSchedule:
    sweeps: int
    t_start: float
    t_end: float
    restarts: int = 8

    def __post_init__(self):
        if self.sweeps < 1:
            raise ScheduleInvalidError("sweeps must be >= 1")
        if self.restarts < 1:
            raise ScheduleInvalidError("restarts must be >= 1")
        if not (self.t_end > 0 and self.t_start >= self.t_end):
            raise ScheduleInvalidError("need t_start >= t_end > 0")

    def temperatures(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([float(self.t_start)])
        ratio = self.t_end / self.t_start
        k = np.arange(self.sweeps) / (self.sweeps - 1)
        return self.t_start * ratio ** k


def default_schedule(num_vars: int, penalty: float) -> AnnealSchedule:
    """200 sweeps per variable, cooling geometrically from the penalty weight to 0.1."""
    return AnnealSchedule(sweeps=200 * num_vars, t_start=max(float(penalty), 0.1), t_end=0.1, restarts=8)


# ---------------------------------------------------------------------------
# exhaustive


def solve_exhaustive(model: PuboModel, bound: int = DEFAULT_EXHAUSTIVE_BOUND) -> SolveResult:
    """Full scan of all ``2**q`` assignments; returns every minimiser."""
    if model.num_vars > bound:
        raise TooManyVariablesError(f"{model.num_vars} variables exceed exhaustive bound {bound}")
    t0 = time.perf_counter()
    table = energy_table(model, max_vars=bound)
    best = int(table.min())
    idx = np.flatnonzero(table == best)
    ground = np.array([index_to_bits(int(i), model.num_vars) for i in idx], dtype=np.uint8)
    ground = ground.reshape(len(idx), model.num_vars)
    return SolveResult(ground[0].copy(), best, ground, np.array([best], dtype=np.int64),
                       None, time.perf_counter() - t0, "exhaustive")


def _subset_sums(table: np.ndarray, bits: int) -> np.ndarray:
    """In place: ``table[a] <- sum(table[b] for b subset of a)``."""
    for i in range(bits):
        view = table.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return table


def solve_conditioned(model: PuboModel, fixed_vars, max_component: int = 22,
                      max_fixed: int = 24) -> SolveResult:
    """Exact minimum by enumerating ``fixed_vars`` and scanning the rest per component.

    Once the fixed variables are set, the remaining polynomial splits into
    connected components of its interaction graph; each is minimised by a
    full table scan. Fixed assignments are visited in order of their
    fixed-only energy and the search stops once that energy plus a global
    lower bound on the free part cannot beat the incumbent. With penalty
    weights this prunes every structurally infeasible assignment.
    """
    t0 = time.perf_counter()
    q = model.num_vars
    fixed = list(dict.fromkeys(int(i) for i in fixed_vars))
    if len(fixed) > max_fixed:
        raise TooManyVariablesError(f"{len(fixed)} conditioning variables exceed bound {max_fixed}")
    fpos = {v: k for k, v in enumerate(fixed)}
    free = [i for i in range(q) if i not in fpos]

    parent = {v: v for v in free}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    split_terms = []
    for mono, c in model.terms.items():
        fmask = 0
        rest = []
        for i in mono:
            if i in fpos:
                fmask |= 1 << fpos[i]
            else:
                rest.append(i)
        split_terms.append((fmask, tuple(rest), c))
        for a, b in zip(rest, rest[1:]):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

    comps: dict[int, list[int]] = {}
    for v in free:
        comps.setdefault(find(v), []).append(v)
    comp_list = list(comps.values())
    if any(len(c) > max_component for c in comp_list):
        raise TooManyVariablesError("a free component exceeds the scan bound")
    comp_of = {v: ci for ci, c in enumerate(comp_list) for v in c}
    local = {v: k for c in comp_list for k, v in enumerate(c)}

    fixed_table = np.zeros(1 << len(fixed), dtype=np.int64)
    per_comp = [([], [], []) for _ in comp_list]
    for fmask, rest, c in split_terms:
        if not rest:
            fixed_table[fmask] += c
            continue
        ci = comp_of[rest[0]]
        lmask = 0
        for v in rest:
            lmask |= 1 << local[v]
        per_comp[ci][0].append(fmask)
        per_comp[ci][1].append(lmask)
        per_comp[ci][2].append(c)
    _subset_sums(fixed_table, len(fixed))
    per_comp = [(np.array(f, dtype=np.int64), np.array(lm, dtype=np.int64), np.array(cc, dtype=np.int64))
                for f, lm, cc in per_comp]

    def comp_min(fm, lm, cc, alive, size):
        table = np.zeros(1 << size, dtype=np.int64)
        np.add.at(table, lm[alive], cc[alive])
        _subset_sums(table, size)
        k = int(np.argmin(table))
        return int(table[k]), k

    # valid for every fixed assignment: positive conditional terms off, negative ones on
    free_bound = sum(comp_min(fm, lm, cc, (fm == 0) | (cc < 0), len(comp))[0]
                     for (fm, lm, cc), comp in zip(per_comp, comp_list))

    best_e = None
    best_bits = None
    for assign in np.argsort(fixed_table, kind="stable"):
        assign = int(assign)
        base = int(fixed_table[assign])
        if best_e is not None and base + free_bound >= best_e:
            break
        energy = base
        choice = []
        for (fm, lm, cc), comp in zip(per_comp, comp_list):
            e, k = comp_min(fm, lm, cc, (assign & fm) == fm, len(comp))
            energy += e
            choice.append(k)
        if best_e is None or energy < best_e:
            best_e = energy
            best_bits = (assign, choice)
    bits = np.zeros(q, dtype=np.uint8)
    assign, choice = best_bits
    for k, v in enumerate(fixed):
        bits[v] = (assign >> k) & 1
    for comp, k in zip(comp_list, choice):
        for j, v in enumerate(comp):
            bits[v] = (k >> j) & 1
    return SolveResult(bits, int(best_e), None, np.array([best_e], dtype=np.int64), None,
                       time.perf_counter() - t0, "conditioned")


# ---------------------------------------------------------------------------
# local search kernels


@dataclass(frozen=True)
class _Incidence:
    var_ptr: np.ndarray
    var_terms: np.ndarray
    term_ptr: np.ndarray
    term_vars: np.ndarray
    coeffs: np.ndarray
    constant: int


def _incidence(model: PuboModel) -> _Incidence:
    terms = [(m, c) for m, c in model.terms.items() if m]
    q = model.num_vars
    term_ptr = np.zeros(len(terms) + 1, dtype=np.int64)
    flat = []
    touching = [[] for _ in range(q)]
    for t, (mono, _) in enumerate(terms):
        flat.extend(mono)
        term_ptr[t + 1] = len(flat)
        for i in mono:
            touching[i].append(t)
    var_ptr = np.zeros(q + 1, dtype=np.int64)
    for i in range(q):
        var_ptr[i + 1] = var_ptr[i] + len(touching[i])
    var_terms = np.array([t for ts in touching for t in ts], dtype=np.int64)
    return _Incidence(var_ptr, var_terms, term_ptr, np.array(flat, dtype=np.int64),
                      np.array([c for _, c in terms], dtype=np.int64), model.constant)


@numba.njit(cache=True)
def _flip_delta(x, i, var_ptr, var_terms, term_ptr, term_vars, coeffs):
    s = 0
    for k in range(var_ptr[i], var_ptr[i + 1]):
        t = var_terms[k]
        alive = True
        for j in range(term_ptr[t], term_ptr[t + 1]):
            v = term_vars[j]
            if v != i and x[v] == 0:
                alive = False
                break
        if alive:
            s += coeffs[t]
    return s if x[i] == 0 else -s


@numba.njit(cache=True)
def _energy(x, term_ptr, term_vars, coeffs, constant):
    e = constant
    for t in range(coeffs.shape[0]):
        alive = True
        for j in range(term_ptr[t], term_ptr[t + 1]):
            if x[term_vars[j]] == 0:
                alive = False
                break
        if alive:
            e += coeffs[t]
    return e


@numba.njit(cache=True)
def _anneal_block(x, energy, best_x, best_e, temps, uniforms, swaps, trace, trace_offset,
                  var_ptr, var_terms, term_ptr, term_vars, coeffs, grp_ptr, grp_vars):
    q = x.shape[0]
    for sweep in range(temps.shape[0]):
        beta = 1.0 / temps[sweep]
        for i in range(q):
            d = _flip_delta(x, i, var_ptr, var_terms, term_ptr, term_vars, coeffs)
            if d <= 0 or uniforms[sweep, i] < math.exp(-d * beta):
                x[i] = 1 - x[i]
                energy += d
                if energy < best_e:
                    best_e = energy
                    best_x[:] = x
        for g in range(grp_ptr.shape[0] - 1):
            lo, hi = grp_ptr[g], grp_ptr[g + 1]
            on = -1
            count = 0
            for k in range(lo, hi):
                if x[grp_vars[k]]:
                    on = grp_vars[k]
                    count += 1
            if count != 1 or hi - lo < 2:
                continue
            pick = lo + int(swaps[sweep, g, 0] * (hi - lo - 1))
            j = grp_vars[pick]
            if j == on:
                j = grp_vars[hi - 1]
            d = _flip_delta(x, on, var_ptr, var_terms, term_ptr, term_vars, coeffs)
            x[on] = 0
            d += _flip_delta(x, j, var_ptr, var_terms, term_ptr, term_vars, coeffs)
            if d <= 0 or swaps[sweep, g, 1] < math.exp(-d * beta):
                x[j] = 1
                energy += d
                if energy < best_e:
                    best_e = energy
                    best_x[:] = x
            else:
                x[on] = 1
        trace[trace_offset + sweep] = best_e
    return energy, best_e


@numba.njit(cache=True)
def _all_deltas(x, var_ptr, var_terms, term_ptr, term_vars, coeffs):
    out = np.empty(x.shape[0], dtype=np.int64)
    for i in range(x.shape[0]):
        out[i] = _flip_delta(x, i, var_ptr, var_terms, term_ptr, term_vars, coeffs)
    return out


class IncrementalState:
    """Assignment plus running energy, updated by single flips."""

    def __init__(self, model: PuboModel, x):
        self.inc = _incidence(model)
        self.x = np.asarray(x, dtype=np.int8).copy()
        self.energy = int(_energy(self.x, self.inc.term_ptr, self.inc.term_vars,
                                  self.inc.coeffs, self.inc.constant))

    def delta(self, i: int) -> int:
        inc = self.inc
        return int(_flip_delta(self.x, i, inc.var_ptr, inc.var_terms, inc.term_ptr,
                               inc.term_vars, inc.coeffs))

    def flip(self, i: int) -> int:
        d = self.delta(i)
        self.x[i] = 1 - self.x[i]
        self.energy += d
        return self.energy


_BLOCK = 2048
_NO_SWAPS = np.zeros((_BLOCK, 0, 2))


def solve_anneal(model: PuboModel, schedule: AnnealSchedule, seed: int = 0,
                 groups=None) -> SolveResult:
    """Metropolis annealing with a geometric temperature ladder.

    One sweep proposes a flip of every variable in index order. ``groups``
    optionally lists exactly-one variable groups; each sweep then also
    proposes, per group whose single active member is set, moving that bit
    to another member. Such swaps keep the group's constraint satisfied, so
    they cross barriers that single flips only pass through a penalty.
    The best assignment over all restarts is kept; ties go to the earliest
    restart. ``trace`` concatenates the best-so-far energy after every sweep.
    """
    if not isinstance(schedule, AnnealSchedule):
        raise ScheduleInvalidError("schedule must be an AnnealSchedule")
    t0 = time.perf_counter()
    q = model.num_vars
    inc = _incidence(model)
    temps = schedule.temperatures()
    trace = np.empty(schedule.sweeps * schedule.restarts, dtype=np.int64)
    groups = [list(g) for g in (groups or [])]
    grp_ptr = np.zeros(len(groups) + 1, dtype=np.int64)
    grp_ptr[1:] = np.cumsum([len(g) for g in groups])
    grp_vars = np.array([v for g in groups for v in g], dtype=np.int64)
    if grp_vars.size and (grp_vars.min() < 0 or grp_vars.max() >= q):
        raise ValueError("group variable out of range")
    children = np.random.SeedSequence(seed).spawn(schedule.restarts)
    best_bits, best_e = None, None
    for r, child in enumerate(children):
        rng = np.random.Generator(np.random.PCG64(child))
        x = rng.integers(0, 2, size=q).astype(np.int8)
        energy = int(_energy(x, inc.term_ptr, inc.term_vars, inc.coeffs, inc.constant))
        run_best_x = x.copy()
        run_best = energy
        for start in range(0, schedule.sweeps, _BLOCK):
            stop = min(start + _BLOCK, schedule.sweeps)
            uniforms = rng.random((stop - start, q))
            swaps = rng.random((stop - start, len(groups), 2)) if groups else _NO_SWAPS
            energy, run_best = _anneal_block(
                x, energy, run_best_x, run_best, temps[start:stop], uniforms, swaps, trace,
                r * schedule.sweeps + start, inc.var_ptr, inc.var_terms, inc.term_ptr,
                inc.term_vars, inc.coeffs, grp_ptr, grp_vars)
        if best_e is not None:
            seg = trace[r * schedule.sweeps:(r + 1) * schedule.sweeps]
            np.minimum(seg, best_e, out=seg)
        if best_e is None or run_best < best_e:
            best_e, best_bits = int(run_best), run_best_x.copy()
    return SolveResult(best_bits.astype(np.uint8), best_e, None, trace, seed,
                       time.perf_counter() - t0, "anneal")


def descend(model: PuboModel, start, seed: int | None = None) -> SolveResult:
    """Steepest single-flip descent; ties go to the lowest variable index."""
    t0 = time.perf_counter()
    start = np.asarray(start)
    if start.shape != (model.num_vars,):
        raise ValueError(f"start length {start.shape} != {model.num_vars}")
    state = IncrementalState(model, start)
    inc = state.inc
    trace = [state.energy]
    while True:
        deltas = _all_deltas(state.x, inc.var_ptr, inc.var_terms, inc.term_ptr,
                             inc.term_vars, inc.coeffs)
        if deltas.size == 0:
            break
        i = int(np.argmin(deltas))
        if deltas[i] >= 0:
            break
        state.flip(i)
        trace.append(state.energy)
    return SolveResult(state.x.astype(np.uint8), int(state.energy), None,
                       np.array(trace, dtype=np.int64), seed, time.perf_counter() - t0, "descend")


def write_trace_csv(path, trace, header=("step", "best_energy")) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for step, value in enumerate(trace):
            w.writerow([step, value])


def check_result(model: PuboModel, result: SolveResult) -> bool:
    return evaluate(model, result.best_assignment) == result.best_energy
