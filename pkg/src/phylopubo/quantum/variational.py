"""QAOA and VQE driven by exact (noiseless) statevector expectations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..pubo import PuboModel
from .hamiltonian import DiagonalHamiltonian, exact_ground, to_hamiltonian
from .optimize import OptimizerConfig, minimize
from .statevector import (
    apply_cz_layer,
    apply_mixer,
    apply_phase,
    apply_ry_layer,
    expectation,
    probabilities,
    uniform_state,
    zero_state,
)


QAOA_OPTIONS = OptimizerConfig(max_evals=2000, step=0.1)
VQE_OPTIONS = OptimizerConfig(max_evals=5000, step=0.5, adaptive=True)


@dataclass
class VariationalRun:
    algo: str
    layers: int
    params: np.ndarray
    trace: list
    final_energy: float
    most_probable: int
    probability: float
    seed: int | None
    ground_energy: float
    evals: int = 0
    converged: bool = False
    state: np.ndarray | None = field(default=None, repr=False)

    @property
    def gap(self) -> float:
        return self.final_energy - self.ground_energy

    def to_dict(self) -> dict:
        return {
            "algo": self.algo,
            "layers": self.layers,
            "seed": self.seed,
            "params": [float(p) for p in np.ravel(self.params)],
            "final_energy": self.final_energy,
            "ground_energy": self.ground_energy,
            "gap": self.gap,
            "most_probable": self.most_probable,
            "probability": self.probability,
            "evals": self.evals,
            "converged": self.converged,
        }


def _as_hamiltonian(target) -> DiagonalHamiltonian:
    if isinstance(target, DiagonalHamiltonian):
        return target
    if isinstance(target, PuboModel):
        return to_hamiltonian(target)
    raise TypeError("expected a PuboModel or DiagonalHamiltonian")


def qaoa_state(h: DiagonalHamiltonian, gammas, betas) -> np.ndarray:
    state = uniform_state(h.num_qubits)
    for g, b in zip(gammas, betas):
        apply_phase(state, h, g)
        apply_mixer(state, b)
    return state


def vqe_state(q: int, thetas, ring: bool = False) -> np.ndarray:
    """Hardware-efficient ansatz: ``[RY layer, CZ chain] * p`` then a final RY layer.

    ``thetas`` has shape ``(p + 1, q)``.
    """
    thetas = np.asarray(thetas, dtype=float).reshape(-1, q)
    state = zero_state(q)
    for layer in thetas[:-1]:
        apply_ry_layer(state, layer)
        apply_cz_layer(state, ring)
    apply_ry_layer(state, thetas[-1])
    return state


def _finish(algo, p, h, x, result, seed, state):
    probs = probabilities(state)
    top = int(np.argmax(probs))
    e0, _ = exact_ground(h)
    return VariationalRun(algo, p, x, result.trace, float(expectation(state, h)), top,
                          float(probs[top]), seed, e0, result.evals, result.converged, state)


def qaoa_run(target, p: int, opt: OptimizerConfig | None = None, seed: int | None = 0) -> VariationalRun:
    """Optimise the ``2p`` QAOA angles starting from small uniform(0, 0.1) values."""
    if p < 0:
        raise ValueError("p must be >= 0")
    h = _as_hamiltonian(target)
    opt = opt or QAOA_OPTIONS
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0.0, 0.1, size=2 * p)

    def energy(x):
        return expectation(qaoa_state(h, x[:p], x[p:]), h)

    result = minimize(energy, x0, opt)
    x = result.x
    return _finish("qaoa", p, h, x, result, seed, qaoa_state(h, x[:p], x[p:]))


def vqe_run(target, p: int, opt: OptimizerConfig | None = None, seed: int | None = 0,
            ring: bool = False) -> VariationalRun:
    """Optimise the ``q * (p + 1)`` RY angles from uniform(-pi, pi)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    h = _as_hamiltonian(target)
    q = h.num_qubits
    opt = opt or VQE_OPTIONS
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(-np.pi, np.pi, size=q * (p + 1))

    def energy(x):
        return expectation(vqe_state(q, x, ring), h)

    result = minimize(energy, x0, opt)
    return _finish("vqe", p, h, result.x, result, seed, vqe_state(q, result.x, ring))


def best_of(runs) -> VariationalRun:
    """Lowest final energy; ties go to the earliest run."""
    return min(runs, key=lambda r: r.final_energy)
