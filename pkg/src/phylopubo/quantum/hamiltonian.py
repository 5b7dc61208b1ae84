"""Diagonal problem Hamiltonians built from PUBO models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import TooManyQubitsError
from ..pubo import PuboModel, energy_table

DEFAULT_QUBIT_BOUND = 20


@dataclass(frozen=True)
class DiagonalHamiltonian:
    """``diag[idx]`` is the PUBO energy of the assignment whose bit ``i`` is variable ``i``.

    Binary variables map to qubits through ``x = (1 - Z) / 2``; since the
    operator is diagonal, no Pauli expansion is ever formed.
    """

    num_qubits: int
    diag: np.ndarray

    def __post_init__(self):
        if self.diag.shape != (1 << self.num_qubits,):
            raise ValueError("diag length must be 2**num_qubits")


def to_hamiltonian(model: PuboModel, bound: int = DEFAULT_QUBIT_BOUND) -> DiagonalHamiltonian:
    if model.num_vars > bound:
        raise TooManyQubitsError(f"{model.num_vars} qubits exceed bound {bound}")
    diag = energy_table(model, max_vars=bound).astype(np.float64)
    diag.setflags(write=False)
    return DiagonalHamiltonian(model.num_vars, diag)


def exact_ground(h: DiagonalHamiltonian) -> tuple[float, list[int]]:
    """Ground energy and every minimising basis index."""
    e0 = float(h.diag.min())
    return e0, [int(i) for i in np.flatnonzero(h.diag == e0)]
