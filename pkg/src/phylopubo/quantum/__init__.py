"""Noiseless statevector simulation of QAOA and VQE on diagonal PUBO Hamiltonians."""

from .hamiltonian import DiagonalHamiltonian, exact_ground, to_hamiltonian
from .optimize import OptimizeResult, OptimizerConfig, minimize
from .statevector import qaoa_step, sample_state
from .variational import VariationalRun, best_of, qaoa_run, vqe_run

__all__ = [
    "DiagonalHamiltonian", "exact_ground", "to_hamiltonian", "OptimizeResult", "OptimizerConfig",
    "minimize", "qaoa_step", "sample_state", "VariationalRun", "best_of", "qaoa_run", "vqe_run",
]
