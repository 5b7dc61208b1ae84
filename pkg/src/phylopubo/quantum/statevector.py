"""Dense statevector kernels.

A state on ``q`` qubits is a complex128 array of length ``2**q``; qubit ``i``
is bit ``i`` of the basis index, matching variable ``i`` of the PUBO model.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .hamiltonian import DiagonalHamiltonian


def num_qubits(state: np.ndarray) -> int:
    q = int(state.shape[0]).bit_length() - 1
    if 1 << q != state.shape[0]:
        raise ValueError("state length is not a power of two")
    return q


def zero_state(q: int) -> np.ndarray:
    state = np.zeros(1 << q, dtype=np.complex128)
    state[0] = 1.0
    return state


def basis_state(q: int, index: int) -> np.ndarray:
    state = np.zeros(1 << q, dtype=np.complex128)
    state[index] = 1.0
    return state


def uniform_state(q: int) -> np.ndarray:
    """Ground state of the transverse-field mixer ``-sum X``; the QAOA starting point."""
    return np.full(1 << q, (1 << q) ** -0.5, dtype=np.complex128)


def norm(state: np.ndarray) -> float:
    return float(np.vdot(state, state).real)


def probabilities(state: np.ndarray) -> np.ndarray:
    return np.abs(state) ** 2


def apply_1q(state: np.ndarray, qubit: int, gate: np.ndarray) -> np.ndarray:
    """Apply a 2x2 ``gate`` to ``qubit`` in place and return the state."""
    view = state.reshape(-1, 2, 1 << qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = gate[0, 0] * a0 + gate[0, 1] * a1
    view[:, 1, :] = gate[1, 0] * a0 + gate[1, 1] * a1
    return state


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def apply_ry(state, qubit, theta):
    return apply_1q(state, qubit, ry(theta))


def apply_rx(state, qubit, theta):
    return apply_1q(state, qubit, rx(theta))


def apply_ry_layer(state: np.ndarray, thetas) -> np.ndarray:
    """RY on every qubit at once; works on the ``(2,)*q`` tensor view."""
    q = len(thetas)
    c = np.cos(np.asarray(thetas) / 2)
    s = np.sin(np.asarray(thetas) / 2)
    for k in range(q):
        view = state.reshape(-1, 2, 1 << k)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = c[k] * a0 - s[k] * a1
        view[:, 1, :] = s[k] * a0 + c[k] * a1
    return state


@lru_cache(maxsize=32)
def cz_signs(q: int, ring: bool = False) -> np.ndarray:
    """Diagonal of the nearest-neighbour CZ layer (``ring`` closes the chain)."""
    idx = np.arange(1 << q)
    parity = np.zeros(1 << q, dtype=np.int64)
    pairs = [(i, i + 1) for i in range(q - 1)]
    if ring and q > 2:
        pairs.append((q - 1, 0))
    for a, b in pairs:
        parity ^= ((idx >> a) & 1) & ((idx >> b) & 1)
    signs = 1.0 - 2.0 * parity
    signs.setflags(write=False)
    return signs


def apply_cz(state: np.ndarray, a: int, b: int) -> np.ndarray:
    idx = np.arange(state.shape[0])
    mask = ((idx >> a) & 1) & ((idx >> b) & 1)
    state[mask.astype(bool)] *= -1
    return state


def apply_cz_layer(state: np.ndarray, ring: bool = False) -> np.ndarray:
    state *= cz_signs(num_qubits(state), ring)
    return state


def apply_phase(state: np.ndarray, h: DiagonalHamiltonian, gamma: float) -> np.ndarray:
    """``exp(-i gamma H_C)`` for diagonal ``H_C``."""
    state *= np.exp(-1j * gamma * h.diag)
    return state


def apply_mixer(state: np.ndarray, beta: float) -> np.ndarray:
    """``exp(-i beta sum_i X_i)``, i.e. ``RX(2 beta)`` on every qubit."""
    gate = rx(2 * beta)
    for k in range(num_qubits(state)):
        apply_1q(state, k, gate)
    return state


def qaoa_step(state: np.ndarray, h: DiagonalHamiltonian, gamma: float, beta: float) -> np.ndarray:
    """One QAOA layer: cost phase then mixer. Returns a new array."""
    out = np.array(state, dtype=np.complex128, copy=True)
    apply_phase(out, h, gamma)
    apply_mixer(out, beta)
    return out


def expectation(state: np.ndarray, h: DiagonalHamiltonian) -> float:
    return float(np.dot(probabilities(state), h.diag))


def sample_state(state: np.ndarray, shots: int, seed: int | None = None) -> dict[int, int]:
    """Multinomial measurement histogram ``{basis index: count}``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = probabilities(state)
    p = p / p.sum()
    counts = np.random.default_rng(seed).multinomial(shots, p)
    return {int(i): int(counts[i]) for i in np.flatnonzero(counts)}


def bitstring(index: int, q: int) -> str:
    """Variable-order bitstring: character ``i`` is the value of variable ``i``."""
    return "".join(str((index >> i) & 1) for i in range(q))
