"""Small dense statevector and density-matrix tools used as independent oracles.

Qubit 0 is the most significant bit of a basis index. Sizes are capped at
``MAX_QUBITS`` so that matrices stay tiny.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .errors import ContractViolation
from .stabilizer import CliffordElement, PauliString, StabilizerState

MAX_QUBITS = 10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

GATES = {"H": H, "S": S, "X": X, "Y": Y, "Z": Z, "CNOT": CNOT, "CX": CNOT, "CZ": CZ, "SWAP": SWAP}


def _check(n: int) -> None:
    if n > MAX_QUBITS:
        raise ContractViolation(f"dense oracle limited to {MAX_QUBITS} qubits")


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense matrix of ``i^phase * i^(x.z) X^x Z^z``."""
    _check(p.n)
    factors = []
    for a, b in zip(p.x, p.z):
        factors.append({(0, 0): I2, (1, 0): X, (0, 1): Z, (1, 1): X @ Z}[(a, b)])
    xz = sum(a * b for a, b in zip(p.x, p.z))
    return (1j ** ((p.phase + xz) % 4)) * kron_all(factors)


def apply_unitary(psi: np.ndarray, u: np.ndarray, support: Sequence[int], n: int) -> np.ndarray:
    """Apply ``u`` (acting on ``support`` in the listed order) to an n-qubit vector."""
    m = len(support)
    t = psi.reshape([2] * n)
    rest = [q for q in range(n) if q not in support]
    perm = list(support) + rest
    t = np.transpose(t, perm).reshape(2 ** m, -1)
    t = (u @ t).reshape([2] * n)
    return np.transpose(t, np.argsort(perm)).reshape(-1)


def zero_state(n: int) -> np.ndarray:
    _check(n)
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1.0
    return psi


def apply_gate(psi: np.ndarray, gate: str, support: Sequence[int], n: int) -> np.ndarray:
    return apply_unitary(psi, GATES[gate.upper()], support, n)


def clifford_unitary(c: CliffordElement) -> np.ndarray:
    """A unitary (up to global phase) realizing the images stored in ``c``."""
    m = c.m
    _check(m)
    imgs = [pauli_matrix(p) for p in c.images()]
    xs, zs = imgs[:m], imgs[m:]
    dim = 2 ** m
    proj = np.eye(dim, dtype=complex)
    for q in zs:
        proj = proj @ (np.eye(dim) + q) / 2
    # The joint +1 eigenspace of the Z images is one-dimensional.
    col = proj[:, np.argmax(np.linalg.norm(proj, axis=0))]
    v0 = col / np.linalg.norm(col)
    u = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        v = v0
        for j in reversed(range(m)):
            if (idx >> (m - 1 - j)) & 1:
                v = xs[j] @ v
        u[:, idx] = v
    return u


def statevector(state: StabilizerState) -> np.ndarray:
    """Normalized vector stabilized by every generator of ``state``."""
    n = state.n
    _check(n)
    dim = 2 ** n
    proj = np.eye(dim, dtype=complex)
    for p in state.stabilizers():
        proj = proj @ (np.eye(dim) + pauli_matrix(p)) / 2
    col = proj[:, np.argmax(np.linalg.norm(proj, axis=0))]
    return col / np.linalg.norm(col)


def is_stabilized(psi: np.ndarray, state: StabilizerState, atol: float = 1e-9) -> bool:
    return all(np.allclose(pauli_matrix(p) @ psi, psi, atol=atol) for p in state.stabilizers())


def same_ray(a: np.ndarray, b: np.ndarray, atol: float = 1e-9) -> bool:
    return abs(abs(np.vdot(a, b)) - 1.0) <= atol


def partial_trace(rho: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    """Reduced density matrix on ``keep`` (returned in the listed order)."""
    keep = list(keep)
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    perm = keep + drop + [n + q for q in keep] + [n + q for q in drop]
    t = np.transpose(t, perm)
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def von_neumann_entropy(rho: np.ndarray) -> float:
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    w = w[w > 1e-12]
    return float(-np.sum(w * np.log2(w)))


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    # Round-off eigenvalues near zero would otherwise contribute sqrt(1e-16).
    w = np.where(w > 1e-12 * max(1.0, float(np.max(np.abs(w)))), w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Root fidelity ``||sqrt(rho) sqrt(sigma)||_1``."""
    s = np.linalg.svd(psd_sqrt(rho) @ psd_sqrt(sigma), compute_uv=False)
    return float(np.sum(s))
