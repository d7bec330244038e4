"""Shared oracles: dense kron-built unitaries and GF(2) stabilizer entropies.

Both are deliberately independent of the package's bit-indexed kernels so
they can serve as cross-checks.
"""

from __future__ import annotations

import numpy as np
import pytest

from ggvqe import hamiltonian as ham
from ggvqe import lattice as lat
from ggvqe.ansatz import CircuitSpec

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H2 = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)

P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)
MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=np.complex128)  # |-><-|


def embed_one(n: int, q: int, u: np.ndarray) -> np.ndarray:
    """kron-built embedding; qubit 0 is the least significant factor."""
    m = np.array([[1.0]], dtype=np.complex128)
    for site in range(n):
        factor = u if site == q else I2
        m = np.kron(factor, m)
    return m


def embed_two(n: int, q1: int, q2: int, u4: np.ndarray) -> np.ndarray:
    """Embed a 4x4 matrix acting on (q1, q2), q1 the more significant index."""
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim):
        ri = ((i >> q1) & 1) << 1 | ((i >> q2) & 1)
        base_i = i & ~((1 << q1) | (1 << q2))
        for rj in range(4):
            j = base_i | ((rj >> 1) << q1) | ((rj & 1) << q2)
            m[i, j] = u4[ri, rj]
    return m


def rz_mat(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)]).astype(np.complex128)


def ry_mat(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def two_rot(pauli: np.ndarray, t: float) -> np.ndarray:
    pp = np.kron(pauli, pauli)
    return np.cos(t / 2) * np.eye(4) - 1j * np.sin(t / 2) * pp


def czt_mat(t: float) -> np.ndarray:
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * t)]).astype(np.complex128)


def cxt_mat(t: float) -> np.ndarray:
    # control is the more significant index
    return np.kron(I2 - P1, I2) + np.kron(
        P1, np.eye(2) + (np.exp(1j * t) - 1.0) * MINUS
    )


def dense_circuit_unitary(spec: CircuitSpec, params) -> np.ndarray:
    """Full-circuit unitary assembled gate by gate with kron embeddings."""
    n = spec.n_qubits
    u = np.eye(1 << n, dtype=np.complex128)
    for gate in spec.gates:
        t = float(params[gate.param_index])
        if gate.kind == "RZ":
            g = embed_one(n, gate.qubits[0], rz_mat(t))
        elif gate.kind == "RY":
            g = embed_one(n, gate.qubits[0], ry_mat(t))
        elif gate.kind == "CZT":
            g = embed_two(n, gate.qubits[0], gate.qubits[1], czt_mat(t))
        elif gate.kind == "CXT":
            g = embed_two(n, gate.qubits[0], gate.qubits[1], cxt_mat(t))
        elif gate.kind == "RXX":
            g = embed_two(n, gate.qubits[0], gate.qubits[1], two_rot(X, t))
        elif gate.kind == "RYY":
            g = embed_two(n, gate.qubits[0], gate.qubits[1], two_rot(Y, t))
        elif gate.kind == "RZZ":
            g = embed_two(n, gate.qubits[0], gate.qubits[1], two_rot(Z, t))
        else:
            raise AssertionError(gate.kind)
        u = g @ u
    return u


def dense_pauli_sum(h: ham.PauliSum) -> np.ndarray:
    """kron-built matrix of a Pauli sum (oracle for the mask-based builder)."""
    table = {"I": I2, "X": X, "Y": Y, "Z": Z}
    dim = 1 << h.n_qubits
    m = np.zeros((dim, dim), dtype=np.complex128)
    for term in h.terms:
        factor = np.array([[1.0]], dtype=np.complex128)
        for letter in term.letters:  # qubit 0 first => least significant
            factor = np.kron(table[letter], factor)
        m += term.coefficient * factor
    return m


# -- GF(2) stabilizer entropy oracle ----------------------------------------

def _gf2_rank(rows: list[int]) -> int:
    rank = 0
    pivots = []
    for row in rows:
        for p in pivots:
            row = min(row, row ^ p)
        if row:
            pivots.append(row)
            rank += 1
    return rank


def stabilizer_entropy_bits(x_masks: list[int], z_masks: list[int],
                            n_qubits: int, region: tuple[int, ...]) -> int:
    """S(region) in bits for the stabilizer state fixed by the generators.

    Uses S = |R| - log2 |G_R| with |G_R| counted by rank over GF(2): the
    group elements supported inside R are the nullspace of the restriction
    map onto the complement, and the generators here have pure X or pure Z
    type so the symplectic bookkeeping reduces to two independent ranks.
    """
    comp_mask = 0
    for q in range(n_qubits):
        if q not in region:
            comp_mask |= 1 << q
    n_gen = len(x_masks) + len(z_masks)
    full_rank = _gf2_rank(list(x_masks)) + _gf2_rank(list(z_masks))
    restricted = _gf2_rank([m & comp_mask for m in x_masks]) + _gf2_rank(
        [m & comp_mask for m in z_masks]
    )
    assert n_gen >= full_rank
    k_region = full_rank - restricted
    return len(region) - k_region


def toric_stabilizer_masks(p_rows: int = 2, p_cols: int = 2):
    toric = lat.build_toric_edge(p_rows, p_cols)
    x_masks = [sum(1 << q for q in v) for v in toric.vertices]
    z_masks = [sum(1 << q for q in p) for p in toric.plaquettes]
    return x_masks, z_masks, toric.n_sites


@pytest.fixture(scope="session")
def toric_2x2():
    return lat.build_toric_edge(2, 2)


@pytest.fixture(scope="session")
def toric_ground_h0(toric_2x2):
    h = ham.toric_code_hamiltonian(toric_2x2, 0.0)
    energy, state = ham.ground_energy(h, "lanczos")
    return energy, state


@pytest.fixture(scope="session")
def toric_ground_h1(toric_2x2):
    h = ham.toric_code_hamiltonian(toric_2x2, 1.0)
    energy, state = ham.ground_energy(h, "lanczos")
    return energy, state
