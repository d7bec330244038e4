"""Dense statevector primitives: gates, overlaps, reduced states, entropies.

Bit ordering is fixed throughout the package: qubit 0 is the least
significant bit of a basis index, so basis index b encodes qubit q in bit
(b >> q) & 1.  The ``qsv1`` dump format below persists the same ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 24
MAX_REDUCED_QUBITS = 14

UNITARY_ATOL = 1e-10
HERMITIAN_ATOL = 1e-10
ENTROPY_EIG_FLOOR = 1e-12


@dataclass
class StateVector:
    """Pure state of ``qubit_count`` qubits as a dense complex array."""

    qubit_count: int
    amplitudes: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.qubit_count, self.amplitudes.copy())

    @property
    def dim(self) -> int:
        return 1 << self.qubit_count

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix."""

    dim: int
    entries: np.ndarray

    def validate(self, atol: float = HERMITIAN_ATOL) -> None:
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError(f"entries shape {self.entries.shape} != ({self.dim}, {self.dim})")
        if np.abs(self.entries - self.entries.conj().T).max() > atol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(self.entries) - 1.0) > atol:
            raise ValueError(f"trace {np.trace(self.entries)} != 1")
        w = np.linalg.eigvalsh(self.entries)
        if w.min() < -atol:
            raise ValueError(f"negative eigenvalue {w.min()}")


def zero_state(n: int) -> StateVector:
    """|0...0> on n qubits."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count {n} outside 1..{MAX_QUBITS}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


def basis_state(n: int, bits: dict[int, int]) -> StateVector:
    """Computational basis state with the given qubits set to 1."""
    index = 0
    for q, b in bits.items():
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for n={n}")
        if b:
            index |= 1 << q
    sv = zero_state(n)
    sv.amplitudes[0] = 0.0
    sv.amplitudes[index] = 1.0
    return sv


def random_statevector(n: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    v /= np.linalg.norm(v)
    return StateVector(n, v.astype(np.complex128))


def _check_qubit(state: StateVector, q: int) -> None:
    if not 0 <= q < state.qubit_count:
        raise IndexError(f"qubit {q} out of range for {state.qubit_count}-qubit state")


def _check_unitary(u: np.ndarray, dim: int) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (dim, dim):
        raise ValueError(f"expected {dim}x{dim} matrix, got {u.shape}")
    if np.abs(u.conj().T @ u - np.eye(dim)).max() > UNITARY_ATOL:
        raise ValueError("matrix is not unitary")
    return u


def apply_one_qubit(state: StateVector, q: int, u: np.ndarray) -> StateVector:
    """Apply a 2x2 unitary to qubit q, in place."""
    _check_qubit(state, q)
    u = _check_unitary(u, 2)
    n = state.qubit_count
    v = state.amplitudes.reshape(1 << (n - q - 1), 2, 1 << q)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    v[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1
    return state


def _pair_blocks(state: StateVector, q1: int, q2: int):
    """5-axis view plus the axis positions of (q1, q2)."""
    n = state.qubit_count
    hi, lo = max(q1, q2), min(q1, q2)
    v = state.amplitudes.reshape(
        1 << (n - hi - 1), 2, 1 << (hi - lo - 1), 2, 1 << lo
    )
    ax1 = 1 if q1 == hi else 3
    ax2 = 1 if q2 == hi else 3
    return v, ax1, ax2


def apply_cz_theta(state: StateVector, q1: int, q2: int, theta: float) -> StateVector:
    """Multiply amplitudes with both qubits in |1> by exp(i*theta), in place."""
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise IndexError("control-Z requires two distinct qubits")
    v, _, _ = _pair_blocks(state, q1, q2)
    v[:, 1, :, 1, :] *= np.exp(1j * theta)
    return state


def apply_cx_theta(state: StateVector, control: int, target: int, theta: float) -> StateVector:
    """Hadamard-conjugated CZ(theta) on the target: exp(i*theta |1><1| x |-><-|)."""
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise IndexError("control-X requires two distinct qubits")
    g = (np.exp(1j * theta) - 1.0) / 2.0
    v, axc, axt = _pair_blocks(state, control, target)
    if axc == 1:
        b0 = v[:, 1, :, 0, :].copy()
        b1 = v[:, 1, :, 1, :]
        v[:, 1, :, 0, :] = (1.0 + g) * b0 - g * b1
        v[:, 1, :, 1, :] = -g * b0 + (1.0 + g) * b1
    else:
        b0 = v[:, 0, :, 1, :].copy()
        b1 = v[:, 1, :, 1, :]
        v[:, 0, :, 1, :] = (1.0 + g) * b0 - g * b1
        v[:, 1, :, 1, :] = -g * b0 + (1.0 + g) * b1
    return state


def apply_two_qubit(state: StateVector, q1: int, q2: int, u: np.ndarray) -> StateVector:
    """Apply a 4x4 unitary to (q1, q2), q1 being the more significant index of u."""
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise IndexError("two-qubit gate requires distinct qubits")
    u = _check_unitary(u, 4)
    v, ax1, _ = _pair_blocks(state, q1, q2)

    def block(i: int, j: int):
        # i = bit of q1, j = bit of q2
        if ax1 == 1:
            return v[:, i, :, j, :]
        return v[:, j, :, i, :]

    olds = [block(i, j).copy() for i in (0, 1) for j in (0, 1)]
    for r, (i, j) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        acc = u[r, 0] * olds[0] + u[r, 1] * olds[1] + u[r, 2] * olds[2] + u[r, 3] * olds[3]
        block(i, j)[...] = acc
    return state


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    if a.qubit_count != b.qubit_count:
        raise ValueError("states have different qubit counts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def reduced_density_matrix(state: StateVector, keep) -> DensityMatrix:
    """Partial trace onto ``keep``; the smallest kept qubit becomes bit 0."""
    keep = sorted(set(int(q) for q in keep))
    n = state.qubit_count
    if not keep:
        raise ValueError("keep must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep {keep} out of range for n={n}")
    if len(keep) > MAX_REDUCED_QUBITS:
        raise ValueError(f"cannot keep more than {MAX_REDUCED_QUBITS} qubits")
    rest = [q for q in range(n) if q not in keep]
    a = state.amplitudes.reshape([2] * n)
    # numpy axis for qubit q is n-1-q; most significant kept qubit first
    perm = [n - 1 - q for q in reversed(keep)] + [n - 1 - q for q in reversed(rest)]
    m = np.transpose(a, perm).reshape(1 << len(keep), 1 << len(rest))
    rho = m @ m.conj().T
    return DensityMatrix(1 << len(keep), rho)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum(lam * ln(lam)) over eigenvalues above the numerical floor (nats)."""
    m = rho.entries
    if np.abs(m - m.conj().T).max() > HERMITIAN_ATOL:
        raise ValueError("entropy input is not Hermitian")
    w = np.linalg.eigvalsh(m)
    w = w[w > ENTROPY_EIG_FLOOR]
    return float(-(w * np.log(w)).sum()) if w.size else 0.0


# -- state dump format ------------------------------------------------------
#
# Line 1: "qsv1 <N>", then 2**N lines "re,im" in basis-index order (qubit 0
# is the least significant index bit), 17 significant digits.

def save_state(path, state: StateVector) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"qsv1 {state.qubit_count}\n")
        for amp in state.amplitudes:
            fh.write(f"{amp.real:.17g},{amp.imag:.17g}\n")


def load_state(path) -> StateVector:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2 or header[0] != "qsv1":
            raise ValueError(f"{path}: not a qsv1 state dump")
        n = int(header[1])
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"{path}: qubit count {n} outside 1..{MAX_QUBITS}")
        amps = np.empty(1 << n, dtype=np.complex128)
        for i in range(1 << n):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: truncated after {i} amplitudes")
            re_s, im_s = line.split(",")
            amps[i] = complex(float(re_s), float(im_s))
    sv = StateVector(n, amps)
    if abs(sv.norm() - 1.0) > 1e-6:
        raise ValueError(f"{path}: state norm {sv.norm()} is not 1")
    return sv
