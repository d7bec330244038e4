"""Pauli-sum Hamiltonians, expectation values, and exact diagonalization.

Letters in a Pauli string are indexed by qubit: ``letters[q]`` is the
operator on qubit q.  All coefficients are real, so every sum here is
Hermitian by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import engine
from .lattice import Lattice, build_square
from .statevector import StateVector

DENSE_MAX_QUBITS = 12
LANCZOS_MAX_QUBITS = 20
LANCZOS_MAX_ITER = 500
LANCZOS_EIG_TOL = 1e-10
GROUND_RESIDUAL_TOL = 1e-8


class NumericalError(RuntimeError):
    """An iterative numerical routine failed to reach its tolerance."""


@dataclass(frozen=True)
class PauliString:
    coefficient: float
    letters: str  # one of "IXYZ" per qubit, position = qubit index

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ValueError(f"non-finite coefficient {self.coefficient}")
        bad = set(self.letters) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli letters {bad}")


@dataclass(frozen=True)
class PauliSum:
    n_qubits: int
    terms: tuple[PauliString, ...]

    def __post_init__(self):
        for t in self.terms:
            if len(t.letters) != self.n_qubits:
                raise ValueError(
                    f"term {t.letters!r} has {len(t.letters)} letters, expected {self.n_qubits}"
                )


def _string(n: int, ops: dict[int, str], coeff: float) -> PauliString:
    letters = ["I"] * n
    for q, op in ops.items():
        letters[q] = op
    return PauliString(coeff, "".join(letters))


def toric_code_hamiltonian(lattice: Lattice, h: float) -> PauliSum:
    """-(1-h) [sum_v A_v + sum_p B_p] - h sum_j Z_j on a toric-edge lattice.

    A_v is the product of X over the edges at vertex v, B_p the product of Z
    over the four edges of plaquette p.  Zero-coefficient groups are dropped.
    """
    if lattice.kind != "toric_edge":
        raise ValueError("toric code Hamiltonian requires a toric_edge lattice")
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"field h={h} outside [0, 1]")
    n = lattice.n_sites
    terms = []
    if 1.0 - h != 0.0:
        for edges in lattice.vertices:
            terms.append(_string(n, {q: "X" for q in edges}, -(1.0 - h)))
        for edges in lattice.plaquettes:
            terms.append(_string(n, {q: "Z" for q in edges}, -(1.0 - h)))
    if h != 0.0:
        for q in range(n):
            terms.append(_string(n, {q: "Z"}, -h))
    return PauliSum(n, tuple(terms))


def heisenberg_j1j2(rows: int, cols: int, j2: float) -> PauliSum:
    """Spin-1/2 S.S bonds on a square lattice: nearest neighbors plus
    j2-weighted plaquette diagonals, open boundaries.

    Each bond contributes (XX + YY + ZZ)/4.
    """
    if rows < 2 or cols < 2:
        raise ValueError(f"heisenberg lattice needs rows, cols >= 2, got {rows}x{cols}")
    n = rows * cols
    bonds = [(a, b, 0.25) for a, b, _ in build_square(rows, cols).links]
    if j2 != 0.0:
        for r in range(rows - 1):
            for c in range(cols - 1):
                tl = r * cols + c
                bonds.append((tl, tl + cols + 1, 0.25 * j2))
                bonds.append((tl + 1, tl + cols, 0.25 * j2))
    terms = []
    for a, b, w in bonds:
        for op in "XYZ":
            terms.append(_string(n, {a: op, b: op}, w))
    return PauliSum(n, tuple(terms))


def z_probe(n: int, site: int) -> PauliSum:
    """Single Z on one qubit."""
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for n={n}")
    return PauliSum(n, (_string(n, {site: "Z"}, 1.0),))


# -- fast mask form ----------------------------------------------------------

class CompiledPauliSum:
    """Bitmask form of a PauliSum for the compiled kernels.

    For term t acting on basis state |b>:  P|b> = pref * sign[b] * |b ^ flip>
    with pref = coeff * i**n_Y, sign from the Y and Z occupations of b.
    """

    def __init__(self, h: PauliSum):
        self.n_qubits = h.n_qubits
        dim = 1 << h.n_qubits
        t_count = len(h.terms)
        self.flips = np.zeros(t_count, dtype=np.int64)
        self.prefs = np.zeros(t_count, dtype=np.complex128)
        self.signs = np.empty((t_count, dim), dtype=np.int8)
        idx = np.arange(dim, dtype=np.int64)
        for t, term in enumerate(h.terms):
            xm = ym = zm = 0
            for q, letter in enumerate(term.letters):
                bit = 1 << q
                if letter == "X":
                    xm |= bit
                elif letter == "Y":
                    ym |= bit
                elif letter == "Z":
                    zm |= bit
            ny = bin(ym).count("1")
            self.flips[t] = xm | ym
            self.prefs[t] = term.coefficient * (1j ** ny)
            self.signs[t] = 1 - 2 * (np.bitwise_count(idx & (ym | zm)).astype(np.int64) & 1)

    def apply(self, amps: np.ndarray) -> np.ndarray:
        out = np.empty_like(amps)
        engine._pauli_apply(amps, out, self.flips, self.signs, self.prefs)
        return out

    def expect(self, amps: np.ndarray) -> float:
        val = engine._pauli_expect(amps, self.flips, self.signs, self.prefs)
        if abs(val.imag) > 1e-9:
            raise ValueError(f"expectation has imaginary part {val.imag}")
        return float(val.real)


def expectation(state: StateVector, h: PauliSum) -> float:
    """<state| h |state>, evaluated term by term with vectorized numpy.

    Independent of the compiled kernel path; the two are cross-checked in
    the test suite.
    """
    if state.qubit_count != h.n_qubits:
        raise ValueError(
            f"state has {state.qubit_count} qubits, Hamiltonian {h.n_qubits}"
        )
    amps = state.amplitudes
    idx = np.arange(amps.size, dtype=np.int64)
    total = 0.0 + 0.0j
    for term in h.terms:
        xm = ym = zm = 0
        for q, letter in enumerate(term.letters):
            bit = 1 << q
            if letter == "X":
                xm |= bit
            elif letter == "Y":
                ym |= bit
            elif letter == "Z":
                zm |= bit
        sign = 1 - 2 * (np.bitwise_count(idx & (ym | zm)).astype(np.int64) & 1)
        pref = term.coefficient * (1j ** bin(ym).count("1"))
        # P|b> lands on index b ^ flip, so <psi|P|psi> pairs b with b ^ flip
        total += pref * np.sum(np.conj(amps[idx ^ (xm | ym)]) * sign * amps)
    if abs(total.imag) > 1e-9:
        raise ValueError(f"expectation has imaginary part {total.imag}")
    return float(total.real)


def dense_matrix(h: PauliSum) -> np.ndarray:
    """Full 2^N x 2^N matrix of the sum (N <= DENSE_MAX_QUBITS)."""
    if h.n_qubits > DENSE_MAX_QUBITS:
        raise ValueError(f"dense matrix limited to {DENSE_MAX_QUBITS} qubits")
    dim = 1 << h.n_qubits
    comp = CompiledPauliSum(h)
    m = np.zeros((dim, dim), dtype=np.complex128)
    idx = np.arange(dim, dtype=np.int64)
    for t in range(comp.flips.size):
        m[idx ^ comp.flips[t], idx] += comp.prefs[t] * comp.signs[t]
    return m


def _lanczos_ground(comp: CompiledPauliSum, seed: int):
    """Matrix-free Lanczos with full reorthogonalization."""
    dim = 1 << comp.n_qubits
    rng = np.random.default_rng(np.random.SeedSequence((0x1A2C, seed)))
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    basis = [v]
    alphas: list[float] = []
    betas: list[float] = []
    prev_e = np.inf
    ritz = None
    energy = np.nan
    for it in range(LANCZOS_MAX_ITER):
        w = comp.apply(basis[-1])
        a = float(np.vdot(basis[-1], w).real)
        alphas.append(a)
        w -= a * basis[-1]
        if betas:
            w -= betas[-1] * basis[-2]
        # full reorthogonalization keeps degenerate problems stable
        for u in basis:
            w -= np.vdot(u, w) * u
        t = np.diag(alphas)
        if betas:
            off = np.array(betas)
            t += np.diag(off, 1) + np.diag(off, -1)
        evals, evecs = np.linalg.eigh(t)
        energy = float(evals[0])
        converged = abs(energy - prev_e) <= LANCZOS_EIG_TOL
        prev_e = energy
        beta = float(np.linalg.norm(w))
        exhausted = beta < 1e-14
        if converged or exhausted or it == LANCZOS_MAX_ITER - 1:
            ritz = np.zeros(dim, dtype=np.complex128)
            for coef, u in zip(evecs[:, 0], basis):
                ritz += coef * u
            ritz /= np.linalg.norm(ritz)
            residual = float(np.linalg.norm(comp.apply(ritz) - energy * ritz))
            if residual <= GROUND_RESIDUAL_TOL:
                return energy, ritz
            if exhausted or it == LANCZOS_MAX_ITER - 1:
                raise NumericalError(
                    f"Lanczos stalled after {it + 1} iterations, residual {residual:.3e}"
                )
        basis.append(w / beta)
        betas.append(beta)
    raise NumericalError("Lanczos did not converge")  # pragma: no cover


def ground_energy(h: PauliSum, method: str = "lanczos", seed: int = 0):
    """Lowest eigenvalue and an eigenvector; residual <= 1e-8 guaranteed.

    ``dense`` diagonalizes the full matrix (N <= 12); ``lanczos`` is
    matrix-free (N <= 20) with full reorthogonalization, an iteration cap of
    500, and eigenvalue-change convergence at 1e-10.
    """
    if method == "dense":
        if h.n_qubits > DENSE_MAX_QUBITS:
            raise ValueError(f"dense method limited to {DENSE_MAX_QUBITS} qubits")
        evals, evecs = np.linalg.eigh(dense_matrix(h))
        energy = float(evals[0])
        vec = np.ascontiguousarray(evecs[:, 0])
    elif method == "lanczos":
        if h.n_qubits > LANCZOS_MAX_QUBITS:
            raise ValueError(f"lanczos method limited to {LANCZOS_MAX_QUBITS} qubits")
        energy, vec = _lanczos_ground(CompiledPauliSum(h), seed)
    else:
        raise ValueError(f"unknown method {method!r}; use 'dense' or 'lanczos'")
    state = StateVector(h.n_qubits, vec)
    comp = CompiledPauliSum(h)
    residual = float(np.linalg.norm(comp.apply(vec) - energy * vec))
    if residual > GROUND_RESIDUAL_TOL:
        raise NumericalError(f"ground state residual {residual:.3e} above tolerance")
    return energy, state


def pauli_sum_to_json(h: PauliSum) -> dict:
    return {
        "n_qubits": h.n_qubits,
        "terms": [{"coefficient": t.coefficient, "letters": t.letters} for t in h.terms],
    }
