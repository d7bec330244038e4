"""Compiled kernels for circuit execution, gradients, and Pauli-sum action.

This module is the fast path behind ``vqe`` and ``analysis``.  The public
statevector operations in :mod:`ggvqe.statevector` stay the reference
implementation; the test suite pins the two against each other.  All
kernels are serial and apply gates in tape order, so results are
deterministic for a fixed input.
"""

from __future__ import annotations

import functools

import numpy as np
from numba import njit

from .ansatz import CircuitSpec

_KIND_CODES = {"RZ": 0, "RY": 1, "CZT": 2, "CXT": 3, "RXX": 4, "RYY": 5, "RZZ": 6}


@functools.lru_cache(maxsize=256)
def circuit_tape(spec: CircuitSpec):
    """Flat array encoding of a circuit, cached per spec."""
    g = len(spec.gates)
    kinds = np.empty(g, dtype=np.int8)
    qa = np.empty(g, dtype=np.int64)
    qb = np.empty(g, dtype=np.int64)
    pidx = np.empty(g, dtype=np.int64)
    for i, gate in enumerate(spec.gates):
        kinds[i] = _KIND_CODES[gate.kind]
        qa[i] = gate.qubits[0]
        qb[i] = gate.qubits[1] if len(gate.qubits) == 2 else -1
        pidx[i] = gate.param_index
    return kinds, qa, qb, pidx


@njit(cache=True, inline="always")
def _ins(i, q):
    return ((i >> q) << (q + 1)) | (i & ((1 << q) - 1))


@njit(cache=True)
def _rz_ip(amps, n, q, th):
    p0 = np.exp(-0.5j * th)
    p1 = np.conj(p0)
    bit = 1 << q
    for i in range(1 << (n - 1)):
        i0 = _ins(i, q)
        amps[i0] = p0 * amps[i0]
        amps[i0 | bit] = p1 * amps[i0 | bit]


@njit(cache=True)
def _ry_ip(amps, n, q, th):
    c = np.cos(0.5 * th)
    s = np.sin(0.5 * th)
    bit = 1 << q
    for i in range(1 << (n - 1)):
        i0 = _ins(i, q)
        i1 = i0 | bit
        a0 = amps[i0]
        a1 = amps[i1]
        amps[i0] = c * a0 - s * a1
        amps[i1] = s * a0 + c * a1


@njit(cache=True)
def _czt_ip(amps, n, q1, q2, th):
    ph = np.exp(1j * th)
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    b11 = (1 << q1) | (1 << q2)
    for i in range(1 << (n - 2)):
        i11 = _ins(_ins(i, lo), hi) | b11
        amps[i11] = ph * amps[i11]


@njit(cache=True)
def _cxt_ip(amps, n, qc, qt, th):
    # exp(i th |1><1|_c x |-><-|_t)
    g = 0.5 * (np.exp(1j * th) - 1.0)
    lo, hi = (qc, qt) if qc < qt else (qt, qc)
    bc = 1 << qc
    bt = 1 << qt
    for i in range(1 << (n - 2)):
        i0 = _ins(_ins(i, lo), hi) | bc
        i1 = i0 | bt
        a0 = amps[i0]
        a1 = amps[i1]
        amps[i0] = (1.0 + g) * a0 - g * a1
        amps[i1] = -g * a0 + (1.0 + g) * a1


@njit(cache=True)
def _rxx_ip(amps, n, q1, q2, th):
    c = np.cos(0.5 * th)
    s = np.sin(0.5 * th)
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    b1 = 1 << q1
    b2 = 1 << q2
    for i in range(1 << (n - 2)):
        i00 = _ins(_ins(i, lo), hi)
        i01 = i00 | b2
        i10 = i00 | b1
        i11 = i00 | b1 | b2
        a00, a01, a10, a11 = amps[i00], amps[i01], amps[i10], amps[i11]
        amps[i00] = c * a00 - 1j * s * a11
        amps[i01] = c * a01 - 1j * s * a10
        amps[i10] = c * a10 - 1j * s * a01
        amps[i11] = c * a11 - 1j * s * a00


@njit(cache=True)
def _ryy_ip(amps, n, q1, q2, th):
    c = np.cos(0.5 * th)
    s = np.sin(0.5 * th)
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    b1 = 1 << q1
    b2 = 1 << q2
    for i in range(1 << (n - 2)):
        i00 = _ins(_ins(i, lo), hi)
        i01 = i00 | b2
        i10 = i00 | b1
        i11 = i00 | b1 | b2
        a00, a01, a10, a11 = amps[i00], amps[i01], amps[i10], amps[i11]
        amps[i00] = c * a00 + 1j * s * a11
        amps[i01] = c * a01 - 1j * s * a10
        amps[i10] = c * a10 - 1j * s * a01
        amps[i11] = c * a11 + 1j * s * a00


@njit(cache=True)
def _rzz_ip(amps, n, q1, q2, th):
    pe = np.exp(-0.5j * th)
    po = np.conj(pe)
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    b1 = 1 << q1
    b2 = 1 << q2
    for i in range(1 << (n - 2)):
        i00 = _ins(_ins(i, lo), hi)
        amps[i00] = pe * amps[i00]
        amps[i00 | b2] = po * amps[i00 | b2]
        amps[i00 | b1] = po * amps[i00 | b1]
        amps[i00 | b1 | b2] = pe * amps[i00 | b1 | b2]


@njit(cache=True)
def _apply_gate(amps, n, kind, a, b, th):
    if kind == 0:
        _rz_ip(amps, n, a, th)
    elif kind == 1:
        _ry_ip(amps, n, a, th)
    elif kind == 2:
        _czt_ip(amps, n, a, b, th)
    elif kind == 3:
        _cxt_ip(amps, n, a, b, th)
    elif kind == 4:
        _rxx_ip(amps, n, a, b, th)
    elif kind == 5:
        _ryy_ip(amps, n, a, b, th)
    else:
        _rzz_ip(amps, n, a, b, th)


@njit(cache=True)
def _run_tape(amps, n, kinds, qa, qb, angles):
    for t in range(kinds.shape[0]):
        _apply_gate(amps, n, kinds[t], qa[t], qb[t], angles[t])


# -- generator overlaps <b| dU/dtheta U^dag |psi> with psi = U|a> -----------
# Each gate is exp(theta * G) with anti-Hermitian theta-derivative generator;
# the functions below return <b| G |psi> for the frozen conventions.

@njit(cache=True)
def _gd_rz(bv, psi, n, q):
    bit = 1 << q
    acc = 0.0j
    for i in range(1 << (n - 1)):
        i0 = _ins(i, q)
        i1 = i0 | bit
        acc += np.conj(bv[i0]) * psi[i0] - np.conj(bv[i1]) * psi[i1]
    return -0.5j * acc


@njit(cache=True)
def _gd_ry(bv, psi, n, q):
    bit = 1 << q
    acc = 0.0j
    for i in range(1 << (n - 1)):
        i0 = _ins(i, q)
        i1 = i0 | bit
        acc += np.conj(bv[i1]) * psi[i0] - np.conj(bv[i0]) * psi[i1]
    return 0.5 * acc


@njit(cache=True)
def _gd_czt(bv, psi, n, q1, q2):
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    b11 = (1 << q1) | (1 << q2)
    acc = 0.0j
    for i in range(1 << (n - 2)):
        i11 = _ins(_ins(i, lo), hi) | b11
        acc += np.conj(bv[i11]) * psi[i11]
    return 1j * acc


@njit(cache=True)
def _gd_cxt(bv, psi, n, qc, qt):
    lo, hi = (qc, qt) if qc < qt else (qt, qc)
    bc = 1 << qc
    bt = 1 << qt
    acc = 0.0j
    for i in range(1 << (n - 2)):
        i0 = _ins(_ins(i, lo), hi) | bc
        i1 = i0 | bt
        d = psi[i0] - psi[i1]
        acc += np.conj(bv[i0]) * d - np.conj(bv[i1]) * d
    return 0.5j * acc


@njit(cache=True)
def _gd_rxx(bv, psi, n, q1, q2):
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    b1 = 1 << q1
    b2 = 1 << q2
    acc = 0.0j
    for i in range(1 << (n - 2)):
        i00 = _ins(_ins(i, lo), hi)
        i01 = i00 | b2
        i10 = i00 | b1
        i11 = i00 | b1 | b2
        acc += (
            np.conj(bv[i00]) * psi[i11]
            + np.conj(bv[i01]) * psi[i10]
            + np.conj(bv[i10]) * psi[i01]
            + np.conj(bv[i11]) * psi[i00]
        )
    return -0.5j * acc


@njit(cache=True)
def _gd_ryy(bv, psi, n, q1, q2):
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    b1 = 1 << q1
    b2 = 1 << q2
    acc = 0.0j
    for i in range(1 << (n - 2)):
        i00 = _ins(_ins(i, lo), hi)
        i01 = i00 | b2
        i10 = i00 | b1
        i11 = i00 | b1 | b2
        acc += (
            -np.conj(bv[i00]) * psi[i11]
            + np.conj(bv[i01]) * psi[i10]
            + np.conj(bv[i10]) * psi[i01]
            - np.conj(bv[i11]) * psi[i00]
        )
    return -0.5j * acc


@njit(cache=True)
def _gd_rzz(bv, psi, n, q1, q2):
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    b1 = 1 << q1
    b2 = 1 << q2
    acc = 0.0j
    for i in range(1 << (n - 2)):
        i00 = _ins(_ins(i, lo), hi)
        i01 = i00 | b2
        i10 = i00 | b1
        i11 = i00 | b1 | b2
        acc += (
            np.conj(bv[i00]) * psi[i00]
            - np.conj(bv[i01]) * psi[i01]
            - np.conj(bv[i10]) * psi[i10]
            + np.conj(bv[i11]) * psi[i11]
        )
    return -0.5j * acc


@njit(cache=True)
def _adjoint_pass(psi, bv, n, kinds, qa, qb, angles, pidx, grad):
    """Backward sweep filling grad; psi and bv are destroyed."""
    for t in range(kinds.shape[0] - 1, -1, -1):
        k = kinds[t]
        a = qa[t]
        b = qb[t]
        if k == 0:
            acc = _gd_rz(bv, psi, n, a)
        elif k == 1:
            acc = _gd_ry(bv, psi, n, a)
        elif k == 2:
            acc = _gd_czt(bv, psi, n, a, b)
        elif k == 3:
            acc = _gd_cxt(bv, psi, n, a, b)
        elif k == 4:
            acc = _gd_rxx(bv, psi, n, a, b)
        elif k == 5:
            acc = _gd_ryy(bv, psi, n, a, b)
        else:
            acc = _gd_rzz(bv, psi, n, a, b)
        grad[pidx[t]] += 2.0 * acc.real
        _apply_gate(psi, n, k, a, b, -angles[t])
        _apply_gate(bv, n, k, a, b, -angles[t])


@njit(cache=True)
def _pauli_apply(src, dst, flips, signs, prefs):
    dst[:] = 0.0
    for t in range(flips.shape[0]):
        f = flips[t]
        p = prefs[t]
        sg = signs[t]
        for i in range(src.shape[0]):
            dst[i ^ f] += (p * sg[i]) * src[i]


@njit(cache=True)
def _pauli_expect(psi, flips, signs, prefs):
    acc = 0.0j
    for t in range(flips.shape[0]):
        f = flips[t]
        sg = signs[t]
        sub = 0.0j
        for i in range(psi.shape[0]):
            sub += np.conj(psi[i ^ f]) * (sg[i] * psi[i])
        acc += prefs[t] * sub
    return acc


# -- python-facing entry points ---------------------------------------------

def run_circuit(spec: CircuitSpec, params, init: np.ndarray | None = None) -> np.ndarray:
    """U(params)|init> as a fresh amplitude array (default |0...0>)."""
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (spec.param_count,):
        raise ValueError(f"expected {spec.param_count} parameters, got {params.shape}")
    if init is None:
        amps = np.zeros(1 << spec.n_qubits, dtype=np.complex128)
        amps[0] = 1.0
    else:
        amps = np.array(init, dtype=np.complex128)
    kinds, qa, qb, pidx = circuit_tape(spec)
    _run_tape(amps, spec.n_qubits, kinds, qa, qb, params[pidx])
    return amps


def adjoint_gradient(spec: CircuitSpec, params, flips, signs, prefs,
                     init: np.ndarray | None = None):
    """(energy, dE/dparams) for <psi|H|psi> via one reverse sweep.

    Produces the same values as the two-term shift rule (both are the exact
    derivative) at a fraction of the cost.
    """
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (spec.param_count,):
        raise ValueError(f"expected {spec.param_count} parameters, got {params.shape}")
    psi = run_circuit(spec, params, init)
    bv = np.empty_like(psi)
    _pauli_apply(psi, bv, flips, signs, prefs)
    energy = np.vdot(psi, bv)
    if abs(energy.imag) > 1e-9:
        raise ValueError(f"expectation has imaginary part {energy.imag}")
    kinds, qa, qb, pidx = circuit_tape(spec)
    grad = np.zeros(spec.param_count, dtype=np.float64)
    _adjoint_pass(psi, bv, spec.n_qubits, kinds, qa, qb, params[pidx], pidx, grad)
    return float(energy.real), grad
