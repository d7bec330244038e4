"""Parameterized circuit templates built from a lattice and a layer count.

Every layer starts with a rotation triple RZ, RY, RZ on each site (applied
in that order, i.e. the matrix product RZ(t3) RY(t2) RZ(t1)), followed by a
two-qubit block that depends on the ansatz kind:

  gz      one CZ(theta) per link                       1 global gate/layer
  gzx     CZ(theta) then CX(theta) on every link       2 global gates/layer
  gzxh    CZ(theta) on odd links, CX(theta) on even    2 global gates/layer
  cartan  RXX, RYY, RZZ per link (not globally implementable)

Conventions: RZ(t) = exp(-i t Z/2), RY(t) = exp(-i t Y/2), RXX and friends
exp(-i t XX/2); CZ(t) multiplies the |11> amplitude by exp(i t) and CX(t)
is its Hadamard conjugate on the target.  For CX the first-listed link
endpoint is the control.  Parameters are indexed in emission order and each
index is used by exactly one gate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import Lattice, all_to_all_plaquette_links, split_links_by_parity
from . import statevector as sv

ANSATZ_KINDS = ("gz", "gzx", "gzxh", "cartan")

RZ, RY, CZT, CXT, RXX, RYY, RZZ = "RZ", "RY", "CZT", "CXT", "RXX", "RYY", "RZZ"
TWO_QUBIT_KINDS = (CZT, CXT, RXX, RYY, RZZ)


@dataclass(frozen=True)
class GateInstr:
    kind: str
    qubits: tuple[int, ...]
    param_index: int


@dataclass(frozen=True)
class CircuitSpec:
    n_qubits: int
    gates: tuple[GateInstr, ...]
    param_count: int
    layers: int
    ansatz_kind: str
    global_gate_count: int | None
    layer_boundaries: tuple[tuple[int, int], ...]


class _Builder:
    def __init__(self, n_qubits: int):
        self.n = n_qubits
        self.gates: list[GateInstr] = []
        self.next_param = 0

    def emit(self, kind: str, *qubits: int) -> None:
        self.gates.append(GateInstr(kind, tuple(qubits), self.next_param))
        self.next_param += 1

    def rotation_layer(self) -> None:
        for q in range(self.n):
            self.emit(RZ, q)
            self.emit(RY, q)
            self.emit(RZ, q)


def _build(lattice: Lattice, k: int, kind: str, links, global_per_layer) -> CircuitSpec:
    if k < 1:
        raise ValueError(f"layer count must be >= 1, got {k}")
    b = _Builder(lattice.n_sites)
    boundaries = []
    for _ in range(k):
        start = len(b.gates)
        b.rotation_layer()
        if kind == "gz":
            for a, c, _ in links:
                b.emit(CZT, a, c)
        elif kind == "gzx":
            for a, c, _ in links:
                b.emit(CZT, a, c)
            for a, c, _ in links:
                b.emit(CXT, a, c)
        elif kind == "gzxh":
            odd, even = split_links_by_parity(links)
            for a, c, _ in odd:
                b.emit(CZT, a, c)
            for a, c, _ in even:
                b.emit(CXT, a, c)
        elif kind == "cartan":
            for a, c, _ in links:
                b.emit(RXX, a, c)
                b.emit(RYY, a, c)
                b.emit(RZZ, a, c)
        else:
            raise ValueError(f"unknown ansatz kind {kind!r}")
        boundaries.append((start, len(b.gates)))
    return CircuitSpec(
        n_qubits=lattice.n_sites,
        gates=tuple(b.gates),
        param_count=b.next_param,
        layers=k,
        ansatz_kind=kind,
        global_gate_count=None if global_per_layer is None else global_per_layer * k,
        layer_boundaries=tuple(boundaries),
    )


def build_gz(lattice: Lattice, k: int) -> CircuitSpec:
    return _build(lattice, k, "gz", lattice.links, 1)


def build_gzx(lattice: Lattice, k: int) -> CircuitSpec:
    return _build(lattice, k, "gzx", lattice.links, 2)


def build_gzxh(lattice: Lattice, k: int) -> CircuitSpec:
    return _build(lattice, k, "gzxh", lattice.links, 2)


def build_cartan(lattice: Lattice, k: int) -> CircuitSpec:
    return _build(lattice, k, "cartan", lattice.links, None)


_BUILDERS = {
    "gz": build_gz,
    "gzx": build_gzx,
    "gzxh": build_gzxh,
    "cartan": build_cartan,
}

_GLOBAL_PER_LAYER = {"gz": 1, "gzx": 2, "gzxh": 2, "cartan": None}


def build_ansatz(lattice: Lattice, k: int, kind: str) -> CircuitSpec:
    if kind not in _BUILDERS:
        raise ValueError(f"unknown ansatz kind {kind!r}; expected one of {ANSATZ_KINDS}")
    return _BUILDERS[kind](lattice, k)


def build_all_variant(lattice: Lattice, k: int, base_kind: str) -> CircuitSpec:
    """Square-lattice variant with all-to-all links inside each plaquette."""
    if lattice.kind != "square":
        raise ValueError("the all-to-all variant is defined on square lattices")
    if base_kind not in _BUILDERS:
        raise ValueError(f"unknown ansatz kind {base_kind!r}")
    links = all_to_all_plaquette_links(lattice)
    spec = _build(lattice, k, base_kind, links, _GLOBAL_PER_LAYER[base_kind])
    return CircuitSpec(
        n_qubits=spec.n_qubits,
        gates=spec.gates,
        param_count=spec.param_count,
        layers=spec.layers,
        ansatz_kind=base_kind + "_all",
        global_gate_count=spec.global_gate_count,
        layer_boundaries=spec.layer_boundaries,
    )


# -- reference execution ----------------------------------------------------

def _rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _two_site_rotation(pauli: np.ndarray, theta: float) -> np.ndarray:
    pp = np.kron(pauli, pauli)
    return np.cos(theta / 2.0) * np.eye(4) - 1j * np.sin(theta / 2.0) * pp


_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def apply_gate(state: sv.StateVector, gate: GateInstr, theta: float) -> sv.StateVector:
    """Apply one instruction through the reference statevector kernels."""
    if gate.kind == RZ:
        return sv.apply_one_qubit(state, gate.qubits[0], _rz(theta))
    if gate.kind == RY:
        return sv.apply_one_qubit(state, gate.qubits[0], _ry(theta))
    if gate.kind == CZT:
        return sv.apply_cz_theta(state, gate.qubits[0], gate.qubits[1], theta)
    if gate.kind == CXT:
        return sv.apply_cx_theta(state, gate.qubits[0], gate.qubits[1], theta)
    if gate.kind == RXX:
        return sv.apply_two_qubit(state, gate.qubits[0], gate.qubits[1], _two_site_rotation(_X, theta))
    if gate.kind == RYY:
        return sv.apply_two_qubit(state, gate.qubits[0], gate.qubits[1], _two_site_rotation(_Y, theta))
    if gate.kind == RZZ:
        return sv.apply_two_qubit(state, gate.qubits[0], gate.qubits[1], _two_site_rotation(_Z, theta))
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def apply_circuit_reference(spec: CircuitSpec, params, state: sv.StateVector) -> sv.StateVector:
    """Run the circuit gate by gate with the reference kernels (slow path)."""
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (spec.param_count,):
        raise ValueError(f"expected {spec.param_count} parameters, got {params.shape}")
    for gate in spec.gates:
        apply_gate(state, gate, float(params[gate.param_index]))
    return state


def circuit_to_json(spec: CircuitSpec) -> dict:
    return {
        "n_qubits": spec.n_qubits,
        "ansatz_kind": spec.ansatz_kind,
        "layers": spec.layers,
        "param_count": spec.param_count,
        "global_gate_count": spec.global_gate_count,
        "layer_boundaries": [list(b) for b in spec.layer_boundaries],
        "gates": [
            {"kind": g.kind, "qubits": list(g.qubits), "param": g.param_index}
            for g in spec.gates
        ],
    }
