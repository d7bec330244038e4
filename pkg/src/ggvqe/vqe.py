"""Variational ground-state training: gradients, Adam, ensembles.

A training instance initializes parameters i.i.d. uniform, then per epoch
computes the full energy gradient, applies an Adam update, and records the
energy, stopping early when the energy change between consecutive epochs
falls below the configured threshold.  Ensembles run many instances with
seeds ``seed + instance_id`` and aggregate with best-half and median rules.
"""

from __future__ import annotations

import concurrent.futures
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import engine
from .ansatz import CircuitSpec, build_all_variant, build_ansatz
from .hamiltonian import (
    CompiledPauliSum,
    PauliSum,
    heisenberg_j1j2,
    toric_code_hamiltonian,
)
from .lattice import build_chain, build_square, build_toric_edge
from .statevector import StateVector

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AdamConfig:
    step_size: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    """Declarative description of one training experiment."""

    ansatz_kind: str
    lattice_kind: str  # "chain" | "square" | "toric_edge"
    lattice_dims: tuple[int, ...]
    k: int
    model: str  # "toric" | "heisenberg"
    h: float = 0.0
    j2: float = 0.0
    max_epochs: int = 1000
    early_stop_delta: float = 1e-4
    instances: int = 100
    adam: AdamConfig = field(default_factory=AdamConfig)
    init_low: float = 0.0
    init_high: float = TWO_PI
    order_param_interval: int = 0
    seed: int = 0
    gradient_method: str = "adjoint"  # "adjoint" | "shift", identical values
    plaquette_links: str = "neighbor"  # "all" enables intra-plaquette all-to-all
    regions: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]] | None = None

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.instances < 1:
            raise ValueError("instances must be >= 1")
        if self.early_stop_delta <= 0:
            raise ValueError("early_stop_delta must be > 0")
        if self.gradient_method not in ("adjoint", "shift"):
            raise ValueError(f"unknown gradient method {self.gradient_method!r}")

    def build_lattice(self):
        if self.lattice_kind == "chain":
            return build_chain(*self.lattice_dims)
        if self.lattice_kind == "square":
            return build_square(*self.lattice_dims)
        if self.lattice_kind == "toric_edge":
            return build_toric_edge(*self.lattice_dims)
        raise ValueError(f"unknown lattice kind {self.lattice_kind!r}")

    def build(self) -> tuple[CircuitSpec, PauliSum]:
        lat = self.build_lattice()
        if self.plaquette_links == "all":
            circuit = build_all_variant(lat, self.k, self.ansatz_kind)
        else:
            circuit = build_ansatz(lat, self.k, self.ansatz_kind)
        if self.model == "toric":
            ham = toric_code_hamiltonian(lat, self.h)
        elif self.model == "heisenberg":
            ham = heisenberg_j1j2(*self.lattice_dims, self.j2)
        else:
            raise ValueError(f"unknown model {self.model!r}")
        return circuit, ham


@dataclass
class RunRecord:
    instance_id: int
    seed: int
    initial_energy: float
    energies: list[float]
    final_params: np.ndarray
    converged: bool
    gamma_samples: list[tuple[int, float]]
    wall_time: float
    diagnostic: str | None = None

    @property
    def final_energy(self) -> float:
        return self.energies[-1]

    def to_json_dict(self) -> dict:
        # wall_time is intentionally excluded: exported records must be a
        # pure function of (config, seed)
        return {
            "instance_id": self.instance_id,
            "seed": self.seed,
            "initial_energy": self.initial_energy,
            "energies": self.energies,
            "final_params": [float(p) for p in self.final_params],
            "converged": self.converged,
            "gamma_samples": [[e, g] for e, g in self.gamma_samples],
            "diagnostic": self.diagnostic,
        }


@dataclass
class AggregateReport:
    instances: int
    converged_count: int
    best_half_ids: list[int]
    best_half_mean_energy: float
    best_half_mean_gamma: float | None
    best_instance_id: int
    best_energy: float
    median_curve: list[float]
    fallback_all_runs: bool

    def to_json_dict(self) -> dict:
        return {
            "instances": self.instances,
            "converged_count": self.converged_count,
            "best_half_ids": self.best_half_ids,
            "best_half_mean_energy": self.best_half_mean_energy,
            "best_half_mean_gamma": self.best_half_mean_gamma,
            "best_instance_id": self.best_instance_id,
            "best_energy": self.best_energy,
            "median_curve": self.median_curve,
            "fallback_all_runs": self.fallback_all_runs,
        }


def evaluate(circuit: CircuitSpec, params, h: PauliSum,
             initial: StateVector | None = None) -> float:
    """Energy of the circuit output state."""
    comp = CompiledPauliSum(h)
    init = None if initial is None else initial.amplitudes
    return comp.expect(engine.run_circuit(circuit, params, init))


def gradient(circuit: CircuitSpec, params, h: PauliSum,
             initial: StateVector | None = None, method: str = "shift") -> np.ndarray:
    """dE/dtheta for every parameter.

    ``shift`` evaluates the two-term rule [E(t + pi/2) - E(t - pi/2)] / 2,
    valid for every gate kind here (all generators produce frequency-1
    energy curves).  ``adjoint`` returns the same values from one reverse
    sweep and is the training default.
    """
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (circuit.param_count,):
        raise ValueError(f"expected {circuit.param_count} parameters, got {params.shape}")
    comp = CompiledPauliSum(h)
    init = None if initial is None else initial.amplitudes
    if method == "adjoint":
        _, grad = engine.adjoint_gradient(
            circuit, params, comp.flips, comp.signs, comp.prefs, init
        )
        return grad
    if method != "shift":
        raise ValueError(f"unknown gradient method {method!r}")
    grad = np.empty(circuit.param_count, dtype=np.float64)
    shifted = params.copy()
    for j in range(circuit.param_count):
        shifted[j] = params[j] + np.pi / 2.0
        e_plus = comp.expect(engine.run_circuit(circuit, shifted, init))
        shifted[j] = params[j] - np.pi / 2.0
        e_minus = comp.expect(engine.run_circuit(circuit, shifted, init))
        shifted[j] = params[j]
        grad[j] = 0.5 * (e_plus - e_minus)
    return grad


def _gamma_of(amps: np.ndarray, n: int, regions) -> float:
    from .analysis import RegionSpec, topological_entropy

    spec = regions if isinstance(regions, RegionSpec) else RegionSpec(*regions)
    return topological_entropy(StateVector(n, amps), spec)


def train_instance(config: TrainConfig, instance_seed: int, instance_id: int = 0) -> RunRecord:
    """Run one Adam-optimized instance to convergence or the epoch cap."""
    t_start = time.perf_counter()
    circuit, ham = config.build()
    comp = CompiledPauliSum(ham)
    rng = np.random.default_rng(instance_seed)
    params = rng.uniform(config.init_low, config.init_high, circuit.param_count)

    m = np.zeros_like(params)
    v = np.zeros_like(params)
    a = config.adam

    e_prev = comp.expect(engine.run_circuit(circuit, params))
    initial_energy = e_prev
    energies: list[float] = []
    gamma_samples: list[tuple[int, float]] = []
    converged = False
    diagnostic = None

    for epoch in range(1, config.max_epochs + 1):
        if config.gradient_method == "adjoint":
            _, grad = engine.adjoint_gradient(circuit, params, comp.flips, comp.signs, comp.prefs)
        else:
            grad = gradient(circuit, params, ham, method="shift")
        with np.errstate(over="ignore", invalid="ignore"):  # finiteness checked below
            m = a.beta1 * m + (1.0 - a.beta1) * grad
            v = a.beta2 * v + (1.0 - a.beta2) * grad * grad
            m_hat = m / (1.0 - a.beta1 ** epoch)
            v_hat = v / (1.0 - a.beta2 ** epoch)
            params = params - a.step_size * m_hat / (np.sqrt(v_hat) + a.epsilon)
        if not np.all(np.isfinite(params)):
            diagnostic = f"non-finite parameters at epoch {epoch}"
            break
        amps = engine.run_circuit(circuit, params)
        energy = comp.expect(amps)
        energies.append(energy)
        if not math.isfinite(energy):
            diagnostic = f"non-finite energy at epoch {epoch}"
            break
        if config.order_param_interval and epoch % config.order_param_interval == 0 \
                and config.regions is not None:
            gamma_samples.append((epoch, _gamma_of(amps, circuit.n_qubits, config.regions)))
        if abs(energy - e_prev) < config.early_stop_delta:
            converged = True
            break
        e_prev = energy

    if not energies:  # aborted on the very first epoch
        energies = [initial_energy]
    if converged and config.order_param_interval and config.regions is not None:
        last_epoch = len(energies)
        if not gamma_samples or gamma_samples[-1][0] != last_epoch:
            amps = engine.run_circuit(circuit, params)
            gamma_samples.append((last_epoch, _gamma_of(amps, circuit.n_qubits, config.regions)))

    return RunRecord(
        instance_id=instance_id,
        seed=instance_seed,
        initial_energy=initial_energy,
        energies=energies,
        final_params=np.asarray(params, dtype=np.float64),
        converged=converged,
        gamma_samples=gamma_samples,
        wall_time=time.perf_counter() - t_start,
        diagnostic=diagnostic,
    )


def _train_worker(payload):
    config, instance_seed, instance_id = payload
    return train_instance(config, instance_seed, instance_id)


def aggregate_records(records: list[RunRecord]) -> AggregateReport:
    converged = [r for r in records if r.converged]
    fallback = not converged
    pool = records if fallback else converged
    ranked = sorted(pool, key=lambda r: (r.final_energy, r.instance_id))
    half = ranked[: (len(ranked) + 1) // 2]
    best = ranked[0]

    gammas = [r.gamma_samples[-1][1] for r in half if r.gamma_samples]
    mean_gamma = float(np.mean(gammas)) if gammas else None

    max_len = max(len(r.energies) for r in records)
    median_curve = []
    for t in range(max_len):
        alive = [r.energies[t] for r in records if len(r.energies) > t]
        median_curve.append(float(np.median(alive)))

    return AggregateReport(
        instances=len(records),
        converged_count=len(converged),
        best_half_ids=[r.instance_id for r in half],
        best_half_mean_energy=float(np.mean([r.final_energy for r in half])),
        best_half_mean_gamma=mean_gamma,
        best_instance_id=best.instance_id,
        best_energy=best.final_energy,
        median_curve=median_curve,
        fallback_all_runs=fallback,
    )


def train_ensemble(config: TrainConfig, max_workers: int = 1):
    """Run ``config.instances`` independent instances and aggregate.

    Instance i uses seed ``config.seed + i``.  Results are keyed by
    instance id, so the outcome does not depend on worker scheduling.
    """
    jobs = [(config, config.seed + i, i) for i in range(config.instances)]
    if max_workers <= 1 or config.instances == 1:
        records = [_train_worker(j) for j in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=max_workers) as pool:
            records = list(pool.map(_train_worker, jobs, chunksize=1))
    records.sort(key=lambda r: r.instance_id)
    return records, aggregate_records(records)
