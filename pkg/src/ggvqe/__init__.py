"""Statevector toolkit for training and analyzing global-gate circuits."""

__version__ = "0.1.0"

from .statevector import (
    DensityMatrix,
    StateVector,
    apply_cx_theta,
    apply_cz_theta,
    apply_one_qubit,
    apply_two_qubit,
    inner_product,
    load_state,
    reduced_density_matrix,
    save_state,
    von_neumann_entropy,
    zero_state,
)
from .lattice import Lattice, build_chain, build_square, build_toric_edge, link_parity
from .ansatz import (
    CircuitSpec,
    GateInstr,
    build_all_variant,
    build_ansatz,
    build_cartan,
    build_gz,
    build_gzx,
    build_gzxh,
)
from .hamiltonian import (
    NumericalError,
    PauliString,
    PauliSum,
    expectation,
    ground_energy,
    heisenberg_j1j2,
    toric_code_hamiltonian,
    z_probe,
)
from .vqe import (
    AdamConfig,
    AggregateReport,
    RunRecord,
    TrainConfig,
    evaluate,
    gradient,
    train_ensemble,
    train_instance,
)
from .analysis import (
    EnsembleStats,
    RegionSpec,
    bp_variance_scan,
    default_toric_regions,
    fidelity_kl,
    frame_potential,
    haar_states,
    moment_distance,
    sample_states,
    topological_entropy,
)
