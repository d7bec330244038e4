"""Ensemble diagnostics: moment distances, fidelity statistics, gradient
variance scans, and the seven-term topological entanglement entropy.

State ensembles are represented as (S, 2**N) complex arrays when they fit
the memory budget, and regenerated chunk by chunk otherwise; every state is
seeded individually from (seed, index), so both representations produce
identical numbers.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass

import numpy as np

from . import engine
from .ansatz import CircuitSpec, build_ansatz
from .hamiltonian import CompiledPauliSum, PauliSum, z_probe
from .lattice import build_chain
from .statevector import (
    StateVector,
    reduced_density_matrix,
    von_neumann_entropy,
)

DEFAULT_BUDGET_ENTRIES = 1 << 26  # complex128 entries, about 1 GiB
GRAM_CAP = 4096  # largest S for which a full S x S Gram matrix is built
EIG_RANK_TOL = 1e-12
TWO_PI = 2.0 * math.pi


# -- topological entropy -----------------------------------------------------

@dataclass(frozen=True)
class RegionSpec:
    """Three disjoint qubit groups whose union is a strict subset."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        sa, sb, sc = set(self.a), set(self.b), set(self.c)
        if not (self.a and self.b and self.c):
            raise ValueError("regions must be nonempty")
        if sa & sb or sa & sc or sb & sc:
            raise ValueError("regions must be pairwise disjoint")

    def validate_for(self, n: int) -> None:
        union = set(self.a) | set(self.b) | set(self.c)
        if any(q < 0 or q >= n for q in union):
            raise ValueError(f"region qubits out of range for n={n}")
        if len(union) >= n:
            raise ValueError("region union must be a strict subset of the qubits")


def default_toric_regions(p_rows: int = 2, p_cols: int = 2) -> RegionSpec:
    """Shipped tripartition for the 2x2-plaquette toric lattice.

    The twelve edges are split around the central vertex: its four incident
    edges form two opposite pairs (up+right, left+down), and two outer edges
    close the three-way junction.  For the exact h=0 ground state the
    seven-term combination evaluates to +ln 2 on these regions.
    """
    if (p_rows, p_cols) != (2, 2):
        raise ValueError("a default tripartition is only shipped for the 2x2 lattice")
    return RegionSpec(a=(3, 6), b=(5, 8), c=(2, 9))


def topological_entropy_terms(state: StateVector, regions: RegionSpec) -> dict[str, float]:
    """The seven subsystem entropies entering the combination."""
    regions.validate_for(state.qubit_count)
    a, b, c = regions.a, regions.b, regions.c
    subsets = {
        "S_A": a,
        "S_B": b,
        "S_C": c,
        "S_AB": a + b,
        "S_AC": a + c,
        "S_BC": b + c,
        "S_ABC": a + b + c,
    }
    return {
        name: von_neumann_entropy(reduced_density_matrix(state, keep))
        for name, keep in subsets.items()
    }


def topological_entropy(state: StateVector, regions: RegionSpec) -> float:
    """S_A + S_B + S_C + S_ABC - S_AB - S_AC - S_BC (natural log)."""
    t = topological_entropy_terms(state, regions)
    return t["S_A"] + t["S_B"] + t["S_C"] + t["S_ABC"] - t["S_AB"] - t["S_AC"] - t["S_BC"]


# -- state ensembles ---------------------------------------------------------

def _circuit_state(circuit: CircuitSpec, seed: int, index: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence((seed, index)))
    params = rng.uniform(0.0, TWO_PI, circuit.param_count)
    return engine.run_circuit(circuit, params)


def _haar_state(n: int, seed: int, index: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence((seed, index)))
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return v / np.linalg.norm(v)


class ChunkedStates:
    """Lazily regenerated ensemble used when S * 2**N exceeds the budget."""

    def __init__(self, kind: str, payload, n_states: int, dim: int, seed: int,
                 chunk_rows: int, params_override=None):
        self.kind = kind
        self.payload = payload
        self.n_states = n_states
        self.dim = dim
        self.seed = seed
        self.chunk_rows = max(1, chunk_rows)
        self.params_override = params_override

    def chunk(self, start: int, stop: int) -> np.ndarray:
        out = np.empty((stop - start, self.dim), dtype=np.complex128)
        for i in range(start, stop):
            if self.kind == "circuit":
                if self.params_override is not None:
                    out[i - start] = engine.run_circuit(self.payload, self.params_override)
                else:
                    out[i - start] = _circuit_state(self.payload, self.seed, i)
            else:
                out[i - start] = _haar_state(self.payload, self.seed, i)
        return out

    def chunks(self):
        for start in range(0, self.n_states, self.chunk_rows):
            stop = min(start + self.chunk_rows, self.n_states)
            yield start, self.chunk(start, stop)


def sample_states(circuit: CircuitSpec, s: int, seed: int,
                  budget_entries: int = DEFAULT_BUDGET_ENTRIES,
                  params_override=None):
    """S circuit outputs on uniform random parameters, deterministic per seed.

    Returns an (S, 2**N) array when it fits ``budget_entries`` complex
    entries, otherwise a :class:`ChunkedStates` that regenerates on demand.
    ``params_override`` pins every instance to one parameter vector (a
    deliberately degenerate ensemble, useful for calibration).
    """
    if s < 2:
        raise ValueError("need at least 2 samples")
    dim = 1 << circuit.n_qubits
    if params_override is not None:
        params_override = np.asarray(params_override, dtype=np.float64)
    if s * dim > budget_entries:
        return ChunkedStates("circuit", circuit, s, dim, seed,
                             chunk_rows=max(1, budget_entries // (4 * dim)),
                             params_override=params_override)
    out = np.empty((s, dim), dtype=np.complex128)
    for i in range(s):
        if params_override is not None:
            out[i] = engine.run_circuit(circuit, params_override)
        else:
            out[i] = _circuit_state(circuit, seed, i)
    return out


def haar_states(n: int, s: int, seed: int,
                budget_entries: int = DEFAULT_BUDGET_ENTRIES):
    """S Haar-random states (normalized complex Gaussians)."""
    if s < 2:
        raise ValueError("need at least 2 samples")
    dim = 1 << n
    if s * dim > budget_entries:
        return ChunkedStates("haar", n, s, dim, seed,
                             chunk_rows=max(1, budget_entries // (4 * dim)))
    out = np.empty((s, dim), dtype=np.complex128)
    for i in range(s):
        out[i] = _haar_state(n, seed, i)
    return out


def _as_ensemble(states):
    """Normalize input to (matrix or ChunkedStates, n_states, dim)."""
    if isinstance(states, ChunkedStates):
        return states, states.n_states, states.dim
    if isinstance(states, np.ndarray):
        if states.ndim != 2:
            raise ValueError("state matrix must be 2-D (states x amplitudes)")
        return states, states.shape[0], states.shape[1]
    if isinstance(states, (list, tuple)) and states and isinstance(states[0], StateVector):
        mat = np.stack([s.amplitudes for s in states])
        return mat, mat.shape[0], mat.shape[1]
    raise TypeError(f"unsupported ensemble type {type(states)!r}")


def _iter_chunks(ens, n_states: int, chunk_rows: int = 512):
    if isinstance(ens, ChunkedStates):
        yield from ens.chunks()
    else:
        for start in range(0, n_states, chunk_rows):
            yield start, ens[start: start + chunk_rows]


def gram_matrix(states, cap: int | None = None) -> np.ndarray:
    """G[j, k] = <psi_j | psi_k> over (optionally the first ``cap``) states."""
    ens, s, _ = _as_ensemble(states)
    use = s if cap is None else min(s, cap)
    g = np.empty((use, use), dtype=np.complex128)
    blocks = [(st, ch[: max(0, use - st)]) for st, ch in _iter_chunks(ens, use)
              if st < use]
    for si, ci in blocks:
        for sj, cj in blocks:
            if sj < si:
                continue
            block = ci.conj() @ cj.T
            g[si: si + ci.shape[0], sj: sj + cj.shape[0]] = block
            if sj > si:
                g[sj: sj + cj.shape[0], si: si + ci.shape[0]] = block.conj().T
    return g


def _haar_moment_constants(dim: int, t: int) -> tuple[float, int]:
    if t == 1:
        return 1.0 / dim, dim
    if t == 2:
        return 2.0 / (dim * (dim + 1)), dim * (dim + 1) // 2
    raise ValueError("moments beyond t=2 are unsupported")


def moment_distance_from_gram(g: np.ndarray, dim: int, t: int) -> float:
    """Trace distance to the Haar t-moment from the ensemble Gram matrix.

    The nonzero spectrum of the empirical moment equals the spectrum of
    G^(t) / S (entrywise t-th power of the Gram matrix); the Haar moment is
    c * Projector, so the trace norm decomposes over that spectrum plus the
    untouched directions.
    """
    c, d_pi = _haar_moment_constants(dim, t)
    gt = g if t == 1 else g * g
    lam = np.linalg.eigvalsh(gt) / g.shape[0]
    lam = lam[lam > EIG_RANK_TOL]
    rank = lam.size
    return float(np.abs(lam - c).sum() + (d_pi - rank) * c)


def moment_distance(states, t: int, method: str = "auto") -> float:
    """A^(t): trace distance between ensemble and Haar t-th moments, t <= 2."""
    ens, s, dim = _as_ensemble(states)
    c, d_pi = _haar_moment_constants(dim, t)
    if method == "auto":
        method = "direct" if (d_pi <= 2048 and d_pi < s) else "gram"
    if method == "gram":
        if s > GRAM_CAP:
            raise ValueError(
                f"gram method with S={s} exceeds cap {GRAM_CAP}; "
                "subsample or use method='direct'"
            )
        return moment_distance_from_gram(gram_matrix(ens), dim, t)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    if t == 1:
        rho = np.zeros((dim, dim), dtype=np.complex128)
        for _, chunk in _iter_chunks(ens, s):
            rho += chunk.T @ chunk.conj()
        rho /= s
        diff = rho - c * np.eye(dim)
        return float(np.abs(np.linalg.eigvalsh(diff)).sum())
    if dim > 64:
        raise ValueError("direct t=2 computation limited to 6 qubits")
    m2 = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for _, chunk in _iter_chunks(ens, s):
        for row in chunk:
            w = np.kron(row, row)
            m2 += np.outer(w, w.conj())
    m2 /= s
    # symmetric-subspace projector (1 + SWAP) / 2
    swap = np.zeros((dim * dim, dim * dim))
    for i in range(dim):
        for j in range(dim):
            swap[i * dim + j, j * dim + i] = 1.0
    diff = m2 - c * 0.5 * (np.eye(dim * dim) + swap)
    return float(np.abs(np.linalg.eigvalsh(diff)).sum())


# -- pairwise fidelity statistics -------------------------------------------

@dataclass
class PairStats:
    pairs_used: int
    hist_counts: np.ndarray  # per-bin counts of F
    bin_edges: np.ndarray
    f_sums: dict[int, float]  # t -> sum of F^t
    f_sq_sums: dict[int, float]  # t -> sum of F^(2t)
    occupied_bins: int


def _accumulate_block(fs: np.ndarray, stats: PairStats) -> None:
    stats.pairs_used += fs.size
    fs = np.clip(fs, 0.0, 1.0)  # |<a|b>|^2 can exceed 1 by float noise
    counts, _ = np.histogram(fs, bins=stats.bin_edges)
    stats.hist_counts += counts
    for t in stats.f_sums:
        ft = fs ** t
        stats.f_sums[t] += float(ft.sum())
        stats.f_sq_sums[t] += float((ft * ft).sum())


def pair_fidelity_stats(states, bins: int = 75, t_values=(1, 2),
                        pair_budget: int | None = None, seed: int = 0) -> PairStats:
    """One pass over state pairs collecting the histogram and F^t sums.

    With ``pair_budget`` set and fewer than all pairs requested, a seeded
    random subsample of index pairs is used instead of the full set.
    """
    ens, s, dim = _as_ensemble(states)
    stats = PairStats(
        pairs_used=0,
        hist_counts=np.zeros(bins, dtype=np.int64),
        bin_edges=np.linspace(0.0, 1.0, bins + 1),
        f_sums={t: 0.0 for t in t_values},
        f_sq_sums={t: 0.0 for t in t_values},
        occupied_bins=0,
    )
    total_pairs = s * (s - 1) // 2
    if pair_budget is not None and pair_budget < total_pairs:
        rng = np.random.default_rng(np.random.SeedSequence((seed, 0xFA1)))
        ii = rng.integers(0, s, size=pair_budget)
        jj = rng.integers(0, s - 1, size=pair_budget)
        jj = np.where(jj >= ii, jj + 1, jj)  # j != i, uniform over off-diagonal
        if isinstance(ens, ChunkedStates):
            mat = np.empty((s, dim), dtype=np.complex128)
            for st, ch in ens.chunks():
                mat[st: st + ch.shape[0]] = ch
        else:
            mat = ens
        overlaps = np.einsum("ij,ij->i", mat[ii].conj(), mat[jj])
        _accumulate_block(np.abs(overlaps) ** 2, stats)
    else:
        blocks = list(_iter_chunks(ens, s))
        for bi, (si, ci) in enumerate(blocks):
            for sj, cj in blocks[bi:]:
                ov = np.abs(ci.conj() @ cj.T) ** 2
                if si == sj:
                    iu = np.triu_indices(ci.shape[0], k=1)
                    _accumulate_block(ov[iu], stats)
                else:
                    _accumulate_block(ov.ravel(), stats)
    stats.occupied_bins = int((stats.hist_counts > 0).sum())
    return stats


def pair_fidelities(states, limit: int | None = None, seed: int = 0) -> np.ndarray:
    """Raw pair fidelities, subsampled to ``limit`` pairs when set."""
    ens, s, dim = _as_ensemble(states)
    total = s * (s - 1) // 2
    if limit is None or limit >= total:
        out = []
        blocks = list(_iter_chunks(ens, s))
        for bi, (si, ci) in enumerate(blocks):
            for sj, cj in blocks[bi:]:
                ov = np.abs(ci.conj() @ cj.T) ** 2
                if si == sj:
                    out.append(ov[np.triu_indices(ci.shape[0], k=1)])
                else:
                    out.append(ov.ravel())
        return np.concatenate(out)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xF1D)))
    ii = rng.integers(0, s, size=limit)
    jj = rng.integers(0, s - 1, size=limit)
    jj = np.where(jj >= ii, jj + 1, jj)
    if isinstance(ens, ChunkedStates):
        mat = np.empty((s, dim), dtype=np.complex128)
        for st, ch in ens.chunks():
            mat[st: st + ch.shape[0]] = ch
    else:
        mat = ens
    return np.abs(np.einsum("ij,ij->i", mat[ii].conj(), mat[jj])) ** 2


def porter_thomas_bin_masses(dim: int, bin_edges: np.ndarray) -> np.ndarray:
    """Exact Haar fidelity mass per bin from the CDF 1 - (1-F)**(d-1)."""
    left = bin_edges[:-1]
    right = bin_edges[1:]
    return (1.0 - left) ** (dim - 1) - (1.0 - right) ** (dim - 1)


@dataclass
class KlResult:
    value: float
    degenerate: bool
    capped: bool
    pairs_used: int


def fidelity_kl(states, bins: int = 75, pair_budget: int | None = None,
                seed: int = 0, details: bool = False):
    """KL divergence of the pair-fidelity histogram against Porter-Thomas.

    Empirical bins with zero mass are skipped.  If an occupied bin has zero
    Haar mass (floating-point underflow of the tail), the mass is clamped to
    the smallest positive double and the result flagged as capped; an
    ensemble concentrated in a single bin is flagged degenerate.
    """
    ens, s, dim = _as_ensemble(states)
    if s < 100:
        raise ValueError("fidelity KL needs at least 100 states")
    if bins < 10:
        raise ValueError("need at least 10 bins")
    stats = pair_fidelity_stats(ens, bins=bins, t_values=(), pair_budget=pair_budget,
                                seed=seed)
    p = stats.hist_counts / stats.hist_counts.sum()
    q = porter_thomas_bin_masses(dim, stats.bin_edges)
    capped = False
    kl = 0.0
    tiny = np.finfo(np.float64).tiny
    for pb, qb in zip(p, q):
        if pb <= 0.0:
            continue
        if qb <= 0.0:
            qb = tiny
            capped = True
        kl += pb * math.log(pb / qb)
    result = KlResult(
        value=float(kl),
        degenerate=stats.occupied_bins <= 1,
        capped=capped,
        pairs_used=stats.pairs_used,
    )
    return result if details else result.value


def frame_potential(states, t: int, pair_budget: int | None = None,
                    seed: int = 0) -> tuple[float, float]:
    """(mean of F^t over pairs, standard error of that mean)."""
    if t not in (1, 2):
        raise ValueError("frame potential supports t in {1, 2}")
    stats = pair_fidelity_stats(states, t_values=(t,), pair_budget=pair_budget,
                                seed=seed)
    n = stats.pairs_used
    mean = stats.f_sums[t] / n
    var = max(stats.f_sq_sums[t] / n - mean * mean, 0.0)
    return float(mean), float(math.sqrt(var / n))


def haar_frame_potential(dim: int, t: int) -> float:
    if t == 1:
        return 1.0 / dim
    if t == 2:
        return 2.0 / (dim * (dim + 1))
    raise ValueError("frame potential supports t in {1, 2}")


@dataclass
class EnsembleStats:
    sample_count: int
    d: int
    a1: float
    a2: float
    a2_samples: int
    kl: float
    kl_degenerate: bool
    kl_capped: bool
    f1: float
    f1_sem: float
    f2: float
    f2_sem: float
    pairs_used: int
    fidelity_samples: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "d": self.d,
            "a1": self.a1,
            "a2": self.a2,
            "a2_samples": self.a2_samples,
            "kl": self.kl,
            "kl_degenerate": self.kl_degenerate,
            "kl_capped": self.kl_capped,
            "f1": self.f1,
            "f1_sem": self.f1_sem,
            "f2": self.f2,
            "f2_sem": self.f2_sem,
            "pairs_used": self.pairs_used,
        }


def ensemble_statistics(states, bins: int = 75, a2_cap: int = 2000,
                        pair_budget: int | None = None, seed: int = 0,
                        keep_fidelities: bool = False) -> EnsembleStats:
    """A^(1), A^(2), KL, and frame potentials of one ensemble.

    A^(2) uses at most ``a2_cap`` states (cubic-cost eigensolve); everything
    else uses the full ensemble.
    """
    ens, s, dim = _as_ensemble(states)
    stats = pair_fidelity_stats(ens, bins=bins, t_values=(1, 2),
                                pair_budget=pair_budget, seed=seed)
    p = stats.hist_counts / stats.hist_counts.sum()
    q = porter_thomas_bin_masses(dim, stats.bin_edges)
    kl = 0.0
    capped = False
    tiny = np.finfo(np.float64).tiny
    for pb, qb in zip(p, q):
        if pb <= 0.0:
            continue
        if qb <= 0.0:
            qb = tiny
            capped = True
        kl += pb * math.log(pb / qb)

    a1 = moment_distance(ens, 1, method="auto") if (dim <= 2048 and dim < s) else \
        moment_distance_from_gram(gram_matrix(ens, cap=min(s, GRAM_CAP)), dim, 1)
    a2_n = min(s, a2_cap)
    a2 = moment_distance_from_gram(gram_matrix(ens, cap=a2_n), dim, 2)

    n_pairs = stats.pairs_used
    f1 = stats.f_sums[1] / n_pairs
    f2 = stats.f_sums[2] / n_pairs
    f1_var = max(stats.f_sq_sums[1] / n_pairs - f1 * f1, 0.0)
    f2_var = max(stats.f_sq_sums[2] / n_pairs - f2 * f2, 0.0)

    fid = None
    if keep_fidelities:
        fid = pair_fidelities(ens, limit=min(n_pairs, 200000), seed=seed)

    return EnsembleStats(
        sample_count=s,
        d=dim,
        a1=float(a1),
        a2=float(a2),
        a2_samples=a2_n,
        kl=float(kl),
        kl_degenerate=stats.occupied_bins <= 1,
        kl_capped=capped,
        f1=float(f1),
        f1_sem=float(math.sqrt(f1_var / n_pairs)),
        f2=float(f2),
        f2_sem=float(math.sqrt(f2_var / n_pairs)),
        pairs_used=n_pairs,
        fidelity_samples=fid,
    )


# -- gradient variance scans -------------------------------------------------

def ry_probe_param(circuit: CircuitSpec) -> int:
    """Parameter index of the RY on the last qubit in the first rotation layer."""
    start, stop = circuit.layer_boundaries[0]
    target = circuit.n_qubits - 1
    for gate in circuit.gates[start:stop]:
        if gate.kind == "RY" and gate.qubits[0] == target:
            return gate.param_index
    raise ValueError("no RY gate on the last qubit in the first layer")


def first_rz_param(circuit: CircuitSpec) -> int:
    """Parameter index of the first RZ on the last qubit (first sublayer)."""
    start, stop = circuit.layer_boundaries[0]
    target = circuit.n_qubits - 1
    for gate in circuit.gates[start:stop]:
        if gate.kind == "RZ" and gate.qubits[0] == target:
            return gate.param_index
    raise ValueError("no RZ gate on the last qubit in the first layer")


def resolve_mu(circuit: CircuitSpec, selector) -> int:
    if isinstance(selector, int):
        if not 0 <= selector < circuit.param_count:
            raise ValueError(f"parameter index {selector} out of range")
        return selector
    if selector == "first_layer_last_ry":
        return ry_probe_param(circuit)
    if selector == "first_layer_first_rz":
        return first_rz_param(circuit)
    raise ValueError(f"unknown mu selector {selector!r}")


def _shift_gradient_single(circuit: CircuitSpec, comp: CompiledPauliSum,
                           params: np.ndarray, j: int) -> float:
    shifted = params.copy()
    shifted[j] = params[j] + 0.5 * np.pi
    e_plus = comp.expect(engine.run_circuit(circuit, shifted))
    shifted[j] = params[j] - 0.5 * np.pi
    e_minus = comp.expect(engine.run_circuit(circuit, shifted))
    return 0.5 * (e_plus - e_minus)


def _bp_worker(payload):
    circuit, ham, mu, seed, start, stop = payload
    comp = CompiledPauliSum(ham)
    if mu == "all":
        out = np.empty((stop - start, circuit.param_count))
        for i in range(start, stop):
            rng = np.random.default_rng(np.random.SeedSequence((seed, i)))
            params = rng.uniform(0.0, TWO_PI, circuit.param_count)
            _, grad = engine.adjoint_gradient(circuit, params, comp.flips,
                                              comp.signs, comp.prefs)
            out[i - start] = grad
        return start, out
    out = np.empty(stop - start)
    for i in range(start, stop):
        rng = np.random.default_rng(np.random.SeedSequence((seed, i)))
        params = rng.uniform(0.0, TWO_PI, circuit.param_count)
        out[i - start] = _shift_gradient_single(circuit, comp, params, mu)
    return start, out


def gradient_samples(circuit: CircuitSpec, ham: PauliSum, samples: int,
                     mu, seed: int = 0, max_workers: int = 1) -> np.ndarray:
    """Shift-rule gradient samples at uniform random parameters.

    ``mu`` is a resolved parameter index, or "all" for full gradient vectors
    (computed with the adjoint sweep).  Sample i draws its parameters from
    (seed, i), so results are independent of worker scheduling.
    """
    if mu != "all":
        mu = int(mu)
    chunk = max(1, samples // max(1, max_workers * 4))
    jobs = [(circuit, ham, mu, seed, st, min(st + chunk, samples))
            for st in range(0, samples, chunk)]
    if max_workers <= 1 or len(jobs) == 1:
        parts = [_bp_worker(j) for j in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=max_workers) as pool:
            parts = list(pool.map(_bp_worker, jobs))
    parts.sort(key=lambda x: x[0])
    return np.concatenate([p[1] for p in parts])


@dataclass
class BpPoint:
    axis_value: int
    variance: float
    samples: int
    param_count: int


def bp_variance_scan(ansatz_kind: str, *, sizes=None, depths=None, k: int | None = None,
                     n: int | None = None, samples: int = 1000,
                     mu_selector="first_layer_last_ry", hamiltonian=None,
                     seed: int = 0, max_workers: int = 1,
                     lattice_builder=build_chain) -> list[BpPoint]:
    """Var[dE/d mu] across system sizes (fixed k) or depths (fixed n).

    The observable defaults to a single Z on the last qubit.  Variance is
    the unbiased sample variance over ``samples`` uniform parameter draws.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if (sizes is None) == (depths is None):
        raise ValueError("provide exactly one of sizes= or depths=")
    points = []
    if sizes is not None:
        if k is None:
            raise ValueError("size sweep requires k=")
        axis = [(int(sz), int(sz), k) for sz in sizes]
    else:
        if n is None:
            raise ValueError("depth sweep requires n=")
        axis = [(int(kk), n, int(kk)) for kk in depths]
    for axis_value, size, depth in axis:
        lat = lattice_builder(size)
        circuit = build_ansatz(lat, depth, ansatz_kind)
        ham = hamiltonian if hamiltonian is not None else z_probe(lat.n_sites, lat.n_sites - 1)
        mu = resolve_mu(circuit, mu_selector)
        grads = gradient_samples(circuit, ham, samples, mu, seed=seed,
                                 max_workers=max_workers)
        points.append(BpPoint(
            axis_value=axis_value,
            variance=float(np.var(grads, ddof=1)),
            samples=samples,
            param_count=circuit.param_count,
        ))
    return points


def bp_all_parameter_variances(circuit: CircuitSpec, ham: PauliSum, samples: int,
                               seed: int = 0, max_workers: int = 1) -> np.ndarray:
    """Per-parameter gradient variances for one circuit (appendix-style sweep)."""
    grads = gradient_samples(circuit, ham, samples, "all", seed=seed,
                             max_workers=max_workers)
    return np.var(grads, axis=0, ddof=1)
