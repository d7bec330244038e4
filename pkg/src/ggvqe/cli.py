"""Command-line front end: train / express / bp-scan / ed / entropy.

Configuration comes from an optional TOML file (one table per command)
overridden by command-line flags; unknown keys are rejected.  Every command
is a pure function of (config, seed): rerunning with the same inputs
reproduces all CSV/JSON outputs byte for byte.  Exit codes: 0 success,
2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__, analysis, vqe
from .ansatz import build_all_variant, build_ansatz, circuit_to_json
from .hamiltonian import (
    CompiledPauliSum,
    NumericalError,
    ground_energy,
    heisenberg_j1j2,
    toric_code_hamiltonian,
    z_probe,
)
from .lattice import build_chain, build_square, build_toric_edge, lattice_to_json
from .statevector import load_state, save_state

SCHEMA_VERSION = 1


class ConfigError(Exception):
    pass


# -- config plumbing ---------------------------------------------------------

@dataclass(frozen=True)
class Field:
    name: str
    kind: str  # int | float | str | bool | floats | ints
    default: object
    help: str


def _parse_value(field: Field, raw, source: str):
    try:
        if field.kind == "int":
            if isinstance(raw, bool):
                raise ValueError("expected integer")
            return int(raw)
        if field.kind == "float":
            if isinstance(raw, bool):
                raise ValueError("expected number")
            return float(raw)
        if field.kind == "str":
            if not isinstance(raw, str):
                raise ValueError("expected string")
            return raw
        if field.kind == "bool":
            if isinstance(raw, bool):
                return raw
            raise ValueError("expected boolean")
        if field.kind in ("floats", "ints"):
            conv = float if field.kind == "floats" else int
            if isinstance(raw, str):
                return [conv(tok) for tok in raw.split(",") if tok.strip()]
            if isinstance(raw, (list, tuple)):
                return [conv(v) for v in raw]
            return [conv(raw)]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: bad value for {field.name!r}: {exc}") from exc
    raise ConfigError(f"unhandled field kind {field.kind!r}")


_COMMON = [
    Field("seed", "int", 0, "base random seed"),
    Field("out", "str", None, "output directory"),
    Field("threads", "int", 0, "worker processes (0 = logical cores)"),
]

SCHEMAS: dict[str, list[Field]] = {
    "train": _COMMON + [
        Field("model", "str", None, "toric | heisenberg"),
        Field("lattice", "str", None, "chain N, square RxC, toric RxCp"),
        Field("ansatz", "str", None, "gz | gzx | gzxh | cartan"),
        Field("k", "int", None, "circuit layers"),
        Field("h", "floats", [0.0], "toric field grid"),
        Field("j2", "floats", [0.0], "heisenberg J2 grid"),
        Field("instances", "int", 100, "instances per grid point"),
        Field("max_epochs", "int", 1000, "epoch cap"),
        Field("early_stop_delta", "float", 1e-4, "early-stop energy change"),
        Field("adam_step", "float", 0.05, "Adam step size"),
        Field("adam_beta1", "float", 0.9, "Adam beta1"),
        Field("adam_beta2", "float", 0.999, "Adam beta2"),
        Field("adam_epsilon", "float", 1e-8, "Adam epsilon"),
        Field("gamma_interval", "int", 25, "epochs between order-parameter samples (0 = off)"),
        Field("gradient_method", "str", "adjoint", "adjoint | shift"),
        Field("plaquette_links", "str", "neighbor", "neighbor | all"),
        Field("regions", "str", "auto", "regions file, 'toric2x2', 'auto', or 'off'"),
    ],
    "express": _COMMON + [
        Field("lattice", "str", None, "lattice for the circuit ensembles"),
        Field("ansatz", "str", "gz,gzx,gzxh,cartan", "comma list of ansatz kinds"),
        Field("k", "int", None, "circuit layers"),
        Field("samples", "int", 10000, "ensemble size for KL and frame potentials"),
        Field("a2_samples", "int", 2000, "states entering the A^(2) Gram eigensolve"),
        Field("bins", "int", 75, "fidelity histogram bins"),
        Field("pair_budget", "int", 0, "max pairs (0 = all pairs)"),
        Field("haar", "bool", False, "analyze a Haar ensemble instead of circuits"),
        Field("n", "int", 4, "qubit count for the Haar mode"),
        Field("dump_fidelities", "bool", False, "write per-pair fidelities"),
        Field("plaquette_links", "str", "neighbor", "neighbor | all"),
    ],
    "bp-scan": _COMMON + [
        Field("ansatz", "str", None, "gz | gzx | gzxh | cartan"),
        Field("sweep", "str", None, "size | depth | params"),
        Field("sizes", "ints", [8, 12, 16], "chain sizes for the size sweep"),
        Field("depths", "ints", [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], "k values for the depth sweep"),
        Field("k", "int", 6, "layers for the size sweep / params sweep"),
        Field("n", "int", 16, "chain size for the depth sweep"),
        Field("samples", "int", 1000, "parameter draws per point"),
        Field("mu", "str", "default", "default | first-rz | a parameter index"),
        Field("model", "str", "zlast", "params sweep observable: zlast | toric | heisenberg"),
        Field("lattice", "str", None, "lattice for the params sweep"),
        Field("h", "float", 0.0, "toric field for the params sweep"),
        Field("j2", "float", 0.0, "heisenberg J2 for the params sweep"),
    ],
    "ed": _COMMON + [
        Field("model", "str", None, "toric | heisenberg"),
        Field("lattice", "str", None, "lattice spec"),
        Field("h", "floats", [0.0], "toric field grid"),
        Field("j2", "floats", [0.0], "heisenberg J2 grid"),
        Field("method", "str", "lanczos", "lanczos | dense"),
        Field("dump_states", "bool", False, "write qsv1 ground states"),
    ],
    "entropy": [
        Field("seed", "int", 0, "unused, kept for interface uniformity"),
        Field("out", "str", None, "optional JSON output path"),
        Field("threads", "int", 0, "unused"),
        Field("state", "str", None, "qsv1 state file"),
        Field("regions", "str", "toric2x2", "regions JSON file or 'toric2x2'"),
    ],
}

_REQUIRED = {
    "train": ("model", "lattice", "ansatz", "k", "out"),
    "express": ("out",),
    "bp-scan": ("ansatz", "sweep", "out"),
    "ed": ("model", "lattice", "out"),
    "entropy": ("state",),
}


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    """defaults < TOML [command] table < CLI flags, unknown keys rejected."""
    schema = {f.name: f for f in SCHEMAS[command]}
    cfg = {f.name: f.default for f in schema.values()}

    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file {path} does not exist")
        with open(path, "rb") as fh:
            try:
                doc = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        unknown_tables = set(doc) - set(SCHEMAS)
        if unknown_tables:
            raise ConfigError(
                f"{path}: unknown tables {sorted(unknown_tables)}; "
                f"known tables: {sorted(SCHEMAS)}"
            )
        table = doc.get(command, {})
        unknown = set(table) - set(schema)
        if unknown:
            raise ConfigError(
                f"{path} [{command}]: unknown keys {sorted(unknown)}; "
                f"known keys: {sorted(schema)}"
            )
        for key, raw in table.items():
            cfg[key] = _parse_value(schema[key], raw, f"{path} [{command}]")

    for key, f in schema.items():
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None and flag is not False:
            cfg[key] = _parse_value(f, flag, "command line")

    missing = [k for k in _REQUIRED[command] if cfg.get(k) in (None, "")]
    if missing:
        raise ConfigError(f"missing required options for {command}: {', '.join(missing)}")
    if cfg.get("threads", 0) == 0:
        cfg["threads"] = os.cpu_count() or 1
    return cfg


def parse_lattice(text: str):
    """'8' -> chain(8); '4x4' -> square; '2x2p' -> toric plaquettes."""
    m = re.fullmatch(r"(\d+)x(\d+)(p?)", text.strip())
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if m.group(3):
            return "toric_edge", (a, b)
        return "square", (a, b)
    m = re.fullmatch(r"(?:chain)?(\d+)", text.strip())
    if m:
        return "chain", (int(m.group(1)),)
    raise ConfigError(f"cannot parse lattice {text!r} (use e.g. 16, 4x4, 2x2p)")


def build_lattice(text: str):
    kind, dims = parse_lattice(text)
    builder = {"chain": build_chain, "square": build_square, "toric_edge": build_toric_edge}
    try:
        return builder[kind](*dims)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# -- deterministic emitters --------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(out: Path, command: str, cfg: dict) -> None:
    public = {k: v for k, v in cfg.items() if k not in ("out", "threads")}
    write_json(out / "manifest.json", {
        "schema_version": SCHEMA_VERSION,
        "toolkit_version": __version__,
        "command": command,
        "config": public,
    })


def load_regions(spec: str) -> analysis.RegionSpec:
    if spec in ("toric2x2", "auto"):
        return analysis.default_toric_regions()
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"regions file {path} does not exist")
    with open(path, "r", encoding="ascii") as fh:
        doc = json.load(fh)
    try:
        return analysis.RegionSpec(tuple(doc["A"]), tuple(doc["B"]), tuple(doc["C"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: bad regions file: {exc}") from exc


# -- commands ----------------------------------------------------------------

def cmd_train(cfg: dict) -> int:
    lat_kind, dims = parse_lattice(cfg["lattice"])
    model = cfg["model"]
    if model == "toric" and lat_kind != "toric_edge":
        raise ConfigError("the toric model needs a toric lattice (e.g. 2x2p)")
    if model == "heisenberg" and lat_kind != "square":
        raise ConfigError("the heisenberg model needs a square lattice (e.g. 4x4)")
    if model not in ("toric", "heisenberg"):
        raise ConfigError(f"unknown model {model!r}")
    if cfg["ansatz"] not in ("gz", "gzx", "gzxh", "cartan"):
        raise ConfigError(f"unknown ansatz {cfg['ansatz']!r}")

    regions = None
    if cfg["gamma_interval"] > 0 and cfg["regions"] != "off":
        if cfg["regions"] == "auto":
            if model == "toric" and dims == (2, 2):
                regions = analysis.default_toric_regions()
        else:
            regions = load_regions(cfg["regions"])
    regions_tuple = (regions.a, regions.b, regions.c) if regions else None

    grid_name = "h" if model == "toric" else "j2"
    grid = cfg["h"] if model == "toric" else cfg["j2"]
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, "train", cfg)

    sweep_rows = []
    for value in grid:
        point_dir = out / f"{grid_name}={_fmt(float(value))}"
        agg_path = point_dir / "aggregate.json"
        if agg_path.exists():
            # resumable checkpoint: a completed point is not recomputed
            with open(agg_path, "r", encoding="ascii") as fh:
                agg_doc = json.load(fh)
            with open(point_dir / "edpoint.json", "r", encoding="ascii") as fh:
                ed_doc = json.load(fh)
            sweep_rows.append((float(value), agg_doc["best_half_mean_energy"],
                               ed_doc["energy"], agg_doc["best_half_mean_gamma"]))
            print(f"{grid_name}={_fmt(float(value))}: already complete, skipping")
            continue
        point_dir.mkdir(parents=True, exist_ok=True)

        tconf = vqe.TrainConfig(
            ansatz_kind=cfg["ansatz"],
            lattice_kind=lat_kind,
            lattice_dims=dims,
            k=cfg["k"],
            model=model,
            h=float(value) if model == "toric" else 0.0,
            j2=float(value) if model == "heisenberg" else 0.0,
            max_epochs=cfg["max_epochs"],
            early_stop_delta=cfg["early_stop_delta"],
            instances=cfg["instances"],
            adam=vqe.AdamConfig(cfg["adam_step"], cfg["adam_beta1"],
                                cfg["adam_beta2"], cfg["adam_epsilon"]),
            order_param_interval=cfg["gamma_interval"] if regions_tuple else 0,
            seed=cfg["seed"],
            gradient_method=cfg["gradient_method"],
            plaquette_links=cfg["plaquette_links"],
            regions=regions_tuple,
        )
        records, agg = vqe.train_ensemble(tconf, max_workers=cfg["threads"])

        _, ham = tconf.build()
        ed_energy, _ = ground_energy(ham, "lanczos", seed=cfg["seed"])

        write_manifest(point_dir, "train", {**cfg, grid_name: [float(value)]})
        write_csv(point_dir / "energy.csv", ["epoch", "instance", "energy"],
                  ((t + 1, r.instance_id, e) for r in records
                   for t, e in enumerate(r.energies)))
        if regions_tuple:
            write_csv(point_dir / "gamma.csv", ["epoch", "instance", "gamma"],
                      ((ep, r.instance_id, g) for r in records
                       for ep, g in r.gamma_samples))
        params_dir = point_dir / "final_params"
        params_dir.mkdir(exist_ok=True)
        for r in records:
            write_json(params_dir / f"{r.instance_id}.json", r.to_json_dict())
        write_json(point_dir / "edpoint.json",
                   {grid_name: float(value), "energy": ed_energy})
        write_json(agg_path, agg.to_json_dict())
        sweep_rows.append((float(value), agg.best_half_mean_energy,
                           ed_energy, agg.best_half_mean_gamma))
        print(f"{grid_name}={_fmt(float(value))}: best {agg.best_energy:.6f}, "
              f"best-half {agg.best_half_mean_energy:.6f}, ed {ed_energy:.6f}")

    write_csv(out / "sweep.csv",
              ["param", "best_half_energy", "ed_energy", "best_half_gamma"],
              sweep_rows)
    return 0


def cmd_express(cfg: dict) -> int:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, "express", cfg)
    pair_budget = cfg["pair_budget"] or None

    ensembles: list[tuple[str, object, int]] = []
    if cfg["haar"]:
        ensembles.append(("haar", None, cfg["n"]))
    else:
        if not cfg.get("lattice") or not cfg.get("k"):
            raise ConfigError("express needs lattice= and k= (or haar=true)")
        lat = build_lattice(cfg["lattice"])
        for kind in [s.strip() for s in cfg["ansatz"].split(",") if s.strip()]:
            if kind not in ("gz", "gzx", "gzxh", "cartan"):
                raise ConfigError(f"unknown ansatz {kind!r}")
            if cfg["plaquette_links"] == "all":
                circuit = build_all_variant(lat, cfg["k"], kind)
            else:
                circuit = build_ansatz(lat, cfg["k"], kind)
            ensembles.append((kind, circuit, lat.n_sites))

    rows = []
    report = {}
    for name, circuit, n in ensembles:
        if circuit is None:
            states = analysis.haar_states(n, cfg["samples"], cfg["seed"])
        else:
            write_json(out / f"circuit_{name}.json", circuit_to_json(circuit))
            states = analysis.sample_states(circuit, cfg["samples"], cfg["seed"])
        stats = analysis.ensemble_statistics(
            states, bins=cfg["bins"], a2_cap=cfg["a2_samples"],
            pair_budget=pair_budget, seed=cfg["seed"],
        )
        report[name] = stats.to_json_dict()
        report[name]["haar_f1"] = analysis.haar_frame_potential(stats.d, 1)
        report[name]["haar_f2"] = analysis.haar_frame_potential(stats.d, 2)
        rows.append((name, stats.sample_count, stats.d, stats.a1, stats.a2,
                     stats.kl, stats.f1, stats.f1_sem, stats.f2, stats.f2_sem))
        if cfg["dump_fidelities"]:
            fid = analysis.pair_fidelities(states, limit=pair_budget, seed=cfg["seed"])
            write_csv(out / f"fidelities_{name}.csv", ["fidelity"],
                      ((float(f),) for f in fid))
        print(f"{name}: A1={stats.a1:.4f} A2={stats.a2:.4f} KL={stats.kl:.4f} "
              f"F1={stats.f1:.6g} F2={stats.f2:.6g}")

    write_csv(out / "express.csv",
              ["ansatz", "samples", "d", "a1", "a2", "kl", "f1", "f1_sem", "f2", "f2_sem"],
              rows)
    write_json(out / "express.json", report)
    return 0


def cmd_bp_scan(cfg: dict) -> int:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, "bp-scan", cfg)
    if cfg["ansatz"] not in ("gz", "gzx", "gzxh", "cartan"):
        raise ConfigError(f"unknown ansatz {cfg['ansatz']!r}")

    mu = cfg["mu"]
    if mu == "default":
        mu_selector = "first_layer_last_ry"
    elif mu == "first-rz":
        mu_selector = "first_layer_first_rz"
    else:
        try:
            mu_selector = int(mu)
        except ValueError as exc:
            raise ConfigError(f"bad mu {mu!r}") from exc

    if cfg["sweep"] in ("size", "depth"):
        kwargs = dict(samples=cfg["samples"], mu_selector=mu_selector,
                      seed=cfg["seed"], max_workers=cfg["threads"])
        if cfg["sweep"] == "size":
            points = analysis.bp_variance_scan(cfg["ansatz"], sizes=cfg["sizes"],
                                               k=cfg["k"], **kwargs)
        else:
            points = analysis.bp_variance_scan(cfg["ansatz"], depths=cfg["depths"],
                                               n=cfg["n"], **kwargs)
        write_csv(out / "bp.csv", ["axis_value", "variance", "samples"],
                  ((p.axis_value, p.variance, p.samples) for p in points))
        for p in points:
            print(f"{p.axis_value}: var={p.variance:.6e}")
        return 0

    if cfg["sweep"] != "params":
        raise ConfigError(f"unknown sweep {cfg['sweep']!r} (size | depth | params)")
    if not cfg.get("lattice"):
        raise ConfigError("params sweep needs lattice=")
    lat = build_lattice(cfg["lattice"])
    circuit = build_ansatz(lat, cfg["k"], cfg["ansatz"])
    if cfg["model"] == "zlast":
        ham = z_probe(lat.n_sites, lat.n_sites - 1)
    elif cfg["model"] == "toric":
        ham = toric_code_hamiltonian(lat, cfg["h"])
    elif cfg["model"] == "heisenberg":
        rows_, cols_ = parse_lattice(cfg["lattice"])[1]
        ham = heisenberg_j1j2(rows_, cols_, cfg["j2"])
    else:
        raise ConfigError(f"unknown model {cfg['model']!r}")
    variances = analysis.bp_all_parameter_variances(
        circuit, ham, cfg["samples"], seed=cfg["seed"], max_workers=cfg["threads"])
    write_csv(out / "bp_params.csv", ["param_index", "variance", "samples"],
              ((j, float(v), cfg["samples"]) for j, v in enumerate(variances)))
    print(f"{circuit.param_count} parameters, "
          f"max var {variances.max():.6e}, min var {variances.min():.6e}")
    return 0


def cmd_ed(cfg: dict) -> int:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, "ed", cfg)
    lat_kind, dims = parse_lattice(cfg["lattice"])
    model = cfg["model"]
    if model == "toric":
        if lat_kind != "toric_edge":
            raise ConfigError("the toric model needs a toric lattice (e.g. 2x2p)")
        lat = build_toric_edge(*dims)
        grid_name, grid = "h", cfg["h"]
    elif model == "heisenberg":
        if lat_kind != "square":
            raise ConfigError("the heisenberg model needs a square lattice")
        lat = build_square(*dims)
        grid_name, grid = "j2", cfg["j2"]
    else:
        raise ConfigError(f"unknown model {model!r}")
    if cfg["method"] not in ("lanczos", "dense"):
        raise ConfigError(f"unknown method {cfg['method']!r}")
    # site/edge numbering reference, e.g. for writing regions files
    write_json(out / "lattice.json", lattice_to_json(lat))

    rows = []
    checks = []
    for value in grid:
        if model == "toric":
            ham = toric_code_hamiltonian(lat, float(value))
        else:
            ham = heisenberg_j1j2(*dims, float(value))
        energy, state = ground_energy(ham, cfg["method"], seed=cfg["seed"])
        comp = CompiledPauliSum(ham)
        residual = float(np.linalg.norm(comp.apply(state.amplitudes)
                                        - energy * state.amplitudes))
        rows.append((float(value), energy, residual))
        if model == "toric" and float(value) == 1.0:
            checks.append({
                "h": 1.0,
                "analytic_energy": -float(lat.n_sites),
                "abs_error": abs(energy + lat.n_sites),
            })
        if cfg["dump_states"]:
            save_state(out / f"state_{grid_name}={_fmt(float(value))}.qsv", state)
        print(f"{grid_name}={_fmt(float(value))}: E0={energy!r} residual={residual:.3e}")

    write_csv(out / "ed.csv", ["param", "energy", "residual"], rows)
    write_json(out / "ed.json", {
        "model": model,
        "method": cfg["method"],
        "points": [{"param": p, "energy": e, "residual": r} for p, e, r in rows],
        "checks": checks,
    })
    return 0


def cmd_entropy(cfg: dict) -> int:
    state = load_state(cfg["state"])
    regions = load_regions(cfg["regions"])
    terms = analysis.topological_entropy_terms(state, regions)
    gamma = (terms["S_A"] + terms["S_B"] + terms["S_C"] + terms["S_ABC"]
             - terms["S_AB"] - terms["S_AC"] - terms["S_BC"])
    for name in ("S_A", "S_B", "S_C", "S_AB", "S_AC", "S_BC", "S_ABC"):
        print(f"{name} = {terms[name]!r}")
    print(f"gamma = {gamma!r}")
    if cfg.get("out"):
        write_json(Path(cfg["out"]), {"gamma": gamma, **terms})
    return 0


COMMANDS = {
    "train": cmd_train,
    "express": cmd_express,
    "bp-scan": cmd_bp_scan,
    "ed": cmd_ed,
    "entropy": cmd_entropy,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ggvqe",
        description="Global-gate circuit training and diagnostics toolkit",
    )
    parser.add_argument("--version", action="version", version=f"ggvqe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, fields in SCHEMAS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", default=None, help="TOML config file")
        for f in fields:
            flag = "--" + f.name.replace("_", "-")
            if f.kind == "bool":
                p.add_argument(flag, action="store_true", default=None, help=f.help)
            else:
                p.add_argument(flag, default=None, help=f.help)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
        return COMMANDS[args.command](cfg)
    except (ConfigError, ValueError, OSError) as exc:
        # bad flags, malformed files, out-of-range sizes: usage errors
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
