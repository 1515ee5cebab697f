"""Command-line experiment runner.

Every subcommand writes ``manifest.json`` (full config, versions, seeds, wall
times and a result summary) and a CSV of records into ``--out``.  A manifest
can be fed back through ``--config`` to repeat the run.

Exit codes: 0 success, 1 configuration error, 2 verification failure,
3 resource-guard refusal.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy
import yaml

from .evolve import Propagator, adiabatic_target, orthogonality_defect
from .fermion import (
    ModelParams,
    assemble_coupling,
    fermionic_gap,
    ground_energy,
    save_matrix_csv,
    trivial_gauge,
    vortex_gap,
)
from .grape import OptimizationResult, OptimizeConfig, drop_time_sweep, min_segments, optimize
from .lattice import BOUNDARIES, LatticeError, build_lattice, lattice_for_qubits
from .oracle.spin import ResourceGuardError

log = logging.getLogger("honeycomb_control")

SCHEMA_VERSION = 1
CSV_COLUMNS = ["T", "n_segments", "seed", "restart", "objective", "infidelity", "iterations", "wall_time_s"]
WORKERS_ENV = "HONEYCOMB_WORKERS"
SUBCOMMANDS = ("lattice", "gaps", "adiabatic", "optimize", "sweep", "droptime", "minsteps", "verify")

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_GUARD = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    rows: int = 1
    cols: int = 1
    boundary: str = "open"
    axis: str = "horizontal"
    qubits: int | None = None
    sizes: list[int] | None = None
    J: float = 1.0
    K: float = 0.01
    link: str = "central"
    objective: str = "heisenberg"
    T: float = 3.5
    T_grid: list[float] | None = None
    n_segments: int = 200
    T_ad: float = 300.0
    n_ad: int | None = None
    restarts: int = 5
    seed: int = 0
    max_iterations: int = 5000
    grad_tolerance: float = 1e-12
    threshold: float = 1e-6
    segment_cap: int = 1024
    trials: int = 200
    out: str = "runs"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_INT_FIELDS = {"rows", "cols", "qubits", "n_segments", "n_ad", "restarts", "seed", "max_iterations",
               "segment_cap", "trials"}
_FLOAT_FIELDS = {"J", "K", "T", "T_ad", "grad_tolerance", "threshold"}
_GROUPS = {"lattice", "params", "optimizer", "output"}


def parse_grid(text) -> list[float]:
    """``"a:b:s"`` (inclusive of ``b``) or a comma list; lists pass through."""
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text).strip()
    if ":" in text:
        a, b, s = (float(v) for v in text.split(":"))
        if s <= 0 or b < a:
            raise ValueError(f"bad grid {text!r}")
        n = int(math.floor((b - a) / s + 1e-9))
        return [round(a + k * s, 12) for k in range(n + 1)]
    return [float(v) for v in text.split(",") if v.strip()]


def _coerce(name: str, value, where: str):
    def fail(expect):
        raise ConfigError(f"{where}field '{name}': expected {expect}, got {value!r}")

    if value is None:
        if _FIELDS[name].default is None:
            return None
        fail("a value")
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            fail("an integer")
        try:
            return int(value)
        except ValueError:
            fail("an integer")
    if name in _FLOAT_FIELDS:
        if isinstance(value, bool):
            fail("a number")
        try:
            return float(value)
        except (TypeError, ValueError):
            fail("a number")
    if name == "T_grid":
        try:
            return parse_grid(value)
        except (TypeError, ValueError):
            fail("a list of times or 'start:stop:step'")
    if name == "sizes":
        try:
            return [int(v) for v in (value if isinstance(value, list) else str(value).split(","))]
        except (TypeError, ValueError):
            fail("a list of qubit counts")
    return str(value)


def validate(cfg: ExperimentConfig, lines: dict[str, int] | None = None, source: str = "") -> ExperimentConfig:
    lines = lines or {}

    def where(name):
        return f"{source}:{lines[name]}: " if name in lines else (f"{source}: " if source else "")

    checks = [
        ("rows", cfg.rows >= 1, "rows must be >= 1"),
        ("cols", cfg.cols >= 1, "cols must be >= 1"),
        ("boundary", cfg.boundary in BOUNDARIES, f"boundary must be one of {BOUNDARIES}"),
        ("axis", cfg.axis in ("horizontal", "vertical"), "axis must be horizontal or vertical"),
        ("J", cfg.J > 0, "J must be positive"),
        ("objective", cfg.objective in ("heisenberg", "state"), "objective must be heisenberg or state"),
        ("T", cfg.T > 0, "T must be positive"),
        ("T_ad", cfg.T_ad > 0, "T_ad must be positive"),
        ("n_segments", cfg.n_segments >= 1, "n_segments must be >= 1"),
        ("restarts", cfg.restarts >= 1, "restarts must be >= 1"),
        ("threshold", 0 < cfg.threshold < 1, "threshold must lie in (0, 1)"),
        ("trials", cfg.trials >= 1, "trials must be >= 1"),
        ("max_iterations", cfg.max_iterations >= 1, "max_iterations must be >= 1"),
    ]
    for name, ok, msg in checks:
        if not ok:
            raise ConfigError(f"{where(name)}{msg}")
    if cfg.T_grid is not None:
        if not cfg.T_grid or any(t <= 0 for t in cfg.T_grid):
            raise ConfigError(f"{where('T_grid')}T_grid must be non-empty and positive")
        if any(b < a for a, b in zip(cfg.T_grid, cfg.T_grid[1:])):
            raise ConfigError(f"{where('T_grid')}T_grid must be sorted ascending")
    _parse_link(cfg.link, where("link"))
    return cfg


def _parse_link(text: str, where: str = ""):
    text = str(text)
    if text.startswith("central"):
        kind = text.partition(":")[2] or "z"
        if kind not in ("x", "y", "z"):
            raise ConfigError(f"{where}link kind must be x, y or z")
        return ("central", kind)
    try:
        return ("index", int(text))
    except ValueError:
        raise ConfigError(f"{where}link must be 'central', 'central:<kind>' or a link index") from None


def _flatten(node: yaml.Node, source: str, prefix_ok: bool = True) -> tuple[dict, dict[str, int]]:
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"{source}:{node.start_mark.line + 1}: expected a mapping")
    values, lines = {}, {}
    for knode, vnode in node.value:
        key = knode.value
        line = knode.start_mark.line + 1
        if prefix_ok and key in _GROUPS and isinstance(vnode, yaml.MappingNode):
            sub_vals, sub_lines = _flatten(vnode, source, prefix_ok=False)
            values.update(sub_vals)
            lines.update(sub_lines)
            continue
        if key not in _FIELDS:
            raise ConfigError(f"{source}:{line}: unknown field '{key}'")
        values[key] = yaml.safe_load(yaml.serialize(vnode))
        lines[key] = line
    return values, lines


def load_config_file(path) -> tuple[dict, dict[str, int], str | None]:
    """Parse a YAML/JSON config (or a run manifest) into raw values with line numbers."""
    path = Path(path)
    source = str(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{source}: {exc.strerror}") from None
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if root is None:
        return {}, {}, None
    if not isinstance(root, yaml.MappingNode):
        raise ConfigError(f"{source}:{root.start_mark.line + 1}: expected a mapping")
    keys = {k.value: v for k, v in root.value}
    if "config" in keys and "subcommand" in keys:
        values, lines = _flatten(keys["config"], source)
        return values, lines, str(keys["subcommand"].value)
    values, lines = _flatten(root, source)
    return values, lines, None


def build_config(args: argparse.Namespace) -> tuple[ExperimentConfig, str | None]:
    raw, lines, manifest_cmd = {}, {}, None
    source = ""
    if args.config:
        raw, lines, manifest_cmd = load_config_file(args.config)
        source = str(args.config)
    values = {}
    for name, value in raw.items():
        values[name] = _coerce(name, value, f"{source}:{lines[name]}: ")
    for name in _FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = _coerce(name, flag, "flag ")
            lines.pop(name, None)
    cfg = ExperimentConfig(**values)
    if cfg.qubits is not None and not {"rows", "cols"} & (set(raw) | _flags_given(args)):
        cfg.rows, cfg.cols = lattice_for_qubits(cfg.qubits)
    return validate(cfg, lines, source), manifest_cmd


def _flags_given(args) -> set[str]:
    return {n for n in ("rows", "cols") if getattr(args, n, None) is not None}


# ---------------------------------------------------------------- setup helpers


@dataclass
class Setup:
    lattice: object
    params: ModelParams
    link: int
    model: object

    def describe(self) -> dict:
        l = self.lattice.links[self.link]
        return {
            "rows": self.lattice.rows,
            "cols": self.lattice.cols,
            "boundary": self.lattice.boundary,
            "axis": self.lattice.axis,
            "n_sites": self.lattice.n_sites,
            "n_links": self.lattice.n_links,
            "n_plaquettes": self.lattice.n_plaquettes,
            "flipped_link": {"index": self.link, "source": l.source, "target": l.target, "kind": l.kind},
        }


def make_setup(cfg: ExperimentConfig, rows: int | None = None, cols: int | None = None) -> Setup:
    lat = build_lattice(rows or cfg.rows, cols or cfg.cols, cfg.boundary, cfg.axis)
    mode, val = _parse_link(cfg.link)
    idx = lat.central_link(val) if mode == "central" else lat.link_index(val)
    params = ModelParams(cfg.J, cfg.K)
    model = assemble_coupling(lat, trivial_gauge(lat), params, idx)
    return Setup(lat, params, idx, model)


def optimize_config(cfg: ExperimentConfig, T: float | None = None, n_segments: int | None = None) -> OptimizeConfig:
    return OptimizeConfig(
        n_segments=n_segments or cfg.n_segments,
        T=cfg.T if T is None else T,
        T_ad=cfg.T_ad,
        restarts=cfg.restarts,
        seed=cfg.seed,
        grad_tolerance=cfg.grad_tolerance,
        max_iterations=cfg.max_iterations,
        infidelity_goal=cfg.threshold,
    )


def _target(cfg: ExperimentConfig, setup: Setup) -> Propagator:
    return adiabatic_target(setup.model, cfg.T_ad, cfg.n_ad)


def _run_one(job) -> OptimizationResult:
    """Worker entry point; ``job`` is a picklable tuple."""
    cfg, rows, cols, opt_cfg, target_matrix = job
    setup = make_setup(cfg, rows, cols)
    if cfg.objective == "state":
        from .oracle.dynamics import optimize_state

        return optimize_state(setup.lattice, setup.params, setup.link, opt_cfg)
    return optimize(setup.model, opt_cfg, Propagator(target_matrix))


def worker_count(cli_value: int | None = None) -> int:
    if cli_value is not None:
        return max(1, cli_value)
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    return 1


def run_batch(jobs: list, workers: int) -> list[OptimizationResult]:
    if workers <= 1 or len(jobs) <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_run_one, jobs))


def records_of(result: OptimizationResult) -> list[dict]:
    cfg = result.config
    return [
        {
            "T": cfg.T,
            "n_segments": cfg.n_segments,
            "seed": r.seed,
            "restart": r.restart,
            "objective": result.objective,
            "infidelity": repr(float(r.infidelity)),
            "iterations": r.iterations,
            "wall_time_s": f"{r.wall_time_s:.6f}",
        }
        for r in result.per_restart
    ]


def write_csv(path: Path, rows: list[dict], columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_manifest(out: Path, subcommand: str, cfg: ExperimentConfig, summary: dict, wall: float,
                   files: list[str]) -> Path:
    from importlib.metadata import PackageNotFoundError, version

    try:
        pkg_version = version("artifact")
    except PackageNotFoundError:
        pkg_version = "unknown"
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "config": cfg.to_dict(),
        "versions": {
            "package": pkg_version,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "seeds": {"seed": cfg.seed, "restarts": cfg.restarts},
        "wall_time_s": wall,
        "files": files,
        "summary": summary,
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(_jsonable(manifest), indent=2))
    return path


# ---------------------------------------------------------------- subcommands


def cmd_lattice(cfg, out: Path, workers: int):
    setup = make_setup(cfg)
    (out / "lattice.json").write_text(json.dumps(setup.lattice.to_dict(), indent=1))
    rows = [{"quantity": k, "value": v} for k, v in (
        ("n_sites", setup.lattice.n_sites),
        ("n_links", setup.lattice.n_links),
        ("n_plaquettes", setup.lattice.n_plaquettes),
        ("n_triples", len(setup.lattice.triples)),
    )]
    write_csv(out / "lattice.csv", rows, ["quantity", "value"])
    summary = setup.describe() | {"n_triples": len(setup.lattice.triples)}
    return summary, ["lattice.json", "lattice.csv"], EXIT_OK


def cmd_gaps(cfg, out: Path, workers: int):
    setup = make_setup(cfg)
    delta = vortex_gap(setup.lattice, setup.link, setup.params)
    gap0 = fermionic_gap(setup.model, 0.0)
    gap1 = fermionic_gap(setup.model, 1.0)
    summary = setup.describe() | {
        "vortex_gap": delta,
        "adiabatic_timescale": delta**-2 if delta > 0 else math.inf,
        "fermionic_gap_f0": gap0,
        "fermionic_gap_f1": gap1,
        "ground_energy_f0": ground_energy(setup.model, 0.0),
        "ground_energy_f1": ground_energy(setup.model, 1.0),
        "vortex_gap_below_fermionic_gap": bool(delta < min(gap0, gap1)),
    }
    save_matrix_csv(out / "A0.csv", setup.model.A0)
    save_matrix_csv(out / "Ac.csv", setup.model.Ac)
    keys = ["vortex_gap", "adiabatic_timescale", "fermionic_gap_f0", "fermionic_gap_f1",
            "ground_energy_f0", "ground_energy_f1"]
    write_csv(out / "gaps.csv", [{"quantity": k, "value": repr(summary[k])} for k in keys], ["quantity", "value"])
    return summary, ["gaps.csv", "A0.csv", "Ac.csv"], EXIT_OK


def cmd_adiabatic(cfg, out: Path, workers: int):
    setup = make_setup(cfg)
    t0 = time.perf_counter()
    target = _target(cfg, setup)
    elapsed = time.perf_counter() - t0
    target.save(out / "target.csv")
    history = target.meta.get("history", [])
    write_csv(out / "adiabatic.csv", [{"n_ad": n, "frobenius_change": repr(c)} for n, c in history],
              ["n_ad", "frobenius_change"])
    summary = setup.describe() | {
        "T_ad": cfg.T_ad,
        "n_ad": target.meta["n_ad"],
        "method": target.meta["method"],
        "last_change": target.meta.get("last_change"),
        "orthogonality_defect": orthogonality_defect(target),
        "determinant": float(np.linalg.det(target.matrix)),
        "seconds": elapsed,
    }
    return summary, ["target.csv", "adiabatic.csv"], EXIT_OK


def _job(cfg, setup, opt_cfg, target):
    return (cfg, setup.lattice.rows, setup.lattice.cols, opt_cfg, None if target is None else target.matrix)


def _prepare(cfg):
    setup = make_setup(cfg)
    target = _target(cfg, setup) if cfg.objective == "heisenberg" else None
    if cfg.objective == "state":
        from .oracle.spin import _guard

        _guard(setup.lattice.n_sites, 8)
    return setup, target


def cmd_optimize(cfg, out: Path, workers: int):
    setup, target = _prepare(cfg)
    (res,) = run_batch([_job(cfg, setup, optimize_config(cfg), target)], workers)
    write_csv(out / "optimize.csv", records_of(res), CSV_COLUMNS)
    (out / "best_pulse.json").write_text(json.dumps(res.best_pulse.to_dict()))
    summary = setup.describe() | {"best_infidelity": res.best_infidelity, "T": cfg.T,
                                  "below_threshold": bool(res.best_infidelity < cfg.threshold)}
    return summary, ["optimize.csv", "best_pulse.json"], EXIT_OK


def _grid(cfg) -> list[float]:
    return cfg.T_grid if cfg.T_grid is not None else [cfg.T]


def _sweep(cfg, setup, target, workers):
    jobs = [_job(cfg, setup, optimize_config(cfg, T), target) for T in _grid(cfg)]
    results = run_batch(jobs, workers)
    return drop_time_sweep(
        setup.model, _grid(cfg), optimize_config(cfg), target, cfg.threshold,
        runner=lambda c: None, results_for=lambda cfgs: results,
    )


def cmd_sweep(cfg, out: Path, workers: int):
    setup, target = _prepare(cfg)
    res = _sweep(cfg, setup, target, workers)
    rows = [r for result in res.results for r in records_of(result)]
    write_csv(out / "sweep.csv", rows, CSV_COLUMNS)
    summary = setup.describe() | {"grid": res.grid, "drop_time": res.drop_time, "threshold": res.threshold}
    return summary, ["sweep.csv"], EXIT_OK


def _sizes(cfg) -> list[tuple[int, int]]:
    if cfg.sizes:
        return [lattice_for_qubits(n) for n in cfg.sizes]
    return [(cfg.rows, cfg.cols)]


def cmd_droptime(cfg, out: Path, workers: int):
    rows, table = [], []
    for r, c in _sizes(cfg):
        sub = dataclasses.replace(cfg, rows=r, cols=c)
        setup, target = _prepare(sub)
        res = _sweep(sub, setup, target, workers)
        rows += [rec for result in res.results for rec in records_of(result)]
        table.append({"rows": r, "cols": c, "n_sites": setup.lattice.n_sites,
                      "flipped_link": setup.link, "drop_time": res.drop_time, "grid": res.grid})
    write_csv(out / "droptime.csv", rows, CSV_COLUMNS)
    return {"lattices": table, "threshold": cfg.threshold}, ["droptime.csv"], EXIT_OK


def cmd_minsteps(cfg, out: Path, workers: int):
    rows, table = [], []
    for r, c in _sizes(cfg):
        sub = dataclasses.replace(cfg, rows=r, cols=c)
        setup, target = _prepare(sub)
        if sub.T_grid is not None:
            drop = _sweep(sub, setup, target, workers)
            rows += [rec for result in drop.results for rec in records_of(result)]
            T = drop.drop_time
        else:
            T = sub.T
        n_min = None
        if T is not None:
            job = lambda oc: run_batch([_job(sub, setup, oc, target)], 1)[0]  # noqa: E731
            n_min = min_segments(
                setup.model, T, optimize_config(sub), target, sub.threshold, cap=sub.segment_cap,
                runner=job, on_result=lambda res: rows.extend(records_of(res)),
            )
        table.append({"rows": r, "cols": c, "n_sites": setup.lattice.n_sites, "T": T, "min_segments": n_min})
    write_csv(out / "minsteps.csv", rows, CSV_COLUMNS)
    return {"lattices": table, "threshold": cfg.threshold}, ["minsteps.csv"], EXIT_OK


def cmd_verify(cfg, out: Path, workers: int):
    from .evolve import Pulse
    from .oracle.bound import verify_bound
    from .oracle.dynamics import adiabatic_state, state_fidelity, state_problem
    from .oracle.orbits import gauge_orbits
    from .oracle.spin import _guard, compare_spectra, plaquette_operator, spin_hamiltonian

    setup = make_setup(cfg)
    lat = setup.lattice
    _guard(lat.n_sites, 10)
    checks = []

    def check(name, value, tol, passed):
        checks.append({"check": name, "value": repr(float(value)), "tolerance": repr(float(tol)),
                       "passed": bool(passed)})

    ham = spin_hamiltonian(lat, setup.params, setup.link)
    worst = 0.0
    for f in (0.0, 0.5, 1.0):
        H = ham.at(f)
        for p in range(lat.n_plaquettes):
            W = plaquette_operator(lat, p)
            D = H @ W - W @ H
            worst = max(worst, abs(D).max() if D.nnz else 0.0)
    check("plaquette_conservation", worst, 1e-12, worst <= 1e-12)

    if lat.boundary == "open":
        for f in (0.0, 1.0):
            cmp = compare_spectra(lat, setup.params, setup.link, f)
            check(f"spectrum_f{f:g}", cmp.max_level_error, 1e-8, cmp.max_level_error <= 1e-8)
            check(f"ground_energy_f{f:g}", cmp.ground_error, 1e-8, cmp.ground_error <= 1e-8)

        prob = state_problem(lat, setup.params, setup.link)
        psi = adiabatic_state(lat, setup.params, setup.link, cfg.T_ad)
        f_ad = abs(np.vdot(prob.target, psi)) ** 2
        check("adiabatic_state_fidelity", f_ad, 1e-4, f_ad >= 1 - 1e-4)
        f_lin = state_fidelity(lat, setup.params, setup.link, Pulse.linear_ramp(1.0, 100))
        checks.append({"check": "linear_ramp_fidelity_T1", "value": repr(f_lin), "tolerance": "", "passed": True})

        rep = verify_bound(lat, setup.params, setup.link, cfg.trials, cfg.seed, cfg.T_ad)
        check("bound_violations", len(rep.violations), 0, not rep.violations)
        check("b24_violations", len(rep.b24_violations), 0, not rep.b24_violations)
        check("b4_frobenius_identity", rep.b4_max_error, 1e-8, rep.b4_max_error < 1e-8)
        (out / "bound.json").write_text(json.dumps(_jsonable(rep.to_dict()), indent=1))

    if lat.n_links <= 24:
        orbits = gauge_orbits(lat)
        total_ok = orbits.total == 2**lat.n_links
        check("orbit_total", orbits.total, 0, total_ok)
        (out / "orbits.json").write_text(json.dumps(orbits.to_dict(), indent=1))

    write_csv(out / "verify.csv", checks, ["check", "value", "tolerance", "passed"])
    failed = [c["check"] for c in checks if not c["passed"]]
    summary = setup.describe() | {"checks": len(checks), "failed": failed}
    return summary, ["verify.csv"], EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {
    "lattice": cmd_lattice,
    "gaps": cmd_gaps,
    "adiabatic": cmd_adiabatic,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "droptime": cmd_droptime,
    "minsteps": cmd_minsteps,
    "verify": cmd_verify,
}


HELP = {
    "lattice": "lattice counts and JSON export",
    "gaps": "vortex gap, fermionic gaps and the adiabatic timescale",
    "adiabatic": "adiabatic target propagator with its convergence history",
    "optimize": "one multi-restart optimization at duration T",
    "sweep": "optimizations over a grid of durations",
    "droptime": "drop time per lattice size",
    "minsteps": "minimum segment count at the drop time per lattice size",
    "verify": "exact spin-space checks of the fermionic model",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="honeycomb-control",
        description="Optimal-control vortex creation in the honeycomb model.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", help="YAML/JSON config or a previous manifest.json")
        p.add_argument("--out", help="output directory")
        p.add_argument("--workers", type=int, help=f"worker processes (default ${WORKERS_ENV} or 1)")
        g = p.add_argument_group("lattice")
        g.add_argument("--rows", type=int)
        g.add_argument("--cols", type=int)
        g.add_argument("--boundary", choices=BOUNDARIES)
        g.add_argument("--axis", choices=("horizontal", "vertical"))
        g.add_argument("--qubits", type=int, help="pick an open grid with this many sites")
        g.add_argument("--sizes", help="comma list of qubit counts (droptime, minsteps)")
        g.add_argument("--link", help="'central', 'central:<kind>' or a link index")
        g = p.add_argument_group("model")
        g.add_argument("--J", type=float)
        g.add_argument("--K", type=float)
        g = p.add_argument_group("optimization")
        g.add_argument("--objective", choices=("heisenberg", "state"))
        g.add_argument("--T", type=float)
        g.add_argument("--T-grid", dest="T_grid", help="'start:stop:step' or comma list")
        g.add_argument("--n-segments", dest="n_segments", type=int)
        g.add_argument("--T-ad", dest="T_ad", type=float)
        g.add_argument("--n-ad", dest="n_ad", type=int, help="fixed target step count (default: converge)")
        g.add_argument("--restarts", type=int)
        g.add_argument("--seed", type=int)
        g.add_argument("--max-iterations", dest="max_iterations", type=int)
        g.add_argument("--grad-tolerance", dest="grad_tolerance", type=float)
        g.add_argument("--threshold", type=float)
        g.add_argument("--segment-cap", dest="segment_cap", type=int)
        g.add_argument("--trials", type=int, help="random pulses for the bound check")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, manifest_cmd = build_config(args)
        if manifest_cmd is not None and manifest_cmd != args.command:
            raise ConfigError(f"{args.config}: manifest was written by '{manifest_cmd}', not '{args.command}'")
        workers = worker_count(args.workers)
        out = Path(args.out if args.out is not None else Path(cfg.out) / args.command)
        out.mkdir(parents=True, exist_ok=True)
        cfg.out = str(out)
        t0 = time.perf_counter()
        summary, files, code = COMMANDS[args.command](cfg, out, workers)
        wall = time.perf_counter() - t0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LatticeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceGuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    write_manifest(out, args.command, cfg, summary, wall, files)
    print(json.dumps(_jsonable(summary), indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
