"""GRAPE optimization of piecewise-constant ramps against Heisenberg infidelity."""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .evolve import (
    Propagator,
    Pulse,
    adiabatic_target,
    divided_differences,
    step_eigensystem,
    steps_from_eigensystem,
)
from .fermion import CouplingModel

log = logging.getLogger(__name__)

THRESHOLD = 1e-6


@dataclass(frozen=True)
class OptimizeConfig:
    n_segments: int = 200
    T: float = 3.5
    T_ad: float = 300.0
    restarts: int = 5
    seed: int = 0
    grad_tolerance: float = 1e-12
    max_iterations: int = 5000
    infidelity_goal: float = 1e-6
    lbfgs_memory: int = 10
    bounds: tuple[float, float] | None = None
    clamp_endpoints: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0 < self.infidelity_goal < 1:
            raise ValueError("infidelity_goal must lie in (0, 1)")
        if self.n_segments < 1:
            raise ValueError("n_segments must be >= 1")
        if self.T <= 0 or self.T_ad <= 0:
            raise ValueError("durations must be positive")

    def restart_seeds(self) -> list[np.random.SeedSequence]:
        return np.random.SeedSequence(self.seed).spawn(self.restarts)


@dataclass
class RestartRecord:
    seed: int
    restart: int
    infidelity: float
    iterations: int
    wall_time_s: float
    failed: bool = False
    message: str = ""


@dataclass
class OptimizationResult:
    best_pulse: Pulse
    best_infidelity: float
    per_restart: list[RestartRecord]
    wall_time: float
    config: OptimizeConfig
    objective: str = "heisenberg"

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "best_infidelity": self.best_infidelity,
            "best_pulse": self.best_pulse.to_dict(),
            "per_restart": [asdict(r) for r in self.per_restart],
            "wall_time": self.wall_time,
            "config": asdict(self.config),
        }


@dataclass
class DropTimeResult:
    drop_time: float | None
    grid: list[tuple[float, float]]
    threshold: float = THRESHOLD
    min_segments: int | None = None
    results: list[OptimizationResult] = field(default_factory=list, repr=False)


def objective_and_gradient(model: CouplingModel, pulse: Pulse, target) -> tuple[float, np.ndarray]:
    """Heisenberg infidelity and its exact gradient with respect to every ramp value.

    With ``z = N + Tr(O_t^T O_n ... O_1)`` the infidelity is
    ``1 - |z| / 2N``.  Each ``dO_k/df_k`` comes from the divided-difference
    rule in the eigenbasis of ``i A(f_k)``.
    """
    Ot = target.matrix if isinstance(target, Propagator) else np.asarray(target)
    n_sites = model.n
    if Ot.shape != (n_sites, n_sites):
        raise ValueError(f"target is {Ot.shape}, model needs {(n_sites, n_sites)}")
    dt = pulse.dt
    lam, V = step_eigensystem(model, pulse.values)
    steps = steps_from_eigensystem(lam, V, dt)
    n = pulse.n_segments

    # prefix[k] = O_k ... O_1 (prefix[0] = 1); suffix[k] = Ot^T O_n ... O_{k+1}
    prefix = np.empty((n + 1, n_sites, n_sites))
    prefix[0] = np.eye(n_sites)
    for k in range(n):
        prefix[k + 1] = steps[k] @ prefix[k]
    suffix = np.empty((n + 1, n_sites, n_sites))
    suffix[n] = Ot.T
    for k in range(n - 1, -1, -1):
        suffix[k] = suffix[k + 1] @ steps[k]

    z = n_sites + np.trace(suffix[0])
    # d z / d f_k = Tr(M_k dO_k) with M_k = prefix[k] suffix[k+1]
    M = np.matmul(prefix[:-1], suffix[1:])
    Vh = np.conj(np.swapaxes(V, -1, -2))
    Mt = Vh @ M @ V
    C = Vh @ (1j * model.Ac)[None] @ V
    X = C * divided_differences(lam, dt)
    dz = np.real(np.einsum("kba,kab->k", Mt, X))
    infid = 1.0 - abs(z) / (2 * n_sites)
    grad = -np.sign(z) * dz / (2 * n_sites)
    return float(infid), grad


class _GoalReached(Exception):
    pass


def _run_lbfgs(
    fun: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0: np.ndarray,
    config: OptimizeConfig,
) -> tuple[np.ndarray, float, int, str]:
    best = {"x": x0.copy(), "f": np.inf, "nit": 0}

    def wrapped(x):
        f, g = fun(x)
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            raise FloatingPointError("non-finite objective")
        if f < best["f"]:
            best["x"], best["f"] = x.copy(), f
        return f, g

    def callback(intermediate_result):
        best["nit"] += 1
        if intermediate_result.fun < config.infidelity_goal:
            raise StopIteration

    n = x0.size
    bounds = None
    if config.bounds is not None or config.clamp_endpoints:
        lo, hi = config.bounds if config.bounds is not None else (None, None)
        bounds = [(lo, hi)] * n
        if config.clamp_endpoints:
            bounds[0], bounds[-1] = (0.0, 0.0), (1.0, 1.0)
            x0 = x0.copy()
            x0[0], x0[-1] = 0.0, 1.0
    res = minimize(
        wrapped,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        callback=callback,
        options={
            "maxcor": config.lbfgs_memory,
            "maxiter": config.max_iterations,
            "gtol": config.grad_tolerance,
            "ftol": 1e-15,
            "maxfun": 4 * config.max_iterations,
        },
    )
    return best["x"], best["f"], max(best["nit"], int(getattr(res, "nit", 0))), str(res.message)


def optimize_objective(
    fun: Callable[[Pulse], tuple[float, np.ndarray]],
    config: OptimizeConfig,
    objective: str,
) -> OptimizationResult:
    """Multi-restart L-BFGS over ramp values; ``fun`` maps a pulse to (infidelity, gradient)."""
    t_start = time.perf_counter()
    records = []
    best_pulse, best_val = None, np.inf
    for r, ss in enumerate(config.restart_seeds()):
        rng = np.random.default_rng(ss)
        x0 = rng.uniform(0.0, 1.0, config.n_segments)
        t0 = time.perf_counter()
        try:
            x, val, nit, msg = _run_lbfgs(lambda v: fun(Pulse(config.T, v)), x0, config)
            failed = False
        except FloatingPointError as exc:
            x, val, nit, msg, failed = x0, np.inf, 0, str(exc), True
        rec = RestartRecord(config.seed, r, float(val), nit, time.perf_counter() - t0, failed, msg)
        records.append(rec)
        log.debug("restart %d: infidelity %.3e after %d iterations", r, val, nit)
        if val < best_val:
            best_val, best_pulse = val, Pulse(config.T, x)
    if best_pulse is None:
        best_pulse = Pulse(config.T, np.zeros(config.n_segments))
    return OptimizationResult(
        best_pulse=best_pulse,
        best_infidelity=float(best_val),
        per_restart=records,
        wall_time=time.perf_counter() - t_start,
        config=config,
        objective=objective,
    )


def optimize(model: CouplingModel, config: OptimizeConfig, target: Propagator | None = None) -> OptimizationResult:
    if target is None:
        target = adiabatic_target(model, config.T_ad)
    return optimize_objective(lambda p: objective_and_gradient(model, p, target), config, "heisenberg")


def drop_time_sweep(
    model: CouplingModel,
    T_grid,
    config: OptimizeConfig,
    target: Propagator | None = None,
    threshold: float = THRESHOLD,
    runner: Callable[[OptimizeConfig], OptimizationResult] | None = None,
    stop_early: bool = False,
    results_for: Callable[[list[OptimizeConfig]], list[OptimizationResult]] | None = None,
) -> DropTimeResult:
    """Optimize at every grid time; the drop time is the first one below ``threshold``.

    ``runner`` replaces the Heisenberg optimization (e.g. with the state
    objective of the oracle).  With ``stop_early`` the sweep ends at the first
    success.  ``results_for`` evaluates a whole batch of configs at once (a
    worker pool, say) and takes precedence over ``runner`` when not stopping
    early.
    """
    T_grid = [float(t) for t in T_grid]
    if any(b < a for a, b in zip(T_grid, T_grid[1:])):
        raise ValueError("T_grid must be sorted ascending")
    if runner is None:
        if target is None:
            target = adiabatic_target(model, config.T_ad)
        runner = lambda cfg: optimize(model, cfg, target)  # noqa: E731
    configs = [replace(config, T=T) for T in T_grid]
    batch = results_for(configs) if results_for is not None and not stop_early else None
    grid, results, drop = [], [], None
    for i, T in enumerate(T_grid):
        res = batch[i] if batch is not None else runner(configs[i])
        grid.append((T, res.best_infidelity))
        results.append(res)
        if drop is None and res.best_infidelity < threshold:
            drop = T
            if stop_early:
                break
    return DropTimeResult(drop_time=drop, grid=grid, threshold=threshold, results=results)


def min_segments(
    model: CouplingModel,
    T: float,
    config: OptimizeConfig,
    target: Propagator | None = None,
    threshold: float = THRESHOLD,
    start: int = 2,
    cap: int = 1024,
    runner: Callable[[OptimizeConfig], OptimizationResult] | None = None,
    on_result: Callable[[OptimizationResult], None] | None = None,
) -> int | None:
    """Smallest segment count reaching ``threshold`` at duration ``T`` (doubling, then bisection)."""
    if runner is None:
        if target is None:
            target = adiabatic_target(model, config.T_ad)
        runner = lambda cfg: optimize(model, cfg, target)  # noqa: E731
    cache: dict[int, bool] = {}

    def ok(n: int) -> bool:
        if n not in cache:
            res = runner(replace(config, T=T, n_segments=n))
            if on_result is not None:
                on_result(res)
            cache[n] = res.best_infidelity < threshold
        return cache[n]

    lo, hi = 0, start
    while not ok(hi):
        lo = hi
        hi *= 2
        if hi > cap:
            return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
