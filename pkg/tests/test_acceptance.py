"""Acceptance criteria 1 to 10, one PASS/FAIL line each.

Criteria 2, 4, 5 and 10 run full optimization sweeps and are marked slow;
deselect them with ``-m "not slow"``.  Sweep results are shared between
criteria through a module-level cache so criterion 10 reuses the drop times
measured for criteria 2, 4 and 5.
"""

import math
import time

import numpy as np
import pytest

from honeycomb_control.evolve import Pulse, adiabatic_target, orthogonality_defect, propagate
from honeycomb_control.fermion import ModelParams, assemble_coupling, trivial_gauge, vortex_gap
from honeycomb_control.grape import OptimizeConfig, drop_time_sweep, min_segments, objective_and_gradient, optimize
from honeycomb_control.lattice import build_lattice, lattice_for_qubits
from honeycomb_control.oracle.bound import verify_bound
from honeycomb_control.oracle.dynamics import optimize_state, state_fidelity
from honeycomb_control.oracle.orbits import gauge_orbits
from honeycomb_control.oracle.spin import compare_spectra

THRESHOLD = 1e-6
PARAMS = ModelParams(1.0, 0.01)

# Heisenberg sweeps: grid, segments, T_ad, restarts and iteration cap per lattice size.
# The 6-qubit grid brackets the expected drop near T = 3; larger lattices stop at the
# first success because only the drop time is needed from them.
SWEEPS = {
    6: dict(grid=(1.0, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0), n_segments=200, restarts=5, max_iterations=3000,
            stop_early=False),
    10: dict(grid=(6.0, 8.0, 9.0, 10.0, 11.0, 12.0, 14.0), n_segments=200, restarts=3, max_iterations=3000,
             stop_early=False),
    16: dict(grid=(5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0), n_segments=300, restarts=2, max_iterations=2000,
             stop_early=True),
    24: dict(grid=(5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0), n_segments=300, restarts=2, max_iterations=2000,
             stop_early=True),
    30: dict(grid=(5.0, 10.0, 20.0, 30.0, 40.0, 60.0), n_segments=400, restarts=2, max_iterations=2000,
             stop_early=True),
}

_SWEEP_CACHE: dict = {}


def central_model(qubits: int, params: ModelParams = PARAMS):
    lat = build_lattice(*lattice_for_qubits(qubits))
    return lat, assemble_coupling(lat, trivial_gauge(lat), params, lat.central_link())


def sweep(qubits: int, T_ad: float = 300.0):
    key = (qubits, T_ad)
    if key not in _SWEEP_CACHE:
        spec = SWEEPS[qubits]
        _, model = central_model(qubits)
        cfg = OptimizeConfig(n_segments=spec["n_segments"], T_ad=T_ad, restarts=spec["restarts"],
                             max_iterations=spec["max_iterations"])
        _SWEEP_CACHE[key] = drop_time_sweep(model, spec["grid"], cfg, stop_early=spec["stop_early"])
    return _SWEEP_CACHE[key]


def grid_text(result) -> str:
    return " ".join(f"T={T:g}:{v:.1e}" for T, v in result.grid)


def central_differences(fun, x, h=1e-5):
    g = np.empty(x.size)
    for k in range(x.size):
        e = np.zeros(x.size)
        e[k] = h
        g[k] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


def relative_fit_residual(x, y) -> float:
    coeffs = np.polyfit(x, y, 2)
    return float(np.linalg.norm(np.polyval(coeffs, x) - y) / np.linalg.norm(y))


def test_criterion_1_gap_arithmetic(acceptance):
    t0 = time.perf_counter()
    hexagon = build_lattice(1, 1)
    d6 = vortex_gap(hexagon, hexagon.central_link(), ModelParams(1.0, 0.0))
    ten = build_lattice(1, 2)
    d10 = vortex_gap(ten, ten.central_link(), PARAMS)
    elapsed = time.perf_counter() - t0
    ok = abs(d6 - (4 - 2 * math.sqrt(3))) <= 1e-9 and abs(d10 - 0.375) <= 5e-3 and elapsed < 1.0
    acceptance(1, "vortex gaps", ok, f"delta6={d6:.12f} delta10={d10:.6f} runtime={elapsed:.3f}s")


@pytest.mark.slow
def test_criterion_2_six_qubit_heisenberg_drop(acceptance):
    ok, parts = True, []
    for T_ad in (100.0, 200.0, 300.0):
        res = sweep(6, T_ad)
        hi = all(v < THRESHOLD for T, v in res.grid if T >= 3.5)
        lo = all(v > 1e-3 for T, v in res.grid if T <= 2.0)
        drop = res.drop_time is not None and 2.5 <= res.drop_time <= 3.5
        ok &= hi and lo and drop
        parts.append(f"T_ad={T_ad:g} drop={res.drop_time} [{grid_text(res)}]")
    acceptance(2, "6-qubit Heisenberg drop time", ok, "; ".join(parts))


def test_criterion_3_six_qubit_state_objective(acceptance):
    lat = build_lattice(1, 1)
    link = lat.central_link()
    res = optimize_state(lat, PARAMS, link, OptimizeConfig(n_segments=100, T=0.9, restarts=5))
    ramp = state_fidelity(lat, PARAMS, link, Pulse.linear_ramp(1.0, 100))
    ok = res.best_infidelity <= 1e-6 and abs(ramp - 0.90) <= 0.05
    acceptance(3, "6-qubit state objective", ok,
               f"optimized infidelity(T=0.9)={res.best_infidelity:.2e} linear-ramp fidelity(T=1)={ramp:.4f}")


@pytest.mark.slow
def test_criterion_4_ten_qubit_drop(acceptance):
    res = sweep(10)
    ok = res.drop_time is not None and 8.0 <= res.drop_time <= 12.0
    acceptance(4, "10-qubit drop time", ok, f"drop={res.drop_time} [{grid_text(res)}]")


@pytest.mark.slow
def test_criterion_5_thirty_qubit(acceptance):
    res = sweep(30)
    succeeds = any(v < THRESHOLD for T, v in res.grid if T <= 60.0)
    fails_early = all(v >= THRESHOLD for T, v in res.grid if T <= 10.0)
    acceptance(5, "30-qubit drop within order of 30", succeeds and fails_early,
               f"drop={res.drop_time} [{grid_text(res)}]")


def test_criterion_6_bound(acceptance):
    lat = build_lattice(1, 1)
    rep = verify_bound(lat, PARAMS, lat.central_link(), trials=200, seed=0, slack=1e-12)
    ok = not rep.violations and not rep.b24_violations
    acceptance(6, "Heisenberg/state fidelity bound", ok,
               f"violations={len(rep.violations)} b24_violations={len(rep.b24_violations)} "
               f"min I_H/(1-sqrt F)={rep.min_ratio:.3e} constant={rep.constant:.3e}")


def test_criterion_7_fermionization(acceptance):
    worst_level, worst_ground, parts = 0.0, 0.0, []
    for rows_cols in ((1, 1), (1, 2)):
        lat = build_lattice(*rows_cols)
        for f in (0.0, 1.0):
            cmp = compare_spectra(lat, PARAMS, lat.central_link(), f)
            worst_level = max(worst_level, cmp.max_level_error)
            worst_ground = max(worst_ground, cmp.ground_error)
            parts.append(f"N={lat.n_sites} f={f:g} dim={cmp.spin_dim}")
    ok = worst_level <= 1e-8 and worst_ground <= 1e-8
    acceptance(7, "spin versus fermion spectra", ok,
               f"max level error={worst_level:.1e} ground error={worst_ground:.1e} ({', '.join(parts)})")


def test_criterion_8_gauge_orbits(acceptance):
    cases = {
        "open 6": (build_lattice(1, 1), 1, None),
        "periodic (2,2)": (build_lattice(2, 2, "periodic"), 4, 128),
        "half-periodic (1,2)": (build_lattice(1, 2, "half_periodic"), 2, None),
    }
    ok, parts = True, []
    for name, (lat, kappa, orbit) in cases.items():
        rep = gauge_orbits(lat)
        sizes = {s for sec in rep.sectors for s in sec.orbit_sizes}
        good = rep.kappas == {kappa} and rep.total == 2**lat.n_links
        if orbit is not None:
            good &= sizes == {orbit} and orbit == 2 ** (lat.n_sites - 1)
        ok &= good
        parts.append(f"{name}: kappa={sorted(rep.kappas)} orbit={sorted(sizes)} total={rep.total}=2^{lat.n_links}")
    acceptance(8, "gauge orbit counting", ok, "; ".join(parts))


def test_criterion_9_numerical_hygiene(acceptance):
    rng = np.random.default_rng(2024)
    worst_grad = 0.0
    for qubits in (6, 10):
        _, model = central_model(qubits)
        target = adiabatic_target(model, 300.0)
        for _ in range(25):
            T = rng.uniform(0.5, 10.0)
            x = rng.uniform(-0.5, 1.5, 20)
            _, g = objective_and_gradient(model, Pulse(T, x), target)
            fd = central_differences(lambda v: objective_and_gradient(model, Pulse(T, v), target)[0], x)
            worst_grad = max(worst_grad, np.linalg.norm(g - fd) / np.linalg.norm(fd))
    models = [central_model(6)[1], central_model(10)[1]]
    worst_orth = 0.0
    for i in range(1000):
        model = models[i % 2]
        pulse = Pulse(rng.uniform(0.1, 20.0), rng.uniform(-1.0, 2.0, int(rng.integers(1, 200))))
        worst_orth = max(worst_orth, orthogonality_defect(propagate(model, pulse)))
    model = models[0]
    cfg = OptimizeConfig(n_segments=40, T=2.0, T_ad=100.0, restarts=2, seed=7, max_iterations=50)
    a, b = optimize(model, cfg), optimize(model, cfg)
    same = a.best_infidelity == b.best_infidelity and np.array_equal(a.best_pulse.values, b.best_pulse.values)
    ok = worst_grad <= 1e-6 and worst_orth <= 1e-10 and same
    acceptance(9, "numerical hygiene", ok,
               f"gradient rel err={worst_grad:.1e} (50 instances) orthogonality defect={worst_orth:.1e} "
               f"(1000 pulses) seed-deterministic={same}")


@pytest.mark.slow
def test_criterion_10_scaling(acceptance):
    sizes = (6, 10, 16, 24, 30)
    drops, n_sites = [], []
    for qubits in sizes:
        res = sweep(qubits)
        if res.drop_time is None:
            # a growth fit needs every drop time; one missing one decides the criterion
            acceptance(10, "quadratic scaling of drop time and segments", False,
                       f"no drop time for {qubits} qubits on [{grid_text(res)}]; measured so far "
                       f"{dict(zip(n_sites, drops))}")
        lat, _ = central_model(qubits)
        n_sites.append(lat.n_sites)
        drops.append(res.drop_time)
    segs = []
    for qubits, T in zip(sizes, drops):
        spec = SWEEPS[qubits]
        _, model = central_model(qubits)
        cfg = OptimizeConfig(T=T, restarts=spec["restarts"], max_iterations=spec["max_iterations"])
        segs.append(min_segments(model, T, cfg, cap=2 * spec["n_segments"]))
    if None in segs:
        acceptance(10, "quadratic scaling of drop time and segments", False, f"segment search failed: {segs}")
    r_drop = relative_fit_residual(n_sites, drops)
    r_seg = relative_fit_residual(n_sites, segs)
    acceptance(10, "quadratic scaling of drop time and segments", r_drop < 0.5 and r_seg < 0.5,
               f"N={n_sites} drop={drops} residual={r_drop:.2f} segments={segs} residual={r_seg:.2f}")
