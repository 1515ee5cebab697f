"""Numerical check that Heisenberg infidelity bounds state infidelity from above."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..evolve import Pulse, adiabatic_target, heisenberg_infidelity, propagate, trace_overlap
from ..fermion import ModelParams, assemble_coupling, trivial_gauge
from ..lattice import HoneycombLattice, Link
from .dynamics import magnus4_ramp_unitary, spin_propagate, state_problem
from .spin import _guard


def min_phase_distance(U1: np.ndarray, U2: np.ndarray) -> float:
    """``min_phi ||U1 - exp(i phi) U2||`` in operator norm.

    The norm equals ``max_j |exp(i t_j) - exp(i phi)|`` over the eigenphases
    ``t_j`` of ``U2^dag U1``; the best ``phi`` sits in the middle of the
    shortest arc holding all of them, giving ``2 sin(arc / 4)``.
    """
    phases = np.sort(np.angle(np.linalg.eigvals(U2.conj().T @ U1)))
    gaps = np.diff(np.concatenate([phases, phases[:1] + 2 * np.pi]))
    arc = 2 * np.pi - gaps.max()
    return float(2 * np.sin(arc / 4))


def frobenius_gap(O1: np.ndarray, O2: np.ndarray) -> float:
    """``||W1 - W2||_F`` for ``W_i = 1_N (+) O_i``; the identity blocks cancel."""
    return float(np.linalg.norm(O1 - O2))


@dataclass
class BoundTerms:
    heisenberg_infidelity: float
    state_fidelity: float
    bound: float
    frobenius_sq: float
    op_distance: float

    @property
    def rhs(self) -> float:
        return (1 - np.sqrt(self.state_fidelity)) * self.bound

    @property
    def ratio(self) -> float:
        denom = 1 - np.sqrt(self.state_fidelity)
        return self.heisenberg_infidelity / denom if denom > 0 else np.inf


def bound_terms(O_t, O, U_t, U, psi0, n_sites: int) -> BoundTerms:
    phi_t, phi = U_t @ psi0, U @ psi0
    fs = min(1.0, float(abs(np.vdot(phi_t, phi)) ** 2))
    return BoundTerms(
        heisenberg_infidelity=heisenberg_infidelity(O_t, O),
        state_fidelity=fs,
        bound=1.0 / (32 * n_sites**3),
        frobenius_sq=frobenius_gap(O_t, O) ** 2,
        op_distance=min_phase_distance(U_t, U),
    )


@dataclass
class BoundReport:
    n_sites: int
    trials: int
    seed: int
    constant: float
    violations: list = field(default_factory=list)
    b24_violations: list = field(default_factory=list)
    b4_max_error: float = 0.0
    min_ratio: float = np.inf
    max_heisenberg_infidelity: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations and not self.b24_violations and self.b4_max_error < 1e-8

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def random_pulse(rng: np.random.Generator, n_segments: int = 40, T_range=(0.2, 5.0)) -> Pulse:
    T = float(rng.uniform(*T_range))
    return Pulse(T, rng.uniform(-0.5, 1.5, n_segments))


def verify_bound(
    lattice: HoneycombLattice,
    params: ModelParams,
    flipped_link: Link | int,
    trials: int = 200,
    seed: int = 0,
    T_ad: float = 300.0,
    slack: float = 1e-12,
) -> BoundReport:
    """Compare ``I_H`` with ``(1 - sqrt(F_s)) / (32 N^3)`` on random pulses.

    Both pictures use the same adiabatic ramp: the fermionic target is the
    converged fourth-order Magnus propagator and the spin target is the same
    integrator with the same step count, applied to the initial ground state.
    """
    _guard(lattice.n_sites, 10)
    idx = lattice.link_index(flipped_link)
    model = assemble_coupling(lattice, trivial_gauge(lattice), params, idx)
    target = adiabatic_target(model, T_ad)
    prob = state_problem(lattice, params, idx)
    U_t = magnus4_ramp_unitary(prob.sector, T_ad, target.meta["n_ad"])
    n = lattice.n_sites
    report = BoundReport(n_sites=n, trials=trials, seed=seed, constant=1.0 / (32 * n**3))
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        pulse = random_pulse(rng)
        O = propagate(model, pulse).matrix
        U = spin_propagate(prob.sector, pulse)
        terms = bound_terms(target.matrix, O, U_t, U, prob.init, n)
        if terms.heisenberg_infidelity < terms.rhs - slack:
            report.violations.append({"trial": trial, "pulse": pulse.to_dict(), **asdict(terms)})
        if terms.op_distance < np.sqrt(2 * (1 - np.sqrt(terms.state_fidelity))) - slack:
            report.b24_violations.append({"trial": trial, "pulse": pulse.to_dict(), **asdict(terms)})
        if trace_overlap(target, O) >= 0:
            err = abs(terms.frobenius_sq - 2 * (2 * n) * terms.heisenberg_infidelity)
            report.b4_max_error = max(report.b4_max_error, err)
        report.min_ratio = min(report.min_ratio, terms.ratio)
        report.max_heisenberg_infidelity = max(report.max_heisenberg_infidelity, terms.heisenberg_infidelity)
    return report
