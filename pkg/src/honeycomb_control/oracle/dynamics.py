"""Spin-space time evolution, state fidelity and state-objective GRAPE."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..evolve import Pulse, divided_differences
from ..fermion import ModelParams
from ..grape import OptimizationResult, OptimizeConfig, optimize_objective
from ..lattice import HoneycombLattice, Link
from .spin import (
    SpinHamiltonian,
    SpinSector,
    _guard,
    ground_sector,
    ground_state,
    spin_hamiltonian,
)


def _dense_pair(ham) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(ham, SpinSector):
        return ham.H0, ham.Hc
    if isinstance(ham, SpinHamiltonian):
        _guard(ham.n_sites, 12)
        return ham.H0.toarray(), ham.Hc.toarray()
    H0, Hc = ham
    H0 = H0.toarray() if sp.issparse(H0) else np.asarray(H0)
    Hc = Hc.toarray() if sp.issparse(Hc) else np.asarray(Hc)
    return H0, Hc


def _segment_eigensystem(H0: np.ndarray, Hc: np.ndarray, values: np.ndarray):
    h = H0[None] + np.asarray(values, dtype=float)[:, None, None] * Hc[None]
    return np.linalg.eigh(h)


def _unitaries(lam: np.ndarray, V: np.ndarray, dt: float) -> np.ndarray:
    return np.einsum("kij,kj,klj->kil", V, np.exp(-1j * dt * lam), V.conj())


def spin_propagate(ham, pulse: Pulse, state: np.ndarray | None = None) -> np.ndarray:
    """``U = U_n ... U_1`` with ``U_k = exp(-i dt H(f_k))``, or ``U |state>`` if a state is given.

    ``ham`` is a :class:`SpinHamiltonian` (full space, at most 12 sites), a
    :class:`SpinSector` or a plain ``(H0, Hc)`` pair.
    """
    H0, Hc = _dense_pair(ham)
    dim = H0.shape[0]
    out = np.eye(dim, dtype=complex) if state is None else np.asarray(state, dtype=complex).copy()
    if pulse.duration == 0:
        return out
    lam, V = _segment_eigensystem(H0, Hc, pulse.values)
    for U in _unitaries(lam, V, pulse.dt):
        out = U @ out
    return out


def magnus4_ramp_unitary(ham, T: float, n: int) -> np.ndarray:
    """Spin-space counterpart of the fourth-order Magnus integration of ``f = t/T``."""
    H0, Hc = _dense_pair(ham)
    dt = T / n
    k = np.arange(n)
    g1, g2 = 0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6
    f1, f2 = (k + g1) / n, (k + g2) / n
    comm = Hc @ H0 - H0 @ Hc
    # Omega = -i dt H(fm) + (sqrt3/12) dt^2 (f2-f1) (-i)^2 [Hc, H0]
    herm = dt * (H0[None] + (0.5 * (f1 + f2))[:, None, None] * Hc[None])
    herm = herm - 1j * (math.sqrt(3) / 12) * dt**2 * (f2 - f1)[:, None, None] * comm[None]
    lam, V = np.linalg.eigh(herm)
    out = np.eye(H0.shape[0], dtype=complex)
    for U in _unitaries(lam, V, 1.0):
        out = U @ out
    return out


@dataclass
class StateProblem:
    """Initial and target states inside the conserved sector holding the ``H(0)`` ground state."""

    sector: SpinSector
    init: np.ndarray
    target: np.ndarray
    e_init: float
    e_target: float

    @property
    def dim(self) -> int:
        return self.sector.dim

    @property
    def overlap_at_zero(self) -> float:
        return float(abs(np.vdot(self.target, self.init)) ** 2)


_PROBLEMS: dict[tuple, StateProblem] = {}


def state_problem(
    lattice: HoneycombLattice,
    params: ModelParams,
    flipped_link: Link | int,
) -> StateProblem:
    _guard(lattice.n_sites, 12)
    idx = lattice.link_index(flipped_link)
    key = (lattice.rows, lattice.cols, lattice.boundary, lattice.axis, params, idx)
    if key not in _PROBLEMS:
        ham = spin_hamiltonian(lattice, params, idx)
        sector = ground_sector(lattice, ham)
        e0, init = ground_state(sector.at(0.0))
        e1, target = ground_state(sector.at(1.0))
        _PROBLEMS[key] = StateProblem(sector, init, target, e0, e1)
    return _PROBLEMS[key]


def state_fidelity(
    lattice: HoneycombLattice,
    params: ModelParams,
    flipped_link: Link | int,
    pulse: Pulse,
    target: np.ndarray | None = None,
) -> float:
    """``|<target| U |init>|^2``; the default target is the ground state of ``H(1)``."""
    prob = state_problem(lattice, params, flipped_link)
    psi = spin_propagate(prob.sector, pulse, prob.init)
    tgt = prob.target if target is None else target
    return float(abs(np.vdot(tgt, psi)) ** 2)


def adiabatic_state(
    lattice: HoneycombLattice,
    params: ModelParams,
    flipped_link: Link | int,
    T_ad: float,
    n: int = 1 << 15,
) -> np.ndarray:
    prob = state_problem(lattice, params, flipped_link)
    return magnus4_ramp_unitary(prob.sector, T_ad, n) @ prob.init


def state_objective_and_gradient(H0: np.ndarray, Hc: np.ndarray, init, target, pulse: Pulse):
    """State infidelity ``1 - |<target|U|init>|^2`` and its exact gradient."""
    n = pulse.n_segments
    lam, V = _segment_eigensystem(H0, Hc, pulse.values)
    U = _unitaries(lam, V, pulse.dt)
    fwd = np.empty((n + 1, H0.shape[0]), dtype=complex)
    fwd[0] = init
    for k in range(n):
        fwd[k + 1] = U[k] @ fwd[k]
    bwd = np.empty_like(fwd)
    bwd[n] = target
    for k in range(n - 1, -1, -1):
        bwd[k] = U[k].conj().T @ bwd[k + 1]
    amp = np.vdot(target, fwd[n])
    Vh = np.conj(np.swapaxes(V, -1, -2))
    C = (Vh @ Hc[None] @ V) * divided_differences(lam, pulse.dt)
    # d amp / d f_k = <bwd_{k+1}| V C V^dag |fwd_k>
    left = np.einsum("kji,kj->ki", V, bwd[1:].conj())
    right = np.einsum("kij,kj->ki", Vh, fwd[:-1])
    damp = np.einsum("ki,kij,kj->k", left, C, right)
    grad = -2.0 * np.real(np.conj(amp) * damp)
    return float(1.0 - abs(amp) ** 2), grad


def optimize_state(
    lattice: HoneycombLattice,
    params: ModelParams,
    flipped_link: Link | int,
    config: OptimizeConfig,
) -> OptimizationResult:
    """Multi-restart L-BFGS on the state infidelity (same loop as the Heisenberg optimizer)."""
    _guard(lattice.n_sites, 8)
    prob = state_problem(lattice, params, flipped_link)
    H0, Hc = prob.sector.H0, prob.sector.Hc
    return optimize_objective(
        lambda p: state_objective_and_gradient(H0, Hc, prob.init, prob.target, p), config, "state"
    )
