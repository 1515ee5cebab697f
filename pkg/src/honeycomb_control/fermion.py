"""Majorana fermionization of the time-dependent honeycomb Hamiltonian.

In a fixed link sector the spin Hamiltonian becomes

    H = (i/4) sum_jk A_jk c_j c_k

with ``A`` real antisymmetric over the N dynamical c-Majoranas.  Each link
contributes ``A[source, target] = 2 J u`` and each three-body triple
``(a, m, b)`` contributes ``A[a, b] = -2 K eps u_am u_mb`` where ``eps`` is the
Levi-Civita sign of the (left, middle, right) Pauli kinds and ``u_am`` is the
link value read in the ``a -> m`` direction.  The eigenvalues of ``iA`` come in
pairs ``+-w_j``; the many-body spectrum is ``E_g + sum_{j in S} w_j`` with
``E_g = -sum_j w_j / 2``.  All of this is checked against exact spin-space
diagonalization in the test-suite.

The Heisenberg equation of motion for the Majoranas is ``dc/dt = A c``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import HoneycombLattice, Link

_LEVI = {("x", "y", "z"): 1, ("y", "z", "x"): 1, ("z", "x", "y"): 1,
         ("x", "z", "y"): -1, ("z", "y", "x"): -1, ("y", "x", "z"): -1}


@dataclass(frozen=True)
class ModelParams:
    J: float = 1.0
    K: float = 0.01

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError("J must be positive")


@dataclass(frozen=True)
class LinkSector:
    """One +-1 value per oriented link (value of ``i b_source b_target``)."""

    values: tuple[int, ...]

    def __post_init__(self):
        if any(v not in (1, -1) for v in self.values):
            raise ValueError("link values must be +1 or -1")

    def flipped(self, *links: int) -> "LinkSector":
        vals = list(self.values)
        for i in links:
            vals[i] = -vals[i]
        return LinkSector(tuple(vals))

    def oriented(self, lattice: HoneycombLattice, a: int, b: int) -> int:
        """Link value read in the ``a -> b`` direction."""
        idx = lattice.link_between(a, b)
        v = self.values[idx]
        return v if lattice.links[idx].source == a else -v

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=int)


def trivial_gauge(lattice: HoneycombLattice) -> LinkSector:
    return LinkSector((1,) * lattice.n_links)


def site_flip(lattice: HoneycombLattice, sector: LinkSector, site: int) -> LinkSector:
    """Action of the stabilizer ``D_site``: flip every link touching ``site``."""
    return sector.flipped(*lattice.incident_links(site))


def vortex_sector(lattice: HoneycombLattice, sector: LinkSector) -> tuple[int, ...]:
    """Plaquette eigenvalues ``w_p`` induced by a link sector.

    With all links oriented B -> A, ``w_p`` is the plain product of the six
    boundary link values, so the trivial gauge is vortex free.
    """
    if len(sector.values) != lattice.n_links:
        raise ValueError(
            f"link sector has {len(sector.values)} values, lattice has {lattice.n_links} links"
        )
    return tuple(int(np.prod([sector.values[i] for i in p.links])) for p in lattice.plaquettes)


def coupling_matrix(lattice: HoneycombLattice, sector: LinkSector, params: ModelParams) -> np.ndarray:
    n = lattice.n_sites
    A = np.zeros((n, n))
    for idx, link in enumerate(lattice.links):
        v = 2.0 * params.J * sector.values[idx]
        A[link.source, link.target] += v
        A[link.target, link.source] -= v
    if params.K:
        for t in lattice.triples:
            u_am = sector.oriented(lattice, t.left, t.middle)
            u_mb = sector.oriented(lattice, t.middle, t.right)
            v = -2.0 * params.K * _LEVI[t.kinds] * u_am * u_mb
            A[t.left, t.right] += v
            A[t.right, t.left] -= v
    return A


@dataclass(frozen=True, eq=False)
class CouplingModel:
    """``A(f) = A0 + f * Ac``; ``A(1)`` is the sector with ``flipped_link`` negated."""

    A0: np.ndarray
    Ac: np.ndarray
    flipped_link: int

    @property
    def n(self) -> int:
        return self.A0.shape[0]

    def matrix(self, f: float) -> np.ndarray:
        return self.A0 + f * self.Ac

    def key(self) -> tuple:
        return (self.A0.tobytes(), self.Ac.tobytes(), self.A0.shape)


def assemble_coupling(
    lattice: HoneycombLattice,
    sector: LinkSector,
    params: ModelParams,
    flipped_link: Link | int,
) -> CouplingModel:
    idx = lattice.link_index(flipped_link)
    A0 = coupling_matrix(lattice, sector, params)
    A1 = coupling_matrix(lattice, sector.flipped(idx), params)
    return CouplingModel(A0=A0, Ac=A1 - A0, flipped_link=idx)


def _as_matrix(model_or_matrix, f: float | None) -> np.ndarray:
    if isinstance(model_or_matrix, CouplingModel):
        return model_or_matrix.matrix(0.0 if f is None else f)
    return np.asarray(model_or_matrix, dtype=float)


def spectrum(model: CouplingModel | np.ndarray, f: float | None = None) -> np.ndarray:
    """Non-negative quasiparticle energies, ascending, ``N // 2`` of them."""
    A = _as_matrix(model, f)
    n = A.shape[0]
    eig = np.linalg.eigvalsh(1j * A)
    return np.sort(np.abs(eig[n - n // 2:]))


def ground_energy(model: CouplingModel | np.ndarray, f: float | None = None) -> float:
    return -0.5 * float(np.sum(spectrum(model, f)))


def fermionic_gap(model: CouplingModel | np.ndarray, f: float | None = None) -> float:
    w = spectrum(model, f)
    return float(w[0]) if len(w) else 0.0


def many_body_levels(model: CouplingModel | np.ndarray, f: float | None = None) -> np.ndarray:
    """All ``2**(N/2)`` levels ``E_g + sum_S w_j``, ascending (small N only)."""
    w = spectrum(model, f)
    levels = np.array([ground_energy(model, f)])
    for wj in w:
        levels = np.concatenate([levels, levels + wj])
    return np.sort(levels)


def vortex_gap(
    lattice: HoneycombLattice,
    flipped_link: Link | int,
    params: ModelParams,
    sector: LinkSector | None = None,
) -> float:
    """Ground-energy difference between the sector and its ``flipped_link`` flip."""
    model = assemble_coupling(lattice, sector or trivial_gauge(lattice), params, flipped_link)
    return abs(ground_energy(model, 1.0) - ground_energy(model, 0.0))


def save_matrix_csv(path, A: np.ndarray) -> None:
    np.savetxt(path, A, delimiter=",", fmt="%.17g")
