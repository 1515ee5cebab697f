"""Exact spin-space construction of the honeycomb Hamiltonian family.

Qubit ``j`` is lattice site ``j``; site 0 is the most significant bit of the
computational-basis index.  Operators are built as sparse Pauli strings and
densified only inside small symmetry sectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..fermion import LinkSector, ModelParams, trivial_gauge, vortex_sector
from ..lattice import HoneycombLattice, Link, control_triples

MAX_SITES = 14


class ResourceGuardError(RuntimeError):
    """Refusal to build an exponentially large object."""


class DegenerateStateError(RuntimeError):
    """The requested ground state is not unique."""


def _guard(n_sites: int, limit: int = MAX_SITES) -> None:
    if n_sites > limit:
        raise ResourceGuardError(f"{n_sites} sites exceeds the spin-space limit of {limit}")


def pauli_string(n_sites: int, ops: dict[int, str] | list[tuple[int, str]]) -> sp.csr_matrix:
    """Sparse matrix of a product of single-site Paulis (repeated sites multiply in order)."""
    dim = 2 ** n_sites
    states = np.arange(dim)
    items = ops.items() if isinstance(ops, dict) else ops
    # apply right-most factor first
    phase = np.ones(dim, dtype=complex)
    cur = states.copy()
    for site, kind in reversed(list(items)):
        bit = (cur >> (n_sites - 1 - site)) & 1
        if kind == "x":
            cur = cur ^ (1 << (n_sites - 1 - site))
        elif kind == "y":
            phase = phase * np.where(bit == 0, 1j, -1j)
            cur = cur ^ (1 << (n_sites - 1 - site))
        elif kind == "z":
            phase = phase * np.where(bit == 0, 1.0, -1.0)
        else:
            raise ValueError(f"unknown Pauli kind {kind!r}")
    return sp.csr_matrix((phase, (cur, states)), shape=(dim, dim))


def bond_operator(lattice: HoneycombLattice, link: int) -> sp.csr_matrix:
    l = lattice.links[link]
    return pauli_string(lattice.n_sites, {l.source: l.kind, l.target: l.kind})


def triple_operator(lattice: HoneycombLattice, triple) -> sp.csr_matrix:
    return pauli_string(
        lattice.n_sites,
        {triple.left: triple.kinds[0], triple.middle: triple.kinds[1], triple.right: triple.kinds[2]},
    )


def plaquette_operator(lattice: HoneycombLattice, p: int) -> sp.csr_matrix:
    """``W_p``: each plaquette site carries the Pauli of its outward link."""
    plaq = lattice.plaquettes[p]
    ops = {}
    for i, s in enumerate(plaq.sites):
        k_in = lattice.links[plaq.links[i - 1]].kind
        k_out = lattice.links[plaq.links[i]].kind
        (ops[s],) = {"x", "y", "z"} - {k_in, k_out}
    return pauli_string(lattice.n_sites, ops)


@dataclass
class SpinHamiltonian:
    """``H(f) = H0 + f * Hc`` as sparse matrices on the full spin space."""

    H0: sp.csr_matrix
    Hc: sp.csr_matrix
    n_sites: int
    flipped_link: int

    def at(self, f: float) -> sp.csr_matrix:
        return self.H0 + f * self.Hc


def spin_hamiltonian(
    lattice: HoneycombLattice,
    params: ModelParams,
    flipped_link: Link | int,
) -> SpinHamiltonian:
    """Drift ``-J sum sigma sigma - K sum sigma sigma sigma`` plus its control term.

    The control term doubles back the bond on ``flipped_link`` and the four
    three-body terms containing both of its endpoints.
    """
    _guard(lattice.n_sites)
    idx = lattice.link_index(flipped_link)
    n = lattice.n_sites
    dim = 2 ** n
    H0 = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(lattice.n_links):
        H0 = H0 - params.J * bond_operator(lattice, i)
    if params.K:
        for t in lattice.triples:
            H0 = H0 - params.K * triple_operator(lattice, t)
    Hc = 2.0 * params.J * bond_operator(lattice, idx)
    if params.K:
        for t in control_triples(lattice, idx):
            Hc = Hc + 2.0 * params.K * triple_operator(lattice, t)
    return SpinHamiltonian(H0=H0.tocsr(), Hc=Hc.tocsr(), n_sites=n, flipped_link=idx)


def dangling_strings(lattice: HoneycombLattice) -> list[sp.csr_matrix]:
    """Conserved string operators joining pairs of dangling bond ends.

    On an open lattice every missing link leaves a free b-Majorana.  The spin
    operator ``sigma_j^{s_j} (bonds along a path) sigma_k^{s_k}`` between two
    such ends commutes with every bond and three-body term.  Ends are paired
    in site order; each string is made Hermitian.
    """
    ends = [(s, k) for s in range(lattice.n_sites) for k in lattice.missing_kinds(s)]
    n = lattice.n_sites
    strings = []
    for (a, ka), (b, kb) in zip(ends[0::2], ends[1::2]):
        path = lattice.shortest_path(a, b)
        ops = [(a, ka)]
        for s, t in zip(path, path[1:]):
            kind = lattice.links[lattice.link_between(s, t)].kind
            ops += [(s, kind), (t, kind)]
        ops.append((b, kb))
        S = pauli_string(n, ops)
        # Pauli strings are unitary with S^2 = +-1; fix the phase to make S Hermitian
        diag = (S @ S).diagonal()
        if np.allclose(diag, -1):
            S = 1j * S
        strings.append(S.tocsr())
    return strings


def _split(Q: np.ndarray, op: sp.spmatrix, tol: float = 1e-8) -> dict[int, np.ndarray]:
    M = Q.conj().T @ (op @ Q)
    M = 0.5 * (M + M.conj().T)
    vals, vecs = np.linalg.eigh(M)
    if not np.all((np.abs(vals - 1) < tol) | (np.abs(vals + 1) < tol)):
        raise RuntimeError("operator is not a +-1 involution on the subspace")
    out = {}
    for sign in (-1, 1):
        mask = np.abs(vals - sign) < tol
        if mask.any():
            out[sign] = Q @ vecs[:, mask]
    return out


@dataclass
class SpinSector:
    """Dense restriction of ``H(f)`` to one joint eigenspace of the conserved operators."""

    basis: np.ndarray  # columns span the sector inside the full spin space
    H0: np.ndarray
    Hc: np.ndarray
    vortex: tuple[int, ...]
    string_signs: tuple[int, ...] = field(default_factory=tuple)

    @property
    def dim(self) -> int:
        return self.H0.shape[0]

    def at(self, f: float) -> np.ndarray:
        return self.H0 + f * self.Hc


def vortex_subspace(lattice: HoneycombLattice, vortex: tuple[int, ...]) -> np.ndarray:
    """Orthonormal basis of the joint ``W_p = vortex[p]`` eigenspace."""
    _guard(lattice.n_sites, 12)
    Q = np.eye(2 ** lattice.n_sites, dtype=complex)
    for p, w in enumerate(vortex):
        parts = _split(Q, plaquette_operator(lattice, p))
        if w not in parts:
            raise ValueError(f"vortex sector {vortex} is empty")
        Q = parts[w]
    return Q


def sector_spectrum(ham: SpinHamiltonian, lattice: HoneycombLattice, vortex: tuple[int, ...], f: float) -> np.ndarray:
    Q = vortex_subspace(lattice, vortex)
    H = Q.conj().T @ (ham.at(f) @ Q)
    return np.linalg.eigvalsh(0.5 * (H + H.conj().T))


def resolved_sectors(
    lattice: HoneycombLattice,
    ham: SpinHamiltonian,
    vortex: tuple[int, ...] | None = None,
) -> list[SpinSector]:
    """Split a vortex sector further by the conserved dangling strings."""
    if vortex is None:
        vortex = vortex_sector(lattice, trivial_gauge(lattice))
    Q = vortex_subspace(lattice, vortex)
    sectors = [((), Q)]
    for S in dangling_strings(lattice):
        nxt = []
        for signs, basis in sectors:
            for sign, sub in _split(basis, S).items():
                nxt.append((signs + (sign,), sub))
        sectors = nxt
    out = []
    for signs, basis in sectors:
        H0 = basis.conj().T @ (ham.H0 @ basis)
        Hc = basis.conj().T @ (ham.Hc @ basis)
        out.append(
            SpinSector(basis, 0.5 * (H0 + H0.conj().T), 0.5 * (Hc + Hc.conj().T), tuple(vortex), signs)
        )
    return out


def ground_sector(
    lattice: HoneycombLattice,
    ham: SpinHamiltonian,
    vortex: tuple[int, ...] | None = None,
    tol: float = 1e-9,
) -> SpinSector:
    """The resolved sector holding the lowest ``H(0)`` level (first one on ties)."""
    sectors = resolved_sectors(lattice, ham, vortex)
    energies = [np.linalg.eigvalsh(s.H0)[0] for s in sectors]
    lowest = min(energies)
    for s, e in zip(sectors, energies):
        if e < lowest + tol:
            return s
    raise AssertionError("unreachable")


def ground_state(H: np.ndarray, tol: float = 1e-9) -> tuple[float, np.ndarray]:
    vals, vecs = np.linalg.eigh(H)
    if len(vals) > 1 and vals[1] - vals[0] < tol * max(1.0, abs(vals[0])):
        raise DegenerateStateError(
            f"ground level {vals[0]:.12g} is degenerate (next level {vals[1]:.12g})"
        )
    return float(vals[0]), vecs[:, 0]


@dataclass
class SpectrumComparison:
    max_level_error: float
    ground_error: float
    multiplicity: int
    spin_dim: int


def compare_spectra(
    lattice: HoneycombLattice,
    params: ModelParams,
    flipped_link: Link | int,
    f: float,
) -> SpectrumComparison:
    """Spin levels of ``H(f)`` in the vortex-free sector against the free-fermion levels.

    Every fermionic level appears in the spin sector with the same
    multiplicity (the dangling b-Majoranas of open lattices add a uniform
    degeneracy), so the spin levels must equal the fermionic ones repeated.
    """
    from ..fermion import assemble_coupling, many_body_levels

    idx = lattice.link_index(flipped_link)
    ham = spin_hamiltonian(lattice, params, idx)
    vortex = vortex_sector(lattice, trivial_gauge(lattice))
    spin = sector_spectrum(ham, lattice, vortex, f)
    fermi = many_body_levels(assemble_coupling(lattice, trivial_gauge(lattice), params, idx), f)
    if spin.size % fermi.size:
        raise RuntimeError(f"spin sector dimension {spin.size} is not a multiple of {fermi.size}")
    mult = spin.size // fermi.size
    expected = np.repeat(fermi, mult)
    return SpectrumComparison(
        max_level_error=float(np.max(np.abs(spin - expected))),
        ground_error=float(abs(spin[0] - fermi[0])),
        multiplicity=mult,
        spin_dim=spin.size,
    )
