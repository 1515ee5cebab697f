"""Brute-force enumeration of link sectors, vortex sectors and gauge orbits.

Link sectors are bit masks (bit ``i`` set means ``u_i = -1``).  The stabilizer
``D_j`` acts by XOR with the mask of links incident to site ``j``, so every
gauge orbit is a coset of the GF(2) span of those masks.  Cosets are labelled
by reducing against an echelon basis of the span.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..lattice import HoneycombLattice
from .spin import ResourceGuardError

MAX_LINKS = 24


@dataclass
class SectorOrbits:
    vortex: tuple[int, ...]
    kappa: int
    orbit_sizes: list[int]


@dataclass
class GaugeOrbitReport:
    n_sites: int
    n_links: int
    n_plaquettes: int
    boundary: str
    sectors: list[SectorOrbits] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(sum(s.orbit_sizes) for s in self.sectors)

    @property
    def kappas(self) -> set[int]:
        return {s.kappa for s in self.sectors}

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "n_links": self.n_links,
            "n_plaquettes": self.n_plaquettes,
            "boundary": self.boundary,
            "total": self.total,
            "sectors": [
                {"vortex": list(s.vortex), "kappa": s.kappa, "orbit_sizes": s.orbit_sizes}
                for s in self.sectors
            ],
        }


def _echelon(masks: list[int]) -> list[int]:
    basis: list[int] = []
    for m in masks:
        for b in basis:
            m = min(m, m ^ b)
        if m:
            basis.append(m)
            basis.sort(reverse=True)
    # full reduction so each pivot (highest bit) appears in exactly one vector
    for i, b in enumerate(basis):
        for j in range(len(basis)):
            if j != i and basis[j] & (1 << (b.bit_length() - 1)):
                basis[j] ^= b
    return basis


def _parity(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        x ^= x >> shift
    return x & 1


def gauge_orbits(lattice: HoneycombLattice, max_links: int = MAX_LINKS) -> GaugeOrbitReport:
    L = lattice.n_links
    if L > max_links:
        raise ResourceGuardError(f"2^{L} link sectors exceeds the enumeration limit 2^{max_links}")
    site_masks = [sum(1 << i for i in lattice.incident_links(j)) for j in range(lattice.n_sites)]
    basis = _echelon(site_masks)
    orbit_size = 1 << len(basis)

    u = np.arange(1 << L, dtype=np.int64)
    vortex_bits = np.zeros_like(u)
    for p, plaq in enumerate(lattice.plaquettes):
        pmask = sum(1 << i for i in plaq.links)
        vortex_bits |= _parity(u & pmask) << p
    reps = u.copy()
    for b in basis:
        pivot = 1 << (b.bit_length() - 1)
        reps = np.where(reps & pivot, reps ^ b, reps)

    keys = np.unique(np.stack([vortex_bits, reps], axis=1), axis=0)
    sectors = []
    for vb in np.unique(keys[:, 0]):
        n_orbits = int(np.sum(keys[:, 0] == vb))
        w = tuple(-1 if (int(vb) >> p) & 1 else 1 for p in range(lattice.n_plaquettes))
        sectors.append(SectorOrbits(vortex=w, kappa=n_orbits, orbit_sizes=[orbit_size] * n_orbits))
    return GaugeOrbitReport(lattice.n_sites, L, lattice.n_plaquettes, lattice.boundary, sectors)
