"""Honeycomb lattice geometry in brick-wall coordinates.

Sites live on integer coordinates ``(x, y)``.  A site with ``x + y`` even is on
sublattice A (its z-link points up); ``x + y`` odd is sublattice B (z-link
points down).  Horizontal bonds alternate between x- and y-links, vertical
bonds are z-links.  Every link is oriented from its B endpoint to its A
endpoint, which reproduces the usual honeycomb convention:

* x-link: bottom-left -> top-right
* y-link: bottom-right -> top-left
* z-link: top -> bottom

A plaquette (brick) with lower-left corner ``(x0, r)`` (``x0 + r`` even) owns
sites ``x0..x0+2`` on rows ``r`` and ``r+1``.  Its sites are listed clockwise
starting from the top vertex ``(x0+1, r+1)``.  Brick row ``r`` starts at
``x0 = r % 2``.

Site numbering is row-major over the (wrapped) coordinates: sorted by ``y``,
then ``x``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

KINDS = ("x", "y", "z")
BOUNDARIES = ("open", "half_periodic", "periodic")


class LatticeError(ValueError):
    """Invalid or pathological lattice geometry."""


@dataclass(frozen=True)
class Link:
    source: int
    target: int
    kind: str

    @property
    def sites(self) -> frozenset[int]:
        return frozenset((self.source, self.target))

    def other(self, site: int) -> int:
        if site == self.source:
            return self.target
        if site == self.target:
            return self.source
        raise ValueError(f"site {site} is not an endpoint of {self}")


@dataclass(frozen=True)
class Plaquette:
    sites: tuple[int, ...]
    links: tuple[int, ...]  # links[i] joins sites[i] and sites[i + 1]


@dataclass(frozen=True)
class ThreeBodyTriple:
    """Three consecutive plaquette sites ``left - middle - right``.

    ``links`` are the indices of the (left, middle) and (middle, right) links.
    ``kinds`` are the Pauli kinds acting on left, middle and right; the middle
    spin carries the kind of its link pointing out of the plaquette.
    """

    left: int
    middle: int
    right: int
    links: tuple[int, int]
    kinds: tuple[str, str, str]
    plaquette: int


@dataclass(frozen=True)
class HoneycombLattice:
    rows: int
    cols: int
    boundary: str
    axis: str
    coords: tuple[tuple[int, int], ...]
    links: tuple[Link, ...]
    plaquettes: tuple[Plaquette, ...]
    triples: tuple[ThreeBodyTriple, ...]
    _pair_index: dict = field(repr=False, compare=False, hash=False, default_factory=dict)

    @property
    def n_sites(self) -> int:
        return len(self.coords)

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def n_plaquettes(self) -> int:
        return len(self.plaquettes)

    def link_between(self, a: int, b: int) -> int:
        """Index of the link joining sites ``a`` and ``b``."""
        try:
            return self._pair_index[frozenset((a, b))]
        except KeyError:
            raise LatticeError(f"no link between sites {a} and {b}") from None

    def link_index(self, link: Link | int) -> int:
        if isinstance(link, int):
            if not 0 <= link < self.n_links:
                raise LatticeError(f"link index {link} out of range")
            return link
        idx = self._pair_index.get(link.sites)
        if idx is None or self.links[idx] != link:
            raise LatticeError(f"{link} does not belong to this lattice")
        return idx

    def incident_links(self, site: int) -> list[int]:
        return [i for i, l in enumerate(self.links) if site in (l.source, l.target)]

    def neighbors(self, site: int) -> list[int]:
        return [self.links[i].other(site) for i in self.incident_links(site)]

    def missing_kinds(self, site: int) -> list[str]:
        present = {self.links[i].kind for i in self.incident_links(site)}
        return [k for k in KINDS if k not in present]

    def plaquettes_of_link(self, link: Link | int) -> list[int]:
        idx = self.link_index(link)
        return [p for p, plaq in enumerate(self.plaquettes) if idx in plaq.links]

    def shortest_path(self, a: int, b: int) -> list[int]:
        """Sites of a shortest path from ``a`` to ``b`` (BFS, lowest index first)."""
        prev = {a: None}
        queue = deque([a])
        while queue:
            s = queue.popleft()
            if s == b:
                break
            for t in sorted(self.neighbors(s)):
                if t not in prev:
                    prev[t] = s
                    queue.append(t)
        if b not in prev:
            raise LatticeError(f"sites {a} and {b} are disconnected")
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        return path[::-1]

    def central_link(self, kind: str = "z") -> int:
        """Index of the ``kind`` link closest to the lattice centroid."""
        cx = sum(c[0] for c in self.coords) / self.n_sites
        cy = sum(c[1] for c in self.coords) / self.n_sites
        best, best_d = None, math.inf
        for i, l in enumerate(self.links):
            if l.kind != kind:
                continue
            (x1, y1), (x2, y2) = self.coords[l.source], self.coords[l.target]
            d = ((x1 + x2) / 2 - cx) ** 2 + ((y1 + y2) / 2 - cy) ** 2
            if d < best_d - 1e-12:
                best, best_d = i, d
        if best is None:
            raise LatticeError(f"lattice has no {kind}-links")
        return best

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "boundary": self.boundary,
            "axis": self.axis,
            "numbering": "row-major over brick-wall coordinates (y, then x)",
            "orientation": "links point from sublattice B (x+y odd) to A (x+y even)",
            "n_sites": self.n_sites,
            "n_links": self.n_links,
            "n_plaquettes": self.n_plaquettes,
            "sites": [{"index": i, "x": c[0], "y": c[1]} for i, c in enumerate(self.coords)],
            "links": [
                {"index": i, "source": l.source, "target": l.target, "kind": l.kind}
                for i, l in enumerate(self.links)
            ],
            "plaquettes": [
                {"index": p, "sites": list(q.sites), "links": list(q.links)}
                for p, q in enumerate(self.plaquettes)
            ],
            "triples": [
                {
                    "left": t.left,
                    "middle": t.middle,
                    "right": t.right,
                    "links": list(t.links),
                    "kinds": list(t.kinds),
                    "plaquette": t.plaquette,
                }
                for t in self.triples
            ],
        }


def _third_kind(a: str, b: str) -> str:
    (k,) = set(KINDS) - {a, b}
    return k


def _brick_corners(rows: int, cols: int) -> Iterator[tuple[int, int]]:
    for r in range(rows):
        for k in range(cols):
            yield r % 2 + 2 * k, r


def build_lattice(rows: int, cols: int, boundary: str = "open", axis: str = "horizontal") -> HoneycombLattice:
    """Build a ``rows x cols`` brick-wall honeycomb.

    ``half_periodic`` wraps along ``axis`` only (``"horizontal"`` or
    ``"vertical"``); ``periodic`` wraps both.  Vertical wrapping needs an even
    number of plaquette rows so the brick offsets close up.
    """
    if rows < 1 or cols < 1:
        raise LatticeError("rows and cols must be >= 1")
    if boundary not in BOUNDARIES:
        raise LatticeError(f"unknown boundary {boundary!r}; expected one of {BOUNDARIES}")
    if axis not in ("horizontal", "vertical"):
        raise LatticeError(f"unknown axis {axis!r}")

    wrap_x = boundary == "periodic" or (boundary == "half_periodic" and axis == "horizontal")
    wrap_y = boundary == "periodic" or (boundary == "half_periodic" and axis == "vertical")
    width, height = 2 * cols, rows
    if wrap_y and rows % 2:
        raise LatticeError("vertical wrapping needs an even number of plaquette rows")

    def wrap(x: int, y: int) -> tuple[int, int]:
        return (x % width if wrap_x else x, y % height if wrap_y else y)

    # edges keyed by their geometric identity so wrapped duplicates are detectable
    bricks = []
    edge_pairs: dict[tuple, tuple[tuple[int, int], tuple[int, int], str]] = {}
    for x0, r in _brick_corners(rows, cols):
        ring = [(x0 + 1, r + 1), (x0 + 2, r + 1), (x0 + 2, r), (x0 + 1, r), (x0, r), (x0, r + 1)]
        bricks.append(ring)
        for i in range(6):
            (xa, ya), (xb, yb) = ring[i], ring[(i + 1) % 6]
            if ya == yb:
                x, y = min(xa, xb), ya
                if (x + y) % 2 == 0:
                    src, dst, kind = (x + 1, y), (x, y), "y"
                else:
                    src, dst, kind = (x, y), (x + 1, y), "x"
                key = ("h",) + wrap(x, y)
            else:
                x, y = xa, min(ya, yb)
                src, dst, kind = (x, y + 1), (x, y), "z"
                key = ("v",) + wrap(x, y)
            edge_pairs[key] = (wrap(*src), wrap(*dst), kind)

    coord_set = {wrap(*c) for ring in bricks for c in ring}
    coords = tuple(sorted(coord_set, key=lambda c: (c[1], c[0])))
    site_of = {c: i for i, c in enumerate(coords)}

    links: list[Link] = []
    pair_index: dict[frozenset, int] = {}
    link_of_key: dict[tuple, int] = {}
    for key in sorted(edge_pairs, key=lambda k: (k[2], k[1], k[0])):
        src, dst, kind = edge_pairs[key]
        a, b = site_of[src], site_of[dst]
        if a == b:
            raise LatticeError("lattice too small: a link closes on itself")
        pair = frozenset((a, b))
        if pair in pair_index:
            raise LatticeError(f"lattice too small: sites {a} and {b} are doubly linked")
        pair_index[pair] = len(links)
        link_of_key[key] = len(links)
        links.append(Link(a, b, kind))

    plaquettes = []
    triples = []
    for p, ring in enumerate(bricks):
        sites = tuple(site_of[wrap(*c)] for c in ring)
        if len(set(sites)) != 6:
            raise LatticeError("lattice too small: a plaquette visits a site twice")
        plinks = tuple(pair_index[frozenset((sites[i], sites[(i + 1) % 6]))] for i in range(6))
        plaquettes.append(Plaquette(sites, plinks))
        for i in range(6):
            l_in, l_out = plinks[i - 1], plinks[i]
            k_in, k_out = links[l_in].kind, links[l_out].kind
            triples.append(
                ThreeBodyTriple(
                    left=sites[i - 1],
                    middle=sites[i],
                    right=sites[(i + 1) % 6],
                    links=(l_in, l_out),
                    kinds=(k_in, _third_kind(k_in, k_out), k_out),
                    plaquette=p,
                )
            )

    return HoneycombLattice(
        rows=rows,
        cols=cols,
        boundary=boundary,
        axis=axis,
        coords=coords,
        links=tuple(links),
        plaquettes=tuple(plaquettes),
        triples=tuple(triples),
        _pair_index=pair_index,
    )


def control_triples(lattice: HoneycombLattice, link: Link | int) -> list[ThreeBodyTriple]:
    """Three-body terms containing both endpoints of ``link``."""
    idx = lattice.link_index(link)
    return [t for t in lattice.triples if idx in t.links]


def euler_counts(lattice: HoneycombLattice) -> tuple[int, int, int]:
    return lattice.n_sites, lattice.n_links, lattice.n_plaquettes


def open_site_count(rows: int, cols: int) -> int:
    return 2 * (2 * cols + 1) + (rows - 1) * (2 * cols + 2)


def lattice_for_qubits(n_sites: int, max_dim: int = 16) -> tuple[int, int]:
    """Open ``(rows, cols)`` grid with exactly ``n_sites`` sites.

    Among matching grids the most square one wins, then the one with fewer rows.
    When no grid hits ``n_sites`` exactly the closest count is used (smaller
    count on ties).
    """
    candidates = [(r, c) for r in range(1, max_dim + 1) for c in range(1, max_dim + 1)]

    def rank(rc):
        n = open_site_count(*rc)
        return abs(n - n_sites), n, abs(rc[0] - rc[1]), rc[0]

    return min(candidates, key=rank)
