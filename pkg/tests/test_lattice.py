import json
from itertools import product

import pytest

from honeycomb_control.lattice import (
    KINDS,
    LatticeError,
    Link,
    build_lattice,
    control_triples,
    euler_counts,
    lattice_for_qubits,
    open_site_count,
)

OPEN_SIZES = list(product(range(1, 6), range(1, 6)))
PERIODIC_SIZES = [(r, c) for r in (2, 4) for c in range(2, 6)]
HALF_SIZES = [(r, c) for r in range(1, 6) for c in range(2, 6)]


def all_lattices():
    for r, c in OPEN_SIZES:
        yield build_lattice(r, c, "open")
    for r, c in PERIODIC_SIZES:
        yield build_lattice(r, c, "periodic")
    for r, c in HALF_SIZES:
        yield build_lattice(r, c, "half_periodic")
    yield build_lattice(2, 3, "half_periodic", axis="vertical")


@pytest.mark.parametrize(
    "args, counts",
    [
        ((1, 1, "open"), (6, 6, 1)),
        ((1, 2, "open"), (10, 11, 2)),
        ((2, 2, "periodic"), (8, 12, 4)),
        ((1, 2, "half_periodic"), (8, 10, 2)),
        ((3, 3, "open"), (30, 38, 9)),
    ],
)
def test_counts(args, counts):
    assert euler_counts(build_lattice(*args)) == counts


def test_euler_relations():
    for lat in all_lattices():
        n, l, p = euler_counts(lat)
        expected = n - 1 if lat.boundary == "open" else n
        assert l - p == expected, (lat.rows, lat.cols, lat.boundary)


def test_open_site_formula():
    for r, c in OPEN_SIZES:
        assert build_lattice(r, c).n_sites == open_site_count(r, c)


def test_links_in_plaquettes():
    for lat in all_lattices():
        counts = [len(lat.plaquettes_of_link(i)) for i in range(lat.n_links)]
        assert max(counts) <= 2
        if lat.boundary == "periodic":
            assert set(counts) == {2}


def test_site_kinds_are_distinct():
    for lat in all_lattices():
        for s in range(lat.n_sites):
            kinds = [lat.links[i].kind for i in lat.incident_links(s)]
            assert len(kinds) == len(set(kinds))
        if lat.boundary == "periodic":
            assert all(len(lat.incident_links(s)) == 3 for s in range(lat.n_sites))


def test_interior_sites_have_every_kind():
    lat = build_lattice(3, 3)
    interior = [s for s in range(lat.n_sites) if len(lat.incident_links(s)) == 3]
    assert interior
    for s in interior:
        assert sorted(lat.links[i].kind for i in lat.incident_links(s)) == list(KINDS)


def test_orientation_points_b_to_a():
    for lat in all_lattices():
        if lat.boundary != "open":
            continue
        for l in lat.links:
            xs, ys = lat.coords[l.source]
            xt, yt = lat.coords[l.target]
            assert (xs + ys) % 2 == 1 and (xt + yt) % 2 == 0


def test_plaquettes_are_closed_hexagons():
    for lat in all_lattices():
        for plaq in lat.plaquettes:
            assert len(set(plaq.sites)) == 6
            for i, li in enumerate(plaq.links):
                a, b = plaq.sites[i], plaq.sites[(i + 1) % 6]
                assert lat.links[li].sites == frozenset((a, b))
            kinds = [lat.links[i].kind for i in plaq.links]
            assert all(kinds[i] != kinds[(i + 1) % 6] for i in range(6))
            assert kinds[:3] == kinds[3:]


def test_triples_match_path_enumeration():
    for lat in all_lattices():
        assert len(lat.triples) == 6 * lat.n_plaquettes
        boundaries = [set(p.links) for p in lat.plaquettes]
        paths = set()
        for m in range(lat.n_sites):
            nb = lat.neighbors(m)
            for a in nb:
                for b in nb:
                    pair = {lat.link_between(a, m), lat.link_between(m, b)}
                    if a < b and any(pair <= bl for bl in boundaries):
                        paths.add((a, m, b))
        listed = {(min(t.left, t.right), t.middle, max(t.left, t.right)) for t in lat.triples}
        assert listed == paths


def test_triple_structure():
    lat = build_lattice(2, 2, "periodic")
    for t in lat.triples:
        l1, l2 = (lat.links[i] for i in t.links)
        assert t.middle in l1.sites and t.middle in l2.sites
        assert t.left not in lat.neighbors(t.right)
        assert t.kinds[0] == l1.kind and t.kinds[2] == l2.kind
        assert set(t.kinds) == set(KINDS)


def test_deterministic():
    for args in [(2, 3, "open"), (2, 2, "periodic"), (3, 2, "half_periodic")]:
        assert build_lattice(*args).to_dict() == build_lattice(*args).to_dict()


def test_json_export():
    lat = build_lattice(1, 2)
    d = json.loads(json.dumps(lat.to_dict()))
    assert d["n_sites"] == 10 and len(d["links"]) == 11 and len(d["triples"]) == 12
    assert {l["kind"] for l in d["links"]} == set(KINDS)


@pytest.mark.parametrize(
    "args",
    [(1, 1, "periodic"), (1, 2, "periodic"), (3, 2, "periodic"), (2, 1, "periodic"), (1, 1, "half_periodic")],
)
def test_rejects_pathological_tori(args):
    with pytest.raises(LatticeError):
        build_lattice(*args)


@pytest.mark.parametrize("args", [(0, 1), (1, 0)])
def test_rejects_empty(args):
    with pytest.raises(LatticeError):
        build_lattice(*args)


def test_rejects_unknown_boundary():
    with pytest.raises(LatticeError):
        build_lattice(1, 1, "twisted")


def test_control_triples_hexagon():
    lat = build_lattice(1, 1)
    sites = lat.plaquettes[0].sites
    for i in range(6):
        idx = lat.link_between(sites[i], sites[(i + 1) % 6])
        got = {(t.left, t.middle, t.right) for t in control_triples(lat, idx)}
        # the two boundary walks of length two that run through this link
        want = {
            (sites[i - 1], sites[i], sites[(i + 1) % 6]),
            (sites[i], sites[(i + 1) % 6], sites[(i + 2) % 6]),
        }
        assert got == want


def test_control_triples_interior_link():
    lat = build_lattice(3, 3)
    link = lat.central_link()
    triples = control_triples(lat, link)
    assert len(triples) == 4
    ends = lat.links[link].sites
    assert all(ends <= {t.left, t.middle, t.right} for t in triples)


def test_control_triples_unknown_link():
    lat = build_lattice(1, 1)
    with pytest.raises(LatticeError):
        control_triples(lat, 99)
    with pytest.raises(LatticeError):
        control_triples(lat, Link(0, 5, "x"))


def test_shared_link_of_two_plaquettes():
    lat = build_lattice(1, 2)
    link = lat.central_link()
    assert lat.links[link].kind == "z"
    assert lat.plaquettes_of_link(link) == [0, 1]


@pytest.mark.parametrize("n, rc", [(6, (1, 1)), (10, (1, 2)), (16, (2, 2)), (24, (2, 3)), (30, (3, 3))])
def test_lattice_for_qubits(n, rc):
    assert lattice_for_qubits(n) == rc


def test_shortest_path():
    lat = build_lattice(1, 2)
    path = lat.shortest_path(0, lat.n_sites - 1)
    assert path[0] == 0 and path[-1] == lat.n_sites - 1
    for a, b in zip(path, path[1:]):
        lat.link_between(a, b)
