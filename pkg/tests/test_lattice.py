import itertools

import pytest

from anyonsim.lattice import (
    Flavor,
    LatticeError,
    LinkType,
    build,
    loop_operators,
    plaquette_operator,
    plaquette_operators,
    zlink_neighbors,
)
from anyonsim.pauli import PauliString, commutes, product


@pytest.mark.parametrize(
    "shape,sites,zlinks,plaquettes",
    [((6, 6, "open"), 72, 36, 20), ((4, 2, "torus"), 16, 8, 8), ((6, 3, "torus"), 36, 18, 18)],
)
def test_counts(shape, sites, zlinks, plaquettes):
    lat = build(*shape)
    assert lat.site_count == sites
    assert len(lat.z_links) == zlinks
    assert len(lat.plaquettes) == plaquettes


def test_torus_is_three_regular(torus):
    for s in torus.sites:
        kinds = sorted(l.kind.value for l in torus.links_of(s))
        assert kinds == ["x", "y", "z"]


def test_open_degree_at_most_three(patch):
    for s in patch.sites:
        kinds = [l.kind for l in patch.links_of(s)]
        assert 1 <= len(kinds) <= 3 and len(set(kinds)) == len(kinds)


@pytest.mark.parametrize("shape", [(6, 6, "open"), (4, 2, "torus"), (6, 3, "torus")])
def test_plaquette_letter_is_outgoing_link_type(shape):
    # Each hexagon corner has exactly one link leaving the hexagon; W uses its type.
    lat = build(*shape)
    for p in lat.plaquettes:
        ring = set(p.sites)
        letters = plaquette_operator(lat, p).letters()
        for s in p.sites:
            out = [l for l in lat.links_of(s) if l.a not in ring or l.b not in ring]
            edges = [l for l in lat.links_of(s) if l.a in ring and l.b in ring]
            assert len(edges) == 2
            if out:
                assert len(out) == 1
                assert letters[s] == out[0].kind.value.upper()


def test_plaquettes_are_hexagon_cycles(patch):
    for p in patch.plaquettes:
        for a, b in zip(p.sites, p.sites[1:] + p.sites[:1]):
            assert any({l.a, l.b} == {a, b} for l in patch.links_of(a))


@pytest.mark.parametrize("shape", [(6, 6, "open"), (4, 2, "torus")])
def test_plaquettes_commute_and_square(shape):
    lat = build(*shape)
    ws = plaquette_operators(lat)
    for a, b in itertools.combinations(ws, 2):
        assert commutes(a, b)
    for w in ws:
        assert w.is_hermitian and w.weight == 6


@pytest.mark.parametrize("shape", [(6, 6, "open"), (4, 2, "torus")])
def test_plaquettes_commute_with_link_terms(shape):
    lat = build(*shape)
    for w in plaquette_operators(lat):
        for link in lat.links:
            assert commutes(w, lat.link_operator(link))


def test_flavor_rows(patch):
    for p in patch.plaquettes:
        assert p.flavor is (Flavor.E if p.row % 2 == 0 else Flavor.M)
    assert {p.row for p in patch.plaquettes} == {1, 2, 3, 4}
    assert {p.col for p in patch.plaquettes} == set(range(5))


def test_torus_plaquette_product_is_z_alignments(torus):
    # Product of all W_p is, up to phase, a product of z-link alignments.
    prod = product(plaquette_operators(torus))
    assert prod.x == 0
    zz = product(torus.alignment_operator(l) for l in torus.z_links)
    assert prod.z == zz.z or prod.z == 0


def test_loops_commute_with_everything(torus):
    loops = loop_operators(torus)
    assert len(loops) == 2
    assert commutes(*loops)  # joint eigenvalues label the loop sectors
    for lp in loops:
        for w in plaquette_operators(torus):
            assert commutes(lp, w)
        for link in torus.links:
            assert commutes(lp, torus.link_operator(link))
    assert loop_operators(build(6, 6)) == []


def test_zlink_partner(patch):
    for l in patch.z_links:
        assert l.b == l.a ^ 1
        assert patch.partner(l.a) == l.b
        assert patch.is_zlink_pair(l.a, l.b)


def test_zlink_neighbors_interior(patch):
    link = patch.zlink(3, 2)
    nb = zlink_neighbors(patch, link)
    assert len(nb) == 4
    assert {p.flavor for p in nb} == {Flavor.E, Flavor.M}


def test_link_types(patch):
    kinds = {k: sum(1 for l in patch.links if l.kind is k) for k in LinkType}
    assert kinds[LinkType.Z] == 36
    assert kinds[LinkType.X] == 30
    assert kinds[LinkType.Y] == 25


def test_build_errors():
    with pytest.raises(LatticeError):
        build(3, 2, "torus")
    with pytest.raises(LatticeError):
        build(4, 1, "torus")
    with pytest.raises(LatticeError):
        build(0, 3)
    with pytest.raises(ValueError):
        build(2, 2, "sphere")


def test_foreign_plaquette_rejected(patch, torus):
    with pytest.raises(LatticeError):
        plaquette_operator(torus, patch.plaquettes[15])


def test_digest_stable():
    a, b = build(6, 6), build(6, 6)
    assert a.digest == b.digest
    assert a.digest != build(6, 4).digest
    assert build(4, 2, "torus").to_dict()["boundary"] == "torus"


def test_alignment_operator(patch):
    l = patch.z_links[7]
    assert patch.alignment_operator(l) == PauliString.from_letters({l.a: "Z", l.b: "Z"})
