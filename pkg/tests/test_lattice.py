import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ggvqe import lattice as lat


def test_chain_examples():
    c2 = lat.build_chain(2)
    assert c2.links == ((0, 1, 1),)
    c4 = lat.build_chain(4)
    assert [(a, b) for a, b, _ in c4.links] == [(0, 1), (1, 2), (2, 3)]
    assert [o for _, _, o in c4.links] == [1, 2, 3]
    assert lat.build_chain(16).n_links == 15
    with pytest.raises(ValueError):
        lat.build_chain(1)


def test_square_2x2_link_order():
    sq = lat.build_square(2, 2)
    # sites row-major: 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1)
    assert [(a, b) for a, b, _ in sq.links] == [(0, 2), (0, 1), (1, 3), (2, 3)]
    assert sq.n_links == 4


def test_square_counts():
    assert lat.build_square(4, 4).n_links == 24
    assert lat.build_square(2, 3).n_links == 7
    with pytest.raises(ValueError):
        lat.build_square(1, 5)


@settings(deadline=None, max_examples=25)
@given(rows=st.integers(2, 7), cols=st.integers(2, 7))
def test_square_link_count_formula(rows, cols):
    sq = lat.build_square(rows, cols)
    assert sq.n_links == rows * (cols - 1) + cols * (rows - 1)
    assert sq.n_sites == rows * cols
    ordinals = [o for _, _, o in sq.links]
    assert ordinals == list(range(1, sq.n_links + 1))


def test_toric_2x2_counts():
    t = lat.build_toric_edge(2, 2)
    assert t.n_sites == 12
    assert t.n_links == 16
    assert len(t.vertices) == 9
    assert len(t.plaquettes) == 4


def test_toric_1x1():
    t = lat.build_toric_edge(1, 1)
    assert t.n_sites == 4
    assert t.n_links == 4
    assert len(t.vertices) == 4
    assert len(t.plaquettes) == 1


@settings(deadline=None, max_examples=20)
@given(p_rows=st.integers(1, 4), p_cols=st.integers(1, 4))
def test_toric_count_formulas(p_rows, p_cols):
    t = lat.build_toric_edge(p_rows, p_cols)
    assert t.n_sites == p_rows * (p_cols + 1) + p_cols * (p_rows + 1)
    assert t.n_links == 4 * p_rows * p_cols
    assert len(t.vertices) == (p_rows + 1) * (p_cols + 1)
    assert len(t.plaquettes) == p_rows * p_cols
    # no self links, no duplicated ordinals
    assert all(a != b for a, b, _ in t.links)
    assert [o for _, _, o in t.links] == list(range(1, t.n_links + 1))


def test_toric_vertex_degrees():
    t = lat.build_toric_edge(2, 2)
    degrees = sorted(len(v) for v in t.vertices)
    assert degrees == [2, 2, 2, 2, 3, 3, 3, 3, 4]
    corner = t.vertices[0]
    assert len(corner) == 2


def test_toric_plaquette_membership():
    t = lat.build_toric_edge(2, 2)
    for plaq in t.plaquettes:
        assert len(plaq) == 4
        assert len(set(plaq)) == 4
    # every edge belongs to one or two plaquettes
    for q in range(t.n_sites):
        hits = sum(q in p for p in t.plaquettes)
        assert hits in (1, 2)


def test_link_parity_chain():
    c4 = lat.build_chain(4)
    odd, even = lat.link_parity(c4)
    assert [(a, b) for a, b, _ in odd] == [(0, 1), (2, 3)]
    assert [(a, b) for a, b, _ in even] == [(1, 2)]


def test_link_parity_square_and_toric():
    sq = lat.build_square(2, 2)
    odd, even = lat.link_parity(sq)
    assert [o for _, _, o in odd] == [1, 3]
    assert [o for _, _, o in even] == [2, 4]
    t = lat.build_toric_edge(2, 2)
    odd, even = lat.link_parity(t)
    assert len(odd) == len(even) == 8


def test_builds_are_deterministic():
    assert lat.build_toric_edge(2, 3) == lat.build_toric_edge(2, 3)
    assert lat.build_square(3, 4) == lat.build_square(3, 4)
    assert lat.build_chain(9) == lat.build_chain(9)


@pytest.mark.parametrize("lattice", [
    lat.build_chain(10),
    lat.build_square(3, 4),
    lat.build_toric_edge(2, 2),
    lat.build_toric_edge(3, 2),
])
def test_local_depth_at_most_four(lattice):
    per_site = {}
    for a, b, _ in lattice.links:
        per_site[a] = per_site.get(a, 0) + 1
        per_site[b] = per_site.get(b, 0) + 1
    assert max(per_site.values()) <= 4


def test_all_to_all_plaquette_links():
    one = lat.all_to_all_plaquette_links(lat.build_square(2, 2))
    assert len(one) == 6
    two = lat.all_to_all_plaquette_links(lat.build_square(2, 3))
    assert len(two) == 11
    assert [o for _, _, o in two] == list(range(1, 12))
    with pytest.raises(ValueError):
        lat.all_to_all_plaquette_links(lat.build_chain(4))


def test_lattice_json_export():
    t = lat.build_toric_edge(2, 2)
    doc = lat.lattice_to_json(t)
    assert doc["kind"] == "toric_edge"
    assert doc["n_sites"] == 12
    assert len(doc["links"]) == 16
    assert len(doc["vertices"]) == 9
    assert len(doc["plaquettes"]) == 4
    json.dumps(doc)  # serializable
