import numpy as np
import pytest

from hassettcore.common import EdgeNotInGraph, HassettError, TooFewHeavy
from hassettcore.matroid import (
    DisjointSet,
    all_flats,
    closure,
    flat_edges,
    flats_by_closure,
    is_connected_edge_set,
    is_flat,
    matroid_rank,
    one_connected_flats,
    reduced_weight_graph,
)
from hassettcore.weights import HeavyLightProfile, heavy_light_profiles


def graph(m, n):
    return reduced_weight_graph(HeavyLightProfile.from_counts(m, n))


def test_graph_heavy4_light2():
    g = graph(4, 6)
    assert g.vertices == (2, 3, 4, 5, 6)
    assert g.edges == ((2, 3), (2, 4), (2, 5), (2, 6), (3, 4), (3, 5), (3, 6), (4, 5), (4, 6))


def test_graph_losev_manin_is_a_star(losev_manin):
    assert reduced_weight_graph(losev_manin).edges == ((2, 3), (2, 4), (2, 5))


def test_graph_keel4_is_a_triangle():
    assert graph(4, 4).edges == ((2, 3), (2, 4), (3, 4))


def test_graph_to_dict(losev_manin):
    data = reduced_weight_graph(losev_manin).to_dict()
    assert data["vertices"][0] == {"label": 2, "kind": "heavy"}
    assert data["vertices"][1] == {"label": 3, "kind": "light"}
    assert data["edges"] == [[2, 3], [2, 4], [2, 5]]


def test_graph_needs_two_heavy():
    with pytest.raises(TooFewHeavy):
        reduced_weight_graph(HeavyLightProfile((1,), (2, 3, 4)))


def test_rank_examples(losev_manin):
    g = reduced_weight_graph(losev_manin)
    assert matroid_rank(g, [(2, 3), (2, 4)]) == 2
    assert matroid_rank(g, []) == 0
    assert matroid_rank(graph(4, 4), [(2, 3), (2, 4), (3, 4)]) == 2


def test_rank_rejects_foreign_edges(losev_manin):
    g = reduced_weight_graph(losev_manin)
    with pytest.raises(EdgeNotInGraph):
        matroid_rank(g, [(3, 4)])
    with pytest.raises(EdgeNotInGraph):
        closure(g, [(3, 4)])


def test_closure_examples(losev_manin):
    star = reduced_weight_graph(losev_manin)
    assert closure(star, [(2, 3)]) == {(2, 3)}
    assert closure(star, []) == frozenset()
    triangle = graph(4, 4)
    assert closure(triangle, [(2, 3), (3, 4)]) == {(2, 3), (2, 4), (3, 4)}
    assert is_flat(triangle, [(2, 3)])
    assert not is_flat(triangle, [(2, 3), (3, 4)])


def test_one_connected_flats_losev_manin(losev_manin):
    assert one_connected_flats(reduced_weight_graph(losev_manin)) == [
        (2, 3), (2, 4), (2, 5), (2, 3, 4), (2, 3, 5), (2, 4, 5),
    ]


def test_one_connected_flats_counts():
    assert one_connected_flats(graph(2, 4)) == [(2, 3), (2, 4)]
    assert len(one_connected_flats(graph(4, 6))) == 24
    assert len(one_connected_flats(graph(5, 5))) == 10


def test_flat_edges_examples(losev_manin):
    star = reduced_weight_graph(losev_manin)
    assert flat_edges(star, (2, 3, 5)) == {(2, 3), (2, 5)}
    assert flat_edges(star, (2, 3)) == {(2, 3)}
    assert flat_edges(graph(4, 6), (2, 3, 5)) == {(2, 3), (2, 5), (3, 5)}


def test_flat_edges_rejects_light_labels(losev_manin):
    with pytest.raises(HassettError):
        flat_edges(reduced_weight_graph(losev_manin), (3, 4))
    with pytest.raises(HassettError):
        flat_edges(reduced_weight_graph(losev_manin), (2, 3, 4, 5))


@pytest.mark.parametrize("p", heavy_light_profiles(6), ids=lambda p: f"m{p.m}n{p.n}")
def test_flat_labels_are_closed_connected_flats(p):
    g = reduced_weight_graph(p)
    for s in one_connected_flats(g):
        edges = flat_edges(g, s)
        assert matroid_rank(g, edges) == len(s) - 1
        assert closure(g, edges) == edges
        assert is_connected_edge_set(edges)


@pytest.mark.parametrize("p", heavy_light_profiles(6), ids=lambda p: f"m{p.m}n{p.n}")
def test_flat_bijection_against_closure_enumeration(p):
    g = reduced_weight_graph(p)
    by_closure = flats_by_closure(g)
    connected = {e for e in by_closure if e and e != g.edge_set and is_connected_edge_set(e)}
    assert connected == {flat_edges(g, s) for s in one_connected_flats(g)}
    assert {f.edges for f in all_flats(g)} == set(by_closure)


def test_all_flats_of_star_and_complete_graph(losev_manin):
    assert len(all_flats(reduced_weight_graph(losev_manin))) == 8
    flats = all_flats(graph(6, 6))
    assert len(flats) == 52  # partitions of a 5-element set
    assert any(not f.is_connected for f in flats)
    assert flats[0].rank == 0 and flats[-1].rank == 4


@pytest.mark.parametrize("m, n", [(2, 5), (4, 6), (7, 7), (3, 7)])
def test_closure_and_rank_axioms_on_random_subsets(m, n):
    g = graph(m, n)
    rng = np.random.default_rng(7)
    for _ in range(40):
        a = frozenset(e for e in g.edges if rng.random() < 0.5)
        b = frozenset(e for e in g.edges if rng.random() < 0.5)
        cl = closure(g, a)
        assert a <= cl
        assert closure(g, cl) == cl
        assert cl <= closure(g, a | b)
        assert matroid_rank(g, a | b) + matroid_rank(g, a & b) <= matroid_rank(g, a) + matroid_rank(g, b)
    assert matroid_rank(g, g.edges) == n - 2


def test_disjoint_set():
    forest = DisjointSet([1, 2, 3, 4])
    assert forest.num_sets == 4
    assert forest.union(1, 2)
    assert forest.union(3, 4)
    assert not forest.union(2, 1)
    assert forest.connected(1, 2)
    assert not forest.connected(1, 3)


def test_connected_edge_set():
    assert is_connected_edge_set([(2, 3), (3, 4)])
    assert not is_connected_edge_set([(2, 3), (4, 5)])
    assert not is_connected_edge_set([])
