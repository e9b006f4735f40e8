"""
Reduced weight graph G(w) and its graphic matroid M(w).

Flats of M(w) are edge sets closed under the matroid closure. The 1-connected
flats are named by vertex subsets S of {2, ..., n} with total weight above 1:
the flat F_S is the maximal subgraph of G(w) on S. Edge sets are frozensets of
sorted vertex pairs.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Sequence, Tuple

from hassettcore.common import (
    MIN_HEAVY,
    EdgeNotInGraph,
    HassettError,
    Label,
    Pair,
    TooFewHeavy,
    as_label,
    label_key,
)
from hassettcore.weights import HeavyLightProfile, WeightVector, canonical_profile

logger = logging.getLogger(__name__)

EdgeSet = FrozenSet[Pair]
FlatLabel = Label


class DisjointSet:
    """Union-find over arbitrary hashable vertices with path compression."""

    def __init__(self, elements: Iterable[int] = ()):
        self.parents: Dict[int, int] = {}
        self.ranks: Dict[int, int] = {}
        self.num_sets = 0
        for element in elements:
            self.add(element)

    def add(self, element: int):
        if element not in self.parents:
            self.parents[element] = element
            self.ranks[element] = 0
            self.num_sets += 1

    def find(self, element: int) -> int:
        self.add(element)
        root = element
        while self.parents[root] != root:
            root = self.parents[root]
        # Path compression
        while self.parents[element] != root:
            self.parents[element], element = root, self.parents[element]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of a and b. Returns False if they were already joined."""
        root_a, root_b = self.find(a), self.find(b)
        if root_a == root_b:
            return False
        if self.ranks[root_a] < self.ranks[root_b]:
            root_a, root_b = root_b, root_a
        elif self.ranks[root_a] == self.ranks[root_b]:
            self.ranks[root_a] += 1
        self.parents[root_b] = root_a
        self.num_sets -= 1
        return True

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)


@dataclass(frozen=True)
class ReducedWeightGraph:
    """The graph G(w) on vertices {2, ..., n}.

    Attributes:
        profile: canonical heavy/light profile (heavy vertices are 2..m)
        vertices: sorted vertex labels
        edges: sorted list of edges {i, j} with w_i + w_j > 1
    """

    profile: HeavyLightProfile
    vertices: Label
    edges: Tuple[Pair, ...]

    @property
    def weights(self) -> WeightVector:
        return self.profile.weights

    @property
    def edge_set(self) -> EdgeSet:
        return frozenset(self.edges)

    def is_heavy(self, vertex: int) -> bool:
        return self.profile.is_heavy(vertex)

    def check_edges(self, edges: Iterable[Pair]) -> EdgeSet:
        """Normalize an edge collection and make sure it lies in the graph."""
        normalized = frozenset(tuple(sorted(edge)) for edge in edges)
        missing = normalized - self.edge_set
        if missing:
            raise EdgeNotInGraph(f"edges {sorted(missing)} are not edges of G(w)")
        return normalized

    def to_dict(self) -> Dict:
        return {
            "weights": self.weights.to_text(),
            "vertices": [
                {"label": v, "kind": self.profile.kind(v).name.lower()} for v in self.vertices
            ],
            "edges": [list(edge) for edge in self.edges],
        }


def reduced_weight_graph(p: HeavyLightProfile) -> ReducedWeightGraph:
    """
    Build G(w): vertices 2..n, an edge {i, j} whenever w_i + w_j > 1.

    Args:
        p: heavy/light profile; it is canonicalized first so vertex 1 is heavy

    Returns:
        ReducedWeightGraph: heavy vertices form a clique, every heavy vertex is
        joined to every light one, and light vertices are pairwise non-adjacent

    Raises:
        TooFewHeavy: fewer than two heavy points
    """
    if p.m < MIN_HEAVY:
        raise TooFewHeavy(f"at least {MIN_HEAVY} heavy weights are required, got {p.m}")
    p = canonical_profile(p)
    w = p.weights
    vertices = tuple(range(2, p.n + 1))
    edges = tuple(
        (i, j) for i, j in itertools.combinations(vertices, 2) if w[i] + w[j] > 1
    )
    logger.debug("G(w) for %s: %d vertices, %d edges", w.to_text(), len(vertices), len(edges))
    return ReducedWeightGraph(profile=p, vertices=vertices, edges=edges)


def _forest(edges: Iterable[Pair]) -> Tuple[DisjointSet, int]:
    forest = DisjointSet()
    rank = 0
    for i, j in edges:
        forest.add(i)
        forest.add(j)
        if forest.union(i, j):
            rank += 1
    return forest, rank


def matroid_rank(g: ReducedWeightGraph, e: Iterable[Pair]) -> int:
    """
    Rank of an edge set: the number of edges in a spanning forest.

    Equals the number of touched vertices minus the number of components.

    Raises:
        EdgeNotInGraph: e contains an edge that is not in G(w)
    """
    _, rank = _forest(g.check_edges(e))
    return rank


def closure(g: ReducedWeightGraph, e: Iterable[Pair]) -> EdgeSet:
    """
    Matroid closure cl(e) = {x : r(e + x) = r(e)}.

    In a graphic matroid an edge is in the closure exactly when its endpoints are
    already joined by a path in e.

    Raises:
        EdgeNotInGraph: e contains an edge that is not in G(w)
    """
    e = g.check_edges(e)
    forest, _ = _forest(e)
    closed = set(e)
    for i, j in g.edges:
        if i in forest.parents and j in forest.parents and forest.connected(i, j):
            closed.add((i, j))
    return frozenset(closed)


def is_flat(g: ReducedWeightGraph, e: Iterable[Pair]) -> bool:
    e = g.check_edges(e)
    return closure(g, e) == e


def edge_vertices(e: Iterable[Pair]) -> Label:
    return as_label(v for edge in e for v in edge)


def is_connected_edge_set(e: Iterable[Pair]) -> bool:
    """Whether the subgraph formed by a nonempty edge set is connected."""
    e = list(e)
    if not e:
        return False
    forest, _ = _forest(e)
    return forest.num_sets == 1


def is_flat_label(g: ReducedWeightGraph, label: Sequence[int]) -> bool:
    """Whether S names a 1-connected flat: proper subset of {2..n} of weight above 1."""
    s = as_label(label)
    if len(s) != len(label) or not set(s) <= set(g.vertices):
        return False
    return len(s) < len(g.vertices) and g.weights.weight_of(s) > 1


def validate_flat_label(g: ReducedWeightGraph, label: Sequence[int]) -> FlatLabel:
    if not is_flat_label(g, label):
        raise HassettError(
            f"{list(label)} is not a proper subset of {{2..{g.profile.n}}} with weight above 1"
        )
    return as_label(label)


def one_connected_flats(g: ReducedWeightGraph) -> List[FlatLabel]:
    """
    Vertex subsets naming the 1-connected flats of M(w).

    Returns:
        List[FlatLabel]: every S strictly inside {2, ..., n} with total weight
        above 1, ordered by cardinality and then lexicographically
    """
    flats = [
        s
        for size in range(2, len(g.vertices))
        for s in itertools.combinations(g.vertices, size)
        if g.weights.weight_of(s) > 1
    ]
    logger.debug("%d one-connected flats for %s", len(flats), g.weights.to_text())
    return flats


def flat_edges(g: ReducedWeightGraph, label: Sequence[int]) -> EdgeSet:
    """
    Edge set of F_S: the maximal subgraph of G(w) on the vertices of S.

    Its rank is |S| - 1 and it is closed and connected.
    """
    s = set(validate_flat_label(g, label))
    return frozenset(edge for edge in g.edges if edge[0] in s and edge[1] in s)


def _set_partitions(items: Sequence[int]) -> Iterator[List[List[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        yield [[first]] + partition
        for index in range(len(partition)):
            yield partition[:index] + [[first] + partition[index]] + partition[index + 1:]


def _spans_block(edges: EdgeSet, block: Label) -> bool:
    inside = [edge for edge in edges if edge[0] in block]
    return edge_vertices(inside) == block and is_connected_edge_set(inside)


@dataclass(frozen=True)
class Flat:
    """An arbitrary flat of M(w), possibly disconnected.

    Attributes:
        components: vertex sets of the connected components with at least one edge
        edges: the edge set
        rank: matroid rank
    """

    components: Tuple[Label, ...]
    edges: EdgeSet
    rank: int

    @property
    def is_connected(self) -> bool:
        return len(self.components) == 1


def all_flats(g: ReducedWeightGraph) -> List[Flat]:
    """
    Every flat of M(w), including the empty flat and the full ground set.

    Flats of a graphic matroid correspond to partitions of the vertex set whose
    blocks induce connected subgraphs; the flat is the set of edges inside blocks.

    Returns:
        List[Flat]: ordered by rank, then by component labels
    """
    adjacency = g.edge_set
    flats = []
    for partition in _set_partitions(list(g.vertices)):
        blocks = [as_label(block) for block in partition if len(block) > 1]
        edges = frozenset(
            edge for block in blocks for edge in itertools.combinations(block, 2) if edge in adjacency
        )
        if not all(_spans_block(edges, block) for block in blocks):
            continue
        rank = sum(len(block) - 1 for block in blocks)
        flats.append(Flat(tuple(sorted(blocks, key=label_key)), edges, rank))
    flats.sort(key=lambda f: (f.rank, [label_key(c) for c in f.components]))
    return flats


def flats_by_closure(g: ReducedWeightGraph) -> List[EdgeSet]:
    """Every flat obtained as the closure of some edge subset. Exponential; small n only."""
    found = set()
    for size in range(len(g.edges) + 1):
        for subset in itertools.combinations(g.edges, size):
            found.add(closure(g, subset))
    return sorted(found, key=lambda e: (len(e), sorted(e)))
