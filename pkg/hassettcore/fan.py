"""
The reduced Bergman fan Sigma_w of M(w).

Coordinates: one basis vector v_{i,j} per rank-one flat {i, j} (i < j, i heavy),
modulo the lineality relation sum v_{i,j} = 0. The relation is solved for one
distinguished pair, so vectors are stored in the basis of the remaining pairs.
Rays use the positive convention v_F = sum of the edge vectors of F.

Two polyhedral structures share the same support: the nested-sets subdivision
(cones indexed by nested families of 1-connected flats) and the chain-of-flats
subdivision (cones indexed by chains of arbitrary flats).
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from hassettcore.common import (
    DEFAULT_ELIMINATED_PAIR,
    DEFAULT_SEED,
    RANDOM_POINT_COUNT,
    DimensionMismatch,
    HassettError,
    InvalidSourceLabel,
    Label,
    Pair,
    as_label,
    label_key,
)
from hassettcore.linalg import ExactMatrix, is_unimodular_rows, primitive, solve_nonnegative
from hassettcore.matroid import (
    FlatLabel,
    all_flats,
    one_connected_flats,
    reduced_weight_graph,
)
from hassettcore.nesting import compatibility_matrix, is_nested_family, nested_index_sets
from hassettcore.weights import HeavyLightProfile, canonical_profile

logger = logging.getLogger(__name__)

RayVector = Tuple[int, ...]


def pair_indices(p: HeavyLightProfile) -> List[Pair]:
    """Rank-one flats {i, j} of M(w): i < j in {2..n} with i heavy, in lex order."""
    p = canonical_profile(p)
    return [
        (i, j) for i, j in itertools.combinations(range(2, p.n + 1), 2) if i <= p.m
    ]


@dataclass(frozen=True)
class CoordinateSystem:
    """Basis B_{k,l} of the lineality quotient.

    Attributes:
        pairs: every pair index, lex order
        eliminated: the pair whose coordinate is solved away
    """

    pairs: Tuple[Pair, ...]
    eliminated: Pair

    @classmethod
    def for_profile(cls, p: HeavyLightProfile, eliminated: Pair = DEFAULT_ELIMINATED_PAIR):
        pairs = tuple(pair_indices(p))
        eliminated = tuple(sorted(eliminated))
        if eliminated not in pairs:
            raise HassettError(f"{list(eliminated)} is not a rank-one flat of M(w)")
        return cls(pairs=pairs, eliminated=eliminated)

    @property
    def basis(self) -> Tuple[Pair, ...]:
        return tuple(pair for pair in self.pairs if pair != self.eliminated)

    @property
    def dimension(self) -> int:
        return len(self.pairs) - 1

    def edge_vector(self, edges: Iterable[Pair]) -> RayVector:
        """Image of sum_{e in edges} v_e, using v_eliminated = -(sum of the others)."""
        edges = set(edges)
        shift = 1 if self.eliminated in edges else 0
        return tuple(int(pair in edges) - shift for pair in self.basis)

    def label_vector(self, label: Sequence[int]) -> RayVector:
        s = set(label)
        return self.edge_vector(pair for pair in self.pairs if pair[0] in s and pair[1] in s)


def ray_coordinates(
    p: HeavyLightProfile, label: FlatLabel, eliminated: Pair = DEFAULT_ELIMINATED_PAIR
) -> RayVector:
    """
    Ray v_{F_S} in the basis B_{k,l}.

    v_{F_S} is the sum of v_{i,j} over the pairs inside S; the eliminated
    coordinate is replaced by minus the sum of the others and the result is made
    primitive.
    """
    return primitive(CoordinateSystem.for_profile(p, eliminated).label_vector(label))


def is_nested(flats: Iterable[Sequence[int]]) -> bool:
    """Whether every two labels are comparable or disjoint."""
    return is_nested_family([as_label(s) for s in flats])


@dataclass
class Fan:
    """
    A simplicial fan given by rays and cones on those rays.

    Attributes:
        profile: canonical heavy/light profile
        coordinates: the coordinate system of the rays
        rays: ray key -> primitive integer vector, in canonical key order
        cones: dimension -> cones, each a tuple of ray keys
    """

    profile: HeavyLightProfile
    coordinates: CoordinateSystem
    rays: Dict[Hashable, RayVector]
    cones: Dict[int, List[Tuple[Hashable, ...]]]
    _solvers: Dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return max((k for k, cones in self.cones.items() if cones), default=0)

    @property
    def f_vector(self) -> List[int]:
        return [len(self.cones[k]) for k in range(1, self.dimension + 1)]

    @property
    def maximal_cones(self) -> List[Tuple[Hashable, ...]]:
        return self.cones.get(self.dimension, [])

    def all_cones(self) -> Iterable[Tuple[Hashable, ...]]:
        for k in sorted(self.cones):
            yield from self.cones[k]

    def ray_matrix(self, cone: Sequence[Hashable]) -> ExactMatrix:
        """d x k matrix whose columns are the rays of the cone."""
        columns = [self.rays[key] for key in cone]
        return ExactMatrix(
            [[column[i] for column in columns] for i in range(self.coordinates.dimension)],
            cols=len(columns),
        )

    def spans_cone(self, keys: Iterable[Hashable]) -> bool:
        key_set = frozenset(keys)
        return any(frozenset(cone) == key_set for cone in self.cones.get(len(key_set), []))

    def to_dict(self) -> Dict:
        def encode(key):
            return list(key) if isinstance(key[0], int) else [list(c) for c in key]

        return {
            "weights": self.profile.weights.to_text(),
            "eliminated": list(self.coordinates.eliminated),
            "basis": [list(pair) for pair in self.coordinates.basis],
            "rays": [
                {"flat": encode(key), "coords": list(vector)} for key, vector in self.rays.items()
            ],
            "cones": {
                str(k): [[encode(key) for key in cone] for cone in self.cones[k]]
                for k in sorted(self.cones)
                if k >= 2
            },
            "f_vector": self.f_vector,
        }


def build_fan(p: HeavyLightProfile, eliminated: Pair = DEFAULT_ELIMINATED_PAIR) -> Fan:
    """
    Nested-sets subdivision of the reduced Bergman fan with respect to the
    building set of 1-connected flats.

    Args:
        p: heavy/light profile with m >= 2 and n >= 4
        eliminated: pair coordinate solved away in the lineality quotient

    Returns:
        Fan: rays indexed by FlatLabel, cones by nested families, top dimension n - 3
    """
    p = canonical_profile(p)
    coordinates = CoordinateSystem.for_profile(p, eliminated)
    labels = one_connected_flats(reduced_weight_graph(p))
    rays = {label: primitive(coordinates.label_vector(label)) for label in labels}
    index_sets = nested_index_sets(compatibility_matrix(labels), max_size=p.n - 3)
    cones = {
        k: [tuple(labels[i] for i in index_set) for index_set in index_sets[k]]
        for k in index_sets
    }
    fan = Fan(profile=p, coordinates=coordinates, rays=rays, cones=cones)
    logger.debug("Sigma_w for %s: f-vector %s", p.weights.to_text(), fan.f_vector)
    return fan


def ambient_dimension(p: HeavyLightProfile) -> int:
    """Dimension of the lineality quotient: (number of pair indices) - 1."""
    return len(pair_indices(p)) - 1


def torus_dimension(p: HeavyLightProfile) -> int:
    """Dimension C(n,2) - C(n-m,2) - n of the torus T_w containing M_{0,w}."""
    return math.comb(p.n, 2) - math.comb(p.n - p.m, 2) - p.n


def unimodularity_check(f: Fan) -> bool:
    """
    Smoothness of the toric variety X(f).

    Every cone's rays must extend to a lattice basis: the gcd of the maximal
    minors of its ray matrix is 1 (determinant +-1 for full-dimensional cones).
    """
    for cone in f.all_cones():
        rows = [f.rays[key] for key in cone]
        if not is_unimodular_rows(rows):
            logger.debug("cone %s is not unimodular", cone)
            return False
    return True


def chain_of_flats_cones(p: HeavyLightProfile) -> List[Tuple[Tuple[Label, ...], ...]]:
    """
    Maximal chains of proper nonempty flats F_1 < ... < F_{r-1}, rank F_i = i.

    Each flat is named by the vertex sets of its nontrivial components.
    """
    p = canonical_profile(p)
    g = reduced_weight_graph(p)
    flats = all_flats(g)
    top_rank = max(f.rank for f in flats)
    by_rank: Dict[int, list] = {}
    for flat in flats:
        by_rank.setdefault(flat.rank, []).append(flat)

    chains = [[flat] for flat in by_rank.get(1, [])]
    for r in range(2, top_rank):
        chains = [
            chain + [flat]
            for chain in chains
            for flat in by_rank.get(r, [])
            if chain[-1].edges < flat.edges
        ]
    return [tuple(flat.components for flat in chain) for chain in chains]


def chain_of_flats_fan(p: HeavyLightProfile, eliminated: Pair = DEFAULT_ELIMINATED_PAIR) -> Fan:
    """
    Chain-of-flats subdivision in the same coordinates as build_fan.

    The rays -sum e_j of the order-complex description are negated to the
    positive convention used for the nested-sets fan.
    """
    p = canonical_profile(p)
    coordinates = CoordinateSystem.for_profile(p, eliminated)
    pairs = set(coordinates.pairs)
    maximal = chain_of_flats_cones(p)

    def components_edges(components):
        return [
            pair for block in components for pair in itertools.combinations(block, 2) if pair in pairs
        ]

    keys = sorted({key for chain in maximal for key in chain}, key=lambda c: (
        sum(len(b) - 1 for b in c), [label_key(b) for b in c]))
    rays = {key: primitive(coordinates.edge_vector(components_edges(key))) for key in keys}
    cones: Dict[int, set] = {}
    for chain in maximal:
        for k in range(1, len(chain) + 1):
            for sub in itertools.combinations(chain, k):
                cones.setdefault(k, set()).add(sub)
    ordering = {key: i for i, key in enumerate(keys)}
    sorted_cones = {
        k: sorted(cones[k], key=lambda cone: [ordering[key] for key in cone]) for k in cones
    }
    return Fan(profile=p, coordinates=coordinates, rays=rays, cones=sorted_cones)


def _integer_point(point: Sequence) -> Tuple[int, ...]:
    values = [Fraction(x) for x in point]
    lcm = reduce(math.lcm, (x.denominator for x in values), 1)
    return tuple(int(x * lcm) for x in values)


def support_membership(f: Fan, point: Sequence) -> bool:
    """
    Whether a rational point lies in the support of the fan.

    Each maximal cone is simplicial, so membership is an exact solve with a
    nonnegativity test. Faces need no separate test because the fan is pure.

    Raises:
        DimensionMismatch: the point does not have dim(ambient) coordinates
    """
    if len(point) != f.coordinates.dimension:
        raise DimensionMismatch(
            f"point has {len(point)} coordinates, expected {f.coordinates.dimension}"
        )
    target = _integer_point(point)
    if not any(target):
        return True
    for cone in f.maximal_cones:
        matrix = f._solvers.get(cone)
        if matrix is None:
            matrix = f._solvers[cone] = f.ray_matrix(cone)
        if solve_nonnegative(matrix, target) is not None:
            return True
    return False


def sample_points(fans: Sequence[Fan], count: int = RANDOM_POINT_COUNT, seed: int = DEFAULT_SEED):
    """
    Deterministic pseudo-random rational test points.

    Most points are positive combinations of rays of a random maximal cone of
    one of the fans, so they lie in the common support; every fourth point is an
    unconstrained random vector.
    """
    rng = np.random.default_rng(seed)
    dimension = fans[0].coordinates.dimension
    points = []
    for index in range(count):
        denominator = int(rng.integers(1, 7))
        if index % 4 == 3:
            values = rng.integers(-4, 5, size=dimension)
            points.append(tuple(Fraction(int(v), denominator) for v in values))
            continue
        fan = fans[index % len(fans)]
        cone = fan.maximal_cones[int(rng.integers(len(fan.maximal_cones)))]
        coefficients = rng.integers(0, 5, size=len(cone))
        vector = [Fraction(0)] * dimension
        for key, c in zip(cone, coefficients):
            for i, x in enumerate(fan.rays[key]):
                vector[i] += Fraction(int(c) * x, denominator)
        points.append(tuple(vector))
    return points


def special_points(f: Fan) -> List[Tuple[int, ...]]:
    """Every ray and the barycenter (ray sum) of every cone."""
    points = []
    for cone in f.all_cones():
        total = [0] * f.coordinates.dimension
        for key in cone:
            total = [a + b for a, b in zip(total, f.rays[key])]
        points.append(tuple(total))
    return points


def support_disagreements(first: Fan, second: Fan, points: Iterable[Sequence]) -> List[Tuple]:
    """Points on which the two fans give different membership verdicts."""
    return [
        tuple(point)
        for point in points
        if support_membership(first, point) != support_membership(second, point)
    ]


def _check_reduction(source: HeavyLightProfile, target: HeavyLightProfile):
    if source.n != target.n:
        raise HassettError(f"cannot reduce n = {source.n} to n = {target.n}")
    if target.m > source.m:
        raise HassettError(
            f"reduction needs target heavy points inside the source ones (m={source.m} -> {target.m})"
        )


def project_pr_w(
    label: Sequence[int],
    target_profile: HeavyLightProfile,
    source_profile: Optional[HeavyLightProfile] = None,
    eliminated: Pair = DEFAULT_ELIMINATED_PAIR,
) -> RayVector:
    """
    Image under pr_w of the source ray v_{F_S}.

    Drops the coordinates v_{i,j} that are pairs of target-light points. With the
    same eliminated pair on both sides this is the projection on coordinates.

    Args:
        label: S, a ray of the source fan (Sigma_n by default)
        target_profile: profile of the target fan Sigma_w
        source_profile: profile of the source fan, (1^n) when omitted

    Returns:
        RayVector: v_{F_S} of Sigma_w when S is w-stable, the zero vector when S
        consists of light points only

    Raises:
        InvalidSourceLabel: S is not a ray of the source fan
    """
    target = canonical_profile(target_profile)
    source = canonical_profile(
        source_profile or HeavyLightProfile.from_counts(target.n, target.n)
    )
    _check_reduction(source, target)
    s = as_label(label)
    if (
        len(s) != len(label)
        or not set(s) <= set(range(2, source.n + 1))
        or len(s) >= source.n - 1
        or source.weights.weight_of(s) <= 1
    ):
        raise InvalidSourceLabel(f"{list(label)} is not a ray of the source fan")
    source_coordinates = CoordinateSystem.for_profile(source, eliminated)
    target_pairs = set(CoordinateSystem.for_profile(target, eliminated).basis)
    vector = source_coordinates.label_vector(s)
    return tuple(x for pair, x in zip(source_coordinates.basis, vector) if pair in target_pairs)


@dataclass
class ProjectionReport:
    """Outcome of checking pr_w against the source and target fans.

    Attributes:
        killed: source rays mapped to zero
        all_light: source rays made of light points only
        injective: no two surviving rays share an image
        rays_match: every surviving image equals the target ray of the same label
        bad_cones: source cones whose image is not a cone of the target fan
    """

    killed: List[Label]
    all_light: List[Label]
    injective: bool
    rays_match: bool
    bad_cones: List[Tuple[Label, ...]]

    @property
    def ok(self) -> bool:
        return (
            self.killed == self.all_light
            and self.injective
            and self.rays_match
            and not self.bad_cones
        )


def projection_report(
    target_profile: HeavyLightProfile,
    source_profile: Optional[HeavyLightProfile] = None,
    eliminated: Pair = DEFAULT_ELIMINATED_PAIR,
) -> ProjectionReport:
    """Check pr_w ray by ray and cone by cone."""
    target = canonical_profile(target_profile)
    source = canonical_profile(
        source_profile or HeavyLightProfile.from_counts(target.n, target.n)
    )
    source_fan = build_fan(source, eliminated)
    target_fan = build_fan(target, eliminated)

    images = {s: project_pr_w(s, target, source, eliminated) for s in source_fan.rays}
    killed = [s for s, v in images.items() if not any(v)]
    all_light = [s for s in source_fan.rays if target.weights.weight_of(s) <= 1]
    surviving = {s: v for s, v in images.items() if any(v)}
    injective = len(set(surviving.values())) == len(surviving)
    rays_match = all(
        s in target_fan.rays and target_fan.rays[s] == v for s, v in surviving.items()
    )
    bad_cones = []
    for cone in source_fan.all_cones():
        image = tuple(s for s in cone if s in surviving)
        if image and not target_fan.spans_cone(image):
            bad_cones.append(cone)
    return ProjectionReport(killed, all_light, injective, rays_match, bad_cones)
