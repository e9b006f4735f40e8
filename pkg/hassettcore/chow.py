"""
Chow ring presentations and exact graded arithmetic.

A presentation lists divisor generators D^S, the Stanley-Reisner pairs with
D^S * D^T = 0 and the linear relations in degree 1. The ring is computed degree
by degree: modulo the Stanley-Reisner ideal a graded piece is spanned by nested
monomials, and the rest of the ideal is spanned by (linear relation) * (nested
monomial of one degree lower).
"""

import itertools
import logging
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from hassettcore.common import (
    DEFAULT_ELIMINATED_PAIR,
    DegreeOutOfRange,
    DegreeOverflow,
    HassettError,
    InhomogeneousInput,
    Label,
    Pair,
    as_label,
    format_label,
    format_monomial,
    json_key,
)
from hassettcore.fan import CoordinateSystem
from hassettcore.linalg import ExactMatrix, SparseEchelon, SparseRow, invariant_factors, rank, sparse_rank
from hassettcore.matroid import one_connected_flats, reduced_weight_graph, validate_flat_label
from hassettcore.nesting import compatibility_matrix, nested_index_sets
from hassettcore.weights import HeavyLightProfile, WeightVector, canonical_profile

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]  # sorted generator indices, repeated for powers
Polynomial = Mapping[Tuple[Label, ...], object]  # monomial as a tuple of labels -> coefficient


@dataclass
class Presentation:
    """
    Generators and relations of a graded Chow ring.

    Attributes:
        generators: divisor labels D^S, in canonical order
        sr_pairs: pairs of generators whose product vanishes
        linear_relations: integer vectors over the generators, each equal to zero
        grading_dimension: top degree of the ring
        weights: weight vector the presentation was built for, if any
        eliminated: pair coordinate solved away to produce the linear relations
    """

    generators: List[Label]
    sr_pairs: List[Tuple[Label, Label]]
    linear_relations: List[Tuple[int, ...]]
    grading_dimension: int
    weights: Optional[WeightVector] = None
    eliminated: Optional[Pair] = None
    compatible: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._index = {label: i for i, label in enumerate(self.generators)}
        size = len(self.generators)
        self.compatible = np.ones((size, size), dtype=np.bool_)
        for s, t in self.sr_pairs:
            a, b = self._index[s], self._index[t]
            self.compatible[a, b] = self.compatible[b, a] = False

    def index(self, label: Sequence[int]) -> int:
        key = as_label(label)
        if key not in self._index:
            raise HassettError(f"{format_label(key)} is not a generator")
        return self._index[key]

    def is_nested_monomial(self, monomial: Monomial) -> bool:
        support = sorted(set(monomial))
        return all(self.compatible[a, b] for a, b in itertools.combinations(support, 2))

    def relation_text(self, relation: Sequence[int]) -> str:
        terms = []
        for label, c in zip(self.generators, relation):
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            magnitude = "" if abs(c) == 1 else f"{abs(c)}*"
            terms.append(f"{sign} {magnitude}{format_label(label)}")
        text = " ".join(terms)
        return (text[2:] if text.startswith("+ ") else "-" + text[2:]) + " = 0"

    def describe(self) -> List[str]:
        lines = [f"generators ({len(self.generators)}):"]
        lines += ["  " + format_label(label) for label in self.generators]
        lines.append(f"Stanley-Reisner pairs ({len(self.sr_pairs)}):")
        lines += [f"  {format_label(s)}*{format_label(t)} = 0" for s, t in self.sr_pairs]
        lines.append(f"linear relations ({len(self.linear_relations)}):")
        lines += ["  " + self.relation_text(r) for r in self.linear_relations]
        return lines

    def to_dict(self, hilbert: Optional[List[int]] = None) -> Dict:
        data = {
            "weights": self.weights.to_text() if self.weights else None,
            "generators": [list(label) for label in self.generators],
            "sr_pairs": [[list(s), list(t)] for s, t in self.sr_pairs],
            "linear_relations": [
                {
                    "coeffs": {
                        json_key(label): c for label, c in zip(self.generators, relation) if c
                    }
                }
                for relation in self.linear_relations
            ],
            "grading_dimension": self.grading_dimension,
        }
        if hilbert is not None:
            data["hilbert"] = list(hilbert)
        return data


def _normalized(relation: Sequence[int]) -> Tuple[int, ...]:
    relation = tuple(int(c) for c in relation)
    leading = next((c for c in relation if c), 0)
    return tuple(-c for c in relation) if leading < 0 else relation


def dedupe_relations(relations: Iterable[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Drop zero rows and rows equal up to sign. Kept rows lead with a positive coefficient."""
    seen = set()
    kept = []
    for relation in relations:
        key = _normalized(relation)
        if not any(key) or key in seen:
            continue
        seen.add(key)
        kept.append(key)
    return kept


def non_nested_pairs(generators: Sequence[Label]) -> List[Tuple[Label, Label]]:
    compatible = compatibility_matrix(generators)
    return [
        (generators[a], generators[b])
        for a, b in itertools.combinations(range(len(generators)), 2)
        if not compatible[a, b]
    ]


def heavy_light_presentation(
    p: HeavyLightProfile, eliminated: Pair = DEFAULT_ELIMINATED_PAIR
) -> Presentation:
    """
    Presentation of the Chow ring of the heavy/light Hassett space.

    Generators are the 1-connected flats. For each pair {i, j} other than the
    eliminated pair {k, l} there is the relation

        sum_{S >= {i,j}, S !>= {k,l}} D^S - sum_{S >= {k,l}, S !>= {i,j}} D^S = 0,

    i.e. up to sign the coefficient of D^S is the {i, j} coordinate of the ray
    v_{F_S}. Each row is stored with a positive leading coefficient.

    Raises:
        TooFewHeavy: fewer than two heavy points
    """
    g = reduced_weight_graph(p)
    p = g.profile
    coordinates = CoordinateSystem.for_profile(p, eliminated)
    generators = one_connected_flats(g)
    columns = [coordinates.label_vector(label) for label in generators]
    relations = dedupe_relations(
        tuple(column[row] for column in columns) for row in range(coordinates.dimension)
    )
    pres = Presentation(
        generators=generators,
        sr_pairs=non_nested_pairs(generators),
        linear_relations=relations,
        grading_dimension=p.n - 3,
        weights=p.weights,
        eliminated=coordinates.eliminated,
    )
    logger.debug(
        "presentation for %s: %d generators, %d SR pairs, %d relations",
        p.weights.to_text(), len(generators), len(pres.sr_pairs), len(relations),
    )
    return pres


def full_theorem_relations(p: HeavyLightProfile) -> List[Tuple[int, ...]]:
    """
    Linear relations for every pair of pairs {i,j}, {k,l}, overlapping ones included.

    Trivial rows are dropped and duplicates removed.
    """
    p = canonical_profile(p)
    g = reduced_weight_graph(p)
    coordinates = CoordinateSystem.for_profile(p)
    generators = one_connected_flats(g)

    def inside(pair, label):
        return pair[0] in label and pair[1] in label

    return dedupe_relations(
        tuple(int(inside(first, s)) - int(inside(second, s)) for s in generators)
        for first, second in itertools.combinations(coordinates.pairs, 2)
    )


def relation_spans_agree(p: HeavyLightProfile) -> bool:
    """Whether the full pair-of-pairs relation set spans the same space as the B_{2,3} set."""
    pres = heavy_light_presentation(p)
    full = full_theorem_relations(p)

    def rows(relations):
        return [{g: c for g, c in enumerate(r) if c} for r in relations]

    basis_rank = sparse_rank(rows(pres.linear_relations))
    return basis_rank == sparse_rank(rows(full)) == sparse_rank(rows(full + pres.linear_relations))


def monomial_key(monomial: Monomial) -> Tuple[int, Monomial]:
    """Squarefree monomials first, then the rest, lexicographic within each group."""
    return (0 if len(set(monomial)) == len(monomial) else 1), monomial


def nested_monomials(pres: Presentation, k: int) -> List[Monomial]:
    """
    Degree-k monomials whose support avoids every Stanley-Reisner pair.

    Raises:
        DegreeOutOfRange: k is outside 0..grading_dimension
    """
    if not 0 <= k <= pres.grading_dimension:
        raise DegreeOutOfRange(f"degree {k} is outside 0..{pres.grading_dimension}")
    if k == 0:
        return [()]
    supports = nested_index_sets(pres.compatible, max_size=k)
    monomials = []
    for size, index_sets in supports.items():
        for support in index_sets:
            for extra in itertools.combinations_with_replacement(support, k - size):
                monomials.append(tuple(sorted(support + extra)))
    monomials.sort(key=monomial_key)
    return monomials


class GradedPiece:
    """
    One graded piece A^k of the ring.

    Columns are the nested monomials of degree k. The relation rows are
    eliminated with pivots on their largest column, so the remaining columns form
    the least basis in monomial order.

    Attributes:
        degree: k
        monomials: nested monomials in canonical order
        basis: indices of the monomials that form the chosen basis
    """

    def __init__(self, pres: Presentation, k: int):
        self.degree = k
        self.monomials = nested_monomials(pres, k)
        self.index = {monomial: i for i, monomial in enumerate(self.monomials)}
        self.echelon = SparseEchelon()
        for row in relation_rows(pres, k, self.index):
            self.echelon.add(row)
        self.basis = self.echelon.free_columns(len(self.monomials))
        logger.debug(
            "degree %d: %d nested monomials, relation rank %d, h = %d",
            k, len(self.monomials), self.echelon.rank, len(self.basis),
        )

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def basis_monomials(self) -> List[Monomial]:
        return [self.monomials[c] for c in self.basis]

    def coordinates(self, vector: Mapping[int, object]) -> Tuple[Fraction, ...]:
        reduced = self.echelon.reduce(dict(vector))
        return tuple(reduced.get(c, Fraction(0)) for c in self.basis)


def relation_rows(
    pres: Presentation, k: int, index: Optional[Mapping[Monomial, int]] = None
) -> Iterator[SparseRow]:
    """
    Rows (linear relation) * (nested monomial of degree k - 1), projected to
    the nested monomials of degree k.
    """
    if k == 0:
        return
    if index is None:
        index = {monomial: i for i, monomial in enumerate(nested_monomials(pres, k))}
    lower = nested_monomials(pres, k - 1)
    for relation in pres.linear_relations:
        terms = [(g, c) for g, c in enumerate(relation) if c]
        for mu in lower:
            row: SparseRow = {}
            for g, c in terms:
                col = index.get(tuple(sorted(mu + (g,))))
                if col is not None:
                    row[col] = row.get(col, 0) + c
            row = {col: v for col, v in row.items() if v}
            if row:
                yield row


@dataclass(frozen=True)
class ChowClass:
    """
    An element of one graded piece, in the coordinates of its basis.

    Attributes:
        degree: k
        coordinates: one rational per basis monomial of degree k
        ring: the graded basis the coordinates refer to
    """

    degree: int
    coordinates: Tuple[Fraction, ...]
    ring: "GradedBasis" = field(repr=False, compare=False)

    @property
    def is_zero(self) -> bool:
        return not any(self.coordinates)

    def terms(self) -> List[Tuple[Fraction, Monomial]]:
        basis = self.ring.piece(self.degree).basis_monomials
        return [(c, m) for c, m in zip(self.coordinates, basis) if c]

    def __add__(self, other: "ChowClass") -> "ChowClass":
        if other.degree != self.degree:
            raise InhomogeneousInput("cannot add classes of different degrees")
        return ChowClass(
            self.degree, tuple(a + b for a, b in zip(self.coordinates, other.coordinates)), self.ring
        )

    def __mul__(self, other: "ChowClass") -> "ChowClass":
        return multiply(self, other)

    def to_text(self) -> str:
        terms = self.terms()
        if not terms:
            return "0"
        generators = self.ring.presentation.generators
        parts = []
        for c, monomial in terms:
            name = format_monomial(generators[g] for g in monomial)
            parts.append(name if c == 1 else f"-{name}" if c == -1 else f"{c}*{name}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_dict(self) -> Dict:
        generators = self.ring.presentation.generators
        return {
            "degree": self.degree,
            "terms": [
                {
                    "coeff": str(c),
                    "monomial": [list(generators[g]) for g in monomial],
                }
                for c, monomial in self.terms()
            ],
        }


class GradedBasis:
    """
    Coordinates for every graded piece of a presented ring.

    Pieces are built on first use and cached.

    Attributes:
        presentation: the ring's presentation
    """

    def __init__(self, pres: Presentation):
        self.presentation = pres
        self._pieces: Dict[int, GradedPiece] = {}

    @property
    def top_degree(self) -> int:
        return self.presentation.grading_dimension

    def piece(self, k: int) -> GradedPiece:
        if not 0 <= k <= self.top_degree:
            raise DegreeOutOfRange(f"degree {k} is outside 0..{self.top_degree}")
        if k not in self._pieces:
            self._pieces[k] = GradedPiece(self.presentation, k)
        return self._pieces[k]

    def hilbert_function(self) -> List[int]:
        return [self.piece(k).dimension for k in range(self.top_degree + 1)]

    def class_of(self, k: int, vector: Mapping[Monomial, object]) -> ChowClass:
        """Class of a combination of degree-k monomials given by generator indices."""
        piece = self.piece(k)
        columns: Dict[int, Fraction] = {}
        for monomial, c in vector.items():
            col = piece.index.get(tuple(sorted(monomial)))
            if col is not None and c:
                columns[col] = columns.get(col, Fraction(0)) + Fraction(c)
        return ChowClass(k, piece.coordinates(columns), self)

    def unit(self) -> ChowClass:
        return self.class_of(0, {(): 1})

    def generator(self, label: Sequence[int]) -> ChowClass:
        return self.class_of(1, {(self.presentation.index(label),): 1})

    def basis_class(self, k: int, position: int) -> ChowClass:
        coordinates = [Fraction(0)] * self.piece(k).dimension
        coordinates[position] = Fraction(1)
        return ChowClass(k, tuple(coordinates), self)


def reduce(basis: GradedBasis, polynomial: Polynomial, degree: Optional[int] = None) -> ChowClass:
    """
    Normal form of a homogeneous polynomial in the generators.

    Args:
        basis: graded basis of the ring
        polynomial: tuple of labels (one per factor) -> coefficient; () is the unit
        degree: degree to use for the zero polynomial

    Returns:
        ChowClass: coordinates in the degree-k basis

    Raises:
        InhomogeneousInput: monomials of different degrees
        DegreeOutOfRange: degree above the top degree
    """
    pres = basis.presentation
    terms = {}
    for labels, c in polynomial.items():
        monomial = tuple(sorted(pres.index(label) for label in labels))
        terms[monomial] = terms.get(monomial, 0) + Fraction(c)
    degrees = {len(monomial) for monomial in terms}
    if len(degrees) > 1:
        raise InhomogeneousInput(f"polynomial mixes degrees {sorted(degrees)}")
    k = degrees.pop() if degrees else (degree or 0)
    if k > basis.top_degree:
        raise DegreeOutOfRange(f"degree {k} exceeds the top degree {basis.top_degree}")
    return basis.class_of(k, terms)


def multiply(a: ChowClass, b: ChowClass) -> ChowClass:
    """
    Product of two classes: lift to basis monomials, multiply, reduce.

    Raises:
        DegreeOverflow: deg a + deg b exceeds the top degree
    """
    if a.ring is not b.ring:
        raise HassettError("classes belong to different rings")
    ring = a.ring
    k = a.degree + b.degree
    if k > ring.top_degree:
        raise DegreeOverflow(f"degree {a.degree} + {b.degree} exceeds the top degree {ring.top_degree}")
    left = ring.piece(a.degree).basis_monomials
    right = ring.piece(b.degree).basis_monomials
    product: Dict[Monomial, Fraction] = {}
    for x, mx in zip(a.coordinates, left):
        if not x:
            continue
        for y, my in zip(b.coordinates, right):
            if y:
                monomial = tuple(sorted(mx + my))
                product[monomial] = product.get(monomial, Fraction(0)) + x * y
    return ring.class_of(k, product)


def pairing_rank(basis: GradedBasis, k: int) -> int:
    """
    Rank of the multiplication pairing A^k x A^(d-k) -> A^d.

    Raises:
        DegreeOutOfRange: k is outside 0..d
    """
    d = basis.top_degree
    if not 0 <= k <= d:
        raise DegreeOutOfRange(f"degree {k} is outside 0..{d}")
    rows = []
    for i in range(basis.piece(k).dimension):
        row = []
        for j in range(basis.piece(d - k).dimension):
            row.extend(multiply(basis.basis_class(k, i), basis.basis_class(d - k, j)).coordinates)
        rows.append(row)
    if not rows or not rows[0]:
        return 0
    return rank(ExactMatrix(rows))


def torsion_check(basis: GradedBasis, k: int) -> bool:
    """Whether the degree-k relation matrix has every invariant factor equal to 1."""
    piece = basis.piece(k)
    factors = invariant_factors(relation_rows(basis.presentation, k, piece.index))
    return all(f == 1 for f in factors)


def _degree_dimension(args):
    pres, k = args
    return k, GradedPiece(pres, k).dimension


def hilbert_function(pres: Presentation, method: str = "auto") -> List[int]:
    """
    Ranks h_0, ..., h_d of the graded pieces.

    Args:
        pres: the presentation
        method: 'standard' (one process), 'parallel' (one process per degree) or 'auto'

    Returns:
        List[int]: the Hilbert function
    """
    d = pres.grading_dimension
    if method == "auto":
        method = "parallel" if d >= 4 and mp.cpu_count() > 1 else "standard"

    if method == "standard":
        return GradedBasis(pres).hilbert_function()
    elif method == "parallel":
        ranks = [0] * (d + 1)
        with ProcessPoolExecutor() as executor:
            for k, h in executor.map(_degree_dimension, [(pres, k) for k in range(d + 1)]):
                ranks[k] = h
        return ranks
    else:
        raise ValueError(f"Unknown method: {method}")


def split_to_label(split: Iterable[int], n: int) -> Label:
    """
    Canonical label of the split T | T^c of {1, ..., n}: the side without 1.

    Raises:
        HassettError: a side has fewer than two points or T is not inside 1..n
    """
    side = set(split)
    everything = set(range(1, n + 1))
    if not side <= everything:
        raise HassettError(f"{sorted(side)} is not a subset of 1..{n}")
    other = everything - side
    if len(side) < 2 or len(other) < 2:
        raise HassettError(f"split {sorted(side)} | {sorted(other)} has a side with fewer than two points")
    return as_label(other if 1 in side else side)


@dataclass(frozen=True)
class DualGraph:
    """Dual graph of a two-component curve: two vertices joined by one edge.

    Attributes:
        legs: marked points on each vertex; the second vertex carries point 1
        weights: weight vector used to test stability
    """

    legs: Tuple[Label, Label]
    weights: WeightVector = field(compare=False)

    @property
    def is_stable(self) -> bool:
        return self.weights.is_w_stable_split(self.legs[0])

    @property
    def label(self) -> Label:
        return self.legs[0]

    def to_text(self) -> str:
        a, b = self.legs
        return f"A{{{','.join(map(str, a))}}} --- B{{{','.join(map(str, b))}}}"

    def to_dict(self) -> Dict:
        return {
            "vertices": [{"name": "A", "legs": list(self.legs[0])}, {"name": "B", "legs": list(self.legs[1])}],
            "edges": [["A", "B"]],
            "stable": self.is_stable,
        }


def dual_graph(p: HeavyLightProfile, label: Sequence[int]) -> DualGraph:
    """
    Dual graph of the boundary divisor D^S.

    Legs S sit on one vertex and S^c together with 1 on the other.

    Raises:
        HassettError: S is not a 1-connected flat label for p
    """
    g = reduced_weight_graph(p)
    s = validate_flat_label(g, label)
    other = as_label(set(range(1, g.profile.n + 1)) - set(s))
    return DualGraph(legs=(s, other), weights=g.profile.weights)
