"""
Keel's presentation of the Chow ring of M_{0,n}-bar, and the pullback of a
heavy/light presentation into a larger one.

Keel generators are splits T | T^c of {1, ..., n} with both sides of size at
least 2, named by the side that omits 1. Two splits may multiply to something
nonzero only when they are compatible (one side of each is contained in a side
of the other).
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from hassettcore.chow import (
    ChowClass,
    GradedBasis,
    Monomial,
    Presentation,
    dedupe_relations,
    heavy_light_presentation,
)
from hassettcore.common import (
    MIN_MARKED_POINTS,
    HassettError,
    Label,
    RelationNotPreserved,
    format_label,
    label_key,
)
from hassettcore.linalg import ExactMatrix, rank
from hassettcore.weights import HeavyLightProfile, canonical_profile

logger = logging.getLogger(__name__)


@dataclass
class KeelPresentation(Presentation):
    """Presentation of A*(M_{0,n}-bar) by boundary divisors.

    Attributes:
        n: number of marked points
    """

    n: int = 0


def keel_generators(n: int) -> List[Label]:
    """Canonical split representatives T of {2..n} with 2 <= |T| <= n - 2."""
    points = range(2, n + 1)
    labels = [
        t for size in range(2, n - 1) for t in itertools.combinations(points, size)
    ]
    return sorted(labels, key=label_key)


def splits_compatible(s: Label, t: Label, n: int) -> bool:
    """
    Keel's compatibility of two splits.

    S | S^c and T | T^c are compatible when S is inside T or T^c, or T is inside
    S or S^c. With both representatives omitting 1 this is the nested condition.
    """
    s_set, t_set = set(s), set(t)
    t_complement = set(range(1, n + 1)) - t_set
    s_complement = set(range(1, n + 1)) - s_set
    return s_set <= t_set or s_set <= t_complement or t_set <= s_set or t_set <= s_complement


def _four_point_relation(generators: Sequence[Label], n: int, i: int, j: int, k: int, l: int):
    everything = set(range(1, n + 1))

    def separates(side, inside, outside):
        return all(x in side for x in inside) and not any(x in side for x in outside)

    relation = []
    for t in generators:
        sides = (set(t), everything - set(t))
        left = sum(separates(side, (i, j), (k, l)) for side in sides)
        right = sum(separates(side, (i, k), (j, l)) for side in sides)
        relation.append(left - right)
    return relation


def keel_presentation(n: int) -> KeelPresentation:
    """
    Keel's presentation of the Chow ring of M_{0,n}-bar.

    Relation (1), D^T = D^{T^c}, is resolved by the choice of representative.
    Relation (2) gives a Stanley-Reisner pair for every incompatible pair of
    splits. Relation (3) is generated for every ordered choice of four distinct
    points i, j, k, l:

        sum_{i,j in S; k,l not in S} D^S = sum_{i,k in S; j,l not in S} D^S

    Rows are deduplicated by signature.

    Raises:
        HassettError: n < 4
    """
    if n < MIN_MARKED_POINTS:
        raise HassettError(f"need at least {MIN_MARKED_POINTS} marked points, got {n}")
    generators = keel_generators(n)
    sr_pairs = [
        (s, t)
        for s, t in itertools.combinations(generators, 2)
        if not splits_compatible(s, t, n)
    ]
    relations = dedupe_relations(
        _four_point_relation(generators, n, *quadruple)
        for quadruple in itertools.permutations(range(1, n + 1), 4)
    )
    logger.debug(
        "Keel presentation for n=%d: %d generators, %d SR pairs, %d relations",
        n, len(generators), len(sr_pairs), len(relations),
    )
    return KeelPresentation(
        generators=generators,
        sr_pairs=sr_pairs,
        linear_relations=relations,
        grading_dimension=n - 3,
        n=n,
    )


def _relation_images(source: Presentation, target: GradedBasis, mapping: Dict[int, int]):
    """Yield (description, image class) for every defining relation of source."""
    for s, t in source.sr_pairs:
        monomial = (source.index(s), source.index(t))
        if target.top_degree < 2:
            continue  # degree 2 vanishes in both rings
        image = target.class_of(2, {tuple(sorted(mapping[g] for g in monomial)): 1})
        yield f"{format_label(s)}*{format_label(t)}", image
    for relation in source.linear_relations:
        vector = {(mapping[g],): c for g, c in enumerate(relation) if c}
        yield source.relation_text(relation), target.class_of(1, vector)


def generator_mapping(source: Presentation, target: Presentation) -> Dict[int, int]:
    """
    Index map D^S -> D^S between two presentations with the same labels.

    Raises:
        HassettError: a source generator has no counterpart in the target
    """
    return {i: target.index(label) for i, label in enumerate(source.generators)}


def nonvanishing_relations(source: Presentation, target: GradedBasis) -> List[str]:
    """Defining relations of source whose image under D^S -> D^S is nonzero in target."""
    mapping = generator_mapping(source, target.presentation)
    return [text for text, image in _relation_images(source, target, mapping) if not image.is_zero]


@dataclass
class Pullback:
    """
    The graded ring map D^S -> D^S from a heavy/light ring into a larger one.

    Attributes:
        source: presentation of the smaller ring
        target: presentation of the ambient ring (Keel's by default)
        generator_map: source label -> target label
        hilbert: Hilbert function of the source ring
        image_ranks: per degree, rank of the image of the source basis
        subring_ranks: per degree, rank of the image of all nested source monomials
    """

    source: Presentation
    target: Presentation
    generator_map: Dict[Label, Label]
    hilbert: List[int]
    image_ranks: List[int]
    subring_ranks: List[int]
    source_basis: GradedBasis = field(repr=False, compare=False)
    target_basis: GradedBasis = field(repr=False, compare=False)

    @property
    def is_injective(self) -> bool:
        return self.image_ranks == self.hilbert

    def image(self, c: ChowClass) -> ChowClass:
        """Image of a class of the source ring."""
        mapping = generator_mapping(self.source, self.target)
        vector: Dict[Monomial, object] = {}
        for coefficient, monomial in c.terms():
            key = tuple(sorted(mapping[g] for g in monomial))
            vector[key] = vector.get(key, 0) + coefficient
        return self.target_basis.class_of(c.degree, vector)

    def missing_generators(self) -> List[Label]:
        """Target generators that are not images of source generators."""
        images = set(self.generator_map.values())
        return [label for label in self.target.generators if label not in images]

    def to_dict(self) -> Dict:
        return {
            "weights": self.source.weights.to_text() if self.source.weights else None,
            "generator_map": [
                {"source": list(s), "target": list(t)} for s, t in self.generator_map.items()
            ],
            "hilbert": self.hilbert,
            "image_ranks": self.image_ranks,
            "subring_ranks": self.subring_ranks,
            "injective": self.is_injective,
        }


def _image_rank(source: Presentation, target: GradedBasis, mapping, k: int, monomials) -> int:
    rows = []
    for monomial in monomials:
        image = target.class_of(k, {tuple(sorted(mapping[g] for g in monomial)): 1})
        rows.append(list(image.coordinates))
    if not rows or not rows[0]:
        return 0
    return rank(ExactMatrix(rows))


def pullback(p: HeavyLightProfile, ambient: Optional[Presentation] = None) -> Pullback:
    """
    Realize the pullback of the reduction morphism on Chow rings.

    Args:
        p: heavy/light profile of the smaller space
        ambient: presentation of the larger space; Keel's presentation for the
            same n when omitted

    Returns:
        Pullback: generator map with per-degree image and subring ranks

    Raises:
        RelationNotPreserved: some defining relation of p maps to a nonzero class
    """
    p = canonical_profile(p)
    source = heavy_light_presentation(p)
    target = ambient if ambient is not None else keel_presentation(p.n)
    if target.grading_dimension != source.grading_dimension:
        raise HassettError("pullback needs rings of the same dimension")
    mapping = generator_mapping(source, target)
    target_basis = GradedBasis(target)
    source_basis = GradedBasis(source)

    failures = [text for text, image in _relation_images(source, target_basis, mapping) if not image.is_zero]
    if failures:
        raise RelationNotPreserved(f"relations not preserved: {failures[:3]}")

    hilbert = source_basis.hilbert_function()
    image_ranks, subring_ranks = [], []
    for k in range(source.grading_dimension + 1):
        piece = source_basis.piece(k)
        image_ranks.append(_image_rank(source, target_basis, mapping, k, piece.basis_monomials))
        subring_ranks.append(_image_rank(source, target_basis, mapping, k, piece.monomials))
    logger.debug("pullback for %s: image ranks %s", p.weights.to_text(), image_ranks)
    return Pullback(
        source=source,
        target=target,
        generator_map={label: label for label in source.generators},
        hilbert=hilbert,
        image_ranks=image_ranks,
        subring_ranks=subring_ranks,
        source_basis=source_basis,
        target_basis=target_basis,
    )


def keel_iso_check(n: int) -> bool:
    """
    Compare Keel's presentation with the heavy/light presentation of (1^n).

    True when the generator sets agree, the Hilbert functions agree and every
    defining relation of each side vanishes in the other ring.
    """
    keel = keel_presentation(n)
    heavy = heavy_light_presentation(HeavyLightProfile.from_counts(n, n))
    if keel.generators != heavy.generators:
        logger.debug("generator lists differ for n=%d", n)
        return False
    keel_basis, heavy_basis = GradedBasis(keel), GradedBasis(heavy)
    if keel_basis.hilbert_function() != heavy_basis.hilbert_function():
        return False
    return not nonvanishing_relations(keel, heavy_basis) and not nonvanishing_relations(heavy, keel_basis)
