"""Common definitions and utilities for heavy/light Hassett space computations.

This module contains constants, enumerations, the error hierarchy and small
formatting helpers shared by the weight, matroid, fan and Chow ring modules.
Subsets of marked points are always stored as sorted tuples of integers.
"""

from enum import IntEnum
from typing import Iterable, Tuple

# Global defaults
DEFAULT_ELIMINATED_PAIR = (2, 3)  # pair coordinate removed to quotient the lineality line
DEFAULT_SEED = 20240611  # seed for deterministic pseudo-random checks
RANDOM_POINT_COUNT = 200  # random points per support-equality check
RANDOM_SUBSET_COUNT = 60  # random edge subsets per matroid axiom check
RANDOM_MATRIX_COUNT = 25  # random integer matrices per linear algebra check
MIN_MARKED_POINTS = 4
MIN_HEAVY = 2

# Largest n exercised by exhaustive checks at each verification level
VERIFY_LEVEL_MAX_N = {
    "fast": 5,
    "full": 7,
}
EXHAUSTIVE_MAX_N = 6  # ring maps, torsion, pairings and flat enumeration by closure
SUPPORT_MAX_N = {  # support equality between the two subdivisions
    "fast": 5,
    "full": 6,
}

Label = Tuple[int, ...]
Pair = Tuple[int, int]


class VertexKind(IntEnum):
    """Classification of a marked point.

    Attributes:
        HEAVY: w_i + w_j > 1 for every j != i
        LIGHT: w_i + w_j > 1 only when w_j is heavy
    """

    HEAVY = 0
    LIGHT = 1


class HassettError(ValueError):
    """Base class for invalid input to any hassettcore operation."""


class MalformedRational(HassettError):
    pass


class WeightOutOfRange(HassettError):
    pass


class TotalWeightTooSmall(HassettError):
    pass


class NotHeavyLight(HassettError):
    pass


class TooFewHeavy(HassettError):
    pass


class EdgeNotInGraph(HassettError):
    pass


class DimensionMismatch(HassettError):
    pass


class InvalidSourceLabel(HassettError):
    pass


class DegreeOutOfRange(HassettError):
    pass


class InhomogeneousInput(HassettError):
    pass


class DegreeOverflow(HassettError):
    pass


class NonIntegerEntry(HassettError):
    pass


class RelationNotPreserved(RuntimeError):
    """A relation failed to map to zero. Indicates a bug, not bad input."""


def as_label(items: Iterable[int]) -> Label:
    """Normalize an iterable of marked points to a sorted tuple without repeats."""
    return tuple(sorted(set(int(i) for i in items)))


def label_key(label: Label) -> Tuple[int, Label]:
    """Canonical ordering key: cardinality first, then lexicographic."""
    return len(label), label


def label_mask(label: Iterable[int]) -> int:
    """Encode a subset of marked points as an integer bitmask."""
    mask = 0
    for i in label:
        mask |= 1 << i
    return mask


def format_label(label: Label) -> str:
    """
    Format a subset the way divisors are written in text output.

    Args:
        label: sorted tuple of marked points

    Returns:
        str: e.g. "D^{2,3,5}"
    """
    return "D^{" + ",".join(str(i) for i in label) + "}"


def format_monomial(labels: Iterable[Label]) -> str:
    """Format a product of divisors, grouping repeated factors as powers."""
    parts = []
    previous = None
    power = 0
    for label in labels:
        if label == previous:
            power += 1
            continue
        if previous is not None:
            parts.append(format_label(previous) + (f"^{power}" if power > 1 else ""))
        previous, power = label, 1
    if previous is None:
        return "1"
    parts.append(format_label(previous) + (f"^{power}" if power > 1 else ""))
    return "*".join(parts)


def json_key(label: Label) -> str:
    """Key used for labels inside JSON objects, e.g. "[2,3,5]"."""
    return "[" + ",".join(str(i) for i in label) + "]"
