"""Weight vectors, heavy/light classification and the canonical (1^m, eps^(n-m)) form."""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from hassettcore.common import (
    MIN_HEAVY,
    MIN_MARKED_POINTS,
    HassettError,
    Label,
    MalformedRational,
    NotHeavyLight,
    TooFewHeavy,
    TotalWeightTooSmall,
    VertexKind,
    WeightOutOfRange,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightVector:
    """Exact rational weights (w_1, ..., w_n) on the marked points.

    Attributes:
        entries: weights in (0, 1], indexed from 1 in all public methods
    """

    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        for i, w in enumerate(self.entries, start=1):
            if not 0 < w <= 1:
                raise WeightOutOfRange(f"w_{i} = {w} is not in (0, 1]")
        if sum(self.entries) <= 2:
            raise TotalWeightTooSmall(f"total weight {sum(self.entries)} must exceed 2")
        if len(self.entries) < MIN_MARKED_POINTS:
            raise HassettError(
                f"need at least {MIN_MARKED_POINTS} marked points, got {len(self.entries)}"
            )

    @classmethod
    def all_heavy(cls, n: int) -> "WeightVector":
        """The Keel weight vector (1^n)."""
        return cls(tuple(Fraction(1) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> Fraction:
        return self.entries[i - 1]

    def weight_of(self, subset: Iterable[int]) -> Fraction:
        """Exact total weight of a set of marked points."""
        return sum((self[i] for i in subset), Fraction(0))

    def is_w_stable_split(self, subset: Iterable[int]) -> bool:
        """
        Whether the split T | T^c of {1, ..., n} is a w-stable one-node tree.

        Both sides must carry total weight above 1.
        """
        side = set(subset)
        other = set(range(1, self.n + 1)) - side
        return self.weight_of(side) > 1 and self.weight_of(other) > 1

    def to_text(self) -> str:
        return ",".join(str(w) for w in self.entries)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class HeavyLightProfile:
    """Partition of the marked points into heavy and light ones.

    Attributes:
        heavy: heavy indices, sorted
        light: light indices, sorted
        weights: the vector the profile was classified from
    """

    heavy: Label
    light: Label
    weights: Optional[WeightVector] = field(default=None, compare=False)

    def __post_init__(self):
        if set(self.heavy) & set(self.light):
            raise HassettError("heavy and light index sets overlap")
        if set(self.heavy) | set(self.light) != set(range(1, self.n + 1)):
            raise HassettError("heavy and light indices must cover 1..n")

    @classmethod
    def from_counts(cls, m: int, n: int) -> "HeavyLightProfile":
        """Canonical profile with heavy points 1..m and light points m+1..n."""
        if m < MIN_HEAVY:
            raise TooFewHeavy(f"at least {MIN_HEAVY} heavy weights are required, got {m}")
        if n < MIN_MARKED_POINTS:
            raise HassettError(f"need at least {MIN_MARKED_POINTS} marked points, got {n}")
        if m > n:
            raise HassettError(f"m = {m} exceeds n = {n}")
        if m == n - 1:
            raise NotHeavyLight("a single light point is also heavy; use m = n")
        return canonical_profile(cls(tuple(range(1, m + 1)), tuple(range(m + 1, n + 1))))

    @property
    def m(self) -> int:
        return len(self.heavy)

    @property
    def n(self) -> int:
        return len(self.heavy) + len(self.light)

    @property
    def is_canonical(self) -> bool:
        return self.heavy == tuple(range(1, self.m + 1))

    def kind(self, i: int) -> VertexKind:
        return VertexKind.HEAVY if i in self.heavy else VertexKind.LIGHT

    def is_heavy(self, i: int) -> bool:
        return i in self.heavy

    def relabeling(self) -> Dict[int, int]:
        """Map original indices to canonical ones: heavies first, order preserved."""
        order = list(self.heavy) + list(self.light)
        return {old: new for new, old in enumerate(order, start=1)}

    def describe(self) -> str:
        return f"m={self.m}, n={self.n}, heavy={list(self.heavy)}, light={list(self.light)}"


def _parse_rational(token: str) -> Fraction:
    token = token.strip()
    if not token:
        raise MalformedRational("empty weight entry")
    parts = token.split("/")
    if len(parts) > 2:
        raise MalformedRational(f"cannot parse {token!r} as p/q")
    try:
        numerator = int(parts[0])
        denominator = int(parts[1]) if len(parts) == 2 else 1
    except ValueError:
        raise MalformedRational(f"cannot parse {token!r} as p/q") from None
    if denominator == 0:
        raise MalformedRational(f"zero denominator in {token!r}")
    return Fraction(numerator, denominator)


def parse_weights(text: str) -> WeightVector:
    """
    Parse a comma-separated list of rationals.

    Args:
        text: e.g. "1,1,1/10,1/10,1/10"; whitespace is ignored

    Returns:
        WeightVector: validated exact weights

    Raises:
        MalformedRational: an entry is not an integer or p/q
        WeightOutOfRange: an entry is outside (0, 1]
        TotalWeightTooSmall: the entries sum to at most 2
    """
    entries = tuple(_parse_rational(token) for token in text.split(","))
    return WeightVector(entries)


def classify(w: WeightVector) -> HeavyLightProfile:
    """
    Split the marked points into heavy and light ones.

    Point i is heavy if w_i + w_j > 1 for all j != i, and light if w_i + w_j > 1
    implies that j is heavy. A point satisfying both is reported heavy.

    Raises:
        NotHeavyLight: some point is neither heavy nor light
        TooFewHeavy: fewer than two heavy points
    """
    indices = range(1, w.n + 1)
    heavy = [i for i in indices if all(w[i] + w[j] > 1 for j in indices if j != i)]
    heavy_set = set(heavy)
    light = []
    for i in indices:
        if i in heavy_set:
            continue
        if any(w[i] + w[j] > 1 and j not in heavy_set for j in indices if j != i):
            raise NotHeavyLight(
                f"w_{i} = {w[i]} is neither heavy nor light in ({w.to_text()})"
            )
        light.append(i)
    if len(heavy) < MIN_HEAVY:
        raise TooFewHeavy(
            f"at least {MIN_HEAVY} heavy weights are required, got {len(heavy)}"
        )
    profile = HeavyLightProfile(tuple(heavy), tuple(light), weights=w)
    logger.debug("classified %s: %s", w.to_text(), profile.describe())
    return profile


def canonical_epsilon(m: int, n: int) -> Fraction:
    """Representative light weight 1/(n-m+1); any eps < 1/(n-m) is isomorphic."""
    return Fraction(1, n - m + 1)


def canonical_form(p: HeavyLightProfile) -> WeightVector:
    """
    Representative weight vector (1^m, eps^(n-m)) with eps = 1/(n-m+1).

    Heavy points are moved to the front, so point 1 is always heavy.

    Raises:
        TooFewHeavy: fewer than two heavy points
    """
    if p.m < MIN_HEAVY:
        raise TooFewHeavy(f"at least {MIN_HEAVY} heavy weights are required, got {p.m}")
    eps = canonical_epsilon(p.m, p.n)
    entries = [Fraction(1)] * p.m + [eps] * (p.n - p.m)
    return WeightVector(tuple(entries))


def canonical_profile(p: HeavyLightProfile) -> HeavyLightProfile:
    """Profile of canonical_form(p): heavy points 1..m, light points m+1..n."""
    w = canonical_form(p)
    return HeavyLightProfile(
        tuple(range(1, p.m + 1)), tuple(range(p.m + 1, p.n + 1)), weights=w
    )


def profile_from_text(text: str) -> HeavyLightProfile:
    """Parse, classify and canonicalize in one step."""
    return canonical_profile(classify(parse_weights(text)))


def heavy_light_profiles(max_n: int, min_n: int = MIN_MARKED_POINTS) -> List[HeavyLightProfile]:
    """Every canonical heavy/light profile with min_n <= n <= max_n, ordered by (n, m).

    m = n - 1 is skipped: a lone light point pairs above 1 with every other point.
    """
    return [
        HeavyLightProfile.from_counts(m, n)
        for n in range(min_n, max_n + 1)
        for m in range(MIN_HEAVY, n + 1)
        if m != n - 1
    ]


@dataclass
class WeightInstance:
    """A named weight vector with the values expected for it.

    Attributes:
        name: descriptive name
        weights: the weight vector
        hilbert: expected ranks h_0, ..., h_{n-3}, if known
        f_vector: expected face counts of the fan, if known
    """

    name: str
    weights: WeightVector
    hilbert: Optional[List[int]] = None
    f_vector: Optional[List[int]] = None

    @classmethod
    def from_json(cls, json_path):
        """Load an instance from a JSON file.

        Args:
            json_path: path to a file with keys "name", "weights" and optionally
                "hilbert" and "f_vector"

        Returns:
            WeightInstance with data loaded from the file
        """
        with open(json_path, "r", encoding="utf-8") as f:
            data = json.load(f)

        if "weights" not in data:
            raise HassettError(f"No weights found in instance file {json_path}")

        return cls(
            name=data.get("name", "Unnamed instance"),
            weights=parse_weights(data["weights"]),
            hilbert=data.get("hilbert"),
            f_vector=data.get("f_vector"),
        )

    @property
    def profile(self) -> HeavyLightProfile:
        return canonical_profile(classify(self.weights))
