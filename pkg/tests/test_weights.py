from fractions import Fraction

import pytest

from hassettcore.common import (
    HassettError,
    MalformedRational,
    NotHeavyLight,
    TooFewHeavy,
    TotalWeightTooSmall,
    VertexKind,
    WeightOutOfRange,
)
from hassettcore.weights import (
    HeavyLightProfile,
    WeightInstance,
    WeightVector,
    canonical_form,
    canonical_profile,
    classify,
    heavy_light_profiles,
    parse_weights,
    profile_from_text,
)


def F(text):
    return Fraction(text)


def test_parse_losev_manin_weights():
    w = parse_weights("1,1,1/10,1/10,1/10")
    assert w.entries == (1, 1, F("1/10"), F("1/10"), F("1/10"))
    assert w.n == 5
    assert w[3] == F("1/10")


def test_parse_ignores_whitespace():
    assert parse_weights(" 1, 1 ,1,1").entries == (1, 1, 1, 1)


@pytest.mark.parametrize(
    "text, error",
    [
        ("1,1,3", WeightOutOfRange),
        ("0,1,1,1", WeightOutOfRange),
        ("1,1,-1/2,1", WeightOutOfRange),
        ("1,1,x,1", MalformedRational),
        ("1,1,1/0,1", MalformedRational),
        ("1,1,1/2/3,1", MalformedRational),
        ("1,1,,1", MalformedRational),
        ("1/2,1/2,1/2,1/2", TotalWeightTooSmall),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_weights(text)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        parse_weights("1,1,3")


def test_too_few_points():
    with pytest.raises(HassettError):
        WeightVector((F(1), F(1), F(1)))


def test_classify_losev_manin():
    p = classify(parse_weights("1,1,1/10,1/10,1/10"))
    assert p.heavy == (1, 2)
    assert p.light == (3, 4, 5)
    assert (p.m, p.n) == (2, 5)
    assert p.kind(1) == VertexKind.HEAVY
    assert p.kind(4) == VertexKind.LIGHT


def test_classify_all_heavy():
    p = classify(parse_weights("1,1,1,1"))
    assert p.heavy == (1, 2, 3, 4)
    assert p.light == ()


def test_classify_not_heavy_light():
    with pytest.raises(NotHeavyLight):
        classify(parse_weights("3/5,3/5,3/5,3/10,3/10"))


def test_classify_one_heavy():
    with pytest.raises(TooFewHeavy):
        classify(parse_weights("1,1/3,1/3,1/3,1/3"))


def test_lone_light_point_is_heavy():
    p = classify(parse_weights("1,1,1,1/2"))
    assert p.m == 4


def test_canonical_form_examples():
    assert canonical_form(classify(parse_weights("1,1,1/10,1/10,1/10"))).entries == (
        1, 1, F("1/4"), F("1/4"), F("1/4"),
    )
    assert canonical_form(classify(parse_weights("1,1,1,1"))).entries == (1, 1, 1, 1)
    assert canonical_form(classify(parse_weights("1,1,2/5,2/5"))).entries == (1, 1, F("1/3"), F("1/3"))


def test_canonical_form_moves_heavy_points_first():
    p = classify(parse_weights("1/10,1,1/10,1,1/10"))
    assert p.heavy == (2, 4)
    assert p.relabeling() == {2: 1, 4: 2, 1: 3, 3: 4, 5: 5}
    assert canonical_form(p).entries == (1, 1, F("1/4"), F("1/4"), F("1/4"))
    assert canonical_profile(p).is_canonical


def test_canonical_form_needs_two_heavy():
    with pytest.raises(TooFewHeavy):
        canonical_form(HeavyLightProfile((1,), (2, 3, 4)))


@pytest.mark.parametrize("p", heavy_light_profiles(7), ids=lambda p: f"m{p.m}n{p.n}")
def test_classify_inverts_canonical_form(p):
    q = classify(canonical_form(p))
    assert (q.heavy, q.light) == (p.heavy, p.light)
    eps = canonical_form(p).entries[-1]
    assert p.m == p.n or (p.n - p.m) * eps < 1


def test_heavy_light_profiles_skip_lone_light_point():
    profiles = heavy_light_profiles(5)
    assert [(p.m, p.n) for p in profiles] == [(2, 4), (4, 4), (2, 5), (3, 5), (5, 5)]
    with pytest.raises(NotHeavyLight):
        HeavyLightProfile.from_counts(4, 5)


def test_profile_rejects_overlap():
    with pytest.raises(HassettError):
        HeavyLightProfile((1, 2), (2, 3, 4))


def test_weight_of_and_stable_split():
    w = parse_weights("1,1,1/4,1/4,1/4")
    assert w.weight_of([3, 4, 5]) == F("3/4")
    assert w.is_w_stable_split([2, 3])
    assert not w.is_w_stable_split([3, 4])
    assert WeightVector.all_heavy(5).entries == (1,) * 5


def test_profile_from_text_is_canonical():
    p = profile_from_text("1/10,1,1/10,1,1/10")
    assert p.heavy == (1, 2)
    assert p.weights.entries[0] == 1


def test_instance_from_json(instances_dir):
    instance = WeightInstance.from_json(instances_dir / "losev_manin_5.json")
    assert instance.hilbert == [1, 4, 1]
    assert instance.f_vector == [6, 6]
    assert instance.profile.m == 2
