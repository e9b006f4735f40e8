import pytest

from hassettcore.common import DimensionMismatch, HassettError, InvalidSourceLabel
from hassettcore.fan import (
    CoordinateSystem,
    ambient_dimension,
    build_fan,
    chain_of_flats_cones,
    chain_of_flats_fan,
    is_nested,
    pair_indices,
    project_pr_w,
    projection_report,
    ray_coordinates,
    sample_points,
    special_points,
    support_disagreements,
    support_membership,
    torus_dimension,
    unimodularity_check,
)
from hassettcore.weights import HeavyLightProfile, heavy_light_profiles

LOSEV_MANIN_RAYS = {
    (2, 3): (-1, -1),
    (2, 4): (1, 0),
    (2, 5): (0, 1),
    (2, 3, 4): (0, -1),
    (2, 3, 5): (-1, 0),
    (2, 4, 5): (1, 1),
}


def profile(m, n):
    return HeavyLightProfile.from_counts(m, n)


def test_pair_indices(losev_manin):
    assert pair_indices(losev_manin) == [(2, 3), (2, 4), (2, 5)]
    assert pair_indices(profile(3, 5)) == [(2, 3), (2, 4), (2, 5), (3, 4), (3, 5)]
    assert len(pair_indices(profile(5, 5))) == 6


def test_coordinate_system_rejects_light_pair(losev_manin):
    with pytest.raises(HassettError):
        CoordinateSystem.for_profile(losev_manin, (3, 4))
    assert CoordinateSystem.for_profile(losev_manin, (5, 2)).eliminated == (2, 5)


def test_losev_manin_rays(losev_manin):
    fan = build_fan(losev_manin)
    assert fan.coordinates.basis == ((2, 4), (2, 5))
    assert fan.rays == LOSEV_MANIN_RAYS
    for label, vector in LOSEV_MANIN_RAYS.items():
        assert ray_coordinates(losev_manin, label) == vector


def test_rays_with_another_eliminated_pair(losev_manin):
    assert ray_coordinates(losev_manin, (2, 3), eliminated=(2, 5)) == (1, 0)
    assert ray_coordinates(losev_manin, (2, 3, 5), eliminated=(2, 5)) == (0, -1)
    assert ray_coordinates(losev_manin, (2, 3, 4), eliminated=(2, 5)) == (1, 1)


def test_losev_manin_fan_is_a_hexagon(losev_manin):
    fan = build_fan(losev_manin)
    assert fan.dimension == 2
    assert fan.f_vector == [6, 6]
    assert ((2, 3), (2, 3, 4)) in fan.maximal_cones
    assert not fan.spans_cone([(2, 3), (2, 4)])
    for cone in fan.maximal_cones:
        assert is_nested(cone)


def test_fan_to_dict(losev_manin):
    data = build_fan(losev_manin).to_dict()
    assert data["eliminated"] == [2, 3]
    assert data["basis"] == [[2, 4], [2, 5]]
    assert data["rays"][0] == {"flat": [2, 3], "coords": [-1, -1]}
    assert len(data["cones"]["2"]) == 6
    assert data["f_vector"] == [6, 6]


@pytest.mark.parametrize("m, n, f_vector", [(4, 4, [3]), (2, 4, [2]), (5, 5, [10, 15])])
def test_f_vectors(m, n, f_vector):
    assert build_fan(profile(m, n)).f_vector == f_vector


def test_is_nested():
    assert is_nested([(2, 3), (2, 3, 4), (5, 6)])
    assert not is_nested([(2, 3), (3, 4)])
    assert is_nested([])


@pytest.mark.parametrize("p", heavy_light_profiles(7), ids=lambda p: f"m{p.m}n{p.n}")
def test_ambient_matches_torus_dimension(p):
    assert ambient_dimension(p) == torus_dimension(p)


@pytest.mark.parametrize("p", heavy_light_profiles(6), ids=lambda p: f"m{p.m}n{p.n}")
def test_fans_are_unimodular(p):
    fan = build_fan(p)
    assert fan.dimension == p.n - 3
    assert unimodularity_check(fan)
    assert unimodularity_check(chain_of_flats_fan(p))


def test_chain_of_flats_cones(losev_manin):
    chains = chain_of_flats_cones(losev_manin)
    assert len(chains) == 6
    assert chains[0] == (((2, 3),), ((2, 3, 4),))
    assert len(chain_of_flats_cones(profile(5, 5))) == 18
    assert all(len(chain) == 2 for chain in chains)


def test_chain_of_flats_fan(losev_manin):
    assert chain_of_flats_fan(losev_manin).f_vector == [6, 6]
    # six edges, four triangles and three perfect matchings of K4
    assert chain_of_flats_fan(profile(5, 5)).f_vector == [13, 18]


def test_support_membership_losev_manin_is_complete(losev_manin):
    fan = build_fan(losev_manin)
    for point in [(3, -7), (0, 0), (-1, 5), ("1/2", "-1/3")]:
        assert support_membership(fan, point)


def test_support_membership_rejects_wrong_dimension(losev_manin):
    with pytest.raises(DimensionMismatch):
        support_membership(build_fan(losev_manin), (1, 2, 3))


def test_support_membership_keel5():
    fan = build_fan(profile(5, 5))
    assert all(support_membership(fan, point) for point in special_points(fan))
    assert not all(support_membership(fan, point) for point in sample_points([fan], 40))


def test_sample_points_are_deterministic(losev_manin):
    fan = build_fan(losev_manin)
    assert sample_points([fan], 12, seed=3) == sample_points([fan], 12, seed=3)
    assert len(sample_points([fan], 12)) == 12


@pytest.mark.parametrize("m, n", [(2, 5), (3, 5), (5, 5)])
def test_subdivisions_have_the_same_support(m, n):
    p = profile(m, n)
    nested, chains = build_fan(p), chain_of_flats_fan(p)
    points = sample_points([nested, chains], 60) + special_points(nested) + special_points(chains)
    assert support_disagreements(nested, chains, points) == []


def test_project_pr_w(losev_manin):
    assert project_pr_w((3, 4), losev_manin) == (0, 0)
    assert project_pr_w((2, 3), losev_manin) == (-1, -1)
    assert project_pr_w((2, 3, 4), losev_manin) == LOSEV_MANIN_RAYS[(2, 3, 4)]


@pytest.mark.parametrize("label", [(2, 3, 4, 5), (2,), (1, 2), (2, 6)])
def test_project_pr_w_rejects_non_rays(losev_manin, label):
    with pytest.raises(InvalidSourceLabel):
        project_pr_w(label, losev_manin)


def test_project_pr_w_needs_a_reduction(losev_manin):
    with pytest.raises(HassettError):
        project_pr_w((2, 3), profile(3, 5), source_profile=losev_manin)


def test_projection_report_losev_manin(losev_manin):
    report = projection_report(losev_manin)
    assert report.killed == [(3, 4), (3, 5), (4, 5), (3, 4, 5)]
    assert report.all_light == report.killed
    assert report.injective and report.rays_match
    assert report.bad_cones == []
    assert report.ok


@pytest.mark.parametrize("p", heavy_light_profiles(6), ids=lambda p: f"m{p.m}n{p.n}")
def test_projection_report(p):
    assert projection_report(p).ok
