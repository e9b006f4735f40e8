from pathlib import Path

import pytest

from hassettcore.weights import HeavyLightProfile, profile_from_text

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


@pytest.fixture
def losev_manin():
    """(1^2, eps^3), the five-point Losev-Manin space."""
    return profile_from_text("1,1,1/10,1/10,1/10")


@pytest.fixture
def losev_manin_4():
    return HeavyLightProfile.from_counts(2, 4)


@pytest.fixture
def keel5():
    return HeavyLightProfile.from_counts(5, 5)


@pytest.fixture
def instances_dir():
    return INSTANCES
