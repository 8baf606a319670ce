import pytest
from hypothesis import settings

from src.dualitylab import DualityInstance
from tests.strategies import FLAGSHIP, modular_instance

settings.register_profile("wittlab", max_examples=25, deadline=None)
settings.load_profile("wittlab")


@pytest.fixture
def flagship():
    return DualityInstance.from_mapping(FLAGSHIP)


@pytest.fixture
def char_two():
    """F_2 with lambda = 1 and l = 1."""
    return modular_instance(2, 2, 1, "1", name="char-two")


@pytest.fixture
def char_two_l2():
    return modular_instance(2, 2, 2, "1", name="char-two-l2")
