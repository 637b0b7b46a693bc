import pytest

from services import game_service, polygon_service

PLUS_TURNS = "LLRLLRLLRLLR"


@pytest.fixture
def table():
    return game_service.GrundyTable()


@pytest.fixture
def square():
    return polygon_service.validate("LLLL")


@pytest.fixture
def plus():
    return polygon_service.validate(PLUS_TURNS)


@pytest.fixture(scope="session")
def family():
    return polygon_service.enumerate_polygons(24)


@pytest.fixture(scope="session")
def congruence_pool(family):
    """Polygons of several sizes for congruence checks"""
    extra = [polygon_service.validate(PLUS_TURNS), polygon_service.validate("LLLL")]
    return list(family) + extra + polygon_service.enumerate_polygons(16)
