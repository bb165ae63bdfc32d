"""Shared hosts, built once per session (construction is deterministic)."""

import pytest

from polyforge.polygons import build_hexagon, build_pg2, build_w3


@pytest.fixture(scope="session")
def fano():
    return build_pg2(2)


@pytest.fixture(scope="session")
def pg23():
    return build_pg2(3)


@pytest.fixture(scope="session")
def pg24():
    return build_pg2(4)


@pytest.fixture(scope="session")
def w32():
    return build_w3(2)


@pytest.fixture(scope="session")
def w33():
    return build_w3(3)


@pytest.fixture(scope="session")
def w34():
    return build_w3(4)


@pytest.fixture(scope="session")
def hex2():
    return build_hexagon(2)


@pytest.fixture(scope="session")
def hex3():
    return build_hexagon(3)
