import pytest

from eulerstab import build_grid


@pytest.fixture(scope="session")
def grid32():
    return build_grid("rectangle", n=32)


@pytest.fixture(scope="session")
def grid64():
    return build_grid("rectangle", n=64)


@pytest.fixture(scope="session")
def grid128():
    return build_grid("rectangle", n=128)


@pytest.fixture(scope="session")
def disk64():
    return build_grid("disk", n=64, radius=0.5)
