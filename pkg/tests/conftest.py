import pytest

from qtorus.numerics import make_context


@pytest.fixture(scope="session")
def ctx():
    return make_context(256)


@pytest.fixture(scope="session")
def ctx512():
    return make_context(512)
