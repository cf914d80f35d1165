import pytest
from hypothesis import settings

from kisinlab import get_ctx

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def f3():
    return get_ctx(3)


@pytest.fixture(scope="session")
def f5():
    return get_ctx(5)


@pytest.fixture(scope="session")
def f9():
    return get_ctx(3, 2)


@pytest.fixture(scope="session")
def f25():
    return get_ctx(5, 2)
