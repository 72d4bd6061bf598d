import pytest

from mao.model import ModelParams
from mao.verify import Context


@pytest.fixture(scope="session")
def verify_context():
    return Context()


@pytest.fixture
def small():
    return ModelParams.equal(100, 20, 5)


@pytest.fixture
def unequal():
    return ModelParams(100, (5, 20, 40, 70, 30))


@pytest.fixture
def tiny():
    return ModelParams(4, (2, 2))
