import pytest

from treebed import validate_params


@pytest.fixture(scope="session")
def p5():
    return validate_params(1, 5)


@pytest.fixture(scope="session")
def p7():
    return validate_params(2, 7)
