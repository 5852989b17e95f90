import pytest

from tests.helpers import run


@pytest.fixture(scope="session")
def k2_run():
    """K2 from t = 0 to 10 with U"""
    return run("complete:2", 10.0)


@pytest.fixture(scope="session")
def k2_beta_run():
    return run("complete:2", 5.0, beta=1.0)


@pytest.fixture(scope="session")
def k3_run():
    return run("complete:3", 5.0)


@pytest.fixture(scope="session")
def c4_run():
    return run("cycle:4", 5.0)


@pytest.fixture(scope="session")
def star_run():
    return run("star:3", 5.0)


@pytest.fixture(scope="session")
def random_run():
    """Seeded G(8, 0.5) on [0, 5]"""
    return run("random:8:0.5", 5.0)


@pytest.fixture(scope="session")
def k3_beta_run():
    return run("complete:3", 5.0, beta=1.0)


@pytest.fixture(scope="session")
def c4_beta_run():
    return run("cycle:4", 5.0, beta=1.0)


@pytest.fixture(scope="session")
def star_beta_run():
    return run("star:3", 5.0, beta=1.0)


@pytest.fixture(scope="session")
def random_beta_run():
    return run("random:8:0.5", 5.0, beta=1.0)
