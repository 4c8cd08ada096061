import pytest

from opart.counts import build_table


@pytest.fixture(scope="session")
def table_small():
    return build_table(200)


@pytest.fixture(scope="session")
def table_5k():
    return build_table(5010)


@pytest.fixture(scope="session")
def table_probe():
    return build_table(40010)
