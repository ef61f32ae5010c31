import pytest

from goldbach_ap.arith import sieve_mangoldt
from goldbach_ap.zeros import ZeroCatalog


@pytest.fixture(scope="session")
def table():
    """Lambda up to 10^6: enough for X <= 10^6 and damped sums with N <= 24000."""
    return sieve_mangoldt(10**6)


@pytest.fixture(scope="session")
def small_table():
    return sieve_mangoldt(10**4)


@pytest.fixture(scope="session")
def zero_cache(tmp_path_factory):
    return tmp_path_factory.mktemp("zeros")


@pytest.fixture(scope="session")
def catalog_1000(zero_cache):
    return ZeroCatalog(1000, cache_dir=zero_cache)


@pytest.fixture(scope="session")
def catalog_2000(zero_cache):
    return ZeroCatalog(2000, cache_dir=zero_cache)


@pytest.fixture(scope="session")
def catalog_500(zero_cache):
    return ZeroCatalog(500, cache_dir=zero_cache)
