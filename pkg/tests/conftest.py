import pytest

from asylum.bundled import bundled_example, numbered_contracts
from asylum.models import Instance


class Labels:
    """x1, x2, ... of an instance, plus frozenset construction from names."""

    def __init__(self, inst: Instance):
        self.by_name = numbered_contracts(inst)

    def __getitem__(self, name):
        return self.by_name[name]

    def set(self, *names):
        return frozenset(self.by_name[n] for n in names)


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    from asylum.config import get_settings

    for name in ("ASYLUM_MAX_UNIVERSE", "ASYLUM_MAX_ORACLE_UNIVERSE", "ASYLUM_MAX_ALLOCATIONS", "ASYLUM_MAX_PROFILES",
                 "ASYLUM_MISREPORT_MAX_LENGTH", "ASYLUM_ORDER_POLICY", "ASYLUM_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def example1():
    return bundled_example("example1")


@pytest.fixture
def example3():
    return bundled_example("example3")


@pytest.fixture
def example4():
    return bundled_example("example4")


@pytest.fixture
def example5():
    return bundled_example("example5")


@pytest.fixture
def example6():
    return bundled_example("example6")


@pytest.fixture
def labels():
    return Labels
