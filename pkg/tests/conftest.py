import pytest

from g2qkd import SourceParams, build_distribution
from g2qkd.config import load_presets, resolve_source


def preset_distribution(name):
    return build_distribution(SourceParams(**resolve_source(name, load_presets())))


@pytest.fixture(scope="session")
def our_hbn():
    return preset_distribution("our-hbn")


@pytest.fixture(scope="session")
def hbn_high():
    return preset_distribution("hbn-high")


@pytest.fixture(scope="session")
def qd():
    return preset_distribution("qd")


@pytest.fixture(scope="session")
def presets():
    return {name: preset_distribution(name) for name in ("our-hbn", "hbn-high", "qd")}


_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, ok, detail)`` then assert ``ok``."""
    store = request.config.stash.setdefault(_CRITERIA, {})

    def record(number, ok, detail):
        store[number] = (bool(ok), detail)
        assert ok, f"criterion {number}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_CRITERIA, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store, key=str):
        ok, detail = store[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
