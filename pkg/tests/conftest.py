import numpy as np
import pytest

from fhdfrc.core import RadarConfig, build_codebook


@pytest.fixture(scope="session")
def small_config():
    return RadarConfig(M=4, K=5, Q=1)


@pytest.fixture(scope="session")
def small_codebook(small_config):
    return build_codebook(small_config)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CRITERIA] = []


@pytest.fixture
def criterion(request):
    """``criterion(n, ok, detail)`` logs one acceptance line and asserts ``ok``."""
    def record(n: int, ok: bool, detail: str):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        request.config.stash[_CRITERIA].append(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
