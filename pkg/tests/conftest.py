import functools
import os

import pytest
from hypothesis import HealthCheck, settings

from fcirepair.engine import RunConfig, run_fci
from fcirepair.fixtures import fixture

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_EXAMPLES", "60")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def cached_dag(name):
    return fixture(name)


@functools.lru_cache(maxsize=None)
def cached_run(name, cfg=RunConfig()):
    return run_fci(cached_dag(name), cfg)


@pytest.fixture(scope="session")
def network1():
    return cached_dag("network1")


@pytest.fixture(scope="session")
def network2():
    return cached_dag("network2")


@pytest.fixture(scope="session")
def original1():
    return cached_run("network1", RunConfig.original())


@pytest.fixture(scope="session")
def corrected1():
    return cached_run("network1", RunConfig.corrected())


# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
