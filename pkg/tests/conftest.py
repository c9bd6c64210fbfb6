import functools

import pytest

from synth import (
    jyvaskyla_cameras,
    jyvaskyla_extract,
    ring_fixture,
    safety_detour_fixture,
    snap_fixture,
    two_route_fixture,
)

# Acceptance criteria outcomes, reported one per line after the run.
_criteria: list[tuple[str, bool, str]] = []


def criterion(name: str):
    """Record PASS/FAIL of an acceptance test for the summary block."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException as exc:
                _criteria.append((name, False, f"{type(exc).__name__}: {exc}"))
                raise
            _criteria.append((name, True, ""))
            return result

        return wrapper

    return deco


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _criteria:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}"
        if detail:
            line += f"  ({detail.splitlines()[0][:120]})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def two_route():
    return two_route_fixture()


@pytest.fixture(scope="session")
def ring_truncated():
    return ring_fixture("truncated")


@pytest.fixture(scope="session")
def ring_no_route():
    return ring_fixture("no_route")


@pytest.fixture(scope="session")
def ring_boundary():
    return ring_fixture("boundary")


@pytest.fixture(scope="session")
def snap_probe():
    return snap_fixture()


@pytest.fixture(scope="session")
def safety_detour():
    return safety_detour_fixture()


@pytest.fixture(scope="session")
def jyv_osm():
    return jyvaskyla_extract()


@pytest.fixture(scope="session")
def jyv_cams():
    return jyvaskyla_cameras()
