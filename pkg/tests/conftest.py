import numpy as np
import pytest

from hubbard_ring.basis import SectorSpec, enumerate_sector
from hubbard_ring.scenarios import Simulator


@pytest.fixture(scope="session")
def ring_basis():
    return enumerate_sector(SectorSpec(8, 2, 1))


@pytest.fixture(scope="session")
def sim():
    return Simulator()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.REPORT:
        terminalreporter.write_line(line)
