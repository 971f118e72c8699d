import numpy as np
import pytest

from greedylab import c0, dsum, kt, lp


ALL_SPACES = {
    "lp0.5": lp(0.5),
    "lp1": lp(1.0),
    "lp2": lp(2.0),
    "kt": kt(),
    "c0": c0(),
    "dsum": dsum(lp(2.0), c0()),
    "dsum_kt": dsum(kt(), c0()),
}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.LINES):
            terminalreporter.write_line(line)
