import sys

import numpy as np
import pytest

from tdlbounds import PdpSpec

PAPER_KINDS = ("exponential", "gaussian", "uniform", "trunc_exponential")


@pytest.fixture(params=PAPER_KINDS)
def standard_pdp(request):
    return PdpSpec(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
