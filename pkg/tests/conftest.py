import numpy as np
import pytest

from cohmeter.serialize import preset


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def mixed_3_1():
    return preset("mixed-3-1")


@pytest.fixture
def appendix_partial():
    return preset("appendix-partial")


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULT_LINES:
            terminalreporter.write_line(line)
