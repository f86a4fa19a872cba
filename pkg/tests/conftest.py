import hypothesis
import numpy as np
import pytest

from cocyclelab import sft

np.seterr(all="warn")

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=500, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def full2():
    return sft.SftSpace.full_shift(2, 0.5)


@pytest.fixture(scope="session")
def golden():
    return sft.SftSpace.golden_mean(0.5)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.lines():
            terminalreporter.write_line(line)
