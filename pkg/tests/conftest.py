import hypothesis
import numpy as np
import pytest

from mrcst.synthetic import make_segments

hypothesis.settings.register_profile("ci", max_examples=60, deadline=None)
hypothesis.settings.load_profile("ci")

np.seterr(all="raise", under="ignore")

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and report.when == "call":
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))
    elif "test_acceptance" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        verdict = "PASS" if outcome == "passed" else "FAIL" if outcome == "failed" else outcome.upper()
        terminalreporter.write_line(f"{verdict:5s} {name}")


@pytest.fixture
def small_segments():
    return make_segments(n_subjects=8, n_samples=8, n_features=5, effect=1.0, seed=3)


@pytest.fixture
def tiny_segments():
    return make_segments(n_subjects=6, n_samples=6, n_features=4, effect=1.0, seed=5)
