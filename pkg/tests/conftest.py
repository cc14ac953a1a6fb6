import numpy as np
import pytest

from nlkm import KernelSpec, ModelParams, build_kernel, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture(scope="session")
def std_grid():
    return make_grid(20, 20, 150, 150)


@pytest.fixture(scope="session")
def std_params():
    return ModelParams()


@pytest.fixture(scope="session")
def std_kernel(std_grid):
    return build_kernel(std_grid, KernelSpec(1.0))


# One summary line per acceptance criterion, printed at the end of the run.
_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        _criteria[report.nodeid] = (report.outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_criteria, key=lambda s: int(s.split("test_criterion_")[1].split("_")[0])):
        outcome, detail = _criteria[nodeid]
        name = nodeid.split("::")[-1]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  {detail}")
