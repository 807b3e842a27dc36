import numpy as np
import pytest

from qmeans_tabu.dataset import Dataset, builtin

ACCEPTANCE = []


@pytest.fixture
def record_criterion():
    def record(name, passed, detail=""):
        ACCEPTANCE.append((name, bool(passed), detail))
        assert passed, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@pytest.fixture(scope="session")
def iris():
    return builtin("iris")


@pytest.fixture(scope="session")
def glass():
    return builtin("glass")


def line(*values):
    """1-D dataset from scalars."""
    return Dataset(np.array(values, dtype=float).reshape(-1, 1))
