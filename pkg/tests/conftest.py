import numpy as np
import pytest

from poisonbench.domain import Dataset

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_log():
    def record(criterion, title, ok, detail=""):
        _ACCEPTANCE.append((criterion, title, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, title, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {criterion}. {title}" + (f" -- {detail}" if detail else ""))


def make_dataset(n=40, seed=0, informative=None, shift=3.0):
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 4
    X = rng.normal(size=(n, 25))
    if informative is not None:
        X[:, informative] += shift * y
    return Dataset(X, y)


@pytest.fixture
def small_dataset():
    return make_dataset(80, seed=1, informative=3)
