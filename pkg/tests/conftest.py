import numpy as np
import pytest

from bregclust.data import DataMatrix, write_csv


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def iris():
    datasets = pytest.importorskip("sklearn.datasets")
    bunch = datasets.load_iris()
    return DataMatrix(bunch.data, bunch.target, name="iris",
                      columns=["sepal_length", "sepal_width", "petal_length", "petal_width"])


@pytest.fixture(scope="session")
def iris_csv(iris, tmp_path_factory):
    return write_csv(iris, tmp_path_factory.mktemp("data") / "iris.csv")


def two_blobs(seed=3, n=20, sep=6.0, sd=0.5):
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, sd, size=(n, 2))
    b = rng.normal(sep, sd, size=(n, 2))
    return DataMatrix(np.vstack([a, b]), np.repeat([0, 1], n), name="blobs")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
