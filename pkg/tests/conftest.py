import numpy as np
import pytest


def orthonormal_design(rng, N, d, corr=None):
    """Centered columns with x_j'x_j = N exactly; optional exact correlation matrix."""
    Z = rng.normal(size=(N, d))
    Z -= Z.mean(axis=0)
    L = np.linalg.cholesky(Z.T @ Z / N)
    Z = Z @ np.linalg.inv(L).T
    if corr is not None:
        Z = Z @ np.linalg.cholesky(np.asarray(corr, float)).T
    return Z


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
