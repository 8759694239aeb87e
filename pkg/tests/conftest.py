import numpy as np
import pytest


def psi_matrix(indices, n):
    """Explicit m x n sampling matrix: row i has a 1 in column indices[i]."""
    psi = np.zeros((len(indices), n))
    psi[np.arange(len(indices)), indices] = 1.0
    return psi


def sample_proj_by_matrices(X, y, indices, pi):
    """X^+ Psi^T D^2 Psi y with every operator formed explicitly.

    D is the m x m rescaling with D_ii = 1/sqrt(m pi_{indices[i]}); X^+ comes
    from the normal equations.
    """
    n = X.shape[0]
    m = len(indices)
    psi = psi_matrix(indices, n)
    d2 = np.diag(1.0 / (m * np.asarray(pi)[indices]))
    xdag = np.linalg.solve(X.T @ X, X.T)
    return xdag @ psi.T @ d2 @ psi @ y


def sample_proj_squared_counts(X, y, indices, pi):
    """X^+ Psi^T Psi D^2 Psi^T Psi y with an n x n D; repeats enter squared."""
    n = X.shape[0]
    m = len(indices)
    psi = psi_matrix(indices, n)
    d2 = np.diag(1.0 / (m * np.asarray(pi)))
    xdag = np.linalg.solve(X.T @ X, X.T)
    return xdag @ psi.T @ psi @ d2 @ psi.T @ psi @ y


@pytest.fixture
def gen():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
