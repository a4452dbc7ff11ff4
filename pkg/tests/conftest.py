import numpy as np
import pytest

from prolatoscope import build_basis, make_double_gaussian, project_coeffs

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def basis18():
    return build_basis(1.0, 18)


@pytest.fixture(scope="session")
def basis31():
    return build_basis(1.0, 31)


@pytest.fixture(scope="session")
def basis40():
    return build_basis(1.0, 40)


@pytest.fixture(scope="session")
def default_object():
    return make_double_gaussian(1.0, 0.5, 0.1)


@pytest.fixture(scope="session")
def default_coeffs(default_object, basis18):
    return project_coeffs(default_object, basis18)


def composite_rule(a, b, panels, per_panel=30):
    """Composite Gauss-Legendre rule, used by the full-line oracles."""
    x0, w0 = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (half[:, None] * x0[None, :] + mid[:, None]).ravel()
    w = (half[:, None] * w0[None, :]).ravel()
    return x, w


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
