import numpy as np
import pytest

from indicial.pencil import PencilSpec


def lin():
    """sigma + i with m = 2: simple critical root at -i."""
    return PencilSpec.scalar([1j, 1], 2)


def sq():
    """(sigma + i)^2 with m = 2: one Jordan block of size 2."""
    return PencilSpec.scalar([-1, 2j, 1], 2)


def strip_pair(s0=0.3 - 0.5j, m=2):
    """(sigma - s0)(sigma - s0*) with s0 in the open lower half of the strip."""
    s1 = s0.conjugate() - 1j * m
    return PencilSpec.scalar([s0 * s1, -(s0 + s1), 1], m)


def nondiag():
    """q(tau) = [[0, tau], [tau, 1]] in tau = sigma + i."""
    return PencilSpec.from_tau([np.array([[0, 0], [0, 1]]), np.array([[0, 1], [1, 0]])], 2)


def nondiag2():
    """q(tau) = [[tau, 1/2], [1/2, -tau]] in tau = sigma + i."""
    return PencilSpec.from_tau([np.array([[0, 0.5], [0.5, 0]]), np.diag([1.0, -1.0])], 2)


def diag_t_t3():
    """diag(tau, tau^3) in tau = sigma + i."""
    z = np.zeros((2, 2))
    return PencilSpec.from_tau([z, np.diag([1.0, 0.0]), z, np.diag([0.0, 1.0])], 2)


WORKED = {"lin": lin, "sq": sq, "strip": strip_pair, "nd": nondiag, "nd2": nondiag2}


@pytest.fixture(params=sorted(WORKED))
def worked(request):
    return WORKED[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
