import numpy as np
import pytest

from cqed_stirap.experiments import ProtocolConfig, run_protocol


@pytest.fixture(scope="session")
def stirap():
    return run_protocol(ProtocolConfig.reference(cd=False))


@pytest.fixture(scope="session")
def sastirap():
    return run_protocol(ProtocolConfig.reference(cd=True))


@pytest.fixture(scope="session")
def stirap_no_decay():
    return run_protocol(ProtocolConfig.reference(cd=False, decay_override=True))


@pytest.fixture(scope="session")
def sastirap_no_decay():
    return run_protocol(ProtocolConfig.reference(cd=True, decay_override=True))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (a + a.conj().T)


def random_density(rng, n=3, rank=None):
    rank = n if rank is None else rank
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
