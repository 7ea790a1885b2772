import numpy as np
import pytest

import ssalib


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def co2():
    return ssalib.datasets.load("co2")


@pytest.fixture(scope="session")
def motor():
    return ssalib.datasets.load("MotorVehicle")


@pytest.fixture(scope="session")
def motor_stage2(motor):
    s1 = ssalib.new_session(motor, L=12)
    res = ssalib.reconstruct(s1, [[1]]).residual
    return ssalib.new_session(res, L=264)


def dense_trajectory(x, L):
    """Naive Hankel matrix X[i, j] = x[i + j]."""
    x = np.asarray(x, dtype=float)
    K = x.size - L + 1
    return np.array([[x[i + j] for j in range(K)] for i in range(L)])


def naive_hankelize(Y):
    L, K = Y.shape
    out = np.zeros(L + K - 1)
    cnt = np.zeros(L + K - 1)
    for i in range(L):
        for j in range(K):
            out[i + j] += Y[i, j]
            cnt[i + j] += 1
    return out / cnt


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: numbered acceptance criteria")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
