import warnings

import numpy as np
import pytest

from moving_picture.hilbert import Grid, SystemParams


@pytest.fixture(scope="session")
def grid():
    return Grid(-12.0, 12.0, 256)


@pytest.fixture(scope="session")
def wide_grid():
    return Grid(-25.0, 25.0, 1024)


@pytest.fixture(scope="session")
def free():
    return SystemParams.free()


@pytest.fixture(scope="session")
def osc():
    return SystemParams.harmonic()


# one non-unit triple to catch misplaced m, omega or hbar
@pytest.fixture(scope="session")
def osc_units():
    return SystemParams.harmonic(m=2.0, omega=0.5, hbar=0.7)


@pytest.fixture(scope="session")
def free_units():
    return SystemParams.free(m=2.0, hbar=0.7)


@pytest.fixture(params=["free", "harmonic"], scope="session")
def system(request):
    return SystemParams.free() if request.param == "free" else SystemParams.harmonic()


@pytest.fixture(autouse=True)
def _quiet_caustic_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*caustic.*", category=RuntimeWarning)
        yield


def assert_report(report):
    assert report.passed, f"{report.check_name}: residual {report.residual:.3e} > {report.tolerance:.1e}"
    return report


def rel(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(np.asarray(b))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
