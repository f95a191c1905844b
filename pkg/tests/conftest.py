import numpy as np
import pytest

from linestab import Scheme, build_grid, rho_scan


@pytest.fixture(scope="session")
def small_grid():
    return build_grid(30.0, 256, Scheme.FOURIER)


@pytest.fixture(scope="session")
def std_grid():
    return build_grid(40.0, 1024, Scheme.FOURIER)


@pytest.fixture(scope="session")
def hopf_window_slices(small_grid):
    """Scan across the first collision, reused by tracking/detection tests."""
    return rho_scan(small_grid, 0.26, 0.40, 0.01)


def assert_close(a, b, rtol, msg=""):
    a, b = np.asarray(a), np.asarray(b)
    err = np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300))
    assert err <= rtol, f"{msg} rel err {err:.3e} > {rtol:.1e}"
