import numpy as np
import pytest

from pseudosense import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the numba kernels once up front.

    Keeps JIT compilation time out of individual tests, in particular
    out of the budgeted acceptance timings.
    """
    try:
        _kernels.set_backend("numba")
    except ImportError:
        yield
        return
    x = np.arange(6.0).reshape(2, 3)
    _kernels.soft_threshold_values(x, 0.5)
    _kernels.threshold_split(x, 0.5)
    _kernels.rms(x)
    _kernels.column_cosines(x, np.ones(2))
    yield


@pytest.fixture(params=["numpy", "numba"])
def backend(request):
    """Run a test under both kernel backends; numba skipped if missing."""
    previous = _kernels.active_backend()
    try:
        _kernels.set_backend(request.param)
    except ImportError:
        pytest.skip("numba not installed")
    yield request.param
    _kernels.set_backend(previous)
