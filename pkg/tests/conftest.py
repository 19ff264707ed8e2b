import numpy as np
import pytest

from nwwfit import nww

#: The four simulation scenarios used across the suite.
SCENARIOS = [
    (1.3, 2.0, 1.5, 1.8),
    (3.0, 1.5, 2.8, 2.5),
    (2.0, 2.2, 6.5, 4.1),
    (1.4, 1.6, 4.8, 5.1),
]

#: Station-1 estimate values used for synthetic-data fixtures.
ST1_PARAMS = (1.09455, 2.44439, 1.24356, 2.23302)


@pytest.fixture(scope="session")
def nww_ref():
    """Reference model used by most evaluation tests."""
    return nww(1.3, 2.0, 1.5, 1.8)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
