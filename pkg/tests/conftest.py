import pytest

from prologtheta import reset_fresh_counters


@pytest.fixture(autouse=True)
def _fresh_ids():
    # make variable and unknown numbering reproducible inside each test
    reset_fresh_counters()
    yield
