import pytest

from odolab.utils import env


@pytest.fixture(autouse=True)
def restore_level_cap():
    """The level cap is process-wide; CLI runs may change it."""
    cap = env.get_level_cap()
    yield
    env.set_level_cap(cap)
