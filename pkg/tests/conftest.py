import pytest
from hypothesis import settings

from painleve_hh import set_default_precision

settings.register_profile("fast", max_examples=30, deadline=None)
settings.load_profile("fast")


@pytest.fixture(autouse=True)
def _fixed_precision():
    previous = set_default_precision(256)
    yield
    set_default_precision(previous)
