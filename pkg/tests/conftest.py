import pytest
from hypothesis import HealthCheck, settings

from _data import make_panel

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def panel_factory():
    return make_panel
