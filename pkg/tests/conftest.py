import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck
from hypothesis import settings as hypothesis_settings

# Add project root to path
PROJECT_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PROJECT_ROOT))

from backend.app.core.config import settings
from backend.app.services import instance_service

hypothesis_settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture]
)
hypothesis_settings.register_profile(
    "slow", max_examples=10_000, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture]
)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-scale acceptance tests")


def pytest_configure(config):
    hypothesis_settings.load_profile("slow" if config.getoption("--runslow") else "default")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def check_invariants(monkeypatch):
    monkeypatch.setattr(settings, "CHECK_INVARIANTS", True)


@pytest.fixture
def locally_efable_cycle():
    return instance_service.gen_locally_efable_cycle()


@pytest.fixture
def appendix_path():
    return instance_service.gen_appendix_path("1/100")


@pytest.fixture
def threshold_clique():
    return instance_service.gen_threshold_clique(5)
