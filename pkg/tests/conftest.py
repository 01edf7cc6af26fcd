import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from stpg.plan import Delay, DelayScenario, MapfPlan, apply_delays, build_tpg, to_stpg

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# two agents sharing G; agent 0 reaches it first in the plan
DEMO_PATHS = [list("AGH"), list("EFFGCD")]


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def demo_plan():
    return MapfPlan([list(p) for p in DEMO_PATHS])


@pytest.fixture
def demo_tpg(demo_plan):
    return build_tpg(demo_plan)


@pytest.fixture
def demo_stpg(demo_tpg):
    return to_stpg(apply_delays(demo_tpg, DelayScenario([Delay(0, 0, 2)])))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
