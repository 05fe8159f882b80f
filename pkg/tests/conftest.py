"""Shared fixtures: the bundled converter pair and its two reference runs.

The full-length traces are session-scoped because each one integrates 1e5
steps; every module that needs them shares the same two runs.
"""

import pytest

from parbuck import (
    ControlGains,
    ConverterParams,
    bundled_scenario_text,
    parse_scenario,
    run,
)


@pytest.fixture(scope="session")
def leg1():
    return ConverterParams(L=1e-3, C=1e-5, Vin=16.0, Imax=5.0)


@pytest.fixture(scope="session")
def leg2():
    return ConverterParams(L=1e-3, C=1e-5, Vin=16.0, Imax=2.0)


@pytest.fixture(scope="session")
def gains():
    return ControlGains(k1=1.0, k2=1.0)


@pytest.fixture(scope="session")
def constant_scenario():
    return parse_scenario(bundled_scenario_text("constant_load"))


@pytest.fixture(scope="session")
def step_scenario():
    return parse_scenario(bundled_scenario_text("load_step"))


@pytest.fixture(scope="session")
def constant_trace(constant_scenario):
    return run(constant_scenario)


@pytest.fixture(scope="session")
def step_trace(step_scenario):
    return run(step_scenario)
