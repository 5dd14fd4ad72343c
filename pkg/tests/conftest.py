import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tomoprob.phasespace import suggest_grid, wigner_from_rho
from tomoprob.statekit import StateSpec, build_state
from tomoprob.tomography import optical_tomogram

settings.register_profile("default", max_examples=50, deadline=None)
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


_CACHE: dict = {}


def pipeline(spec: StateSpec):
    """``(rho, wigner, tomogram)`` on suggested grids, cached per spec."""
    key = repr(spec)
    if key not in _CACHE:
        rho = build_state(spec)
        w = wigner_from_rho(rho, suggest_grid(rho))
        _CACHE[key] = (rho, w, optical_tomogram(w))
    return _CACHE[key]


@pytest.fixture
def vacuum():
    return pipeline(StateSpec.fock(0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
