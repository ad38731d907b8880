import os
import time

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record():
    """Log one acceptance line and return whether it passed."""
    def _record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        _CRITERIA[number] = line
        print(line)
        return ok
    return _record


@pytest.fixture(scope="session")
def demo_missions():
    """The bundled demo mission under both controllers, with and without payload."""
    from quadarm.config import bundled_scenarios, load_config
    from quadarm.sim import run_scenario

    base = load_config(bundled_scenarios()["demo"])
    runs = {}
    for controller in ("pid", "mrac"):
        for payload in (True, False):
            t0 = time.perf_counter()
            log = run_scenario(base.with_overrides(controller, payload))
            runs[controller, payload] = (log, time.perf_counter() - t0)
    return runs


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[n])
