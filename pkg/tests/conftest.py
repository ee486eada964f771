import numpy as np
import pytest

from mobdiv import ScenarioConfig, build_time_grid

REFERENCE_TIMES = tuple(build_time_grid(5.0, 2.0, 10))
SIGMA0_GRID = (0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 25.0)
LAMBDA_GRID = (0.015, 0.02, 0.03, 0.045, 0.075, 0.1)


def reference_config(sigma0=5.0, lambda_s=0.03, **kw):
    """Numerical-evaluation setup; h == d as in the reference geometry (no validation)."""
    base = dict(sigma0=sigma0, sigma_sink=1.0, lambda_s=lambda_s, D=500.0, h=20.0, d=20.0,
                times=REFERENCE_TIMES, trials=20_000, seed=11)
    base.update(kw)
    return ScenarioConfig(**base)


@pytest.fixture
def reference_cfg():
    return reference_config()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
