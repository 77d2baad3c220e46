import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from krcontrol.heteroclinic import table_one_orbit
from krcontrol.torus import KickedRotorParams

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def orbit():
    return table_one_orbit()


@pytest.fixture(scope="session")
def params():
    return KickedRotorParams(8.0, 2)


def same_up_to_phase(a, b, tol):
    """``a == e^{i phi} b`` within ``tol`` (max abs), phase fitted from the data."""
    a, b = np.asarray(a), np.asarray(b)
    ov = np.vdot(b.ravel(), a.ravel())
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b))) <= tol


# one line per acceptance criterion, repeated in the terminal summary
VERDICTS: list[str] = []


def verdict(k, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
    VERDICTS.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
