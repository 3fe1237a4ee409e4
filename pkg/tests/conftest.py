import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def lemniscate_curve():
    from hyperint.poly import Poly
    from hyperint.riemann import HyperellipticCurve
    return HyperellipticCurve.from_poly(Poly([1, 0, 0, 0, -1]), 1)


# -- acceptance summary ----------------------------------------------------------
# criterion number -> {part: (ok, message)}
ACCEPTANCE: dict = {}


@pytest.fixture
def criterion():
    """``record(n, part, ok, message)`` for the acceptance summary."""
    def record(n, part, ok, message):
        ACCEPTANCE.setdefault(n, {})[part] = (bool(ok), message)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        ok = all(p[0] for p in parts.values())
        msg = "; ".join(f"{k}: {m}" for k, (_, m) in parts.items())
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {msg}")
