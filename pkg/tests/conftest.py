import math

import numpy as np
import pytest

from activecloak.fields import plane_wave
from activecloak.geometry import equilateral_layout
from activecloak.multipole_cloak import green_coefficients
from activecloak.specfun import WaveContext

LAM = 2 * math.pi
ANGLE = 5 * math.pi / 13


@pytest.fixture(scope="session")
def ctx():
    return WaveContext(1.0)


@pytest.fixture(scope="session")
def incident(ctx):
    return plane_wave(ctx, ANGLE)


@pytest.fixture(scope="session")
def layout10(ctx):
    """Equilateral devices at delta = 10 wavelengths with sigma = delta / 2."""
    delta = 10 * LAM
    layout, geo = equilateral_layout(delta, delta / 2)
    return layout, geo


@pytest.fixture(scope="session")
def green59(ctx, incident, layout10):
    return green_coefficients(incident, layout10[0], ctx, M=59)


@pytest.fixture(scope="session")
def green118(ctx, incident, layout10):
    return green_coefficients(incident, layout10[0], ctx, M=118)


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if rep.when == "call" and "criterion" in props:
                rows.append((int(props["criterion"]), outcome, props))
    if not rows:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, outcome, props in sorted(rows, key=lambda r: r[0]):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:2d}: {verdict}  {props['title']}  [{props['measured']}]"
        )
