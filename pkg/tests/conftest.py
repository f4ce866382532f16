import math

import pytest
from hypothesis import HealthCheck, settings

from spaceform_flows import Chart, ChartKind

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ALL_KINDS = (ChartKind.SPHERE_POLAR, ChartKind.HYPERBOLIC_POLAR, ChartKind.HYPERBOLIC_CARTESIAN)


@pytest.fixture(params=ALL_KINDS, ids=lambda k: k.value)
def chart(request):
    return Chart(request.param, 1.3)


def interior_point(chart, u=0.4, v=0.7):
    """A point strictly inside the chart domain, parametrised by u in (0, 1)."""
    if chart.kind is ChartKind.SPHERE_POLAR:
        return (u * math.pi / chart.a, v)
    if chart.kind is ChartKind.HYPERBOLIC_POLAR:
        return (0.1 / chart.a + 2 * u / chart.a, v)
    # keep |a s| moderate: the Minkowski form loses ~eps*|x|^2 to cancellation
    return (2 * (u - 0.5) / chart.a, (v - 3.0) / (2 * chart.a))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(k for k in results if isinstance(k, int)):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
