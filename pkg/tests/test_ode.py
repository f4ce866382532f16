import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spaceform_flows import (
    Chart,
    ChartKind,
    FlowParameters,
    QuadraticProfile,
    build_case3_ode,
    build_ode,
    flat_limit_ode,
    quadratic_defect,
    vorticity_defect,
)

from conftest import ALL_KINDS

SPHERE = Chart(ChartKind.SPHERE_POLAR, 1.0)
EDGE = Chart(ChartKind.HYPERBOLIC_CARTESIAN, 1.0)


def test_sphere_equator_coefficients():
    np.testing.assert_allclose(build_ode(SPHERE).coefficients(math.pi / 2), [1, 0, 0, 0], atol=1e-15)


def test_edge_axis_coefficients():
    np.testing.assert_array_equal(build_ode(EDGE).coefficients(0.0), [1.0, 0.0, 0.0, 0.0])


@pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.value)
def test_leading_coefficient_positive(kind):
    chart = Chart(kind, 0.7)
    system = build_ode(chart)
    lo, hi = system.domain
    lo = max(lo, -5.0)
    hi = min(hi, 5.0)
    ts = np.linspace(lo, hi, 203)[1:-1]
    assert np.all(system.coefficients(ts)[0] > 0)


def test_scalar_and_array_coefficients_agree():
    system = build_ode(Chart(ChartKind.HYPERBOLIC_POLAR, 1.4))
    ts = np.array([0.3, 1.1, 2.5])
    arr = system.coefficients(ts)
    for i, t in enumerate(ts):
        np.testing.assert_allclose(system.coefficients(float(t)), arr[:, i], rtol=1e-15)


def test_case3_coefficients():
    system = build_case3_ode(1.0)
    _, q1, q2 = system.coefficients(3 * math.pi / 4)
    assert q1 == pytest.approx(0.5, rel=1e-14)
    assert q2 == pytest.approx(2.0, rel=1e-14)
    ts = np.linspace(math.pi / 2, math.pi, 101)[1:-1]
    assert np.all(system.coefficients(ts)[2] > 0)


def test_sphere_defect_golden_values():
    p = FlowParameters(delta=math.pi / 4)
    assert quadratic_defect(SPHERE, p)(math.pi / 4) == pytest.approx(-3 * math.sqrt(2) / 2, rel=1e-15)
    a, d = 1.7, 0.4
    p = FlowParameters(delta=d, alpha1=0.8, alpha2=2.1)
    expected = -2 * 2.1 * math.cos(a * d) - a * 0.8 * (1 / math.sin(a * d) - math.sin(a * d))
    assert quadratic_defect(Chart(ChartKind.SPHERE_POLAR, a), p)(d) == pytest.approx(expected, rel=1e-14)


def test_hyperbolic_g_golden_value():
    d = math.log(1 + math.sqrt(2))  # sinh(d) = 1
    g = quadratic_defect(Chart(ChartKind.HYPERBOLIC_POLAR, 1.0), FlowParameters(delta=d))
    assert g(d) == pytest.approx(-2 * math.sqrt(2) - 2, rel=1e-14)


def _random_params(kind, a, u, a0, a1, a2):
    if kind is ChartKind.SPHERE_POLAR:
        return FlowParameters(delta=u * math.pi / a, alpha0=a0, alpha1=a1, alpha2=a2)
    if kind is ChartKind.HYPERBOLIC_POLAR:
        return FlowParameters(delta=(0.05 + 2 * u) / a, alpha0=a0, alpha1=a1, alpha2=a2)
    return FlowParameters(delta=0.0, alpha0=a0, alpha1=a1, alpha2=a2)


def _sample_points(chart, params, count=100):
    if chart.kind is ChartKind.SPHERE_POLAR:
        return np.linspace(0.02, 0.98, count) * math.pi / chart.a
    if chart.kind is ChartKind.HYPERBOLIC_POLAR:
        return np.linspace(0.05, 3.0, count) / chart.a
    return np.linspace(-2.0, 2.0, count) / chart.a


@given(
    st.sampled_from(ALL_KINDS),
    st.floats(0.3, 3.0),
    st.floats(0.05, 0.95),
    st.floats(-2, 2),
    st.floats(0.01, 5),
    st.floats(0.01, 5),
)
def test_defect_matches_operator_and_ode(kind, a, u, a0, a1, a2):
    chart = Chart(kind, a)
    params = _random_params(kind, a, u, a0, a1, a2)
    f = quadratic_defect(chart, params)
    quad = QuadraticProfile.from_params(params)
    system = build_ode(chart)
    for t in _sample_points(chart, params):
        derivs = quad(t)
        ref = f(t)
        scale = 1e-12 * max(1.0, system.scale(t, derivs))
        assert abs(vorticity_defect(chart, params, quad, (t, 0.3)) - ref) <= scale
        assert abs(system.apply(t, derivs) - ref) <= scale


def test_defect_series_matches_values():
    p = FlowParameters(delta=0.6, alpha0=0.2, alpha1=1.1, alpha2=0.7)
    f = quadratic_defect(SPHERE, p)
    s = f.series(1.2, 4)
    h = 1e-3
    fd = (-f(1.2 + 2 * h) + 8 * f(1.2 + h) - 8 * f(1.2 - h) + f(1.2 - 2 * h)) / (12 * h)
    assert s.c[0] == pytest.approx(f(1.2), rel=1e-14)
    assert s.c[1] == pytest.approx(fd, rel=1e-9)


@pytest.mark.parametrize("kind", [ChartKind.SPHERE_POLAR, ChartKind.HYPERBOLIC_POLAR], ids=lambda k: k.value)
def test_small_curvature_matches_flat(kind):
    flat = flat_limit_ode().coefficients(1.0)
    curved = build_ode(Chart(kind, 1e-4)).coefficients(1.0)
    np.testing.assert_allclose(curved, flat, rtol=1e-7)


def test_edge_small_curvature_degenerates_to_third_derivative():
    c = build_ode(Chart(ChartKind.HYPERBOLIC_CARTESIAN, 1e-5)).coefficients(0.7)
    np.testing.assert_allclose(c, [1, 0, 0, 0], atol=1e-9)


def test_flat_defect_vanishes_for_edge_quadratic():
    for a in (1e-2, 1e-3, 1e-4):
        f = quadratic_defect(Chart(ChartKind.HYPERBOLIC_CARTESIAN, a), FlowParameters(alpha1=1.0, alpha2=1.0))
        assert abs(f(0.8)) < 10 * a * a
