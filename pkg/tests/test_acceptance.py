"""Acceptance gate: one test per criterion, each printing a pass/fail line.

The lines are collected in ``RESULTS`` and printed in pytest's terminal
summary (see ``conftest.py``); running this file directly prints them too.
"""

import math
import time

import numpy as np
import pytest

from spaceform_flows import (
    CaseLabel,
    Chart,
    ChartKind,
    FlowParameters,
    QuadraticProfile,
    RegionSpec,
    Verdict,
    certify_nonexistence,
    convection_oneform,
    flat_limit_consistency,
    hodge_laplacian_oneform,
    quadratic_defect,
    reconstruct_pressure,
    solve_flow,
    stokes_discrepancy,
)
from spaceform_flows import oracle
from spaceform_flows.solver import eval as sol_eval

RESULTS = {}

SEED = 20240611


def record(number, ok, detail):
    RESULTS[number] = (bool(ok), detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def log_uniform(rng, lo, hi):
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


# --- 1 ----------------------------------------------------------------------------


def test_criterion_01_case_one_golden():
    cert = certify_nonexistence(Chart(ChartKind.SPHERE_POLAR, 1.0), FlowParameters(delta=math.pi / 4))
    golden = -2 * math.cos(math.pi / 4) - (1 / math.sin(math.pi / 4) - math.sin(math.pi / 4))
    diff = abs(cert.witness["value"] - golden)
    ok = cert.case_label is CaseLabel.SPHERE_CASE1 and diff <= 1e-12 and golden == pytest.approx(-3 * math.sqrt(2) / 2)
    record(1, ok, f"Case-One witness {cert.witness['value']!r}, |diff| = {diff:.1e} (tol 1e-12)")


# --- 2 ----------------------------------------------------------------------------


def _weighted_defect_derivative_fd(a, alpha1, alpha2):
    """4th-order central difference of sin^2(ar) F(r) at pi/(2a)."""
    half = math.pi / (2 * a)
    chart = Chart(ChartKind.SPHERE_POLAR, a)
    f = quadratic_defect(chart, FlowParameters(delta=half, alpha1=alpha1, alpha2=alpha2))

    def g(r):
        return math.sin(a * r) ** 2 * float(f(r))

    h = 2e-3 / a
    return (-g(half + 2 * h) + 8 * g(half + h) - 8 * g(half - h) + g(half - 2 * h)) / (12 * h)


def test_criterion_02_case_two_witness():
    rng = np.random.default_rng(SEED + 2)
    worst_fd = worst_cert = 0.0
    for _ in range(20):
        a, a2 = log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.1, 10.0)
        a1 = log_uniform(rng, 0.1, 10.0)
        target = 2 * a * a2
        fd = _weighted_defect_derivative_fd(a, a1, a2)
        cert = certify_nonexistence(Chart(ChartKind.SPHERE_POLAR, a), FlowParameters(delta=math.pi / (2 * a), alpha1=a1, alpha2=a2))
        worst_fd = max(worst_fd, abs(fd - target))
        worst_cert = max(worst_cert, abs(cert.witness["value"] - target))
    ok = worst_fd <= 1e-8 and worst_cert <= 1e-8
    record(2, ok, f"max |FD - 2a alpha2| = {worst_fd:.1e}, max |certificate - 2a alpha2| = {worst_cert:.1e} (tol 1e-8, 20 draws)")


# --- 3 ----------------------------------------------------------------------------


def test_criterion_03_case_three_b_limit():
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    ratios = []
    for _ in range(10):
        a, a2 = log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.1, 10.0)
        d = (0.5 + 0.5 * rng.uniform(0.05, 0.95)) * math.pi / a
        params = FlowParameters(delta=d, alpha1=a2 / 2 * (math.pi / a - d), alpha2=a2)
        cert = certify_nonexistence(Chart(ChartKind.SPHERE_POLAR, a), params)
        assert cert.case_label is CaseLabel.SPHERE_CASE3B
        ratios.append(cert.witness["value"] / a2)
        worst = max(worst, abs(cert.witness["value"] / (1.5 * a2) - 1))
    ok = worst <= 1e-3
    record(
        3,
        ok,
        f"extrapolated limit / alpha2 in [{min(ratios):.6f}, {max(ratios):.6f}]; "
        f"max rel. deviation from 3 alpha2/2 = {worst:.3e} (tol 1e-3). "
        "The bracket tends to 3 alpha2/4; see the decisions ledger",
    )


def test_criterion_03_companion_actual_limit():
    """The extrapolated bracket limit is 3 alpha2/4 and nonzero, so the
    non-existence conclusion for the critical subcase still holds."""
    rng = np.random.default_rng(SEED + 3)
    for _ in range(10):
        a, a2 = log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.1, 10.0)
        d = (0.5 + 0.5 * rng.uniform(0.05, 0.95)) * math.pi / a
        params = FlowParameters(delta=d, alpha1=a2 / 2 * (math.pi / a - d), alpha2=a2)
        cert = certify_nonexistence(Chart(ChartKind.SPHERE_POLAR, a), params)
        np.testing.assert_allclose(cert.witness["value"], 0.75 * a2, rtol=1e-6)
        assert cert.verdict is Verdict.NON_EXISTENCE


# --- 4 ----------------------------------------------------------------------------


def test_criterion_04_edge_witness():
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for _ in range(20):
        a, a2 = log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.1, 10.0)
        a1 = log_uniform(rng, 0.1, 10.0)
        cert = certify_nonexistence(Chart(ChartKind.HYPERBOLIC_CARTESIAN, a), FlowParameters(alpha1=a1, alpha2=a2))
        worst = max(worst, abs(cert.witness["value"] + 2 * a * a * a2))
    record(4, worst <= 1e-10, f"max |F'(0) + 2a^2 alpha2| = {worst:.1e} (tol 1e-10, 20 draws)")


# --- 5 and 6 ------------------------------------------------------------------------

EXISTENCE_RUNS = {}


def _existence_draws(kind, rng):
    a = log_uniform(rng, 0.3, 3.0)
    a0, a1, a2 = rng.uniform(-1, 1), rng.uniform(-2, 2), rng.uniform(-2, 2)
    if kind is ChartKind.SPHERE_POLAR:
        delta = rng.uniform(0.05, 0.9) * math.pi / a
    elif kind is ChartKind.HYPERBOLIC_POLAR:
        delta = log_uniform(rng, 0.05, 2.0) / a
    else:
        delta = 0.0
    nu = log_uniform(rng, 0.1, 10.0)
    return Chart(kind, a), FlowParameters(nu=nu, delta=delta, alpha0=a0, alpha1=a1, alpha2=a2)


def _existence_runs(kind):
    if kind not in EXISTENCE_RUNS:
        rng = np.random.default_rng(SEED + 50 + KINDS.index(kind))
        runs = []
        for _ in range(20):
            chart, params = _existence_draws(kind, rng)
            region = RegionSpec(params.delta, theta_extent=1.0)
            sol, rep = solve_flow(chart, params, region)
            runs.append((chart, params, region, sol, rep, rng.uniform(0.5, 5.0)))
        EXISTENCE_RUNS[kind] = runs
    return EXISTENCE_RUNS[kind]


KINDS = [ChartKind.SPHERE_POLAR, ChartKind.HYPERBOLIC_POLAR, ChartKind.HYPERBOLIC_CARTESIAN]


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.value)
def test_criterion_05_existence_pipeline(kind):
    start = time.perf_counter()
    exact = True
    worst_rel = 0.0
    bitwise = True
    for chart, params, region, sol, rep, other in _existence_runs(kind):
        t0 = params.delta
        exact &= sol_eval(sol, t0)[:3] == (params.alpha0, params.alpha1, -params.alpha2)
        worst_rel = max(worst_rel, rep.max_abs_defect / rep.coefficient_scale if rep.coefficient_scale else 0.0)
        # beta enters only on the sphere; elsewhere the viscosity plays the same role
        if kind is ChartKind.SPHERE_POLAR:
            changed = FlowParameters(params.nu, other, params.delta, params.alpha0, params.alpha1, params.alpha2)
        else:
            changed = FlowParameters(other, 0.0, params.delta, params.alpha0, params.alpha1, params.alpha2)
        sol2, _ = solve_flow(chart, changed, region)
        ts = np.linspace(*sol.domain, 101)
        bitwise &= all(sol(t) == sol2(t) for t in ts)
    ok = exact and worst_rel <= 1e-8 and bitwise
    RESULTS.setdefault("5-parts", {})[kind.value] = ok
    parts = RESULTS["5-parts"]
    detail = (
        f"{kind.value}: eval(delta) exact={exact}, max defect / coefficient scale = {worst_rel:.1e} (tol 1e-8), "
        f"bitwise {'beta' if kind is ChartKind.SPHERE_POLAR else 'nu'}-independent={bitwise}, "
        f"{time.perf_counter() - start:.1f}s"
    )
    if len(parts) == len(KINDS):
        record(5, all(parts.values()), "all three charts, 20 draws each; last: " + detail)
    else:
        print(f"criterion 5 ({kind.value}): {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail


def test_criterion_06_cross_solver():
    worst = 0.0
    for kind in KINDS:
        for *_, rep, _other in _existence_runs(kind):
            worst = max(worst, rep.cross_solver_error)
    record(6, worst <= 1e-8, f"max RK vs Taylor difference in (Y, Y', Y'') over 60 runs = {worst:.1e} (tol 1e-8, relative to max(1, |Y^(k)|))")


# --- 7 ------------------------------------------------------------------------------


def _test_profile(r):
    e = math.exp(0.3 * r)
    c, s = math.cos(r), math.sin(r)
    return e * c, e * (0.3 * c - s), e * (-0.91 * c - 0.6 * s), e * (-0.873 * c + 0.73 * s)


def test_criterion_07_operator_oracle():
    hs = [0.04, 0.02, 0.01]
    orders, div_max = [], 0.0
    for kind in KINDS:
        chart = Chart(kind, 1.3)
        p = (0.6, 0.4) if kind is not ChartKind.HYPERBOLIC_CARTESIAN else (0.3, 0.4)
        metric = oracle.chart_metric_fn(chart)
        vec, cov = oracle.parallel_flow_fields(metric, _test_profile)
        lap = np.array(hodge_laplacian_oneform(chart, _test_profile, p))
        conv = np.array(convection_oneform(chart, _test_profile, p))
        lap_err = [np.abs(oracle.hodge_laplacian(metric, cov, p, h) - lap).max() for h in hs]
        conv_err = [np.abs(oracle.covariant_self_derivative(metric, vec, p, h) - conv).max() for h in hs]
        orders += list(oracle.convergence_orders(lap_err)) + list(oracle.convergence_orders(conv_err))
        # the closed-form divergence is exactly 0; so is its discretisation, up to rounding
        div_max = max(div_max, max(abs(oracle.codifferential(metric, cov, p, h)) for h in hs))
    ok = min(orders) >= 1.9 and div_max <= 1e-10
    record(
        7,
        ok,
        f"min observed order (Laplacian, convection, 3 charts) = {min(orders):.3f} (>= 1.9); "
        f"FD divergence max |value| = {div_max:.1e} at every h (error identically zero, order undefined)",
    )


# --- 8 ------------------------------------------------------------------------------


def test_criterion_08_pressure_dichotomy():
    worst_closure = 0.0
    for kind in KINDS:
        for chart, params, region, sol, rep, _ in _existence_runs(kind)[:5]:
            worst_closure = max(worst_closure, rep.pressure_closure_error)
    # with rotation, both conventions
    chart = Chart(ChartKind.SPHERE_POLAR, 1.0)
    params = FlowParameters(beta=3.0, delta=math.pi / 4, alpha0=0.2)
    region = RegionSpec(params.delta, theta_extent=1.5)
    sol, _ = solve_flow(chart, params, region)
    for conv in ("paper", "hodge"):
        res = reconstruct_pressure(chart, params, sol, region, [(1.0, 0.2), (2.0, 0.2), (2.0, 1.3), (1.2, 0.7)], conv)
        worst_closure = max(worst_closure, res.closure_error)

    rng = np.random.default_rng(SEED + 8)
    worst_margin, worst_stokes = math.inf, 0.0
    for _ in range(10):
        a = log_uniform(rng, 0.3, 3.0)
        chart = Chart(ChartKind.SPHERE_POLAR, a)
        d = rng.uniform(0.05, 0.8) * math.pi / (2 * a)
        params = FlowParameters(nu=log_uniform(rng, 0.1, 10), delta=d, alpha1=log_uniform(rng, 0.1, 10), alpha2=log_uniform(rng, 0.1, 10))
        r0, r1 = d + 0.1 / a, d + 0.4 / a
        th0, th1 = 0.2, 1.0
        res = reconstruct_pressure(chart, params, QuadraticProfile.from_params(params), RegionSpec(d, 1.5), [(r0, th0), (r1, th0), (r1, th1)])
        predicted, _ = stokes_discrepancy(chart, params, (r0, r1), (th0, th1))
        worst_margin = min(worst_margin, res.closure_error / max(res.quadrature_error, 1e-300))
        worst_stokes = max(worst_stokes, abs(res.closure_error - abs(predicted)) / abs(predicted))
    ok = worst_closure <= 1e-6 and worst_margin >= 10 and worst_stokes <= 1e-6
    record(
        8,
        ok,
        f"ODE closure max = {worst_closure:.1e} (tol 1e-6); quadratic Case One: min closure / quadrature error = "
        f"{worst_margin:.1e} (>= 10), max rel. mismatch with the Stokes integral = {worst_stokes:.1e} (tol 1e-6)",
    )


# --- 9 ------------------------------------------------------------------------------


def test_criterion_09_flat_limit():
    rep = flat_limit_consistency([1e-1, 1e-2, 1e-3, 1e-4])
    ok = abs(rep.sphere_slope - 2) <= 0.1 and abs(rep.hyperbolic_slope - 2) <= 0.1
    record(9, ok, f"log-log slopes: sphere {rep.sphere_slope:.4f}, hyperbolic {rep.hyperbolic_slope:.4f} (2 +/- 0.1)")


# --- 10 -----------------------------------------------------------------------------


def _sweep_draw(setting, rng):
    a = log_uniform(rng, 0.2, 5.0)
    a1, a2 = log_uniform(rng, 0.01, 100.0), log_uniform(rng, 0.01, 100.0)
    if setting == "SphereCase1":
        return Chart(ChartKind.SPHERE_POLAR, a), FlowParameters(delta=rng.uniform(0.001, 0.999) * math.pi / (2 * a), alpha1=a1, alpha2=a2)
    if setting == "SphereCase2":
        return Chart(ChartKind.SPHERE_POLAR, a), FlowParameters(delta=math.pi / (2 * a), alpha1=a1, alpha2=a2)
    if setting == "SphereCase3":
        d = (0.5 + 0.5 * rng.uniform(0.002, 0.998)) * math.pi / a
        if rng.uniform() < 0.1:  # include the critical subcase
            a1 = a2 / 2 * (math.pi / a - d)
        return Chart(ChartKind.SPHERE_POLAR, a), FlowParameters(delta=d, alpha1=a1, alpha2=a2)
    if setting == "HyperbolicDisc":
        return Chart(ChartKind.HYPERBOLIC_POLAR, a), FlowParameters(delta=log_uniform(rng, 0.01, 5.0) / a, alpha1=a1, alpha2=a2)
    return Chart(ChartKind.HYPERBOLIC_CARTESIAN, a), FlowParameters(alpha1=a1, alpha2=a2)


def test_criterion_10_nonexistence_sweep():
    rng = np.random.default_rng(SEED + 10)
    counts = {}
    for setting in ("SphereCase1", "SphereCase2", "SphereCase3", "HyperbolicDisc", "HyperbolicEdge"):
        good = 0
        for _ in range(1000):
            chart, params = _sweep_draw(setting, rng)
            good += certify_nonexistence(chart, params).verdict is Verdict.NON_EXISTENCE
        counts[setting] = good
    ok = all(v == 1000 for v in counts.values())
    record(10, ok, "NonExistence counts per 1000 draws: " + ", ".join(f"{k} {v}" for k, v in counts.items()))


if __name__ == "__main__":  # pragma: no cover
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
