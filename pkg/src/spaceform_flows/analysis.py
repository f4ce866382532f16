"""Theorem-level pipelines: non-existence certificates for Poiseuille profiles,
existence solves, pressure reconstruction and flat-limit checks."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import series
from .calculus import FlowParameters, QuadraticProfile, momentum_oneform
from .errors import DomainError, PreconditionError
from .geometry import Chart, ChartKind, ChartPoint
from .ode import build_case3_ode, build_ode, flat_limit_ode, quadratic_defect
from .solver import InitialData, ProfileSolution, solve_rk, solve_taylor

EPS = np.finfo(float).eps
MARGIN = 10.0

# fraction of pi/a kept clear of the antipodal singularity when integrating
STOP_FRACTION = 1e-3
# integration length used for unbounded regions, in units of 1/a
DEFAULT_HORIZON = 4.0


class CaseLabel(str, enum.Enum):
    SPHERE_CASE1 = "SphereCase1"
    SPHERE_CASE2 = "SphereCase2"
    SPHERE_CASE3A = "SphereCase3a"
    SPHERE_CASE3B = "SphereCase3b"
    HYPERBOLIC_DISC = "HyperbolicDisc"
    HYPERBOLIC_EDGE = "HyperbolicEdge"


class Verdict(str, enum.Enum):
    NON_EXISTENCE = "NonExistence"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RegionSpec:
    """Sector ``delta < c1 < delta + epsilon0``, ``0 < c2 < theta_extent``.

    On the hyperbolic-edge chart the region is the strip ``0 < tau < epsilon0``
    and ``theta_extent`` bounds ``s`` only for sampling purposes.
    """

    delta: float
    theta_extent: float = math.pi / 2
    epsilon0: float = math.inf

    def validate(self, chart: Chart) -> "RegionSpec":
        if not 0 < self.theta_extent < 2 * math.pi:
            raise DomainError(f"sector angle must lie in (0, 2pi), got {self.theta_extent!r}", "theta_extent")
        if not self.epsilon0 > 0:
            raise DomainError(f"radial thickness must be positive, got {self.epsilon0!r}", "epsilon0")
        if chart.is_sphere and math.isfinite(self.epsilon0) and self.delta + self.epsilon0 >= math.pi / chart.a:
            raise DomainError("delta + epsilon0 must stay below pi/a on the sphere", "epsilon0")
        return self

    def c1_range(self, chart: Chart) -> tuple:
        lo = 0.0 if chart.kind is ChartKind.HYPERBOLIC_CARTESIAN else self.delta
        if math.isfinite(self.epsilon0):
            return lo, lo + self.epsilon0
        if chart.is_sphere:
            return lo, math.pi / chart.a
        return lo, math.inf

    def contains(self, chart: Chart, p) -> bool:
        c1, c2 = p
        lo, hi = self.c1_range(chart)
        if not lo < c1 < hi:
            return False
        if chart.kind is ChartKind.HYPERBOLIC_CARTESIAN:
            return True
        return 0 < c2 < self.theta_extent


@dataclass
class Certificate:
    chart: Chart
    case_label: CaseLabel
    witness: dict
    verdict: Verdict
    error_estimate: float
    params: FlowParameters | None = None

    def to_dict(self) -> dict:
        return {
            "chart": self.chart.kind.value,
            "a": self.chart.a,
            "params": None if self.params is None else _params_dict(self.params),
            "case_label": self.case_label.value,
            "witness": self.witness,
            "verdict": self.verdict.value,
            "error_estimate": self.error_estimate,
        }


def _params_dict(p: FlowParameters) -> dict:
    return {
        "nu": p.nu,
        "beta": p.beta,
        "delta": p.delta,
        "alpha0": p.alpha0,
        "alpha1": p.alpha1,
        "alpha2": p.alpha2,
    }


@dataclass
class ResidualReport:
    grid: np.ndarray
    defect: np.ndarray
    max_abs_defect: float
    pressure_closure_error: float
    scale: np.ndarray = field(default_factory=lambda: np.zeros(0))
    cross_solver_error: float = 0.0

    @property
    def coefficient_scale(self) -> float:
        """Largest local coefficient scale over the grid."""
        return float(self.scale.max()) if len(self.scale) else 0.0

    @property
    def max_relative_defect(self) -> float:
        """``max |defect| / scale`` pointwise, with the local scale of
        :meth:`OdeSystem.scale` times ``nu``."""
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(self.scale > 0, np.abs(self.defect) / self.scale, np.abs(self.defect))
        return float(rel.max()) if len(rel) else 0.0


# --- non-existence certificates ----------------------------------------------------


def _verdict(value: float, err: float) -> Verdict:
    return Verdict.NON_EXISTENCE if abs(value) > MARGIN * err else Verdict.INCONCLUSIVE


def _sphere_case(chart: Chart, delta: float) -> str:
    half = math.pi / (2 * chart.a)
    if abs(delta - half) <= 1e-12 * half:
        return "two"
    return "one" if delta < half else "three"


def certify_nonexistence(chart: Chart, params: FlowParameters, *, extension_check: bool = False) -> Certificate:
    """Decide, with a numerically guarded witness, that the quadratic profile of
    ``params`` admits no pressure on any sector next to the inner boundary."""
    if not (params.alpha1 > 0 and params.alpha2 > 0):
        raise PreconditionError(
            f"certificates need alpha1 > 0 and alpha2 > 0, got {params.alpha1!r}, {params.alpha2!r}"
        )
    params.validate(chart)
    if chart.kind is ChartKind.HYPERBOLIC_CARTESIAN:
        return _certify_edge(chart, params)
    if chart.kind is ChartKind.HYPERBOLIC_POLAR:
        return _certify_disc(chart, params)
    case = _sphere_case(chart, params.delta)
    if case == "one":
        return _certify_case1(chart, params)
    if case == "two":
        return _certify_case2(chart, params)
    return _certify_case3(chart, params, extension_check)


def _certify_case1(chart, params):
    a, d = chart.a, params.delta
    s, c = math.sin(a * d), math.cos(a * d)
    value = float(quadratic_defect(chart, params)(d))
    scale = 2 * params.alpha2 + a * params.alpha1 * (s + 1 / s) + a * a * abs(params.alpha0) * (2 + 1 / s**2)
    err = 16 * EPS * scale * (1 + a * d)
    witness = {"name": "F(delta)", "value": value, "location": d, "sign": int(np.sign(value))}
    return Certificate(chart, CaseLabel.SPHERE_CASE1, witness, _verdict(value, err), err, params)


def _certify_case2(chart, params):
    a = chart.a
    half = math.pi / (2 * a)
    f = quadratic_defect(chart, FlowParameters(params.nu, params.beta, half, params.alpha0, params.alpha1, params.alpha2))
    t = series.variable(half, 2)
    weighted = series.sin(a * t) ** 2 * f.fn(t, series)
    value = float(weighted.c[1])
    scale = a * (2 * params.alpha2 + 4 * a * params.alpha1 + 6 * a * a * abs(params.alpha0)) + abs(value)
    err = 64 * EPS * scale * (1 + a * half)
    witness = {
        "name": "d/dr[sin^2(ar) F](pi/2a)",
        "value": value,
        "location": half,
        "defect_at_delta": float(weighted.c[0]),
        "sign": int(np.sign(value)),
    }
    return Certificate(chart, CaseLabel.SPHERE_CASE2, witness, _verdict(value, err), err, params)


def _case3_bracket(chart: Chart, params: FlowParameters, x):
    """``(Y'' + Q1 Y' + Q2 Y)`` of the quadratic at ``r = pi/a - x``, with the
    magnitudes of its three terms."""
    a = chart.a
    r = math.pi / a - x
    y, dy, d2y, _ = QuadraticProfile.from_params(params)(r)
    s, c = math.sin(a * x), -math.cos(a * x)  # sin(ar), cos(ar) at r = pi/a - x
    q1 = a / (2 * c) * (s - 1 / s)
    q2 = a * a / 2 * (2 + 1 / s**2)
    terms = (d2y, q1 * dy, q2 * y)
    return sum(terms), sum(abs(t) for t in terms), s, c


def _approach_schedule(a: float, k_first: int = 6, k_last: int = 12) -> np.ndarray:
    return 2.0 ** -np.arange(k_first, k_last + 1) / a


def richardson_limit(values, ratio: float = 2.0):
    """Limit at ``x -> 0`` of samples at ``x_k = x_0 / ratio^k``, assuming an
    expansion in integer powers of ``x``.  Returns ``(limit, error_estimate)``."""
    table = [np.asarray(values, dtype=float)]
    p = 1
    while len(table[-1]) > 1:
        prev = table[-1]
        f = ratio**p
        table.append((f * prev[1:] - prev[:-1]) / (f - 1))
        p += 1
    diag = [row[-1] for row in table]
    err = abs(diag[-1] - diag[-2]) if len(diag) > 1 else math.inf
    return float(diag[-1]), float(err)


def _certify_case3(chart, params, extension_check):
    a, d = chart.a, params.delta
    end = math.pi / a
    quad = QuadraticProfile.from_params(params)
    y_end = quad(end)[0]
    # Y(pi/a) = 0 is the critical subcase alpha1 = (alpha2/2)(pi/a - delta) when alpha0 = 0
    y_scale = abs(params.alpha0) + params.alpha1 * (end - d) + params.alpha2 * (end - d) ** 2
    extra = _extension_deviation(chart, params) if extension_check else {}
    if abs(y_end) > 1e-12 * y_scale:
        return _certify_case3a(chart, params, y_end, extra)
    return _certify_case3b(chart, params, extra)


def _certify_case3a(chart, params, y_end, extra):
    a = chart.a
    samples, errs, xs = [], [], []
    k = 6
    growth = 0.0
    while k <= 40:
        x = 2.0**-k / a
        bracket, mag, s, _ = _case3_bracket(chart, params, x)
        samples.append(s * bracket)
        # rounding in r near pi/a perturbs sin(ar) with relative size eps*pi/(a x)
        errs.append(16 * EPS * s * mag * (1 + math.pi / (a * x)))
        xs.append(x)
        growth = abs(samples[-1]) / abs(samples[0]) if samples[0] else math.inf
        if k >= 12 and growth >= 10 and _monotone(samples[-4:]):
            break
        k += 1
    value, err = samples[-1], errs[-1]
    ok = growth >= 10 and _monotone(samples[-4:]) and abs(value) > MARGIN * err
    witness = {
        "name": "sin(ar)[Y''+Q1 Y'+Q2 Y] as r->pi/a",
        "value": float(value),
        "location": float(math.pi / a - xs[-1]),
        "growth_factor": float(growth),
        "samples": [float(v) for v in samples],
        "blowup_coefficient": float(a * a / 2 * y_end),
        **extra,
    }
    return Certificate(
        chart, CaseLabel.SPHERE_CASE3A, witness, Verdict.NON_EXISTENCE if ok else Verdict.INCONCLUSIVE, float(err), params
    )


def _monotone(vals) -> bool:
    m = np.abs(np.asarray(vals))
    return bool(np.all(np.diff(m) > 0))


def _certify_case3b(chart, params, extra):
    a = chart.a
    xs = _approach_schedule(a)
    vals, rounding = [], 0.0
    for x in xs:
        bracket, mag, s, c = _case3_bracket(chart, params, x)
        vals.append(c * bracket)
        rounding = max(rounding, 16 * EPS * abs(c) * mag * (1 + math.pi / (a * x)))
    limit, rich_err = richardson_limit(vals)
    err = rich_err + 2**len(xs) * rounding
    witness = {
        "name": "lim cos(ar)[Y''+Q1 Y'+Q2 Y] as r->pi/a",
        "value": limit,
        "location": math.pi / a,
        "samples": [float(v) for v in vals],
        **extra,
    }
    return Certificate(chart, CaseLabel.SPHERE_CASE3B, witness, _verdict(limit, err), float(err), params)


def _extension_deviation(chart, params) -> dict:
    """Continue the quadratic's data at delta through ``y'' + Q1 y' + Q2 y = 0``
    and measure how far the continuation is from the quadratic."""
    a = chart.a
    system = build_case3_ode(a)
    t_end = math.pi / a - STOP_FRACTION * math.pi / a
    if params.delta >= t_end:
        return {}
    sol = solve_taylor(system, InitialData(params.delta, (params.alpha0, params.alpha1)), t_end)
    ts = np.linspace(params.delta, t_end, 200)
    z = np.array([sol(t)[0] for t in ts])
    quad = QuadraticProfile.from_params(params)(ts)[0]
    fit = np.polynomial.polynomial.Polynomial.fit(ts, z, 2)
    return {
        "extension_max_deviation": float(np.max(np.abs(z - quad))),
        "extension_quadratic_fit_residual": float(np.max(np.abs(fit(ts) - z))),
    }


def _certify_disc(chart, params):
    a, d = chart.a, params.delta
    value = float(quadratic_defect(chart, params)(d))
    s, c = math.sinh(a * d), math.cosh(a * d)
    scale = 2 * params.alpha2 * c + a * params.alpha1 * (s + 1 / s) + a * a * abs(params.alpha0) * c * (1 / s**2 + 2)
    err = 16 * EPS * scale * (1 + a * d)
    witness = {"name": "G(delta)", "value": value, "location": d, "sign": int(np.sign(value))}
    return Certificate(chart, CaseLabel.HYPERBOLIC_DISC, witness, _verdict(value, err), err, params)


def _certify_edge(chart, params):
    a = chart.a
    f = quadratic_defect(chart, params).series(0.0, 2)
    value = float(f.c[1])
    err = 16 * EPS * (2 * a * a * params.alpha2 + 3 * a**4 * abs(params.alpha0) + a**3 * params.alpha1)
    witness = {"name": "F'(0)", "value": value, "location": 0.0, "F(0)": float(f.c[0]), "sign": int(np.sign(value))}
    return Certificate(chart, CaseLabel.HYPERBOLIC_EDGE, witness, _verdict(value, err), float(err), params)


# --- existence pipeline ------------------------------------------------------------


def solve_interval(chart: Chart, params: FlowParameters, region: RegionSpec) -> tuple:
    """``(t0, t_end)`` on which the profile ODE is integrated."""
    a = chart.a
    t0 = 0.0 if chart.kind is ChartKind.HYPERBOLIC_CARTESIAN else params.delta
    lo, hi = region.c1_range(chart)
    if chart.is_sphere:
        hi = min(hi, math.pi / a - STOP_FRACTION / a)
    elif not math.isfinite(hi):
        hi = t0 + DEFAULT_HORIZON / a
    return t0, hi


def solve_flow(
    chart: Chart,
    params: FlowParameters,
    region: RegionSpec,
    tol: float = 1e-10,
    *,
    grid_size: int = 401,
    taylor_order: int = 30,
) -> tuple:
    """Solve the profile ODE from ``(alpha0, alpha1, -alpha2)`` at the inner
    boundary with both solvers; return the Taylor solution and its report.

    Neither ``beta`` nor ``nu`` enters the ODE, so the profile is the same for
    every rotation rate.
    """
    params.validate(chart)
    region.validate(chart)
    system = build_ode(chart)
    t0, t_end = solve_interval(chart, params, region)
    init = InitialData(t0, (params.alpha0, params.alpha1, -params.alpha2))
    sol = solve_taylor(system, init, t_end, order=taylor_order)
    rk = solve_rk(system, init, t_end, tol)
    grid = np.union1d(np.linspace(t0, t_end, grid_size), sol.mesh)
    defect = np.empty(len(grid))
    scale = np.empty(len(grid))
    cross = 0.0
    for i, t in enumerate(grid):
        derivs = sol(t)
        defect[i] = params.nu * system.apply(t, derivs)
        scale[i] = params.nu * system.scale(t, derivs)
        other = rk(t)
        cross = max(cross, max(abs(u - v) / max(1.0, abs(v)) for u, v in zip(other[:3], derivs[:3])))
    closure = _sector_closure(chart, params, sol, region, t0, t_end)
    report = ResidualReport(grid, defect, float(np.max(np.abs(defect))), closure, scale, float(cross))
    return sol, report


def _sector_closure(chart, params, sol, region, t0, t_end) -> float:
    span = t_end - t0
    c1a, c1b = t0 + 0.1 * span, t0 + 0.9 * span
    c2a, c2b = 0.1 * region.theta_extent, 0.9 * region.theta_extent
    path = [ChartPoint(c1a, c2a), ChartPoint(c1b, c2a), ChartPoint(c1b, c2b)]
    return reconstruct_pressure(chart, params, sol, region, path).closure_error


# --- pressure ------------------------------------------------------------------------


@dataclass
class PressureResult:
    points: list
    values: np.ndarray  # P at each path vertex, P(path[0]) = 0
    closure_error: float
    quadrature_error: float
    alpha_norm: float


def _segment_integral(chart, params, prof, p, q, convention):
    """``int alpha`` along the straight chart segment from p to q, with error."""
    d1, d2 = q[0] - p[0], q[1] - p[1]
    if d1 == 0 and d2 == 0:
        return 0.0, 0.0
    if d1 == 0:
        # alpha depends on c1 only: exact along a c2-line
        return momentum_oneform(chart, params, prof, p, convention).B * d2, 0.0

    def integrand(t):
        pt = (p[0] + t * d1, p[1] + t * d2)
        derivs = prof(pt[0])  # evaluate once; every operator needs the same values
        al = momentum_oneform(chart, params, lambda _c: derivs, pt, convention)
        return al.A * d1 + al.B * d2

    breaks = None
    if isinstance(prof, ProfileSolution):
        inner = [(m - p[0]) / d1 for m in prof.mesh]
        breaks = [b for b in inner if 0 < b < 1] or None
    val, err = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200, points=breaks)
    return val, err


def _route_value(chart, params, prof, points, convention):
    total, err = 0.0, 0.0
    for p, q in zip(points[:-1], points[1:]):
        v, e = _segment_integral(chart, params, prof, p, q, convention)
        total += v
        err += e
    return -total, err


def reconstruct_pressure(
    chart: Chart,
    params: FlowParameters,
    prof,
    region: RegionSpec,
    path,
    convention: str = "paper",
) -> PressureResult:
    """Integrate ``dP = -alpha`` along ``path``; ``alpha`` is the momentum 1-form.

    The closure error is the largest disagreement, at each vertex ``v`` of the
    path, between the path itself, the route "first c1 then c2" and the route
    "first c2 then c1" from ``path[0]`` to ``v``.  It vanishes up to quadrature
    error exactly when ``alpha`` is closed on the rectangle they enclose.
    """
    path = [ChartPoint(*p) for p in path]
    if len(path) < 2:
        raise ValueError("a path needs at least two points")
    for p in path:
        if not region.contains(chart, p):
            raise DomainError(f"path point {tuple(p)} lies outside the region", "path")
    values = [0.0]
    qerr = 0.0
    for p, q in zip(path[:-1], path[1:]):
        v, e = _segment_integral(chart, params, prof, p, q, convention)
        values.append(values[-1] - v)
        qerr += e
    start = path[0]
    closure = 0.0
    for k, v in enumerate(path[1:], start=1):
        r1, e1 = _route_value(chart, params, prof, [start, ChartPoint(v.c1, start.c2), v], convention)
        r2, e2 = _route_value(chart, params, prof, [start, ChartPoint(start.c1, v.c2), v], convention)
        qerr = max(qerr, e1 + e2)
        closure = max(closure, abs(r1 - r2), abs(r1 - values[k]))
    alpha_norm = max(
        float(np.hypot(*momentum_oneform(chart, params, prof, p, convention))) for p in path
    )
    return PressureResult(path, np.array(values), float(closure), float(qerr), alpha_norm)


def stokes_discrepancy(chart: Chart, params: FlowParameters, c1_range, c2_range) -> tuple:
    """Predicted ``P(c1-first route) - P(c2-first route)`` for the quadratic
    profile: ``-nu * (c2b - c2a) * int F dc1`` by Stokes' theorem."""
    f = quadratic_defect(chart, params)
    val, err = integrate.quad(lambda t: float(f(t)), *c1_range, epsabs=1e-14, epsrel=1e-13)
    width = c2_range[1] - c2_range[0]
    return -params.nu * width * val, params.nu * width * err


# --- flat limit ------------------------------------------------------------------------


@dataclass
class FlatLimitReport:
    a_values: np.ndarray
    sphere_deviation: np.ndarray
    hyperbolic_deviation: np.ndarray
    sphere_slope: float
    hyperbolic_slope: float
    sphere_vs_hyperbolic: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(max(self.sphere_deviation.max(), self.hyperbolic_deviation.max()))


def _coefficient_deviation(sys_a, sys_b, rs) -> float:
    """Largest coefficientwise relative deviation over ``rs``."""
    ca = np.array([sys_a.coefficients(r) for r in rs])
    cb = np.array([sys_b.coefficients(r) for r in rs])
    return float(np.max(np.abs(ca - cb) / np.maximum(1.0, np.abs(cb))))


def flat_limit_consistency(a_values, r_window=(0.5, 1.5), samples: int = 21) -> FlatLimitReport:
    """Coefficient deviation of both polar-chart equations from the flat
    equation as ``a -> 0``; the log-log slope should be 2."""
    a_values = np.asarray(a_values, dtype=float)
    if np.any(a_values <= 0) or np.any(np.diff(a_values) >= 0):
        raise ValueError("a_values must be positive and strictly decreasing")
    rs = np.linspace(*r_window, samples)
    flat = flat_limit_ode()
    sph, hyp, cross = [], [], []
    for a in a_values:
        s = build_ode(Chart(ChartKind.SPHERE_POLAR, a))
        h = build_ode(Chart(ChartKind.HYPERBOLIC_POLAR, a))
        sph.append(_coefficient_deviation(s, flat, rs))
        hyp.append(_coefficient_deviation(h, flat, rs))
        cross.append(_coefficient_deviation(s, h, rs))
    sph, hyp = np.array(sph), np.array(hyp)
    la = np.log(a_values)
    return FlatLimitReport(
        a_values,
        sph,
        hyp,
        float(np.polyfit(la, np.log(sph), 1)[0]),
        float(np.polyfit(la, np.log(hyp), 1)[0]),
        np.array(cross),
    )
