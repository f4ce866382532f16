"""Governing linear ODEs for parallel laminar profiles and the quadratic-profile
defect functions.

Coefficient functions are written once as ``f(t, m)`` where ``m`` is either
:mod:`numpy` or :mod:`spaceform_flows.series`, so the same definition yields
point values and Taylor expansions.  Systems are stored in raw form
``c_n Y^(n) + ... + c_0 Y = 0``; normalisation by the leading coefficient is
left to the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import series
from .calculus import FlowParameters
from .geometry import Chart, ChartKind

Coefficient = Callable[[object, object], object]


@dataclass(frozen=True)
class OdeSystem:
    order: int
    coeffs: tuple  # c_order, ..., c_0
    domain: tuple
    singular_points: tuple
    # distance from t to the nearest complex singularity of the normalised coefficients
    radius: Callable[[float], float] = field(compare=False)
    label: str = ""

    def coefficients(self, t) -> np.ndarray:
        """Raw coefficient values ``[c_order(t), ..., c_0(t)]``."""
        if np.ndim(t) == 0:
            # scalar fast path; math is several times quicker than numpy on floats
            try:
                return np.array([float(c(float(t), math)) for c in self.coeffs])
            except (ZeroDivisionError, OverflowError):
                pass
        shape = np.shape(t)
        return np.array([np.broadcast_to(np.asarray(c(t, np), dtype=float), shape) for c in self.coeffs])

    def normalized(self, t) -> np.ndarray:
        """``[1, c_{n-1}/c_n, ..., c_0/c_n]`` at ``t``."""
        c = self.coefficients(t)
        return c / c[0]

    def taylor(self, t0: float, n: int) -> list:
        """Series of the normalised lower coefficients ``c_k / c_order`` about ``t0``,
        ordered ``k = order-1, ..., 0``."""
        t = series.variable(t0, n)
        lead = self.coeffs[0](t, series)
        inv = lead.reciprocal() if isinstance(lead, series.Series) else 1.0 / lead
        out = []
        for c in self.coeffs[1:]:
            v = c(t, series)
            if not isinstance(v, series.Series):
                v = series.constant(float(v), n)
            out.append(v * inv)
        return out

    def apply(self, t, derivs) -> float:
        """Raw residual ``sum_k c_k(t) Y^(k)(t)``; ``derivs = (Y, Y', ..., Y^(order))``."""
        c = self.coefficients(t)
        return float(sum(c[self.order - k] * derivs[k] for k in range(self.order + 1)))

    def scale(self, t, derivs) -> float:
        """Local coefficient scale against which residuals are judged:
        ``sum_k |c_k Y^(k)|`` plus the floor ``|c_n| max_{k<n} |Y^(k)|``.

        The floor keeps the scale meaningful where every lower coefficient
        vanishes at once (the sphere's equator), in the way an absolute
        tolerance complements a relative one.
        """
        c = self.coefficients(t)
        n = self.order
        terms = sum(abs(c[n - k] * derivs[k]) for k in range(n + 1))
        floor = abs(c[0]) * max(abs(derivs[k]) for k in range(n))
        return float(terms + floor)

    def contains(self, t: float) -> bool:
        lo, hi = self.domain
        return lo < t < hi


@dataclass(frozen=True)
class DefectFunction:
    """Closed-form vorticity defect of the quadratic profile, divided by nu."""

    label: str
    fn: Callable = field(compare=False)

    def __call__(self, t):
        return self.fn(t, np)

    def series(self, t0: float, n: int) -> series.Series:
        return self.fn(series.variable(t0, n), series)


def _const(value):
    return lambda t, m: value


def build_ode(chart: Chart) -> OdeSystem:
    """The third-order equation ``L[Y] = 0`` whose solutions are exactly the
    profiles admitting a pressure."""
    a = chart.a
    if chart.kind is ChartKind.SPHERE_POLAR:
        coeffs = (
            lambda t, m: m.sin(a * t) / a,
            lambda t, m: 2 * m.cos(a * t),
            lambda t, m: a * (m.sin(a * t) - 1 / m.sin(a * t)),
            lambda t, m: a * a * m.cos(a * t) * (2 + 1 / m.sin(a * t) ** 2),
        )
        end = math.pi / a
        return OdeSystem(
            3, coeffs, (0.0, end), (0.0, end), lambda t: min(abs(t), abs(end - t)), "sphere"
        )
    if chart.kind is ChartKind.HYPERBOLIC_POLAR:
        coeffs = (
            lambda t, m: m.sinh(a * t) / a,
            lambda t, m: 2 * m.cosh(a * t),
            lambda t, m: -a * (m.sinh(a * t) + 1 / m.sinh(a * t)),
            lambda t, m: a * a * m.cosh(a * t) * (1 / m.sinh(a * t) ** 2 - 2),
        )
        return OdeSystem(3, coeffs, (0.0, math.inf), (0.0,), lambda t: abs(t), "hyperbolic-polar")
    coeffs = (
        lambda t, m: m.cosh(a * t),
        lambda t, m: 2 * a * m.sinh(a * t),
        lambda t, m: -a * a * m.sinh(a * t) ** 2 / m.cosh(a * t),
        lambda t, m: -(a**3) * m.sinh(a * t) * (2 + 1 / m.cosh(a * t) ** 2),
    )
    # 1/cosh has poles at i(pi/2 + k pi)/a
    half = math.pi / (2 * a)
    return OdeSystem(
        3, coeffs, (-math.inf, math.inf), (), lambda t: math.hypot(t, half), "hyperbolic-edge"
    )


def build_case3_ode(a: float) -> OdeSystem:
    """Second-order equation ``y'' + Q1 y' + Q2 y = 0`` on ``(pi/2a, pi/a)`` that
    a quadratic profile would have to satisfy if its sphere defect vanished."""
    if not a > 0:
        raise ValueError(f"a must be positive, got {a!r}")
    coeffs = (
        _const(1.0),
        lambda t, m: a / (2 * m.cos(a * t)) * (m.sin(a * t) - 1 / m.sin(a * t)),
        lambda t, m: a * a / 2 * (2 + 1 / m.sin(a * t) ** 2),
    )
    lo, hi = math.pi / (2 * a), math.pi / a
    return OdeSystem(
        2, coeffs, (lo, hi), (lo, hi), lambda t: min(abs(t - lo), abs(hi - t)), "sphere-case3"
    )


def flat_limit_ode() -> OdeSystem:
    """``r Y''' + 2 Y'' - Y'/r + Y/r^2 = 0``: the common ``a -> 0`` limit of both
    polar-chart equations."""
    coeffs = (
        lambda t, m: t,
        _const(2.0),
        lambda t, m: -1 / t,
        lambda t, m: 1 / t**2,
    )
    return OdeSystem(3, coeffs, (0.0, math.inf), (0.0,), lambda t: abs(t), "flat")


def quadratic_defect(chart: Chart, params: FlowParameters) -> DefectFunction:
    """``L[h]`` for the quadratic ``h(l) = alpha0 + alpha1 l - alpha2 l^2/2``.

    With ``alpha0 = 0`` these are the sphere function ``F``, the hyperbolic-disc
    function ``G`` and the edge function ``F(tau)`` term by term; ``alpha0``
    enters only through the zeroth-order coefficient.
    """
    a = chart.a
    a0, a1, a2 = params.alpha0, params.alpha1, params.alpha2
    if chart.kind is ChartKind.SPHERE_POLAR:
        d = params.delta

        def sphere_f(t, m):
            lam = t - d
            s, c = m.sin(a * t), m.cos(a * t)
            tail = c * (2 + 1 / s**2)
            return (
                -2 * a2 * c
                + a * (a1 - a2 * lam) * (s - 1 / s)
                + a * a * lam * (a1 - a2 * lam / 2) * tail
                + a * a * a0 * tail
            )

        return DefectFunction("SphereF", sphere_f)

    if chart.kind is ChartKind.HYPERBOLIC_POLAR:
        d = params.delta

        def hyperbolic_g(t, m):
            lam = t - d
            s, c = m.sinh(a * t), m.cosh(a * t)
            tail = c * (1 / s**2 - 2)
            return (
                -2 * a2 * c
                - a * (s + 1 / s) * (a1 - a2 * lam)
                + a * a * tail * (a1 * lam - a2 * lam * lam / 2)
                + a * a * a0 * tail
            )

        return DefectFunction("HyperbolicG", hyperbolic_g)

    def edge_f(t, m):
        sh, ch = m.sinh(a * t), m.cosh(a * t)
        h = a0 + a1 * t - a2 * t * t / 2
        dh = a1 - a2 * t
        return 2 * a * sh * (-a2) - a * a * sh * sh / ch * dh - a**3 * sh * (2 + 1 / ch**2) * h

    return DefectFunction("EdgeF", edge_f)
