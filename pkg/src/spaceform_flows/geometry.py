"""Concrete models of the round sphere S^2(a^2) and the hyperbolic plane H^2(-a^2).

The sphere is the Euclidean sphere of radius ``1/a`` in R^3 with the base
point ``O = (0, 0, 1/a)``.  The hyperbolic plane is the upper sheet of the
hyperboloid ``<x, x> = -1/a^2`` in Minkowski space with the form
``<x, y> = -x0 y0 + x1 y1 + x2 y2`` and base point ``O = (1/a, 0, 0)``.

Three charts are supported:

* ``SPHERE_POLAR``: geodesic polar coordinates ``(r, theta)`` about ``O``.
* ``HYPERBOLIC_POLAR``: geodesic polar coordinates ``(r, theta)`` about ``O``.
* ``HYPERBOLIC_CARTESIAN``: ``Phi(tau, s)``, the point at signed distance
  ``tau`` along the geodesic normal to the axis geodesic ``gamma`` at
  ``gamma(s)``.

In all three charts the metric is ``diag(1, w(c1)^2)``; ``w`` is exposed as
:meth:`Chart.weight`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, SingularChartError

OVERFLOW_GUARD = 700.0


class ChartKind(enum.Enum):
    SPHERE_POLAR = "sphere"
    HYPERBOLIC_POLAR = "hyperbolic-polar"
    HYPERBOLIC_CARTESIAN = "hyperbolic-edge"


class ChartPoint(NamedTuple):
    """Chart coordinates: ``(r, theta)`` for polar charts, ``(tau, s)`` otherwise."""

    c1: float
    c2: float


class FramePair(NamedTuple):
    """Orthonormal frame at a point, in ambient coordinates."""

    e1: np.ndarray
    e2: np.ndarray


@dataclass(frozen=True)
class Chart:
    kind: ChartKind
    a: float = 1.0

    def __post_init__(self):
        if not isinstance(self.kind, ChartKind):
            object.__setattr__(self, "kind", ChartKind(self.kind))
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"curvature scale a must be positive, got {self.a!r}", "a")

    @property
    def is_sphere(self) -> bool:
        return self.kind is ChartKind.SPHERE_POLAR

    @property
    def is_polar(self) -> bool:
        return self.kind is not ChartKind.HYPERBOLIC_CARTESIAN

    @property
    def curvature(self) -> float:
        """Sectional curvature: ``+a^2`` on the sphere, ``-a^2`` otherwise."""
        return self.a**2 if self.is_sphere else -self.a**2

    @property
    def domain(self) -> tuple[float, float]:
        """Open interval of admissible first coordinates."""
        if self.kind is ChartKind.SPHERE_POLAR:
            return (0.0, math.pi / self.a)
        if self.kind is ChartKind.HYPERBOLIC_POLAR:
            return (0.0, math.inf)
        return (-math.inf, math.inf)

    def weight(self, c1):
        """Length of the second coordinate vector field, ``|d/dc2|``."""
        a = self.a
        if self.kind is ChartKind.SPHERE_POLAR:
            return np.sin(a * c1) / a
        if self.kind is ChartKind.HYPERBOLIC_POLAR:
            return np.sinh(a * c1) / a
        return np.cosh(a * c1)

    def weight_derivative(self, c1):
        a = self.a
        if self.kind is ChartKind.SPHERE_POLAR:
            return np.cos(a * c1)
        if self.kind is ChartKind.HYPERBOLIC_POLAR:
            return np.cosh(a * c1)
        return a * np.sinh(a * c1)

    def inner(self, x, y) -> float:
        """Ambient bilinear form: Euclidean for the sphere, Minkowski otherwise."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.is_sphere:
            return float(x @ y)
        return float(-x[0] * y[0] + x[1] * y[1] + x[2] * y[2])

    def check(self, p: ChartPoint, *, allow_origin: bool = False) -> None:
        """Raise if ``p`` is outside the chart (or at a polar origin)."""
        c1, c2 = p
        if not (math.isfinite(c1) and math.isfinite(c2)):
            raise DomainError(f"non-finite chart coordinates {tuple(p)!r}", "c1")
        lo, hi = self.domain
        if self.is_polar:
            if c1 < 0 or c1 >= hi:
                raise DomainError(
                    f"radial coordinate r={c1!r} outside [0, {hi!r}) for {self.kind.value}", "r"
                )
            if c1 == 0 and not allow_origin:
                raise SingularChartError(f"polar chart {self.kind.value} is singular at r=0")
        if self.kind is ChartKind.HYPERBOLIC_CARTESIAN:
            _guard(self.a * c1, "tau")
            _guard(self.a * c2, "s")
        elif self.kind is ChartKind.HYPERBOLIC_POLAR:
            _guard(self.a * c1, "r")


def _guard(value: float, name: str) -> None:
    if abs(value) > OVERFLOW_GUARD:
        raise OverflowError(f"|a*{name}| = {abs(value):.6g} exceeds {OVERFLOW_GUARD}")


def exp_map(chart: Chart, direction_angle: float, distance: float) -> np.ndarray:
    """Point reached from ``O`` by the unit-speed geodesic with initial angle
    ``direction_angle`` after arclength ``distance``."""
    if chart.kind is ChartKind.HYPERBOLIC_CARTESIAN:
        raise DomainError("exp_map needs a polar chart", "kind")
    if not distance >= 0:
        raise DomainError(f"distance must be >= 0, got {distance!r}", "distance")
    chart.check(ChartPoint(distance, direction_angle), allow_origin=True)
    a, t, lam = chart.a, distance, direction_angle
    if chart.is_sphere:
        s = math.sin(a * t)
        return np.array([s * math.cos(lam), s * math.sin(lam), math.cos(a * t)]) / a
    sh = math.sinh(a * t)
    return np.array([math.cosh(a * t), sh * math.cos(lam), sh * math.sin(lam)]) / a


def cartesian_chart(chart: Chart, tau: float, s: float) -> np.ndarray:
    """``Phi(tau, s) = exp_{gamma(s)}(tau V(s))`` on the hyperboloid."""
    if chart.kind is not ChartKind.HYPERBOLIC_CARTESIAN:
        raise DomainError("cartesian_chart needs the hyperbolic-edge chart", "kind")
    a = chart.a
    _guard(a * tau, "tau")
    _guard(a * s, "s")
    ct = math.cosh(a * tau)
    return np.array([ct * math.cosh(a * s), math.sinh(a * tau), ct * math.sinh(a * s)]) / a


def embed(chart: Chart, p: ChartPoint) -> np.ndarray:
    """Ambient coordinates of a chart point."""
    c1, c2 = p
    if chart.kind is ChartKind.HYPERBOLIC_CARTESIAN:
        return cartesian_chart(chart, c1, c2)
    return exp_map(chart, c2, c1)


def frame_at(chart: Chart, p: ChartPoint) -> FramePair:
    """The frame ``e1 = d/dc1``, ``e2 = (1/w) d/dc2`` in ambient coordinates.

    ``e2`` restricted to a radial geodesic of a polar chart is constant, which
    is the parallel-transport property the closed-form operators rely on.
    """
    p = ChartPoint(*p)
    chart.check(p)
    a, c1, c2 = chart.a, p.c1, p.c2
    if chart.is_sphere:
        e1 = np.array([math.cos(a * c1) * math.cos(c2), math.cos(a * c1) * math.sin(c2), -math.sin(a * c1)])
        e2 = np.array([-math.sin(c2), math.cos(c2), 0.0])
    elif chart.kind is ChartKind.HYPERBOLIC_POLAR:
        ch = math.cosh(a * c1)
        e1 = np.array([math.sinh(a * c1), ch * math.cos(c2), ch * math.sin(c2)])
        e2 = np.array([0.0, -math.sin(c2), math.cos(c2)])
    else:
        sh = math.sinh(a * c1)
        e1 = np.array([sh * math.cosh(a * c2), math.cosh(a * c1), sh * math.sinh(a * c2)])
        e2 = np.array([math.sinh(a * c2), 0.0, math.cosh(a * c2)])
    return FramePair(e1, e2)


def chart_metric(chart: Chart, p: ChartPoint) -> np.ndarray:
    """Metric components ``diag(1, w(c1)^2)`` in the chart's coordinates."""
    p = ChartPoint(*p)
    chart.check(p)
    w = float(chart.weight(p.c1))
    return np.array([[1.0, 0.0], [0.0, w * w]])


def poincare_project(p, a: float = 1.0) -> np.ndarray:
    """Stereographic projection of a hyperboloid point from ``(-1/a, 0, 0)``
    onto the unit Poincare disc."""
    x = np.asarray(p, dtype=float)
    return a * x[..., 1:] / (1.0 + a * x[..., :1])
