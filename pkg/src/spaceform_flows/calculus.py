"""Closed-form differential operators for parallel laminar flows.

A parallel laminar flow is ``u = -Y(c1) e2`` with ``e2 = (1/w) d/dc2``; its
metric dual is ``u* = -Y w dc2``.  Every term of the stationary momentum
equation

    nu (-Lap u* - 2 Ric(u*)) + [beta cos(ar) *u*] + (nabla_u u)* + dP = 0

is again a 1-form ``A dc1 + B dc2`` whose coefficients depend on ``c1`` only.
This module evaluates those coefficients in closed form.  The rotation term is
present on the sphere only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ChartMismatchError, DomainError
from .geometry import Chart, ChartKind, ChartPoint

# A profile maps c1 to (Y, Y', Y'', Y''').
Profile = Callable[[float], tuple]

ROTATION_CONVENTIONS = ("paper", "hodge")


@dataclass(frozen=True)
class FlowParameters:
    nu: float = 1.0
    beta: float = 0.0
    delta: float = 0.0
    alpha0: float = 0.0
    alpha1: float = 1.0
    alpha2: float = 1.0

    def validate(self, chart: Chart) -> "FlowParameters":
        if not (self.nu > 0 and math.isfinite(self.nu)):
            raise DomainError(f"viscosity nu must be positive, got {self.nu!r}", "nu")
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise DomainError(f"rotation rate beta must be >= 0, got {self.beta!r}", "beta")
        if chart.kind is ChartKind.SPHERE_POLAR:
            if not 0 < self.delta < math.pi / chart.a:
                raise DomainError(
                    f"inner radius delta={self.delta!r} must lie in (0, pi/a={math.pi / chart.a!r})",
                    "delta",
                )
        elif chart.kind is ChartKind.HYPERBOLIC_POLAR:
            if not (self.delta > 0 and math.isfinite(self.delta)):
                raise DomainError(f"inner radius delta must be positive, got {self.delta!r}", "delta")
        elif self.delta != 0:
            raise DomainError("the hyperbolic-edge chart requires delta = 0 (edge on tau = 0)", "delta")
        if chart.kind is not ChartKind.SPHERE_POLAR and self.beta != 0:
            raise ChartMismatchError("rotation rate beta is only meaningful on the sphere")
        return self


@dataclass(frozen=True)
class QuadraticProfile:
    """``Y(c1) = h(c1 - delta)`` with ``h(l) = alpha0 + alpha1 l - alpha2 l^2 / 2``."""

    alpha0: float = 0.0
    alpha1: float = 1.0
    alpha2: float = 1.0
    delta: float = 0.0

    @classmethod
    def from_params(cls, params: FlowParameters) -> "QuadraticProfile":
        return cls(params.alpha0, params.alpha1, params.alpha2, params.delta)

    def __call__(self, c1):
        lam = c1 - self.delta
        y = self.alpha0 + self.alpha1 * lam - 0.5 * self.alpha2 * lam * lam
        dy = self.alpha1 - self.alpha2 * lam
        return y, dy, -self.alpha2 + 0.0 * lam, 0.0 * lam


def zero_profile(c1):
    z = 0.0 * c1
    return z, z, z, z


class OneFormRadial(NamedTuple):
    """The 1-form ``A dc1 + B dc2``."""

    A: float
    B: float

    def __add__(self, other):
        return OneFormRadial(self.A + other.A, self.B + other.B)

    def __sub__(self, other):
        return OneFormRadial(self.A - other.A, self.B - other.B)

    def scale(self, k) -> "OneFormRadial":
        return OneFormRadial(k * self.A, k * self.B)


def _point(chart: Chart, p) -> ChartPoint:
    p = ChartPoint(*p)
    chart.check(p)
    return p


def _cot_like(chart: Chart, c1):
    """``w'/w``: a cot(ar), a coth(ar) or a tanh(a tau)."""
    a = chart.a
    if chart.kind is ChartKind.SPHERE_POLAR:
        return a * np.cos(a * c1) / np.sin(a * c1)
    if chart.kind is ChartKind.HYPERBOLIC_POLAR:
        return a * np.cosh(a * c1) / np.sinh(a * c1)
    return a * np.sinh(a * c1) / np.cosh(a * c1)


def velocity_oneform(chart: Chart, prof: Profile, p) -> OneFormRadial:
    p = _point(chart, p)
    y = prof(p.c1)[0]
    return OneFormRadial(0.0, -y * chart.weight(p.c1))


def divergence(chart: Chart, prof: Profile, p) -> float:
    """``d* u*`` for a parallel flow.

    ``*u* = Y dc1`` up to the chart weight cancelling, so ``d*u* = -*d(Y dc1)``
    and ``d(Y(c1) dc1) = 0``: the result is exactly zero.
    """
    _point(chart, p)
    return 0.0


def hodge_laplacian_oneform(chart: Chart, prof: Profile, p) -> OneFormRadial:
    """``(-Lap) u* = d* d u*`` (``d* u* = 0``), as its ``dc2`` coefficient."""
    p = _point(chart, p)
    a, c1 = chart.a, p.c1
    y, dy, d2y, _ = prof(c1)
    if chart.kind is ChartKind.SPHERE_POLAR:
        s, c = math.sin(a * c1), math.cos(a * c1)
        b = d2y * s / a + dy * c - (a / s) * y
    elif chart.kind is ChartKind.HYPERBOLIC_POLAR:
        s, c = math.sinh(a * c1), math.cosh(a * c1)
        b = d2y * s / a + dy * c - (a / s) * y
    else:
        ch, sh = math.cosh(a * c1), math.sinh(a * c1)
        b = d2y * ch + a * sh * dy + (a * a / ch) * y
    return OneFormRadial(0.0, b)


def convection_oneform(chart: Chart, prof: Profile, p) -> OneFormRadial:
    """``(nabla_u u)* = -Y^2 (w'/w) dc1``: the centripetal term."""
    p = _point(chart, p)
    y = prof(p.c1)[0]
    return OneFormRadial(-y * y * _cot_like(chart, p.c1), 0.0)


def rotation_oneform(
    chart: Chart, params: FlowParameters, prof: Profile, p, convention: str = "paper"
) -> OneFormRadial:
    """Coriolis-type term ``beta cos(ar) *u*`` on the rotating sphere.

    ``convention="paper"`` gives ``beta Y cos(ar) sin(ar)/a dr``;
    ``convention="hodge"`` applies ``*dtheta = -(a/sin(ar)) dr`` literally and
    gives ``beta Y cos(ar) dr``.  Both are closed, so only the pressure differs.
    """
    if chart.kind is not ChartKind.SPHERE_POLAR:
        raise ChartMismatchError(f"rotation term is defined on the sphere only, not {chart.kind.value}")
    if convention not in ROTATION_CONVENTIONS:
        raise ValueError(f"unknown rotation convention {convention!r}")
    p = _point(chart, p)
    a, c1 = chart.a, p.c1
    y = prof(c1)[0]
    A = params.beta * math.cos(a * c1) * y
    if convention == "paper":
        A *= math.sin(a * c1) / a
    return OneFormRadial(A, 0.0)


def viscous_oneform(chart: Chart, prof: Profile, p) -> OneFormRadial:
    """``-Lap u* - 2 Ric(u*)`` with ``Ric = K g`` for curvature ``K = +/-a^2``."""
    lap = hodge_laplacian_oneform(chart, prof, p)
    vel = velocity_oneform(chart, prof, p)
    return lap - vel.scale(2.0 * chart.curvature)


def momentum_oneform(
    chart: Chart, params: FlowParameters, prof: Profile, p, convention: str = "paper"
) -> OneFormRadial:
    """Everything in the momentum equation except ``dP``; equals ``-dP``
    whenever a pressure exists."""
    out = viscous_oneform(chart, prof, p).scale(params.nu) + convection_oneform(chart, prof, p)
    if chart.kind is ChartKind.SPHERE_POLAR:
        out = out + rotation_oneform(chart, params, prof, p, convention)
    return out


def third_order_operator(chart: Chart, c1, derivs) -> float:
    """``L[Y](c1)``: the ``dc1 ^ dc2`` coefficient of ``d(-Lap u* - 2Ric u*)``."""
    a = chart.a
    y, dy, d2y, d3y = derivs
    if chart.kind is ChartKind.SPHERE_POLAR:
        s, c = np.sin(a * c1), np.cos(a * c1)
        return d3y * s / a + 2 * d2y * c + a * dy * (s - 1 / s) + a * a * y * c * (2 + 1 / s**2)
    if chart.kind is ChartKind.HYPERBOLIC_POLAR:
        s, c = np.sinh(a * c1), np.cosh(a * c1)
        return d3y * s / a + 2 * d2y * c - a * dy * (s + 1 / s) + a * a * y * c * (1 / s**2 - 2)
    ch, sh = np.cosh(a * c1), np.sinh(a * c1)
    return (
        d3y * ch
        + 2 * a * sh * d2y
        - a * a * sh * sh / ch * dy
        - a**3 * sh * (2 + 1 / ch**2) * y
    )


def vorticity_defect(chart: Chart, params: FlowParameters, prof: Profile, p) -> float:
    """``dc1 ^ dc2`` coefficient of ``d(momentum_oneform)``, i.e. ``nu L[Y](c1)``.

    The convection and rotation terms are ``A(c1) dc1`` and drop out; this
    returns ``d/dc1`` of the viscous ``B`` coefficient in closed form.
    """
    p = _point(chart, p)
    return params.nu * float(third_order_operator(chart, p.c1, prof(p.c1)))
