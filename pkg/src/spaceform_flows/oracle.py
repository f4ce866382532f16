"""Finite-difference exterior calculus on a 2-D chart.

Nothing here knows about parallel flows or the closed forms in
:mod:`spaceform_flows.calculus`: operators are assembled from a metric
``g(c1, c2)`` (a 2x2 array) and a 1-form field ``w(c1, c2) -> (w1, w2)`` with
centred second-order differences of step ``h``.  The results therefore act as an
independent check on the closed-form operators, with ``O(h^2)`` error.

Conventions: ``*dc^i`` follows ``*e1* = e2*`` for a positively oriented
orthonormal coframe, ``d* = -*d*`` on both 1- and 2-forms in dimension two, and
``-Lap = d d* + d* d``.
"""

from __future__ import annotations

import numpy as np

from .geometry import Chart, ChartPoint, chart_metric, embed

EPS = np.array([[0.0, 1.0], [-1.0, 0.0]])


def pullback_metric(chart: Chart, p, h: float = 1e-4) -> np.ndarray:
    """Metric ``<dX/dci, dX/dcj>`` of the ambient embedding, by 4th-order
    centred differences."""
    c1, c2 = p

    def d(i):
        e = np.eye(2)[i] * h
        f = lambda k: embed(chart, ChartPoint(c1 + k * e[0], c2 + k * e[1]))
        return (-f(2) + 8 * f(1) - 8 * f(-1) + f(-2)) / (12 * h)

    J = [d(0), d(1)]
    return np.array([[chart.inner(J[i], J[j]) for j in range(2)] for i in range(2)])


def chart_metric_fn(chart: Chart):
    return lambda c1, c2: chart_metric(chart, ChartPoint(c1, c2))


def _partial(f, p, i, h):
    e = np.eye(2)[i] * h
    return (np.asarray(f(p[0] + e[0], p[1] + e[1])) - np.asarray(f(p[0] - e[0], p[1] - e[1]))) / (2 * h)


def _sqrtg(metric, c1, c2):
    return np.sqrt(np.linalg.det(metric(c1, c2)))


def hodge_star_oneform(metric, p, omega) -> np.ndarray:
    """``(*w)_j = sqrt(g) g^{ik} w_k eps_{ij}``."""
    g = metric(*p)
    return np.sqrt(np.linalg.det(g)) * (EPS.T @ (np.linalg.inv(g) @ np.asarray(omega)))


def codifferential(metric, field, p, h) -> float:
    """``d* w = -(1/sqrt g) d_i (sqrt g g^{ij} w_j)``; minus the divergence."""

    def flux(c1, c2):
        g = metric(c1, c2)
        return np.sqrt(np.linalg.det(g)) * (np.linalg.inv(g) @ np.asarray(field(c1, c2)))

    div = _partial(flux, p, 0, h)[0] + _partial(flux, p, 1, h)[1]
    return float(-div / _sqrtg(metric, *p))


def exterior_derivative(field, p, h) -> float:
    """``dc1 ^ dc2`` coefficient of ``d w``."""
    return float(_partial(field, p, 0, h)[1] - _partial(field, p, 1, h)[0])


def hodge_laplacian(metric, field, p, h) -> np.ndarray:
    """``(d d* + d* d) w`` at ``p`` by nested centred differences."""
    grad_codiff = np.array(
        [_partial(lambda c1, c2: codifferential(metric, field, (c1, c2), h), p, i, h) for i in range(2)]
    )

    def curl_density(c1, c2):
        return exterior_derivative(field, (c1, c2), h) / _sqrtg(metric, c1, c2)

    df = np.array([_partial(curl_density, p, i, h) for i in range(2)])
    return grad_codiff - hodge_star_oneform(metric, p, df)


def christoffel(metric, p, h) -> np.ndarray:
    """``Gamma[k, i, j]`` from centred differences of the metric."""
    g = metric(*p)
    ginv = np.linalg.inv(g)
    dg = np.array([_partial(metric, p, l, h) for l in range(2)])  # dg[l, i, j] = d_l g_ij
    gam = np.zeros((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                gam[k, i, j] = 0.5 * sum(
                    ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j]) for l in range(2)
                )
    return gam


def covariant_self_derivative(metric, vector, p, h) -> np.ndarray:
    """``(nabla_u u)_k`` (lowered) for a vector field ``u(c1, c2)``."""
    u = np.asarray(vector(*p))
    du = np.array([_partial(vector, p, i, h) for i in range(2)])  # du[i, k] = d_i u^k
    gam = christoffel(metric, p, h)
    acc = u @ du + np.einsum("kij,i,j->k", gam, u, u)
    return metric(*p) @ acc


def parallel_flow_fields(metric, prof):
    """Vector field ``u = -Y(c1) d/dc2 / |d/dc2|`` and its metric dual,
    built from the metric alone."""

    def vector(c1, c2):
        g = metric(c1, c2)
        return np.array([0.0, -prof(c1)[0] / np.sqrt(g[1, 1])])

    def covector(c1, c2):
        return metric(c1, c2) @ vector(c1, c2)

    return vector, covector


def convergence_orders(errors) -> np.ndarray:
    """Observed orders ``log2(e_k / e_{k+1})`` for successive halvings of ``h``."""
    e = np.asarray(errors, dtype=float)
    return np.log2(e[:-1] / e[1:])
