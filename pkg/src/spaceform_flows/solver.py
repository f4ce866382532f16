"""Initial-value solvers for linear ODEs with real-analytic coefficients.

Two independent methods are provided so each can serve as the other's oracle:

* :func:`solve_rk` -- Dormand-Prince 5(4) with a PI step-size controller and
  the 4th-order continuous extension of Hairer, Norsett & Wanner.
* :func:`solve_taylor` -- piecewise Taylor expansion; the solution's
  coefficients follow from the series of the normalised ODE coefficients by
  the Cauchy-product recurrence.

Both return a :class:`ProfileSolution`, callable as ``sol(t) -> (Y, Y', Y'', Y''')``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, NonConvergence, SingularApproachError
from .ode import OdeSystem


class InitialData(NamedTuple):
    t0: float
    values: tuple  # Y(t0), Y'(t0), ..., Y^(order-1)(t0)


def _check_problem(system: OdeSystem, init: InitialData, t_end: float) -> None:
    if len(init.values) != system.order:
        raise ValueError(f"need {system.order} initial values, got {len(init.values)}")
    if not all(math.isfinite(v) for v in init.values):
        raise ValueError("initial values must be finite")
    if not system.contains(init.t0):
        raise DomainError(
            f"initial point t0={init.t0!r} is not interior to the domain {system.domain}", "t0"
        )
    if not t_end > init.t0:
        raise DomainError(f"t_end={t_end!r} must exceed t0={init.t0!r}", "t_end")
    lo, hi = system.domain
    if t_end > hi or any(init.t0 < s < t_end for s in system.singular_points):
        raise DomainError(f"[{init.t0}, {t_end}] crosses a singular point of {system.label}", "t_end")
    if t_end == hi:
        raise DomainError(f"t_end={t_end!r} is a singular endpoint of {system.label}", "t_end")


class ProfileSolution:
    """Dense solution on ``[t0, t_end]``.

    ``kind`` is ``"taylor"`` (pieces are Taylor coefficient arrays) or ``"rk"``
    (pieces are Dormand-Prince dense-output coefficients).
    """

    def __init__(self, system: OdeSystem, kind: str, starts, widths, pieces, t_end: float):
        self.system = system
        self.kind = kind
        self.starts = list(starts)
        self.widths = list(widths)
        self.pieces = list(pieces)
        self.domain = (self.starts[0], t_end)
        self._derivative_cache = {}

    def __repr__(self):
        return f"ProfileSolution({self.kind}, {self.system.label}, domain={self.domain}, pieces={len(self.pieces)})"

    @property
    def mesh(self) -> np.ndarray:
        return np.array(self.starts + [self.domain[1]])

    def _locate(self, t: float) -> int:
        lo, hi = self.domain
        if not lo <= t <= hi:
            raise DomainError(f"t={t!r} outside solution domain [{lo}, {hi}]", "t")
        return max(0, min(bisect.bisect_right(self.starts, t) - 1, len(self.pieces) - 1))

    def __call__(self, t):
        if np.ndim(t):
            rows = np.array([self(float(x)) for x in np.ravel(t)])
            return tuple(rows[:, k].reshape(np.shape(t)) for k in range(4))
        t = float(t)
        i = self._locate(t)
        x = t - self.starts[i]
        if self.kind == "taylor":
            vals = [_horner(c, x) for c in self._derivative_coeffs(i)]
        else:
            vals = _rk_eval(self.system, self.pieces[i], self.starts[i], self.widths[i], x)
        return tuple(float(v) for v in vals)

    def _derivative_coeffs(self, i: int) -> list:
        """Coefficient arrays of the first four derivatives on Taylor piece ``i``."""
        cached = self._derivative_cache.get(i)
        if cached is None:
            cached = [self.pieces[i]]
            for _ in range(3):
                c = cached[-1]
                cached.append(np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.zeros(1))
            self._derivative_cache[i] = cached
        return cached

    def residual(self, t) -> float:
        """Raw defect ``sum_k c_k Y^(k)`` at ``t``, with the top derivative taken
        from the representation rather than from the equation."""
        t = float(t)
        i = self._locate(t)
        x = t - self.starts[i]
        n = self.system.order
        if self.kind == "taylor":
            derivs = _poly_derivatives(self.pieces[i], x, n + 1)
        else:
            derivs = list(_rk_state(self.pieces[i], x / self.widths[i]))
            derivs.append(_rk_state_derivative(self.pieces[i], x / self.widths[i], self.widths[i])[-1])
        return self.system.apply(t, derivs)


def eval(sol: ProfileSolution, t: float):  # noqa: A001 - public name fixed by the interface
    """``(Y, Y', Y'', Y''')`` at ``t``."""
    return sol(t)


def _horner(c: np.ndarray, x: float) -> float:
    acc = 0.0
    for v in c[::-1].tolist():
        acc = acc * x + v
    return acc


def _poly_derivatives(c: np.ndarray, x: float, count: int) -> list:
    out = []
    for _ in range(count):
        out.append(np.polynomial.polynomial.polyval(x, c))
        c = np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.zeros(1)
    return out


# --- Taylor ---------------------------------------------------------------------


def _taylor_coefficients(system: OdeSystem, t: float, state: Sequence[float], n: int) -> np.ndarray:
    """Taylor coefficients ``y_0..y_n`` of the solution about ``t``."""
    order = system.order
    p = [s.c for s in system.taylor(t, n)]  # k = order-1 .. 0
    y = np.zeros(n + 1)
    for k in range(order):
        y[k] = state[k] / math.factorial(k)
    for m in range(n + 1 - order):
        acc = 0.0
        for idx, pk in enumerate(p):
            k = order - 1 - idx
            # coefficient of x^(m-j) in Y^(k) is ff(m-j+k, k) * y[m-j+k]
            js = np.arange(m + 1)
            q = m - js
            ff = np.ones(m + 1)
            for i in range(k):
                ff *= q + k - i
            acc += np.dot(pk[: m + 1], ff * y[q + k])
        lead = 1.0
        for i in range(order):
            lead *= m + order - i
        y[m + order] = -acc / lead
    return y


def solve_taylor(
    system: OdeSystem, init: InitialData, t_end: float, order: int = 30, tail_tol: float = 1e-12
) -> ProfileSolution:
    """Piecewise Taylor solution.

    Each step is bounded by half the distance to the nearest (complex)
    singularity of the normalised coefficients and by the tail test
    ``(|y_{N-1}| h^{N-1} + |y_N| h^N) N^k <= tail_tol * max_j |y_j| h^j``, with
    ``k`` the ODE order so that the highest derivative is resolved too.
    """
    if not 10 <= order <= 60:
        raise ValueError(f"Taylor order must lie in [10, 60], got {order}")
    _check_problem(system, init, t_end)
    n = order
    t = float(init.t0)
    state = [float(v) for v in init.values]
    starts, widths, pieces = [], [], []
    weight = float(n) ** system.order
    while t < t_end:
        rad = system.radius(t)
        h_max = min(0.5 * rad, t_end - t)
        y = _taylor_coefficients(system, t, state, n)
        h = h_max
        for _ in range(60):
            powers = h ** np.arange(n + 1)
            terms = np.abs(y) * powers
            tail = (terms[-1] + terms[-2]) * weight
            if tail <= tail_tol * max(1.0, terms.max()):
                break
            h *= 0.7
        else:
            raise NonConvergence(f"Taylor tail test failed at t={t!r} with order {n}")
        if h < 1e-3 * h_max:
            raise NonConvergence(f"Taylor step collapsed to {h!r} at t={t!r} (order {n})")
        if t_end - (t + h) < 1e-12 * max(1.0, abs(t_end)):
            h = t_end - t
        starts.append(t)
        widths.append(h)
        pieces.append(y)
        state = _poly_derivatives(y, h, system.order)
        t = t_end if h == t_end - t else t + h
    return ProfileSolution(system, "taylor", starts, widths, pieces, t_end)


# --- Dormand-Prince 5(4) --------------------------------------------------------

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_A_MAT = np.zeros((7, 7))
for _i, _row in enumerate(_A):
    _A_MAT[_i, : len(_row)] = _row
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)  # 5th minus 4th order weights
_D = np.array(
    [
        -12715105075 / 11282082432,
        0.0,
        87487479700 / 32700410799,
        -10690763975 / 1880347072,
        701980252875 / 199316789632,
        -1453857185 / 822651844,
        69997945 / 29380423,
    ]
)


def _rhs(system: OdeSystem, t: float, z: np.ndarray) -> np.ndarray:
    q = system.normalized(t)
    out = np.empty_like(z)
    out[:-1] = z[1:]
    out[-1] = -np.dot(q[1:], z[::-1])
    return out


def _rk_state(cont: np.ndarray, theta: float) -> np.ndarray:
    r1, r2, r3, r4, r5 = cont
    th1 = 1.0 - theta
    return r1 + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)))


def _rk_state_derivative(cont: np.ndarray, theta: float, h: float) -> np.ndarray:
    _, r2, r3, r4, r5 = cont
    # d/dtheta of r2 th + r3 th(1-th) + r4 th^2(1-th) + r5 th^2(1-th)^2
    th, th1 = theta, 1.0 - theta
    d = r2 + r3 * (1 - 2 * th) + r4 * (2 * th - 3 * th * th) + r5 * (2 * th * th1 * th1 - 2 * th * th * th1)
    return d / h


def _rk_eval(system: OdeSystem, cont, t_start, h, x):
    z = _rk_state(cont, x / h)
    top = _rhs(system, t_start + x, z)[-1]
    vals = list(z) + [top]
    while len(vals) < 4:
        vals.append(float("nan"))
    return vals[:4]


# accepted steps keep the relative interpolant defect below DEFECT_FACTOR * tol
DEFECT_FACTOR = 10.0


def _midpoint_defect(system: OdeSystem, cont: np.ndarray, t: float, h: float) -> float:
    """Relative defect ``|z' - f(t, z)|`` of the top component of the dense
    output at the step midpoint, scaled by the normalised coefficient sizes."""
    z = _rk_state(cont, 0.5)
    dz = _rk_state_derivative(cont, 0.5, h)
    q = system.normalized(t + 0.5 * h)
    f_top = -float(np.dot(q[1:], z[::-1]))
    # the trailing max|z| is an absolute floor (like atol) for points where all
    # lower coefficients vanish together, e.g. the sphere's equator
    scale = abs(dz[-1]) + float(np.sum(np.abs(q[1:] * z[::-1]))) + float(np.max(np.abs(z)))
    diff = abs(dz[-1] - f_top)
    return diff / scale if scale > 0 else diff


def solve_rk(
    system: OdeSystem,
    init: InitialData,
    t_end: float,
    tol: float = 1e-10,
    max_steps: int = 200_000,
) -> ProfileSolution:
    """Adaptive Dormand-Prince 5(4) with ``atol = rtol = tol`` and PI step control.

    Besides the embedded error estimate, every accepted step must keep the
    defect of the dense output's derivative at the step midpoint below
    ``10 tol`` relative to the coefficient scale, so that the residual of the
    continuous solution (not only of the mesh values) is controlled.
    """
    if not 1e-14 <= tol <= 1e-3:
        raise ValueError(f"tol must lie in [1e-14, 1e-3], got {tol!r}")
    _check_problem(system, init, t_end)
    t = float(init.t0)
    z = np.array(init.values, dtype=float)
    k1 = _rhs(system, t, z)
    span = t_end - t
    h = min(0.01 * span, 0.1 * system.radius(t))
    err_prev = 1e-4
    beta, alpha = 0.04, 0.2 - 0.75 * 0.04
    safety, fac_min, fac_max = 0.9, 0.2, 5.0
    starts, widths, pieces = [], [], []
    steps = 0
    while t < t_end:
        if steps > max_steps:
            raise SingularApproachError(f"step budget exhausted at t={t!r}", t)
        steps += 1
        h_min = 16 * np.spacing(max(abs(t), 1.0))
        if h < h_min:
            raise SingularApproachError(f"step size underflow at t={t!r}", t)
        last = t + h >= t_end
        if last:
            h = t_end - t
        k = np.empty((7, len(z)))
        k[0] = k1
        for s in range(1, 7):
            k[s] = _rhs(system, t + _C[s] * h, z + h * (_A_MAT[s, :s] @ k[:s]))
        z_new = z + h * (_B @ k)
        err_vec = h * (_E @ k)
        sc = tol + tol * np.maximum(np.abs(z), np.abs(z_new))
        err = math.sqrt(float(np.mean((err_vec / sc) ** 2)))
        if err <= 1.0 and np.all(np.isfinite(z_new)):
            ydiff = z_new - z
            bspl = h * k[0] - ydiff
            cont = np.array(
                [z, ydiff, bspl, ydiff - h * k[6] - bspl, h * (_D @ k)]
            )
            defect = _midpoint_defect(system, cont, t, h)
            if defect > DEFECT_FACTOR * tol:
                # the interpolant's derivative is not accurate enough: shrink and retry
                h *= max(fac_min, safety * (DEFECT_FACTOR * tol / defect) ** 0.25)
                continue
            starts.append(t)
            widths.append(h)
            pieces.append(cont)
            t = t_end if last else t + h
            z = z_new
            k1 = k[6]
            err = max(err, 1e-10)
            fac = safety * err ** (-alpha) * err_prev**beta
            err_prev = err
            fac = min(fac, safety * (DEFECT_FACTOR * tol / max(defect, 1e-300)) ** 0.25)
            h *= min(fac_max, max(fac_min, fac))
        else:
            fac = safety * err ** (-0.2) if np.isfinite(err) and err > 0 else fac_min
            h *= max(fac_min, min(1.0, fac))
    return ProfileSolution(system, "rk", starts, widths, pieces, t_end)
