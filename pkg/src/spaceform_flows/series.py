"""Truncated power series arithmetic.

A :class:`Series` holds the Taylor coefficients ``s_0, ..., s_N`` of a function
about some expansion point.  Arithmetic is closed under truncation at ``N``, so
the coefficient functions of the ODEs can be written once against a small math
namespace and evaluated either on floats (``numpy``) or on series (this
module)::

    def c3(t, m):
        return m.sin(a * t) / a

    c3(0.3, np)                      # value
    c3(variable(0.3, 20), series)    # 20 Taylor coefficients about 0.3
"""

from __future__ import annotations

import numbers

import numpy as np


class Series:
    __slots__ = ("c",)
    __array_ufunc__ = None

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def __repr__(self):
        return f"Series({self.c.tolist()!r})"

    def _coerce(self, other):
        if isinstance(other, Series):
            if len(other.c) != len(self.c):
                raise ValueError("series truncation orders differ")
            return other
        if isinstance(other, numbers.Real):
            out = np.zeros_like(self.c)
            out[0] = other
            return Series(out)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Series(self.c + other.c)

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Series(self.c - other.c)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return Series(self.c * other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = len(self.c)
        return Series(np.convolve(self.c, other.c)[:n])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            return Series(self.c / other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k):
        if not (isinstance(k, numbers.Integral) and k >= 0):
            raise ValueError("only non-negative integer powers are supported")
        out = Series(np.eye(1, len(self.c))[0])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def reciprocal(self) -> "Series":
        """``1/s`` by Cauchy-product division; needs ``s_0 != 0``."""
        s = self.c
        if s[0] == 0:
            raise ZeroDivisionError("reciprocal of a series with zero constant term")
        n = len(s)
        r = np.zeros(n)
        r[0] = 1.0 / s[0]
        for k in range(1, n):
            r[k] = -np.dot(s[1 : k + 1], r[k - 1 :: -1][:k]) / s[0]
        return Series(r)

    def __call__(self, x):
        """Evaluate the truncated polynomial at offset ``x`` from the expansion point."""
        return np.polynomial.polynomial.polyval(x, self.c)

    def derivative_values(self, x, count: int):
        """Values of the first ``count`` derivatives (0th included) at offset ``x``."""
        out = []
        c = self.c
        for _ in range(count):
            out.append(np.polynomial.polynomial.polyval(x, c))
            c = np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.zeros(1)
        return out


def variable(t0: float, order: int) -> Series:
    """The identity function ``t`` expanded about ``t0``."""
    c = np.zeros(order + 1)
    c[0] = t0
    if order >= 1:
        c[1] = 1.0
    return Series(c)


def constant(value: float, order: int) -> Series:
    c = np.zeros(order + 1)
    c[0] = value
    return Series(c)


def _trig_pair(u: Series, hyperbolic: bool):
    """Series of (sin u, cos u) or (sinh u, cosh u) from the coupled recurrences
    ``s' = c u'`` and ``c' = -/+ s u'``."""
    n = len(u.c)
    s = np.zeros(n)
    c = np.zeros(n)
    if hyperbolic:
        s[0], c[0] = np.sinh(u.c[0]), np.cosh(u.c[0])
    else:
        s[0], c[0] = np.sin(u.c[0]), np.cos(u.c[0])
    sign = 1.0 if hyperbolic else -1.0
    ju = np.arange(n) * u.c
    for k in range(1, n):
        s[k] = np.dot(ju[1 : k + 1], c[k - 1 :: -1][:k]) / k
        c[k] = sign * np.dot(ju[1 : k + 1], s[k - 1 :: -1][:k]) / k
    return Series(s), Series(c)


def sin(u):
    if isinstance(u, Series):
        return _trig_pair(u, False)[0]
    return np.sin(u)


def cos(u):
    if isinstance(u, Series):
        return _trig_pair(u, False)[1]
    return np.cos(u)


def sinh(u):
    if isinstance(u, Series):
        return _trig_pair(u, True)[0]
    return np.sinh(u)


def cosh(u):
    if isinstance(u, Series):
        return _trig_pair(u, True)[1]
    return np.cosh(u)
