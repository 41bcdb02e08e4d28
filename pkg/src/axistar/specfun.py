"""Bessel functions of the first and second kind, orders 0 and 1.

Three evaluation regimes, all in double precision:

* ``x < 5``      ascending power series (logarithmic series for Y)
* ``5 <= x < 25`` Miller backward recurrence for J_n, Neumann series for Y
* ``x >= 25``    Hankel large-argument expansion

Every public function accepts a scalar or an array and returns the same shape.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061

SERIES_MAX = 5.0
ASYMPTOTIC_MIN = 25.0

_SERIES_TERMS = 28
_HANKEL_TERMS = 30
_RESCALE = 1e250


def _series(x):
    """Ascending series for (J0, J1, Y0, Y1); Y entries are NaN at x == 0."""
    x = np.asarray(x, dtype=float)
    q = 0.25 * x * x
    t0 = np.ones_like(x)        # (-q)^k / (k!)^2
    t1 = np.ones_like(x)        # (-q)^k / (k! (k+1)!)
    s0 = t0.copy()
    s1 = t1.copy()
    sy0 = np.zeros_like(x)
    sy1 = 2.0 * (-EULER_GAMMA) + 1.0 + np.zeros_like(x)  # psi(1) + psi(2)
    sy1 = sy1 * t1
    harmonic = 0.0
    for k in range(1, _SERIES_TERMS):
        t0 = t0 * (-q) / (k * k)
        t1 = t1 * (-q) / (k * (k + 1))
        s0 = s0 + t0
        s1 = s1 + t1
        harmonic += 1.0 / k
        sy0 = sy0 + harmonic * t0
        # psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        sy1 = sy1 + (-2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (k + 1)) * t1
    j0 = s0
    j1 = 0.5 * x * s1
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logt = np.log(0.5 * x)
        y0 = (2.0 / math.pi) * ((logt + EULER_GAMMA) * j0 - sy0)
        y1 = (-2.0 / (math.pi * x) + (2.0 / math.pi) * logt * j1
              - (0.5 * x / math.pi) * sy1)
    return j0, j1, y0, y1


def _miller(x):
    """Backward recurrence for J0, J1 with Neumann sums for Y0, Y1."""
    x = np.asarray(x, dtype=float)
    top = int(1.5 * float(np.max(x)) + 40)
    top += top % 2
    jp1 = np.zeros_like(x)
    j = np.full_like(x, 1e-30)
    j1 = np.zeros_like(x)
    even = np.zeros_like(x)     # sum of J_{2k}, k >= 1
    ysum0 = np.zeros_like(x)    # sum (-1)^k J_{2k} / k
    ysum1 = np.zeros_like(x)    # sum (-1)^(m+1) (2m+1)/(m(m+1)) J_{2m+1}
    for k in range(top, 0, -1):
        jm1 = (2.0 * k / x) * j - jp1
        n = k - 1
        if n == 1:
            j1 = jm1
        elif n > 0 and n % 2 == 0:
            half = n // 2
            even = even + jm1
            ysum0 = ysum0 + (-1.0) ** half * jm1 / half
        elif n % 2 == 1:
            m = (n - 1) // 2
            ysum1 = ysum1 + (-1.0) ** (m + 1) * (2 * m + 1) / (m * (m + 1)) * jm1
        jp1, j = j, jm1
        big = np.abs(j) > _RESCALE
        if np.any(big):
            s = np.where(big, 1.0 / _RESCALE, 1.0)
            j, jp1, j1 = j * s, jp1 * s, j1 * s
            even, ysum0, ysum1 = even * s, ysum0 * s, ysum1 * s
    norm = j + 2.0 * even
    J0 = j / norm
    J1 = j1 / norm
    logt = np.log(0.5 * x) + EULER_GAMMA
    Y0 = (2.0 / math.pi) * logt * J0 - (4.0 / math.pi) * ysum0 / norm
    Y1 = (-2.0 / (math.pi * x) * J0 + (2.0 / math.pi) * (logt - 1.0) * J1
          + (2.0 / math.pi) * ysum1 / norm)
    return J0, J1, Y0, Y1


def _hankel_pq(nu: int, x):
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = 1.0
    xk = np.ones_like(x)
    for k in range(1, _HANKEL_TERMS):
        a *= (mu - (2 * k - 1) ** 2) / (k * 8.0)
        xk = xk * x
        term = a / xk
        if k % 2 == 1:
            q = q + (-1.0) ** ((k - 1) // 2) * term
        else:
            p = p + (-1.0) ** (k // 2) * term
    return p, q


def _asymptotic(x):
    x = np.asarray(x, dtype=float)
    amp = np.sqrt(2.0 / (math.pi * x))
    out = []
    for nu in (0, 1):
        p, q = _hankel_pq(nu, x)
        w = x - (0.5 * nu + 0.25) * math.pi
        c, s = np.cos(w), np.sin(w)
        out.append((amp * (p * c - q * s), amp * (p * s + q * c)))
    (J0, Y0), (J1, Y1) = out
    return J0, J1, Y0, Y1


def bessel_jy(x):
    """Return ``(J0, J1, Y0, Y1)`` at nonnegative ``x``.

    Y0 and Y1 are ``-inf`` at ``x == 0``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0):
        raise DomainError("Bessel arguments must be finite and nonnegative")
    flat = np.atleast_1d(xa).ravel()
    res = [np.empty_like(flat) for _ in range(4)]
    for lo, hi, fn in ((0.0, SERIES_MAX, _series),
                       (SERIES_MAX, ASYMPTOTIC_MIN, _miller),
                       (ASYMPTOTIC_MIN, np.inf, _asymptotic)):
        sel = (flat >= lo) & (flat < hi)
        if np.any(sel):
            for dst, val in zip(res, fn(flat[sel])):
                dst[sel] = val
    zero = flat == 0.0
    res[2][zero] = -np.inf
    res[3][zero] = -np.inf
    if xa.ndim == 0:
        return tuple(float(v[0]) for v in res)
    return tuple(v.reshape(xa.shape) for v in res)


def bessel_j(order: int, x):
    """Bessel function of the first kind J_order(x) for x >= 0."""
    if order not in (0, 1):
        raise DomainError(f"unsupported Bessel order {order!r}; only 0 and 1")
    j0, j1, _, _ = bessel_jy(x)
    return j0 if order == 0 else j1


def bessel_y(order: int, x):
    """Bessel function of the second kind Y_order(x) for x > 0."""
    if order not in (0, 1):
        raise DomainError(f"unsupported Bessel order {order!r}; only 0 and 1")
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("Y_n(x) requires x > 0")
    _, _, y0, y1 = bessel_jy(x)
    return y0 if order == 0 else y1


def j0(x):
    return bessel_j(0, x)


def j1(x):
    return bessel_j(1, x)


def y0(x):
    return bessel_y(0, x)


def y1(x):
    return bessel_y(1, x)
