"""Closure functions h(rho), f(rho), H(rho) and the gauges S(rho), P(rho).

A scenario is fixed by the meridional momentum law ``h = rho * psi_rho**2``,
the swirl law ``v = f(rho) / r`` and the derived swirl potential
``H = f**2 / 2 + rho f f_rho``.  Closures are built from named analytic
families so derivatives are exact.

Swirl constant convention: for the zero-H family ``f**2 = swirl_const / rho``,
so ``rho * f**2 == swirl_const`` identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, DomainError

Func = Callable[[np.ndarray], np.ndarray]

CASES = ("h1_H0", "h1_fconst", "h4rho2_H0", "h4rho2_fconst")


def _zero(rho):
    return np.zeros_like(np.asarray(rho, dtype=float))


def _const(c):
    def fn(rho):
        return np.full_like(np.asarray(rho, dtype=float), c)
    return fn


@dataclass(frozen=True)
class ClosureSet:
    """Parameter functions defining a steady-state scenario.

    ``f2`` is f(rho)**2 and ``rho_f2`` is the product rho * f**2; the latter
    is evaluated without dividing by rho so it stays finite at rho = 0.
    """

    name: str
    h: Func
    dh: Func
    f2: Func
    df2: Func
    rho_f2: Func
    s_gauge: Func = _zero
    p_gauge: Func = _zero
    constants: dict = field(default_factory=dict)

    def f(self, rho):
        return np.sqrt(np.maximum(self.f2(rho), 0.0))

    def df(self, rho):
        f = self.f(rho)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(f > 0, 0.5 * self.df2(rho) / np.where(f > 0, f, 1.0), 0.0)

    def big_h(self, rho):
        """H = f^2/2 + rho f f' = (f^2 + rho (f^2)')/2."""
        rho = np.asarray(rho, dtype=float)
        return 0.5 * (self.f2(rho) + rho * self.df2(rho))

    def with_gauges(self, s_gauge: Func | None = None, p_gauge: Func | None = None):
        return ClosureSet(self.name, self.h, self.dh, self.f2, self.df2, self.rho_f2,
                          s_gauge or self.s_gauge, p_gauge or self.p_gauge,
                          dict(self.constants))


def _h_family(kind: str):
    if kind == "h1":
        return _const(1.0), _zero
    if kind == "h4rho2":
        return (lambda rho: 4.0 * np.asarray(rho, float) ** 2,
                lambda rho: 8.0 * np.asarray(rho, float))
    raise ConfigError(f"unknown h family {kind!r}")


def closure_set(case: str, swirl_const: float = 0.0, f_const: float = 0.0) -> ClosureSet:
    """Build one of the four named closure pairs.

    ``*_H0`` cases use ``f**2 = swirl_const / rho``; ``*_fconst`` cases use a
    constant ``f = f_const``.
    """
    if case not in CASES:
        raise ConfigError(f"unknown closure case {case!r}; expected one of {CASES}")
    hkind, swirl = case.split("_")
    h, dh = _h_family(hkind)
    if swirl == "H0":
        if swirl_const < 0:
            raise DomainError("swirl_const must be nonnegative (f^2 = swirl_const/rho)")
        k = float(swirl_const)

        def f2(rho):
            rho = np.asarray(rho, dtype=float)
            with np.errstate(divide="ignore"):
                return k / rho

        def df2(rho):
            rho = np.asarray(rho, dtype=float)
            with np.errstate(divide="ignore"):
                return -k / rho ** 2

        return ClosureSet(case, h, dh, f2, df2, _const(k), constants={"swirl_const": k})
    c2 = float(f_const) ** 2
    return ClosureSet(case, h, dh, _const(c2), _zero,
                      lambda rho: c2 * np.asarray(rho, dtype=float),
                      constants={"f_const": float(f_const)})


def power_law_closure(n: int, h_family: str = "h1") -> ClosureSet:
    """Closure with H(rho) = (n+1) rho^n, i.e. f^2 = 2 rho^n."""
    if n < 1 or int(n) != n:
        raise DomainError("power-law exponent n must be a positive integer")
    h, dh = _h_family(h_family)
    n = int(n)
    return ClosureSet(
        f"{h_family}_power{n}", h, dh,
        lambda rho: 2.0 * np.asarray(rho, float) ** n,
        lambda rho: 2.0 * n * np.asarray(rho, float) ** (n - 1),
        lambda rho: 2.0 * np.asarray(rho, float) ** (n + 1),
        constants={"n": n},
    )


def big_h_from_f(f: Callable[[float], float], rho: float,
                 fprime: Callable[[float], float] | None = None) -> float:
    """H = f^2/2 + rho f f' for a scalar swirl law.

    Without ``fprime`` the derivative is a central difference at relative
    step 1e-6.
    """
    if rho <= 0:
        raise DomainError("big_h_from_f requires rho > 0")
    fv = f(rho)
    if fprime is not None:
        dfv = fprime(rho)
    else:
        step = 1e-6 * rho
        dfv = (f(rho + step) - f(rho - step)) / (2.0 * step)
    return 0.5 * fv * fv + rho * fv * dfv


def f_for_power_law_H(n: int, rho: float) -> float:
    """Swirl law sqrt(2 rho^n) whose swirl potential is (n+1) rho^n."""
    if rho <= 0:
        raise DomainError("f_for_power_law_H requires rho > 0")
    if n < 1:
        raise DomainError("n must be >= 1")
    return float(np.sqrt(2.0 * rho ** n))


_Q_CLOSED = {
    "h1": lambda lo: (lambda rho: np.asarray(rho, float) - lo),
    "h4rho2": lambda lo: (lambda rho: np.asarray(rho, float) ** 2 - lo ** 2),
}


def q_transform(h, rho_lo: float, rho_hi: float, *, family: str | None = None,
                n_check: int = 257):
    """Return q(rho) with dq/drho = sqrt(h(rho)), q(rho_lo) = 0.

    ``h`` is either a callable or a :class:`ClosureSet`.  Known h families
    use their closed-form antiderivative; anything else goes through
    adaptive quadrature.
    """
    if isinstance(h, ClosureSet):
        family = family or h.name.split("_")[0]
        h = h.h
    probe = np.asarray(h(np.linspace(rho_lo, rho_hi, n_check)), dtype=float)
    if np.any(probe < 0):
        raise DomainError("h(rho) must be nonnegative on the q-transform range")
    if family in _Q_CLOSED:
        return _Q_CLOSED[family](rho_lo)

    def q(rho):
        rho = np.asarray(rho, dtype=float)
        vals = [quad(lambda s: float(np.sqrt(max(h(s), 0.0))), rho_lo, float(x),
                     epsabs=1e-13, epsrel=1e-12)[0] for x in np.atleast_1d(rho).ravel()]
        out = np.array(vals).reshape(np.shape(rho))
        return float(out) if out.ndim == 0 else out

    return q
