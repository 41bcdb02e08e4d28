"""Free-surface shape z(r) from the condition p = 0 along the boundary.

Along the surface the density and its derivatives are treated as
constants: ``rho = A``, ``rho_z = B``, ``rho_r = C``, ``rho_rr = F`` (the
remaining second derivatives vanish).  The surface condition then becomes a
second-order ODE

    a2(r) z'' + a11(r) z'**2 + a1(r) z' + a0(r) = 0

whose solution is a logarithm of a Bessel combination.  Four closure
families are supported; see :data:`axistar.closures.CASES`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp

from .closures import CASES
from .errors import ConfigError, DomainError, FitError, IntegrationError, SingularPointError
from .specfun import bessel_jy


@dataclass(frozen=True)
class BoundaryData:
    """Surface values of rho and its derivatives plus the swirl constant.

    ``D`` is the zero-H swirl constant (``f**2 = D / rho``); ``f_const`` is
    the swirl of the constant-f families.
    """

    case: str
    A: float
    B: float
    C: float
    F: float = 0.0
    D: float = 0.0
    f_const: float = 0.0

    def __post_init__(self):
        if self.case not in CASES:
            raise ConfigError(f"unknown closure case {self.case!r}; expected one of {CASES}")
        if self.A == 0 or self.B == 0:
            raise DomainError("A and B must be nonzero")
        if self.case == "h1_H0" and not 2 * self.A * self.F + self.D < 0:
            raise DomainError("case h1_H0 needs 2AF + D < 0")
        if self.case == "h1_fconst" and not self.f_const ** 2 + self.F < 0:
            raise DomainError("case h1_fconst needs f^2 + F < 0")
        if self.case == "h4rho2_H0" and not self.D / self.A ** 4 > 0:
            raise DomainError("case h4rho2_H0 needs D > 0")
        if self.case == "h4rho2_fconst" and not self.f_const ** 2 / self.A ** 3 > 0:
            raise DomainError("case h4rho2_fconst needs f^2 / A^3 > 0")

    @classmethod
    def from_scale(cls, case: str, A: float, B: float, C: float, scale: float) -> "BoundaryData":
        """Data whose Bessel argument scale (alpha or beta) equals ``scale``.

        The free constant is chosen as: F for the h = 1 families (with zero
        swirl), D for ``h4rho2_H0`` and f for ``h4rho2_fconst``.
        """
        if not scale > 0:
            raise DomainError("Bessel scale must be positive")
        s2 = scale * scale
        if case == "h1_H0":
            return cls(case, A, B, C, F=-2.0 * A * s2)
        if case == "h1_fconst":
            return cls(case, A, B, C, F=-2.0 * A * s2)
        if case == "h4rho2_H0":
            return cls(case, A, B, C, D=16.0 * A ** 4 * s2)
        if case == "h4rho2_fconst":
            return cls(case, A, B, C, f_const=math.sqrt(8.0 * A ** 3 * s2))
        raise ConfigError(f"unknown closure case {case!r}")

    @property
    def bessel_scale(self) -> float:
        A, F, D, f2 = self.A, self.F, self.D, self.f_const ** 2
        if self.case == "h1_H0":
            s2 = -(2 * A * F + D) / (4 * A * A)
        elif self.case == "h1_fconst":
            s2 = -(f2 + F) / (2 * A)
        elif self.case == "h4rho2_H0":
            s2 = D / (16 * A ** 4)
        else:
            s2 = f2 / (8 * A ** 3)
        if not s2 > 0:
            raise DomainError(f"Bessel scale squared is {s2:g}; must be positive")
        return math.sqrt(s2)

    @property
    def log_sign(self) -> float:
        """Sign s in z = s (A/B) ln{...} - C r / B."""
        return -1.0 if self.case.startswith("h1") else 1.0


@dataclass(frozen=True)
class SurfaceODE:
    """a2(r) z'' + a11(r) z'**2 + a1(r) z' + a0(r) = 0."""

    data: BoundaryData

    def coefficients(self, r):
        r = np.asarray(r, dtype=float)
        d = self.data
        A, B, C, F, D, f2 = d.A, d.B, d.C, d.F, d.D, d.f_const ** 2
        if d.case == "h1_H0":
            return (2 * A * r, -B * r, -(2 * C * r + 2 * A),
                    (2 * A * F * r - C * C * r - 2 * A * C + D * r) / B)
        if d.case == "h1_fconst":
            return (A * B / r ** 2, -B * B / (2 * r ** 2), -B * (C * r + A) / r ** 3,
                    -C * C / (2 * r ** 2) + 2 * A * (F * r - C) / (2 * r ** 3) + A * f2 / r ** 2)
        tail = D * r / A if d.case == "h4rho2_H0" else 2 * f2 * r
        return (8 * A * A * B * r, 4 * A * B * B * r, 8 * A * B * (C * r - A),
                tail + 4 * A * C * (C * r - 2 * A))

    def residual(self, r, z1, z2):
        a2, a11, a1, a0 = self.coefficients(r)
        return a2 * z2 + a11 * z1 ** 2 + a1 * z1 + a0

    def curvature(self, r, z1):
        """Explicit right side g(r, z') of z'' = g."""
        a2, a11, a1, a0 = self.coefficients(r)
        return -(a11 * z1 ** 2 + a1 * z1 + a0) / a2


def surface_ode_coefficients(data: BoundaryData) -> SurfaceODE:
    return SurfaceODE(data)


def general_surface_residual(data: BoundaryData, r, z1, z2):
    """Full surface condition with constant boundary data.

    Evaluates the uncontracted form (before any case-specific rescaling),
    so it equals the case ODE residual up to an r-dependent factor.
    """
    d = data
    r = np.asarray(r, dtype=float)
    A, B, C, F = d.A, d.B, d.C, d.F
    if d.case.startswith("h1"):
        h, dh = 1.0, 0.0
    else:
        h, dh = 4.0 * A * A, 8.0 * A
    if d.case.endswith("H0"):
        bigH, f2 = 0.0, d.D / A
    else:
        f2 = d.f_const ** 2
        bigH = 0.5 * f2
    tot = C + B * z1
    return (-h / (2 * r ** 2) * tot ** 2
            + A / (2 * r ** 2) * (dh * tot ** 2 + 2 * bigH + f2)
            + A * h / r ** 2 * (B * z2)
            + A * h / r ** 3 * (-B * z1 + r * F - C))


def _combination(data, c1, c2, r):
    """(c1 J1 - c2 Y1), the cross product W and the argument x at r."""
    a = data.bessel_scale
    x = a * np.asarray(r, dtype=float)
    if np.any(x <= 0):
        raise DomainError("closed form needs r > 0")
    J0, J1, Y0, Y1 = bessel_jy(x)
    return c1 * J1 - c2 * Y1, J0 * Y1 - Y0 * J1, x, (J0, J1, Y0, Y1)


def closed_form_z(data: BoundaryData, c1: float, c2: float, r):
    """z(r) = s (A/B) ln{ B^2 (c1 J1 - c2 Y1)^2 / (4 a^2 A^2 W^2) } - C r / B."""
    A, B, C = data.A, data.B, data.C
    a = data.bessel_scale
    comb, W, _, _ = _combination(data, c1, c2, r)
    if np.any(comb == 0):
        raise SingularPointError("Bessel combination c1 J1 - c2 Y1 vanishes (log of zero)")
    arg = B * B * comb * comb / (4.0 * a * a * A * A * W * W)
    return data.log_sign * (A / B) * np.log(arg) - C * np.asarray(r, dtype=float) / B


def closed_form_dz(data: BoundaryData, c1: float, c2: float, r):
    """Analytic r-derivative of :func:`closed_form_z`."""
    A, B, C = data.A, data.B, data.C
    a = data.bessel_scale
    r = np.asarray(r, dtype=float)
    comb, _, x, (J0, J1, Y0, Y1) = _combination(data, c1, c2, r)
    if np.any(comb == 0):
        raise SingularPointError("Bessel combination c1 J1 - c2 Y1 vanishes (log of zero)")
    dcomb = a * (c1 * (J0 - J1 / x) - c2 * (Y0 - Y1 / x))
    # d/dr ln|W| = -1/r because W = -2/(pi a r)
    return data.log_sign * (A / B) * 2.0 * (dcomb / comb + 1.0 / r) - C / B


def _reduced_comb(data, c1, c2, r):
    """K = (pi x / 2)(c1 J1 - c2 Y1); K -> c2 as r -> 0."""
    comb, _, x, _ = _combination(data, c1, c2, r)
    return 0.5 * math.pi * x * comb


def fit_constants(data: BoundaryData, z_at_0: float = 1.0, z_at_1: float = 0.0,
                  n_check: int = 2001):
    """Integration constants (c1, c2) with z(0+) = z_at_0 and z(1) = z_at_1.

    c2 follows from the small-r limit.  Once exponentiated the endpoint
    condition at r = 1 is linear in c1, so c1 is exact; the fit fails if
    the Bessel combination changes sign on (0, 1].
    """
    if not (math.isfinite(z_at_0) and math.isfinite(z_at_1)):
        raise FitError("endpoint targets must be finite")
    A, B, C = data.A, data.B, data.C
    a = data.bessel_scale
    s = data.log_sign
    pref = 4.0 * a * a * A * A / (B * B)
    c2 = math.sqrt(pref * math.exp(s * B * z_at_0 / A))
    k1 = math.sqrt(pref * math.exp(s * B * (z_at_1 + C / B) / A))
    J0, J1, Y0, Y1 = bessel_jy(a)
    c1 = (2.0 * k1 / (math.pi * a) + c2 * Y1) / J1
    probe = np.linspace(1.0 / n_check, 1.0, n_check)
    K = _reduced_comb(data, c1, c2, probe)
    if np.any(K <= 0):
        bad = float(probe[np.argmax(K <= 0)])
        raise FitError(f"no admissible c1: Bessel combination vanishes near r = {bad:.6g} "
                       f"(c1 = {c1:.6g}, c2 = {c2:.6g})")
    return c1, c2


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Sampled surface z(r); ``valid`` marks samples where a surface exists."""

    r: np.ndarray
    z: np.ndarray
    valid: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        z = np.asarray(self.z, dtype=float)
        if r.shape != z.shape or r.ndim != 1:
            raise ValueError("r and z must be 1-D arrays of equal length")
        valid = np.isfinite(z) if self.valid is None else np.asarray(self.valid, bool) & np.isfinite(z)
        for name, arr in (("r", r), ("z", z), ("valid", valid)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def radius(self) -> np.ndarray:
        return np.sqrt(self.r ** 2 + self.z ** 2)

    def csv_text(self) -> str:
        lines = ["r,z,radius"]
        for r, z, rad, ok in zip(self.r, self.z, self.radius, self.valid):
            if ok:
                lines.append(f"{r:.17g},{z:.17g},{rad:.17g}")
            else:
                lines.append(f"{r:.17g},nan,nan")
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        Path(path).write_text(self.csv_text())


def closed_form_curve(data: BoundaryData, c1: float, c2: float, r) -> BoundaryCurve:
    r = np.asarray(r, dtype=float)
    return BoundaryCurve(r, closed_form_z(data, c1, c2, r), label=data.case)


def integrate_surface_ode(data: BoundaryData, z0: float, zprime0: float, r0: float,
                          r1: float, n: int = 200, rtol: float = 1e-10,
                          atol: float = 1e-12) -> BoundaryCurve:
    """Integrate the case ODE from (r0, z0, z'0) to r1 with DOP853."""
    if not (r0 > 0 and r1 > 0):
        raise DomainError("surface ODE integration needs r0, r1 > 0")
    ode = SurfaceODE(data)

    def rhs(r, y):
        return [y[1], ode.curvature(r, y[1])]

    mesh = np.linspace(r0, r1, n)
    sol = solve_ivp(rhs, (r0, r1), [z0, zprime0], method="DOP853", t_eval=mesh,
                    rtol=rtol, atol=atol)
    if sol.status != 0:
        last = sol.t[-1] if sol.t.size else r0
        state = sol.y[:, -1] if sol.t.size else np.array([z0, zprime0])
        raise IntegrationError(f"surface ODE integration failed: {sol.message}", last, state)
    return BoundaryCurve(sol.t, sol.y[0], label=f"{data.case} integrated")


def integrated_slope_end(data: BoundaryData, z0, zprime0, r0, r1, rtol=1e-10, atol=1e-12):
    """End state (z, z') of the same integration, for reversal checks."""
    ode = SurfaceODE(data)
    sol = solve_ivp(lambda r, y: [y[1], ode.curvature(r, y[1])], (r0, r1), [z0, zprime0],
                    method="DOP853", rtol=rtol, atol=atol)
    if sol.status != 0:
        raise IntegrationError(f"surface ODE integration failed: {sol.message}",
                               sol.t[-1], sol.y[:, -1])
    return float(sol.y[0, -1]), float(sol.y[1, -1])
