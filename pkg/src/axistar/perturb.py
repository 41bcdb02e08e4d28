"""Small-G (diffuse cloud) solutions R = R0 + G R1 + O(G^2).

Radial profiles solve

    L_l[R0] = 0,   L_l[R1] + 4 pi r^5 R0 = 0,
    L_l = r^3 D^4 - 4 r^2 D^3 + (2 l^2 r^3 + 9 r) D^2 - (4 l^2 r^2 + 9) D + l^4 r^3 + 4 l^2 r.

For l = 0 both orders are sums of r^p and r^p ln r and are kept in that
form so derivatives are exact.  For l != 0 only the zeroth order is
available; R0 is a combination of r J1, r^3 J1, r Y1, r^3 Y1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryCurve
from .errors import ConfigError, DomainError
from .separated import bessel_mode
from .specfun import bessel_jy

R1_READINGS = ("printed", "r10", "corrected")


@dataclass(frozen=True)
class PowLog:
    """Sum of c r^p (ln r)^k with k in {0, 1}; terms are (c, p, k)."""

    terms: tuple

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        logs = any(k and c != 0 for c, _, k in self.terms)
        if logs and np.any(r <= 0):
            raise DomainError("logarithmic terms need r > 0")
        out = np.zeros_like(r)
        with np.errstate(divide="ignore"):
            lr = np.log(np.where(r > 0, r, 1.0))
        for c, p, k in self.terms:
            if c == 0:
                continue
            base = np.ones_like(r) if p == 0 else r ** p
            out = out + c * base * (lr if k else 1.0)
        return out

    def derivative(self) -> "PowLog":
        new = []
        for c, p, k in self.terms:
            if c == 0:
                continue
            if p != 0:
                new.append((c * p, p - 1, k))
            if k:
                new.append((c, p - 1, 0))
        return PowLog(tuple(new))

    def derivatives(self, r, upto: int = 4):
        out, f = [], self
        for _ in range(upto + 1):
            out.append(f(r))
            f = f.derivative()
        return tuple(out)


@dataclass(frozen=True)
class CloudScenario:
    """Constants of a diffuse-cloud solution.

    ``D`` holds D1..D8 (l = 0 branch), ``C`` holds the coefficients of
    (r^3 J1, r J1, r^3 Y1, r Y1) (l != 0 branch).  ``swirl_const`` is
    rho f^2.  ``A``, ``B`` define Z = A z + B and ``E`` defines
    Z = E exp(l z).
    """

    lam: float = 0.0
    D: tuple = (0.0,) * 8
    C: tuple = (0.0,) * 4
    E: float = 1.0
    swirl_const: float = 0.0
    G: float = 0.1
    A: float = 1.0
    B: float = 0.0
    r_range: tuple = (0.1, 2.0)
    z_range: tuple = (0.0, 1.0)

    def __post_init__(self):
        if len(self.D) != 8 or len(self.C) != 4:
            raise ConfigError("need eight D constants and four C constants")
        if self.G < 0:
            raise DomainError("G must be nonnegative")
        if self.swirl_const < 0:
            raise DomainError("swirl_const must be nonnegative")
        object.__setattr__(self, "D", tuple(float(v) for v in self.D))
        object.__setattr__(self, "C", tuple(float(v) for v in self.C))


def r0_poly_series(s: CloudScenario) -> PowLog:
    D1, D2, D3, D4 = s.D[:4]
    return PowLog(((D1, 0, 0), (D2, 2, 0), (D3, 4, 0), (D4, 4, 1)))


def r0_poly(s: CloudScenario, r):
    """R0 = D1 + D2 r^2 + D3 r^4 + D4 r^4 ln r."""
    r = np.asarray(r, dtype=float)
    if s.D[3] != 0 and np.any(r <= 0):
        raise DomainError("R0 with D4 != 0 needs r > 0")
    return r0_poly_series(s)(r)


def r1_series(s: CloudScenario, reading: str = "printed") -> PowLog:
    """First-order correction as a PowLog.

    ``printed`` reproduces the leading D3/D4 term with no power of r,
    ``r10`` multiplies that term by r^10, ``corrected`` uses the particular
    solution -pi (120 D4 ln r + 120 D3 - 67 D4) r^10 / 86400 that actually
    satisfies the first-order equation.
    """
    if reading not in R1_READINGS:
        raise ConfigError(f"unknown R1 reading {reading!r}; expected one of {R1_READINGS}")
    D1, D2, D3, D4, D5, D6, D7, D8 = s.D
    k = math.pi / 86400.0
    if reading == "printed":
        lead = ((-k * 120 * D4, 0, 1), (-k * (12 * D3 - 67 * D4), 0, 0))
    elif reading == "r10":
        lead = ((-k * 120 * D4, 10, 1), (-k * (12 * D3 - 67 * D4), 10, 0))
    else:
        lead = ((-k * 120 * D4, 10, 1), (-k * (120 * D3 - 67 * D4), 10, 0))
    rest = ((-math.pi * D2 / 192.0, 8, 0), (-math.pi * D1 / 24.0, 6, 0),
            (D7 / 4.0, 4, 1), ((D6 - D7 / 4.0) / 4.0, 4, 0),
            (D5 / 2.0, 2, 0), (D8, 0, 0))
    return PowLog(lead + rest)


def r1_correction(s: CloudScenario, r, reading: str = "printed"):
    r = np.asarray(r, dtype=float)
    if (s.D[3] != 0 or s.D[6] != 0) and np.any(r <= 0):
        raise DomainError("R1 with logarithmic terms needs r > 0")
    return r1_series(s, reading)(r)


def radial_operator(r, derivs, lam: float = 0.0, G: float = 0.0):
    """Full fourth-order radial operator including the 4 pi G r^5 R term.

    Returns (value, scale) with scale the largest term magnitude pointwise.
    """
    R, R1, R2, R3, R4 = derivs
    l2 = lam * lam
    terms = np.array([r ** 3 * R4, -4.0 * r ** 2 * R3, (2 * l2 * r ** 3 + 9 * r) * R2,
                      -(4 * l2 * r ** 2 + 9) * R1,
                      (4 * math.pi * G * r ** 5 + l2 * l2 * r ** 3 + 4 * l2 * r) * R])
    return terms.sum(axis=0), np.max(np.abs(terms), axis=0)


def printed_cloud_operator(r, derivs, lam: float = 0.0, G: float = 0.0):
    """The alternative sign pattern (+4 r^2 D^3, -(...) D^2, +9 D, -(...)) for diagnostics."""
    R, R1, R2, R3, R4 = derivs
    l2 = lam * lam
    return (r ** 3 * R4 + 4 * r ** 2 * R3 - r * (2 * l2 * r ** 2 + 9) * R2 + 9 * R1
            - (4 * math.pi * G * r ** 5 + l2 * l2 * r ** 3 + 4 * l2 * r) * R)


def perturbed_profile(s: CloudScenario, r, reading: str = "printed", order: int = 1):
    """Derivatives 0..4 of R0 + G R1 (order 1) or R0 (order 0)."""
    d0 = r0_poly_series(s).derivatives(r)
    if order == 0:
        return d0
    d1 = r1_series(s, reading).derivatives(r)
    return tuple(a + s.G * b for a, b in zip(d0, d1))


def perturbation_residual(s: CloudScenario, r, reading: str = "printed", order: int = 1):
    """Max residual of the truncated expansion in the l = 0 radial equation.

    Order 0 substitutes R0 into the G-free operator.  Order 1 substitutes
    R0 + G R1 into the full operator, leaving 4 pi G^2 r^5 R1.  Both are
    divided by max(1, largest term of the G-free operator on R0), which
    does not depend on G, so the G-scaling of the residual is preserved.
    """
    r = np.asarray(r, dtype=float)
    _, base = radial_operator(r, perturbed_profile(s, r, reading, 0), 0.0, 0.0)
    G = 0.0 if order == 0 else s.G
    val, _ = radial_operator(r, perturbed_profile(s, r, reading, order), 0.0, G)
    return float(np.max(np.abs(val)) / max(1.0, float(np.max(base))))


def first_order_equation_residual(s: CloudScenario, r, reading: str = "printed"):
    """Pointwise L[R1] + 4 pi r^5 R0 (zero for an exact first-order correction)."""
    d1 = r1_series(s, reading).derivatives(r)
    val, _ = radial_operator(r, d1, 0.0, 0.0)
    return val + 4.0 * math.pi * r ** 5 * r0_poly(s, r)


def best_r1_reading(s: CloudScenario, r):
    """Reading of the first-order correction with the smallest residual."""
    scores = {k: float(np.max(np.abs(first_order_equation_residual(s, r, k))))
              for k in R1_READINGS}
    return min(scores, key=scores.get), scores


def _phi_linear(d):
    R, R1, R2 = d[:3]
    return lambda r: -(r * R2 - R1) / r ** 3


def linear_w_coefficients(s: CloudScenario, r, reading: str = "printed"):
    """Coefficients (a, b) of the linear equation a f^2 - b w = 0.

    a = R / (2 r^2) and b = (R'^2 + 2 r^2 R phi) / (2 r^2), both truncated
    at first order in G.  With D3..D8 = 0 these reduce to
    a = D2/2 + D1/(2 r^2) - G pi r^4 (D2 r^2/384 + D1/48) and
    b = 2 D2^2 + G pi r^2 (D1^2 + D2^2 r^4/6 + 3 D1 D2 r^2/4).
    """
    r = np.asarray(r, dtype=float)
    d0 = r0_poly_series(s).derivatives(r, 2)
    d1 = r1_series(s, reading).derivatives(r, 2)
    phi0 = -(r * d0[2] - d0[1]) / r ** 3
    phi1 = -(r * d1[2] - d1[1]) / r ** 3
    G = s.G
    a = (d0[0] + G * d1[0]) / (2 * r ** 2)
    b0 = d0[1] ** 2 + 2 * r ** 2 * d0[0] * phi0
    b1 = 2 * d0[1] * d1[1] + 2 * r ** 2 * (d0[0] * phi1 + d1[0] * phi0)
    return a, (b0 + G * b1) / (2 * r ** 2)


def printed_w_coefficients(s: CloudScenario, r):
    D1, D2 = s.D[:2]
    G = s.G
    r = np.asarray(r, dtype=float)
    a = D2 / 2 + D1 / (2 * r ** 2) - G * math.pi * r ** 4 * (D2 * r ** 2 / 384 + D1 / 48)
    b = 2 * D2 ** 2 + G * math.pi * r ** 2 * (D1 ** 2 + D2 ** 2 * r ** 4 / 6 + 3 * D1 * D2 * r ** 2 / 4)
    return a, b


def cloud_boundary_linear(s: CloudScenario, r=None, n: int = 400, reading: str = "printed",
                          include_axial_gradient: bool = False) -> BoundaryCurve:
    """Cloud surface for Z = A z + B from the linear equation for w = Z.

    With f^2 = swirl_const / (R w) the linear equation a f^2 = b w gives
    w^2 = a swirl_const / (R b).  ``include_axial_gradient`` adds the
    rho_z^2 = A^2 R^2 contribution that the linear equation leaves out,
    giving w^2 = (swirl_const - A^2 R^2) / (2 r^2 b).
    """
    if s.A == 0:
        raise DomainError("A must be nonzero")
    if r is None:
        r = np.linspace(s.r_range[0], s.r_range[1], n)
    r = np.asarray(r, dtype=float)
    a, b = linear_w_coefficients(s, r, reading)
    R = 2 * r ** 2 * a
    ok = (b != 0) & (R != 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        if include_axial_gradient:
            w2 = (s.swirl_const - s.A ** 2 * R ** 2) / (2 * r ** 2 * b)
        else:
            w2 = a * s.swirl_const / (R * b)
    valid = ok & np.isfinite(w2) & (w2 >= 0)
    w = np.sqrt(np.where(valid, w2, 0.0))
    z = np.where(valid, (w - s.B) / s.A, np.nan)
    return BoundaryCurve(r, z, valid, label="cloud linear-z")


def r0_bessel_derivs(s: CloudScenario, r, upto: int = 4):
    """Derivatives 0..upto of R0 = (C1 r^3 + C2 r) J1 + (C3 r^3 + C4 r) Y1."""
    if s.lam == 0:
        raise ConfigError("Bessel profile needs lambda != 0")
    r = np.asarray(r, dtype=float)
    C1, C2, C3, C4 = s.C
    if (C3 != 0 or C4 != 0) and np.any(r <= 0):
        raise DomainError("Y1 terms need r > 0")
    if np.any(r <= 0):
        raise DomainError("Bessel profile evaluated at r > 0 only")
    total = [np.zeros_like(r) for _ in range(upto + 1)]
    for coef, kind, power in ((C1, "J", 3), (C2, "J", 1), (C3, "Y", 3), (C4, "Y", 1)):
        if coef == 0:
            continue
        mode = bessel_mode(s.lam, r, kind, power)
        for k in range(upto + 1):
            total[k] = total[k] + coef * mode[k]
    return tuple(total)


def r0_bessel(s: CloudScenario, r):
    return r0_bessel_derivs(s, r, 0)[0]


def bessel_bracket(s: CloudScenario, r, convention: str = "printed"):
    """Q with E^2 exp(2 l z) Q = C^2 on the surface.

    Q = (R'^2 + l^2 R^2 + 2 r^2 R phi) / r^2 at zeroth order, phi from the
    exponential-profile potential.  The momentum convention flips the sign.
    """
    r = np.asarray(r, dtype=float)
    R, R1, R2 = r0_bessel_derivs(s, r, 2)
    l2 = s.lam ** 2
    phi = -(l2 * r * R + r * R2 - R1) / r ** 3
    q = (R1 ** 2 + l2 * R ** 2 + 2 * r ** 2 * R * phi) / r ** 2
    return q if convention == "printed" else -q


def printed_bessel_bracket(lam: float, C1: float, C3: float, r):
    """Bracket written in terms of J0 and J1 for R0 = (C1 r^2 + C3) r J1(l r)."""
    r = np.asarray(r, dtype=float)
    J0, J1, _, _ = bessel_jy(abs(lam) * r)
    J1 = J1 * (1.0 if lam > 0 else -1.0)
    l2 = lam * lam
    p = C1 * r ** 2 + C3
    return ((r ** 4 * C1 ** 2 * l2 + (2 * C1 * C3 * l2 + 4 * C1 ** 2) * r ** 2 + C3 ** 2 * l2) * J1 ** 2
            - 4 * r * lam * C1 * p * J0 * J1 + l2 * p ** 2 * J0 ** 2)


def cloud_boundary_bessel(s: CloudScenario, r=None, n: int = 400,
                          convention: str = "printed") -> BoundaryCurve:
    """z = ln(C^2 / (r^2 E^2 Q)) / (2 l) where Q > 0 (zeroth order in G)."""
    if s.lam == 0:
        raise ConfigError("Bessel cloud needs lambda != 0")
    if s.E == 0:
        raise DomainError("E must be nonzero")
    if r is None:
        lo = max(s.r_range[0], 1e-6)
        r = np.linspace(lo, s.r_range[1], n)
    r = np.asarray(r, dtype=float)
    q = bessel_bracket(s, r, convention)
    valid = q > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = s.swirl_const / (r ** 2 * s.E ** 2 * np.where(valid, q, 1.0))
        z = np.where(valid, np.log(arg) / (2 * s.lam), np.nan)
    return BoundaryCurve(r, z, valid & np.isfinite(z), label="cloud bessel")


def density_linear(s: CloudScenario, r, z, reading: str = "printed"):
    R = r0_poly(s, r) + s.G * r1_correction(s, r, reading)
    return R * (s.A * np.asarray(z, dtype=float) + s.B)


def density_bessel(s: CloudScenario, r, z):
    return r0_bessel(s, r) * s.E * np.exp(s.lam * np.asarray(z, dtype=float))
