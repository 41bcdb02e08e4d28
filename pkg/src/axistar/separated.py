"""Separated star solutions rho = R(r) Z(z), Phi = phi(r) Z(z).

Two z-profiles are supported.  ``Z = D1 z + D2`` leads to

    r^3 R'''' - 4 r^2 R''' + 9 r R'' - 9 R' + 4 pi G r^5 R = 0,

and ``Z = exp(lambda z)`` to

    r^3 R'''' - 4 r^2 R''' + (2 l^2 r^3 + 9 r) R'' - (4 l^2 r^2 + 9) R'
        + (4 pi G r^5 + l^4 r^3 + 4 l^2 r) R = 0.

Both are solved as two-point problems on [r0, r1] by linear superposition:
independent initial-value bases are integrated inward from each end, their
span is re-orthonormalized whenever its condition number grows past a
threshold, and the two families are joined at an interior matching point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .boundary import BoundaryCurve
from .errors import BvpSingularError, ConfigError, DomainError, IntegrationError
from .specfun import bessel_jy

LEFT, RIGHT = "left", "right"
REORTHO_COND = 1e12


@dataclass(frozen=True)
class BoundaryCondition:
    """R^(order)(at) = value, with ``at`` either ``"left"`` or ``"right"``."""

    at: str
    order: int
    value: float

    def __post_init__(self):
        if self.at not in (LEFT, RIGHT):
            raise ConfigError(f"boundary condition side must be 'left' or 'right', got {self.at!r}")
        if self.order not in (0, 1, 2, 3):
            raise ConfigError("boundary condition order must be 0..3")


@dataclass(frozen=True)
class Bvp4Problem:
    """c4 R'''' + c3 R''' + c2 R'' + c1 R' + c0 R = forcing on [r0, r1].

    ``coefficients(r)`` returns the tuple (c4, c3, c2, c1, c0).
    """

    coefficients: Callable
    r0: float
    r1: float
    bcs: tuple
    forcing: Callable | None = None
    label: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.r0 < self.r1:
            raise DomainError("need 0 < r0 < r1")
        bcs = tuple(self.bcs)
        if len(bcs) != 4:
            raise ConfigError(f"exactly four boundary conditions are required, got {len(bcs)}")
        keys = [(b.at, b.order) for b in bcs]
        if len(set(keys)) != 4:
            raise BvpSingularError("boundary conditions are not independent (repeated condition)")
        object.__setattr__(self, "bcs", bcs)
        probe = np.linspace(self.r0, self.r1, 33)
        c4 = np.asarray(self.coefficients(probe)[0], dtype=float)
        if np.any(c4 == 0):
            raise DomainError("leading coefficient vanishes on the interval")

    def rhs(self, r, y):
        """First-order system for y = (R, R', R'', R''') with any number of columns."""
        c4, c3, c2, c1, c0 = self.coefficients(r)
        y = y.reshape(4, -1)
        top = -(c3 * y[3] + c2 * y[2] + c1 * y[1] + c0 * y[0])
        return np.vstack([y[1], y[2], y[3], top / c4])

    def forced_rhs(self, r, y):
        out = self.rhs(r, y)
        if self.forcing is not None:
            out[3, 0] += self.forcing(r) / self.coefficients(r)[0]
        return out

    def operator(self, r, R, R1, R2, R3, R4):
        c4, c3, c2, c1, c0 = self.coefficients(r)
        return c4 * R4 + c3 * R3 + c2 * R2 + c1 * R1 + c0 * R

    def terms(self, r, R, R1, R2, R3, R4):
        c4, c3, c2, c1, c0 = self.coefficients(r)
        return np.array([c4 * R4, c3 * R3, c2 * R2, c1 * R1, c0 * R])

    def scaled(self, s: float) -> "Bvp4Problem":
        """Same operator with every boundary target (and forcing) times s."""
        bcs = tuple(BoundaryCondition(b.at, b.order, s * b.value) for b in self.bcs)
        forcing = None if self.forcing is None else (lambda r, g=self.forcing: s * g(r))
        return Bvp4Problem(self.coefficients, self.r0, self.r1, bcs, forcing, self.label,
                           dict(self.params))


@dataclass(frozen=True, eq=False)
class Bvp4Solution:
    problem: Bvp4Problem
    r: np.ndarray
    R: np.ndarray
    Rp: np.ndarray
    Rpp: np.ndarray
    Rppp: np.ndarray
    residual: float
    bc_defects: np.ndarray
    matching_cond: float
    reorthonormalizations: int
    match_defect: float = 0.0

    def derivatives(self, order: int) -> np.ndarray:
        return (self.R, self.Rp, self.Rpp, self.Rppp)[order]

    evaluator: Callable | None = field(default=None, repr=False)

    def at(self, r):
        """Derivatives 0..3 of R at arbitrary r from the integrator's dense output."""
        r = np.asarray(r, dtype=float)
        if np.any((r < self.r[0] - 1e-14) | (r > self.r[-1] + 1e-14)):
            raise DomainError("evaluation point outside the solved interval")
        flat = np.clip(np.atleast_1d(r).ravel(), self.r[0], self.r[-1])
        st = self.evaluator(flat)
        return tuple(st[k].reshape(r.shape) for k in range(4))

    def to_csv(self, path, phi=None) -> None:
        if phi is None:
            phi = np.full_like(self.R, np.nan)
        lines = ["r,R,Rp,Rpp,phi"]
        for row in zip(self.r, self.R, self.Rp, self.Rpp, phi):
            lines.append(",".join(f"{v:.17g}" for v in row))
        Path(path).write_text("\n".join(lines) + "\n")


def _side_columns(bcs, side):
    """Initial particular vector and free unit directions at one end."""
    fixed = {b.order: b.value for b in bcs if b.at == side}
    cols = np.zeros((4, 1 + 4 - len(fixed)))
    for k, v in fixed.items():
        cols[k, 0] = v
    for j, k in enumerate(sorted(set(range(4)) - set(fixed))):
        cols[k, 1 + j] = 1.0
    return cols


def _nodes(a, b, count):
    lo, hi = min(a, b), max(a, b)
    pts = np.geomspace(lo, hi, count + 1)
    pts[0], pts[-1] = lo, hi
    return pts if a < b else pts[::-1]


def _sweep(problem, start, stop, cols, nseg, rtol, atol, cond_limit):
    """Integrate particular + homogeneous columns from start to stop.

    Returns the segment list [(dense_fn, Q_transform)] and the end columns.
    Each segment stores its own columns; the basis change at a node is
    recorded so coefficients can be carried back to earlier segments.
    """
    segments = []
    Y = cols.copy()
    m = Y.shape[1]
    n_ortho = 0
    nodes = _nodes(start, stop, nseg)
    for x0, x1 in zip(nodes[:-1], nodes[1:]):
        sol = solve_ivp(lambda r, y: problem.forced_rhs(r, y).ravel(), (x0, x1), Y.ravel(),
                        method="DOP853", rtol=rtol, atol=atol, dense_output=True)
        if sol.status != 0:
            raise IntegrationError(f"basis integration failed: {sol.message}", sol.t[-1],
                                   sol.y[:, -1])
        Yend = sol.y[:, -1].reshape(4, m)
        step = None
        if m > 1:
            H = Yend[:, 1:]
            c = np.linalg.cond(H)
            if not np.isfinite(c) or c > cond_limit:
                Q, Rt = np.linalg.qr(H)
                proj = Q.T @ Yend[:, 0]
                p_new = Yend[:, 0] - Q @ proj
                step = (Rt, proj)
                Yend = np.column_stack([p_new, Q])
                n_ortho += 1
        segments.append((x0, x1, sol.sol, m, step))
        Y = Yend
    return segments, Y, n_ortho


def _carry_back(segments, a_end):
    """Coefficients valid on each segment, last segment first in the input order."""
    coeffs = [None] * len(segments)
    a = a_end
    for i in range(len(segments) - 1, -1, -1):
        step = segments[i][4]
        if step is not None:
            Rt, proj = step
            a = np.linalg.solve(Rt, a - proj)
        coeffs[i] = a
    return coeffs


def _dense_states(segments, coeffs, pts):
    out = np.empty((4, len(pts)))
    for (x0, x1, fn, m, _), a in zip(segments, coeffs):
        lo, hi = min(x0, x1), max(x0, x1)
        sel = (pts >= lo) & (pts <= hi)
        if not np.any(sel):
            continue
        Y = fn(pts[sel]).reshape(4, m, -1)
        vec = np.concatenate([[1.0], a]) if m > 1 else np.array([1.0])
        out[:, sel] = np.einsum("kjn,j->kn", Y, vec)
    return out


def _d1_4th(y, t):
    """Fourth-order first derivative on a uniform mesh t."""
    h = t[1] - t[0]
    d = np.empty_like(y)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    a = y[:5]
    d[0] = (-25 * a[0] + 48 * a[1] - 36 * a[2] + 16 * a[3] - 3 * a[4]) / (12 * h)
    d[1] = (-3 * a[0] - 10 * a[1] + 18 * a[2] - 6 * a[3] + a[4]) / (12 * h)
    b = y[-5:]
    d[-1] = (25 * b[4] - 48 * b[3] + 36 * b[2] - 16 * b[1] + 3 * b[0]) / (12 * h)
    d[-2] = (3 * b[4] + 10 * b[3] - 18 * b[2] + 6 * b[1] - b[0]) / (12 * h)
    return d


def solve_bvp4(problem: Bvp4Problem, n: int = 801, nseg: int = 8, rtol: float = 1e-12,
               atol: float = 1e-14, cond_limit: float = REORTHO_COND,
               r_match: float | None = None) -> Bvp4Solution:
    """Solve a linear fourth-order two-point problem by superposition.

    The solution is returned on a mesh geometric in r (uniform in ln r) with
    ``n`` points.  ``residual`` is the max ODE residual over the mesh divided
    by the max magnitude of the largest operator term; ``bc_defects`` are the
    boundary mismatches relative to max(|target|, max |R|).
    """
    r0, r1 = problem.r0, problem.r1
    rm = math.sqrt(r0 * r1) if r_match is None else float(r_match)
    if not r0 < rm < r1:
        raise DomainError("matching point must lie strictly inside (r0, r1)")
    colsL = _side_columns(problem.bcs, LEFT)
    colsR = _side_columns(problem.bcs, RIGHT)
    segL, YL, nL = _sweep(problem, r0, rm, colsL, nseg, rtol, atol, cond_limit)
    segR, YR, nR = _sweep(problem, r1, rm, colsR, nseg, rtol, atol, cond_limit)
    M = np.hstack([YL[:, 1:], -YR[:, 1:]])
    cond = float(np.linalg.cond(M)) if M.size else 1.0
    if not np.isfinite(cond) or cond > 1e15:
        raise BvpSingularError(
            f"boundary conditions not independent or eigenvalue hit (matching cond {cond:.3g})")
    ab = np.linalg.solve(M, YR[:, 0] - YL[:, 0])
    gap = M @ ab - (YR[:, 0] - YL[:, 0])
    y_match = YL[:, 0] + YL[:, 1:] @ ab[:colsL.shape[1] - 1]
    match_defect = float(np.max(np.abs(gap)) / max(float(np.max(np.abs(y_match))), 1e-300))
    kL = colsL.shape[1] - 1
    aL, aR = ab[:kL], ab[kL:]
    cL = _carry_back(segL, aL)
    cR = _carry_back(segR, aR)

    t = np.linspace(math.log(r0), math.log(r1), n)
    pts = np.exp(t)
    pts[0], pts[-1] = r0, r1
    def evaluate(x):
        left = x <= rm
        out = np.empty((4, len(x)))
        out[:, left] = _dense_states(segL, cL, x[left])
        out[:, ~left] = _dense_states(segR, cR, x[~left])
        return out

    states = evaluate(pts)

    R, R1, R2, R3 = states
    R4 = _d1_4th(R3, t) / pts
    terms = problem.terms(pts, R, R1, R2, R3, R4)
    g = problem.forcing(pts) if problem.forcing is not None else np.zeros_like(pts)
    res = np.sum(terms, axis=0) - g
    scale = max(float(np.max(np.abs(terms))), float(np.max(np.abs(g))), 1e-300)
    # one-sided stencils at the ends are less accurate; keep them out
    residual = float(np.max(np.abs(res[2:-2]))) / scale

    rscale = max(float(np.max(np.abs(R))), 1e-300)
    defects = []
    for b in problem.bcs:
        idx = 0 if b.at == LEFT else -1
        v = states[b.order, idx]
        defects.append(abs(v - b.value) / max(abs(b.value), rscale))
    return Bvp4Solution(problem, pts, R, R1, R2, R3, residual, np.array(defects), cond, nL + nR,
                        match_defect, evaluate)


def _standard_bcs(bcs):
    out = []
    for b in bcs:
        out.append(b if isinstance(b, BoundaryCondition) else BoundaryCondition(*b))
    return tuple(out)


def linear_coefficients(G: float):
    def coeffs(r):
        r = np.asarray(r, dtype=float)
        return (r ** 3, -4.0 * r ** 2, 9.0 * r, -9.0 + 0.0 * r, 4.0 * math.pi * G * r ** 5)
    return coeffs


def exp_coefficients(lam: float, G: float):
    l2 = lam * lam

    def coeffs(r):
        r = np.asarray(r, dtype=float)
        return (r ** 3, -4.0 * r ** 2, 2.0 * l2 * r ** 3 + 9.0 * r,
                -(4.0 * l2 * r ** 2 + 9.0),
                4.0 * math.pi * G * r ** 5 + l2 * l2 * r ** 3 + 4.0 * l2 * r)
    return coeffs


STAR_LINEAR_BCS = (BoundaryCondition(LEFT, 0, 1.0), BoundaryCondition(LEFT, 1, -0.003),
                   BoundaryCondition(RIGHT, 0, 1e-5), BoundaryCondition(RIGHT, 1, -0.015))
STAR_EXP_BCS = (BoundaryCondition(LEFT, 0, 1.0), BoundaryCondition(RIGHT, 0, 0.0),
                BoundaryCondition(RIGHT, 1, 0.0), BoundaryCondition(RIGHT, 2, 0.0))


def build_linear_problem(G: float = 1.0, r0: float = 1e-3, r1: float = 1.0,
                         bcs=STAR_LINEAR_BCS, forcing=None) -> Bvp4Problem:
    """Radial problem for the linear-in-z profile Z = D1 z + D2."""
    return Bvp4Problem(linear_coefficients(G), r0, r1, _standard_bcs(bcs), forcing,
                       "linear", {"G": G})


def build_exp_problem(lam: float, G: float = 1.0, r0: float = 1e-3, r1: float = 1.0,
                      bcs=STAR_EXP_BCS, forcing=None) -> Bvp4Problem:
    """Radial problem for the exponential profile Z = exp(lambda z)."""
    if lam == 0:
        raise ConfigError("lambda = 0 is the linear-z problem; use build_linear_problem")
    return Bvp4Problem(exp_coefficients(lam, G), r0, r1, _standard_bcs(bcs), forcing,
                       "exp", {"lambda": lam, "G": G})


def _profile(R, r):
    """(R, R', R'') from a solution object or a callable/array triple."""
    if isinstance(R, Bvp4Solution):
        vals = R.at(r)
        return vals[0], vals[1], vals[2]
    return R


def phi_from_R_linear(R, r):
    """phi = -(r R'' - R') / r^3."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("phi needs r > 0")
    R0, R1, R2 = _profile(R, r)
    return -(r * R2 - R1) / r ** 3


def phi_from_R_exp(R, lam: float, r):
    """phi = -(lambda^2 r R + r R'' - R') / r^3."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("phi needs r > 0")
    R0, R1, R2 = _profile(R, r)
    return -(lam * lam * r * R0 + r * R2 - R1) / r ** 3


def linear_surface_discriminant(R, R1, R2, r, D1, C_swirl, convention="printed"):
    """Numerator and denominator of D with Z(z)**2 = D on the surface.

    ``C_swirl`` is C with rho f^2 = C^2.  The printed convention gives
    D = r (D1^2 R^2 - C^2) / (2 r R R'' - r R'^2 - 2 R R').
    """
    sign = -1.0 if convention == "printed" else 1.0
    num = r * (D1 * D1 * R * R + sign * C_swirl ** 2)
    den = 2.0 * r * R * R2 - r * R1 * R1 - 2.0 * R * R1
    return num, den


def z_surface_linear(R, D1: float, D2: float, C_swirl: float, r=None,
                     convention: str = "printed", den_tol: float = 1e-300) -> BoundaryCurve:
    """Surface z = (sqrt(D) - D2) / D1 where D >= 0 (no-surface elsewhere)."""
    if D1 == 0:
        raise DomainError("D1 must be nonzero")
    if r is None:
        r = R.r
    r = np.asarray(r, dtype=float)
    R0, R1, R2 = _profile(R, r)
    num, den = linear_surface_discriminant(R0, R1, R2, r, D1, C_swirl, convention)
    ok = np.abs(den) > den_tol
    with np.errstate(divide="ignore", invalid="ignore"):
        Dv = np.where(ok, num / np.where(ok, den, 1.0), np.nan)
    valid = ok & (Dv >= 0)
    z = np.where(valid, (np.sqrt(np.where(valid, Dv, 0.0)) - D2) / D1, np.nan)
    return BoundaryCurve(r, z, valid, label="linear-z star")


def exp_surface_bracket(R, R1, R2, r, lam, convention="printed"):
    """Bracket b with w^2 b = C: (R'^2 + l^2 R^2) + 2 r^2 R phi (printed)."""
    phi = -(lam * lam * r * R + r * R2 - R1) / r ** 3
    b = R1 * R1 + lam * lam * R * R + 2.0 * r * r * R * phi
    return b if convention == "printed" else -b


def z_surface_exp(R, lam: float, C_swirl: float, r=None,
                  convention: str = "printed") -> BoundaryCurve:
    """Surface from w = exp(lambda z), w^2 = C / bracket where bracket > 0.

    ``C_swirl`` is the constant with rho f^2 = C.
    """
    if lam == 0:
        raise DomainError("lambda must be nonzero")
    if not C_swirl > 0:
        raise DomainError("C_swirl must be positive")
    if r is None:
        r = R.r
    r = np.asarray(r, dtype=float)
    R0, R1, R2 = _profile(R, r)
    b = exp_surface_bracket(R0, R1, R2, r, lam, convention)
    valid = b > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        w2 = np.where(valid, C_swirl / np.where(valid, b, 1.0), np.nan)
        z = np.where(valid, 0.5 * np.log(w2) / lam, np.nan)
    return BoundaryCurve(r, z, valid, label="exp-z star")


def _bessel1_derivs(x, kind):
    """g, g', g'', g''', g'''' for g = J1 or Y1 via the Bessel equation."""
    J0, J1, Y0, Y1 = bessel_jy(x)
    g0, g = (J0, J1) if kind == "J" else (Y0, Y1)
    d1 = g0 - g / x
    d2 = -d1 / x - (1.0 - 1.0 / x ** 2) * g
    d3 = d1 / x ** 2 - d2 / x - (1.0 - 1.0 / x ** 2) * d1 - 2.0 * g / x ** 3
    d4 = (2.0 * d2 / x ** 2 - 6.0 * d1 / x ** 3 - d3 / x
          - (1.0 - 1.0 / x ** 2) * d2 + 6.0 * g / x ** 4)
    return g, d1, d2, d3, d4


def bessel_mode(lam: float, r, kind: str = "J", power: int = 1):
    """R = r**power * K1(lambda r) and its first four r-derivatives.

    ``kind`` selects J1 or Y1.  The radial equation depends on lambda only
    through lambda**2, so a negative lambda uses |lambda| (J1 is odd, which
    only flips the overall sign).
    """
    if kind not in ("J", "Y"):
        raise ValueError("kind must be 'J' or 'Y'")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("Bessel modes need r > 0")
    a = abs(lam)
    sgn = -1.0 if (lam < 0 and kind == "J") else 1.0
    g = _bessel1_derivs(a * r, kind)
    gd = [sgn * a ** k * g[k] for k in range(5)]     # d^k/dr^k of K1(lambda r)
    p = [r ** power]
    for k in range(1, 5):
        c = math.prod(range(power - k + 1, power + 1))
        p.append(c * r ** (power - k) if power - k >= 0 else 0.0 * r)
    out = []
    for n in range(5):
        out.append(sum(math.comb(n, k) * p[k] * gd[n - k] for k in range(n + 1)))
    return tuple(out)


def ode_residual(problem: Bvp4Problem, r, derivs):
    """Pointwise residual and term scale for supplied (R, R', ..., R'''')."""
    terms = problem.terms(r, *derivs)
    g = problem.forcing(r) if problem.forcing is not None else 0.0
    return np.sum(terms, axis=0) - g, np.max(np.abs(terms), axis=0)


def bessel_projection(sol: Bvp4Solution, lam: float, degree: int = 3):
    """Least-squares fit R ~ A(r) J1(l r) + B(r) J0(l r) with polynomial A, B.

    Returns (coefficients of A, coefficients of B, relative residual).
    """
    r = sol.r
    J0, J1, _, _ = bessel_jy(abs(lam) * r)
    J1 = J1 * np.sign(lam)
    cols = [r ** k * J1 for k in range(degree + 1)] + [r ** k * J0 for k in range(degree + 1)]
    M = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(M, sol.R, rcond=None)
    rel = float(np.linalg.norm(M @ coef - sol.R) / max(np.linalg.norm(sol.R), 1e-300))
    return coef[:degree + 1], coef[degree + 1:], rel
