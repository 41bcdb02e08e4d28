"""Residuals of the original axisymmetric Euler-Poisson system.

Given (rho, Phi) and the closures, the velocity is recovered a posteriori
and the pressure reconstructed, then each of

    continuity   (1/r)(r u)_r + w_z
    advection    u rho_r + w rho_z
    r-momentum   rho (u u_r + w u_z) + p_r + rho Phi_r - rho f^2 / r^3
    z-momentum   rho (u w_r + w w_z) + p_z + rho Phi_z
    swirl        u (v_r + v / r) + w v_z
    poisson      Lap(Phi) - 4 pi G rho

is evaluated with second-order differences.  Every residual is divided by
the largest magnitude of its own constituent terms over the interior, so
tolerances are dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, DomainError
from .grid import CylGrid, ScalarField, d1, laplacian_axisym
from .reduced import SteadyState, pressure_field, recover_velocity

EQUATIONS = ("continuity", "advection", "r_momentum", "z_momentum", "swirl", "poisson")
EXACT_LEVEL = 1e-12


@dataclass
class ResidualReport:
    """Normalized max and RMS residual per equation on one grid.

    ``orders`` holds observed convergence orders when several grids were
    used (a float, or ``"exact"`` when the residual sits at rounding level
    on every grid).  Equations that could not be evaluated are listed in
    ``unavailable``.
    """

    grid: CylGrid
    max_abs: dict = field(default_factory=dict)
    rms: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)
    unavailable: tuple = ()
    history: list = field(default_factory=list)

    def __post_init__(self):
        for name, v in list(self.max_abs.items()) + list(self.rms.items()):
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"residual for {name} must be finite and nonnegative, got {v}")

    def lines(self):
        out = [f"grid {self.grid.nr}x{self.grid.nz}  r in [{self.grid.r_min:g}, {self.grid.r_max:g}]"
               f"  z in [{self.grid.z_min:g}, {self.grid.z_max:g}]"]
        for eq in EQUATIONS:
            if eq in self.unavailable:
                out.append(f"{eq:11s} unavailable")
                continue
            order = self.orders.get(eq)
            if order is None:
                tail = ""
            elif isinstance(order, str):
                tail = f"  order {order}"
            else:
                tail = f"  order {order:.3f}"
            out.append(f"{eq:11s} max {self.max_abs[eq]:.6e}  rms {self.rms[eq]:.6e}{tail}")
        return out

    def __str__(self):
        return "\n".join(self.lines())

    def to_csv(self, path) -> None:
        Path(path).write_text(self.csv_text())

    def csv_text(self) -> str:
        rows = ["equation,max,rms,order"]
        for eq in EQUATIONS:
            if eq in self.unavailable:
                rows.append(f"{eq},nan,nan,nan")
                continue
            o = self.orders.get(eq, "")
            o = o if isinstance(o, str) else f"{o:.17g}"
            rows.append(f"{eq},{self.max_abs[eq]:.17g},{self.rms[eq]:.17g},{o}")
        return "\n".join(rows) + "\n"


def _normalized(res, terms):
    """Max/RMS of res divided by the largest term magnitude, two rings from the edge.

    Nested one-sided edge differences lose an order on the outermost ring,
    so the first two rings are excluded.
    """
    inner = (slice(2, -2), slice(2, -2))
    scale = max(float(np.max(np.abs(t[inner]))) for t in terms)
    scale = scale if scale > 0 else 1.0
    v = res[inner] / scale
    return float(np.max(np.abs(v))), float(np.sqrt(np.mean(v * v)))


def residual_fields(state: SteadyState, convention: str = "momentum", velocity=None,
                    pressure=None):
    """Raw residual arrays and their constituent terms, keyed by equation."""
    g = state.grid
    rr, _ = g.mesh
    rho = state.rho.values
    phi = state.phi.values
    cl = state.closures
    out = {}
    lap = laplacian_axisym(state.phi).values
    gs = 4.0 * math.pi * state.G * rho
    out["poisson"] = (lap - gs, (lap, gs))

    if velocity is None:
        u, w, v = (f.values for f in recover_velocity(state))
    else:
        u, w, v = (np.asarray(getattr(f, "values", f), dtype=float) for f in velocity)
    p = pressure_field(state, convention).values if pressure is None else \
        np.asarray(getattr(pressure, "values", pressure), dtype=float)

    dr, dz = g.dr, g.dz
    rho_r, rho_z = d1(rho, dr, 0), d1(rho, dz, 1)
    cont_a = d1(rr * u, dr, 0) / rr
    cont_b = d1(w, dz, 1)
    out["continuity"] = (cont_a + cont_b, (cont_a, cont_b))
    adv_a, adv_b = u * rho_r, w * rho_z
    out["advection"] = (adv_a + adv_b, (adv_a, adv_b))

    u_r, u_z = d1(u, dr, 0), d1(u, dz, 1)
    w_r, w_z = d1(w, dr, 0), d1(w, dz, 1)
    p_r, p_z = d1(p, dr, 0), d1(p, dz, 1)
    phi_r, phi_z = d1(phi, dr, 0), d1(phi, dz, 1)
    cent = cl.rho_f2(rho) / rr ** 3 if velocity is None else rho * v * v / rr
    terms_r = (rho * u * u_r, rho * w * u_z, p_r, rho * phi_r, cent)
    out["r_momentum"] = (terms_r[0] + terms_r[1] + p_r + terms_r[3] - cent, terms_r)
    terms_z = (rho * u * w_r, rho * w * w_z, p_z, rho * phi_z)
    out["z_momentum"] = (sum(terms_z), terms_z)

    v_r, v_z = d1(v, dr, 0), d1(v, dz, 1)
    sw = (u * v_r, u * v / rr, w * v_z)
    out["swirl"] = (sum(sw), sw)
    return out


def full_system_residuals(state: SteadyState, grid: CylGrid | None = None,
                          convention: str = "momentum", velocity=None,
                          pressure=None) -> ResidualReport:
    """Evaluate all six original equations on the state's grid.

    If rho <= 0 somewhere and no velocity is supplied, only the Poisson
    residual is reported and the rest are marked unavailable.
    """
    if grid is not None and grid != state.grid:
        raise ConfigError("state is not sampled on the requested grid")
    if velocity is None and np.any(state.rho.values <= 0):
        fields = {"poisson": residual_fields_poisson(state)}
        rep = ResidualReport(state.grid, unavailable=tuple(e for e in EQUATIONS if e != "poisson"))
    else:
        fields = residual_fields(state, convention, velocity, pressure)
        rep = ResidualReport(state.grid)
    for eq, (res, terms) in fields.items():
        m, s = _normalized(res, terms)
        rep.max_abs[eq] = m
        rep.rms[eq] = s
    return rep


def residual_fields_poisson(state: SteadyState):
    return _poisson_fields(state.rho, state.phi, state.G)


def _poisson_fields(rho: ScalarField, phi: ScalarField, G: float):
    lap = laplacian_axisym(phi).values
    gs = 4.0 * math.pi * G * rho.values
    return lap - gs, (lap, gs)


def poisson_report(rho: ScalarField, phi: ScalarField, G: float) -> ResidualReport:
    """Poisson residual alone, for fields whose density changes sign.

    Velocity recovery needs rho > 0, so the other equations are marked
    unavailable.
    """
    rep = ResidualReport(rho.grid, unavailable=tuple(e for e in EQUATIONS if e != "poisson"))
    m, s = _normalized(*_poisson_fields(rho, phi, G))
    rep.max_abs["poisson"] = m
    rep.rms["poisson"] = s
    return rep


def curl_balance_residual(state: SteadyState, convention: str = "momentum"):
    """z-derivative of (r-momentum)/rho minus r-derivative of (z-momentum)/rho.

    Pressure and potential drop out analytically only when p is a function
    consistent with the momentum balance, so this shrinks at truncation
    order exactly when both momentum residuals do.  Differencing the
    residuals again amplifies the one-sided edge stencils, so compare it on
    a sub-box that stays a fixed fraction away from the edges.
    """
    f = residual_fields(state, convention)
    rho = state.rho.values
    g = state.grid
    a = d1(f["r_momentum"][0] / rho, g.dz, 1)
    b = d1(f["z_momentum"][0] / rho, g.dr, 0)
    return ScalarField(g, a - b)


def _is_refinement(coarse: CylGrid, fine: CylGrid) -> bool:
    return (coarse.r_min == fine.r_min and coarse.r_max == fine.r_max
            and coarse.z_min == fine.z_min and coarse.z_max == fine.z_max
            and fine.nr == 2 * coarse.nr - 1 and fine.nz == 2 * coarse.nz - 1)


def convergence_study(producer: Callable[[CylGrid], SteadyState], grids: Sequence[CylGrid],
                      convention: str = "momentum") -> ResidualReport:
    """Residuals on a refinement chain and least-squares orders per equation.

    ``producer`` samples the scenario on a grid.  The grids must halve the
    spacing at each step over a common box.  The returned report describes
    the finest grid; ``history`` keeps every level.
    """
    grids = list(grids)
    if len(grids) < 3:
        raise ConfigError("a convergence study needs at least three grids")
    for a, b in zip(grids[:-1], grids[1:]):
        if not _is_refinement(a, b):
            raise ConfigError("grids are not nested by a factor of two over the same box")
    reports = [full_system_residuals(producer(g), convention=convention) for g in grids]
    final = reports[-1]
    final.history = reports
    h = np.log([g.dr for g in grids])
    for eq in EQUATIONS:
        if eq in final.unavailable:
            continue
        vals = np.array([rep.max_abs[eq] for rep in reports])
        if np.all(vals < EXACT_LEVEL):
            final.orders[eq] = "exact"
            continue
        slope = np.polyfit(h, np.log(np.maximum(vals, 1e-300)), 1)[0]
        final.orders[eq] = float(slope)
    return final


def density_nonnegative(fn: Callable, grid: CylGrid) -> tuple[bool, float]:
    """(all rho >= 0, min rho) for a density callable sampled on a grid."""
    rr, zz = grid.mesh
    vals = np.asarray(fn(rr, zz), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError("density sample has non-finite values")
    return bool(np.all(vals >= 0)), float(np.min(vals))
