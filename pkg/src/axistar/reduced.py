"""Residuals of the reduced (density, potential) system and a-posteriori fields.

Pressure conventions
--------------------
Two sign conventions for the swirl term are supported:

``"printed"``
    p = rho (S - P) - h |grad rho|^2 / (2 r^2) - rho (Phi - f^2 / (2 r^2))

``"momentum"``
    p = rho (S - P) - h |grad rho|^2 / (2 r^2) - rho (Phi + f^2 / (2 r^2))

The free-surface formulas of the star and cloud solutions are derived from
``"printed"``, which is the default.  Only ``"momentum"`` balances the
meridional momentum equations when combined with the recovered velocity
field, so the verifier uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closures import ClosureSet
from .errors import DomainError, ShapeError
from .grid import ScalarField, grad_components, laplacian_axisym, stokes_operator

CONVENTIONS = ("printed", "momentum")


@dataclass(frozen=True, eq=False)
class SteadyState:
    rho: ScalarField
    phi: ScalarField
    closures: ClosureSet
    G: float = 1.0

    def __post_init__(self):
        if self.rho.grid != self.phi.grid:
            raise ShapeError("rho and phi must share a grid")
        if np.any(self.rho.values < 0):
            raise DomainError("density must be nonnegative")

    @property
    def grid(self):
        return self.rho.grid

    def exceptional(self) -> bool:
        """True for the excluded cases: uniform density (hence zero flow)."""
        v = self.rho.values
        return bool(np.ptp(v) <= 1e-14 * max(1.0, float(np.max(np.abs(v)))))


@dataclass(frozen=True)
class ResidualSummary:
    max_abs: float
    rms: float
    shape: tuple

    def __str__(self):
        return f"max|res| = {self.max_abs:.6e}  rms = {self.rms:.6e}  grid = {self.shape[0]}x{self.shape[1]}"


def summarize(field: ScalarField, interior: bool = True) -> ResidualSummary:
    v = field.interior() if interior else field.values
    return ResidualSummary(float(np.max(np.abs(v))), float(np.sqrt(np.mean(v * v))),
                           (field.grid.nr, field.grid.nz))


def poisson_residual(state: SteadyState) -> ScalarField:
    """Lap(Phi) - 4 pi G rho."""
    lap = laplacian_axisym(state.phi)
    return lap - 4.0 * math.pi * state.G * state.rho.values


def reduced_density_residual(state: SteadyState) -> ScalarField:
    """h (Lap rho - 2 rho_r / r) + h'/2 |grad rho|^2 - r^2 (S - Phi - H / r^2)."""
    cl = state.closures
    rho = state.rho.values
    h = cl.h(rho)
    if np.any(h < 0):
        raise DomainError("h(rho) < 0 encountered")
    rr, _ = state.grid.mesh
    rr_, rz_ = grad_components(state.rho)
    grad2 = rr_.values ** 2 + rz_.values ** 2
    lhs = h * stokes_operator(state.rho).values + 0.5 * cl.dh(rho) * grad2
    rhs = rr ** 2 * cl.s_gauge(rho) - rr ** 2 * state.phi.values - cl.big_h(rho)
    return state.rho._like(lhs - rhs)


def pressure_at(rho, rho_r, rho_z, phi, r, closures: ClosureSet,
                convention: str = "printed"):
    """Pointwise pressure from density, its gradient and the potential."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown pressure convention {convention!r}")
    rho = np.asarray(rho, dtype=float)
    r = np.asarray(r, dtype=float)
    sign = 1.0 if convention == "printed" else -1.0
    grad2 = np.asarray(rho_r) ** 2 + np.asarray(rho_z) ** 2
    return (rho * (closures.s_gauge(rho) - closures.p_gauge(rho))
            - closures.h(rho) * grad2 / (2.0 * r ** 2)
            - rho * phi
            + sign * closures.rho_f2(rho) / (2.0 * r ** 2))


def pressure_field(state: SteadyState, convention: str = "printed") -> ScalarField:
    rr, _ = state.grid.mesh
    gr, gz = grad_components(state.rho)
    p = pressure_at(state.rho.values, gr.values, gz.values, state.phi.values, rr,
                    state.closures, convention)
    return ScalarField(state.grid, p, "pressure")


def recover_velocity(state: SteadyState):
    """Meridional (u, w) from the density gradient and swirl v = f(rho)/r."""
    rho = state.rho.values
    bad = np.argwhere(rho <= 0)
    if bad.size:
        pts = ", ".join(f"({i},{j})" for i, j in bad[:8])
        more = "" if len(bad) <= 8 else f" and {len(bad) - 8} more"
        raise DomainError(f"velocity recovery needs rho > 0; offending points {pts}{more}")
    rr, _ = state.grid.mesh
    cl = state.closures
    gr, gz = grad_components(state.rho)
    amp = np.sqrt(cl.h(rho) / rho) / rr
    u = ScalarField(state.grid, -amp * gz.values, "velocity")
    w = ScalarField(state.grid, amp * gr.values, "velocity")
    v = ScalarField(state.grid, cl.f(rho) / rr, "velocity")
    return u, w, v


def residual_report(name: str, field: ScalarField) -> str:
    return f"{name}: {summarize(field)}"
