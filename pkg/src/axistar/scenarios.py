"""Assembled scenarios: a radial solution plus its z-profile and closures.

Each scenario exposes the same small surface:

* ``pointwise(r, z)`` returns (rho, rho_r, rho_z, Phi) from analytic or
  solver-interpolated radial data
* ``state(grid)`` samples (rho, Phi) into a :class:`SteadyState`
* ``curve()`` returns the free-surface :class:`BoundaryCurve`
* ``density(r, z)`` for positivity checks
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryCurve
from .closures import ClosureSet, closure_set
from .grid import CylGrid, ScalarField
from .perturb import (CloudScenario, cloud_boundary_bessel, cloud_boundary_linear,
                      r0_bessel_derivs, r0_poly_series, r1_series)
from .reduced import SteadyState, pressure_at
from .separated import Bvp4Solution, z_surface_exp, z_surface_linear


def _state(grid: CylGrid, rho, phi, closures, G) -> SteadyState:
    return SteadyState(ScalarField(grid, rho, "density"), ScalarField(grid, phi, "potential"),
                       closures, G)


class _Scenario:
    closures: ClosureSet
    G: float

    def pointwise(self, r, z):
        raise NotImplementedError

    def density(self, r, z):
        return self.pointwise(r, z)[0]

    def state(self, grid: CylGrid) -> SteadyState:
        rr, zz = grid.mesh
        rho, _, _, phi = self.pointwise(rr, zz)
        return _state(grid, rho, phi, self.closures, self.G)

    def pressure_on_curve(self, curve: BoundaryCurve, convention: str = "printed"):
        r = curve.r[curve.valid]
        z = curve.z[curve.valid]
        rho, rho_r, rho_z, phi = self.pointwise(r, z)
        return pressure_at(rho, rho_r, rho_z, phi, r, self.closures, convention)

    def pressure_terms_on_curve(self, curve: BoundaryCurve):
        """Magnitudes of the individual pressure terms along the curve."""
        r = curve.r[curve.valid]
        z = curve.z[curve.valid]
        rho, rho_r, rho_z, phi = self.pointwise(r, z)
        cl = self.closures
        return np.array([cl.h(rho) * (rho_r ** 2 + rho_z ** 2) / (2 * r ** 2),
                         np.abs(rho * phi), np.abs(cl.rho_f2(rho)) / (2 * r ** 2)])


@dataclass(frozen=True, eq=False)
class StarLinear(_Scenario):
    """rho = R(r) (D1 z + D2), Phi = phi(r) (D1 z + D2), rho f^2 = C^2."""

    solution: Bvp4Solution
    D1: float
    D2: float
    C: float
    G: float = 1.0

    @property
    def closures(self):
        return closure_set("h1_H0", swirl_const=self.C ** 2)

    def pointwise(self, r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        R, R1, R2, _ = self.solution.at(r)
        Z = self.D1 * z + self.D2
        phi = -(r * R2 - R1) / r ** 3
        return R * Z, R1 * Z, self.D1 * R + 0 * z, phi * Z

    def curve(self, convention: str = "printed") -> BoundaryCurve:
        return z_surface_linear(self.solution, self.D1, self.D2, self.C,
                                convention=convention)


@dataclass(frozen=True, eq=False)
class StarExp(_Scenario):
    """rho = R(r) exp(l z), Phi = phi(r) exp(l z), rho f^2 = C."""

    solution: Bvp4Solution
    lam: float
    C: float
    G: float = 1.0

    @property
    def closures(self):
        return closure_set("h1_H0", swirl_const=self.C)

    def pointwise(self, r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        R, R1, R2, _ = self.solution.at(r)
        w = np.exp(self.lam * z)
        phi = -(self.lam ** 2 * r * R + r * R2 - R1) / r ** 3
        return R * w, R1 * w, self.lam * R * w, phi * w

    def curve(self, convention: str = "printed") -> BoundaryCurve:
        return z_surface_exp(self.solution, self.lam, self.C, convention=convention)


@dataclass(frozen=True, eq=False)
class CloudLinear(_Scenario):
    """rho = (R0 + G R1)(A z + B), Phi from the reduced density equation."""

    cloud: CloudScenario
    reading: str = "printed"
    include_axial_gradient: bool = False

    @property
    def G(self):
        return self.cloud.G

    @property
    def closures(self):
        return closure_set("h1_H0", swirl_const=self.cloud.swirl_const)

    def radial(self, r):
        d0 = r0_poly_series(self.cloud).derivatives(r, 2)
        d1 = r1_series(self.cloud, self.reading).derivatives(r, 2)
        return tuple(a + self.cloud.G * b for a, b in zip(d0, d1))

    def pointwise(self, r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        R, R1, R2 = self.radial(r)
        s = self.cloud
        Z = s.A * z + s.B
        phi = -(r * R2 - R1) / r ** 3
        return R * Z, R1 * Z, s.A * R + 0 * z, phi * Z

    def curve(self, r=None, n: int = 400) -> BoundaryCurve:
        return cloud_boundary_linear(self.cloud, r=r, n=n, reading=self.reading,
                                     include_axial_gradient=self.include_axial_gradient)


@dataclass(frozen=True, eq=False)
class CloudBessel(_Scenario):
    """rho = R0(r) E exp(l z) at zeroth order in G."""

    cloud: CloudScenario

    @property
    def G(self):
        return self.cloud.G

    @property
    def closures(self):
        return closure_set("h1_H0", swirl_const=self.cloud.swirl_const)

    def pointwise(self, r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        s = self.cloud
        R, R1, R2 = r0_bessel_derivs(s, r, 2)
        w = s.E * np.exp(s.lam * z)
        phi = -(s.lam ** 2 * r * R + r * R2 - R1) / r ** 3
        return R * w, R1 * w, s.lam * R * w, phi * w

    def curve(self, r=None, n: int = 400, convention: str = "printed") -> BoundaryCurve:
        return cloud_boundary_bessel(self.cloud, r=r, n=n, convention=convention)


def bulk_pressure_scale(scenario: _Scenario, grid: CylGrid, convention: str = "printed") -> float:
    """max |p| over a grid, from analytic gradients."""
    rr, zz = grid.mesh
    rho, rho_r, rho_z, phi = scenario.pointwise(rr, zz)
    p = pressure_at(rho, rho_r, rho_z, phi, rr, scenario.closures, convention)
    return float(np.max(np.abs(p)))


def bulk_density_min(scenario: _Scenario, grid: CylGrid) -> float:
    rr, zz = grid.mesh
    return float(np.min(scenario.density(rr, zz)))


def pressure_gap_exponent(make, Gs=(0.025, 0.05, 0.1)):
    """Fit max|p| on the curve ~ c G^k over several couplings.

    ``make(G)`` returns a scenario.  Returns (k, c, values).
    """
    vals = []
    for G in Gs:
        sc = make(G)
        vals.append(float(np.max(np.abs(sc.pressure_on_curve(sc.curve())))))
    k, logc = np.polyfit(np.log(Gs), np.log(np.maximum(vals, 1e-300)), 1)
    return float(k), float(math.exp(logc)), vals
