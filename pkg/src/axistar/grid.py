"""Uniform axisymmetric (r, z) grids, sampled fields and FD operators.

All operators are second order: central differences in the interior and
one-sided three/four-point stencils on the boundary ring.  Arrays are laid
out ``values[i, j]`` with ``i`` indexing r and ``j`` indexing z.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DomainError, ShapeError

QUANTITIES = ("density", "potential", "pressure", "stream", "velocity", "generic")


@dataclass(frozen=True)
class CylGrid:
    r_min: float
    r_max: float
    z_min: float
    z_max: float
    nr: int
    nz: int

    def __post_init__(self):
        if not self.r_min > 0:
            raise DomainError("r_min must be > 0 to keep clear of the axis")
        if not self.r_max > self.r_min or not self.z_max > self.z_min:
            raise DomainError("grid bounds must satisfy max > min")
        if self.nr < 8 or self.nz < 8:
            raise DomainError("need at least 8 points per direction")

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / (self.nr - 1)

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / (self.nz - 1)

    @cached_property
    def r(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.nr)

    @cached_property
    def z(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.nz)

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.r, self.z, indexing="ij")

    def refined(self) -> "CylGrid":
        """Same box with the spacing halved in both directions."""
        return CylGrid(self.r_min, self.r_max, self.z_min, self.z_max,
                       2 * self.nr - 1, 2 * self.nz - 1)

    def sample(self, fn, quantity: str = "generic") -> "ScalarField":
        rr, zz = self.mesh
        return ScalarField(self, np.broadcast_to(fn(rr, zz), rr.shape).astype(float), quantity)


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: CylGrid
    values: np.ndarray
    quantity: str = "generic"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.nr, self.grid.nz):
            raise ShapeError(f"values shape {vals.shape} does not match grid "
                             f"({self.grid.nr}, {self.grid.nz})")
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity tag {self.quantity!r}")
        if not np.all(np.isfinite(vals)):
            raise DomainError(f"{self.quantity} field has non-finite values")
        if self.quantity == "density" and np.any(vals < 0):
            raise DomainError("density field must be nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def _like(self, values, quantity="generic") -> "ScalarField":
        return ScalarField(self.grid, values, quantity)

    def __add__(self, other):
        return self._like(self.values + _vals(other, self.grid))

    def __sub__(self, other):
        return self._like(self.values - _vals(other, self.grid))

    def __mul__(self, other):
        return self._like(self.values * _vals(other, self.grid))

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.values)

    def interior(self) -> np.ndarray:
        return self.values[1:-1, 1:-1]

    def to_csv(self, path) -> None:
        write_field_csv(self, path)


def _vals(other, grid):
    if isinstance(other, ScalarField):
        if other.grid != grid:
            raise ShapeError("fields live on different grids")
        return other.values
    return other


def _check_same(*fields: ScalarField) -> CylGrid:
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise ShapeError("fields live on different grids")
    return g


def d1(a: np.ndarray, h: float, axis: int) -> np.ndarray:
    return np.gradient(a, h, axis=axis, edge_order=2)


def d2(a: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Compact second derivative, one-sided four-point stencil at the edges."""
    a = np.moveaxis(np.asarray(a, dtype=float), axis, 0)
    out = np.empty_like(a)
    out[1:-1] = (a[2:] - 2.0 * a[1:-1] + a[:-2]) / h ** 2
    out[0] = (2.0 * a[0] - 5.0 * a[1] + 4.0 * a[2] - a[3]) / h ** 2
    out[-1] = (2.0 * a[-1] - 5.0 * a[-2] + 4.0 * a[-3] - a[-4]) / h ** 2
    return np.moveaxis(out, 0, axis)


def grad_components(field: ScalarField) -> tuple[ScalarField, ScalarField]:
    g = field.grid
    return (field._like(d1(field.values, g.dr, 0)),
            field._like(d1(field.values, g.dz, 1)))


def laplacian_axisym(field: ScalarField) -> ScalarField:
    """F_rr + F_zz + F_r / r."""
    g = field.grid
    rr, _ = g.mesh
    v = field.values
    return field._like(d2(v, g.dr, 0) + d2(v, g.dz, 1) + d1(v, g.dr, 0) / rr)


def stokes_operator(field: ScalarField) -> ScalarField:
    """F_rr + F_zz - F_r / r (the Laplacian minus 2 F_r / r)."""
    g = field.grid
    rr, _ = g.mesh
    v = field.values
    return field._like(d2(v, g.dr, 0) + d2(v, g.dz, 1) - d1(v, g.dr, 0) / rr)


def jacobian_bracket(F: ScalarField, G: ScalarField) -> ScalarField:
    """J{F, G} = F_r G_z - F_z G_r."""
    _check_same(F, G)
    Fr, Fz = grad_components(F)
    Gr, Gz = grad_components(G)
    return F._like(Fr.values * Gz.values - Fz.values * Gr.values)


def write_field_csv(field: ScalarField, path) -> None:
    """Columnar dump ``r,z,value``, row-major in r then z."""
    rr, zz = field.grid.mesh
    lines = ["r,z,value"]
    for a, b, c in zip(rr.ravel(), zz.ravel(), field.values.ravel()):
        lines.append(f"{a:.17g},{b:.17g},{c:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")
