import math

import numpy as np
import pytest
from scipy.optimize import brentq

from axistar.closures import closure_set
from axistar.errors import DomainError, ShapeError
from axistar.grid import CylGrid, ScalarField, d1, grad_components, stokes_operator
from axistar.reduced import (SteadyState, poisson_residual, pressure_at, pressure_field,
                             recover_velocity, reduced_density_residual, residual_report,
                             summarize)

G = CylGrid(0.5, 2.0, 0.0, 1.0, 41, 41)
H1 = closure_set("h1_H0")


def state(rho_fn, phi_fn, closures=H1, Gc=1.0, grid=G):
    return SteadyState(grid.sample(rho_fn, "density"), grid.sample(phi_fn, "potential"),
                       closures, Gc)


def test_state_invariants():
    with pytest.raises(ShapeError):
        SteadyState(G.sample(lambda r, z: 1 + r, "density"),
                    G.refined().sample(lambda r, z: r, "potential"), H1)
    with pytest.raises(DomainError):
        SteadyState(ScalarField(G, -np.ones((41, 41))), G.sample(lambda r, z: r), H1)
    assert state(lambda r, z: 0 * r + 2, lambda r, z: r).exceptional()
    assert not state(lambda r, z: 1 + r * z, lambda r, z: r).exceptional()


def test_poisson_vacuum_log():
    s = state(lambda r, z: 0 * r, lambda r, z: np.log(r))
    assert summarize(poisson_residual(s)).max_abs < 5 * G.dr ** 2 / 0.5 ** 4


def test_poisson_uniform_exact():
    Gc = 0.7
    s = state(lambda r, z: 0 * r + 1 / (math.pi * Gc), lambda r, z: r ** 2, Gc=Gc)
    assert summarize(poisson_residual(s)).max_abs < 1e-10


def test_reduced_density_h1_form():
    rho = lambda r, z: 1 + r ** 2 * z + np.sin(z)
    phi = lambda r, z: np.cos(r) * z
    s = state(rho, phi)
    res = reduced_density_residual(s).values
    rr, zz = G.mesh
    expected = stokes_operator(s.rho).values + rr ** 2 * phi(rr, zz)
    assert np.allclose(res, expected, atol=1e-12)


@pytest.mark.parametrize("case", ["h1_H0", "h4rho2_H0", "h1_fconst", "h4rho2_fconst"])
def test_reduced_density_algebraic_inversion(case):
    cl = closure_set(case, swirl_const=0.4, f_const=0.9)
    rho_s = G.sample(lambda r, z: 1 + r ** 2 * z ** 2, "density")
    rho = rho_s.values
    rr, _ = G.mesh
    gr, gz = grad_components(rho_s)
    phi = -(cl.h(rho) * stokes_operator(rho_s).values
            + 0.5 * cl.dh(rho) * (gr.values ** 2 + gz.values ** 2)) / rr ** 2 - cl.big_h(rho) / rr ** 2
    s = SteadyState(rho_s, ScalarField(G, phi, "potential"), cl)
    res = reduced_density_residual(s).values
    assert np.max(np.abs(res)) < 1e-11 * np.max(np.abs(rr ** 2 * phi))


def test_reduced_density_negative_h():
    cl = closure_set("h1_H0")
    from dataclasses import replace
    bad = replace(cl, h=lambda rho: -np.ones_like(np.asarray(rho, float)))
    with pytest.raises(DomainError):
        reduced_density_residual(state(lambda r, z: 1 + r, lambda r, z: r, closures=bad))


def test_pressure_uniform_density_with_swirl():
    c, A = 0.8, 2.5
    s = state(lambda r, z: 0 * r + A, lambda r, z: r * z, closures=closure_set("h1_H0", c))
    rr, zz = G.mesh
    assert np.allclose(pressure_field(s).values, -A * rr * zz + c / (2 * rr ** 2), atol=1e-12)


def test_pressure_hand_example():
    s = state(lambda r, z: r ** 2 * z, lambda r, z: 0 * r, closures=closure_set("h1_H0", 0.0))
    rr, zz = G.mesh
    assert np.allclose(pressure_field(s).values, -2 * zz ** 2 - rr ** 2 / 2, atol=1e-11)


def test_pressure_conventions_differ_only_in_swirl_sign():
    cl = closure_set("h1_H0", 0.3)
    args = (np.array([1.2]), np.array([0.3]), np.array([-0.4]), np.array([0.7]), np.array([0.9]))
    p1 = pressure_at(*args, cl, "printed")
    p2 = pressure_at(*args, cl, "momentum")
    assert p1 - p2 == pytest.approx(0.3 / 0.81)
    with pytest.raises(ValueError):
        pressure_at(*args, cl, "other")


def test_pressure_matches_printed_h1_form():
    c = 0.6
    rho = lambda r, z: 1 + r * z ** 2
    phi = lambda r, z: np.sin(r + z)
    s = state(rho, phi, closures=closure_set("h1_H0", c))
    rr, zz = G.mesh
    rv = rho(rr, zz)
    rho_r, rho_z = zz ** 2, 2 * rr * zz
    expected = -(rho_r ** 2 + rho_z ** 2) / (2 * rr ** 2) - rv * (phi(rr, zz) - c / rv / (2 * rr ** 2))
    got = pressure_field(s).values
    assert np.max(np.abs(got - expected)[1:-1, 1:-1]) < 1e-10


def test_gauge_shift_moves_surface_by_density_scale():
    k, c = 0.3, 5.0
    cl = closure_set("h1_H0", 0.0)
    shifted = cl.with_gauges(s_gauge=lambda rho: k + 0 * np.asarray(rho, float))

    def p(z, closures):
        rho = 1 - z
        return float(pressure_at(rho, 0.0, -1.0, -c, 1.0, closures))

    z0 = brentq(p, 0, 1, args=(cl,))
    z1 = brentq(p, 0, 1, args=(shifted,))
    assert abs(z1 - z0) < (1 - z0) * k
    assert p(0.2, shifted) - p(0.2, cl) == pytest.approx((1 - 0.2) * k)


def test_velocity_examples():
    s = state(lambda r, z: r ** 2, lambda r, z: 0 * r)
    u, w, v = recover_velocity(s)
    assert np.max(np.abs(u.values)) < 1e-12 * np.max(np.abs(w.values))
    g = CylGrid(0.5, 1.5, 0.0, 1.0, 21, 11)
    s = state(lambda r, z: r ** 2, lambda r, z: 0 * r, grid=g)
    _, w, _ = recover_velocity(s)
    assert w.values[10, 5] == pytest.approx(2.0)
    s = state(lambda r, z: 1 + r, lambda r, z: 0 * r, closures=closure_set("h1_H0", 4.0))
    _, _, v = recover_velocity(s)
    rr, _ = G.mesh
    assert np.allclose(v.values, np.sqrt(4.0 / (1 + rr)) / rr)


def test_velocity_rejects_vacuum_points():
    s = state(lambda r, z: (z - 0.5) ** 2, lambda r, z: 0 * r)
    with pytest.raises(DomainError, match="offending points"):
        recover_velocity(s)


def _orders(fn):
    hs, errs = [], []
    for n in (33, 65, 129):
        g = CylGrid(0.5, 2.0, 0.0, 1.0, n, n)
        s = state(lambda r, z: 1 + r ** 2 * z ** 2 + np.sin(r * z), lambda r, z: 0 * r, grid=g)
        u, w, _ = recover_velocity(s)
        errs.append(fn(g, s, u.values, w.values))
        hs.append(g.dr)
    return np.polyfit(np.log(hs), np.log(errs), 1)[0]


def test_continuity_order():
    def cont(g, s, u, w):
        rr, _ = g.mesh
        return np.max(np.abs((d1(rr * u, g.dr, 0) / rr + d1(w, g.dz, 1))[2:-2, 2:-2]))
    assert _orders(cont) >= 1.5


def test_advection_vanishes():
    def adv(g, s, u, w):
        rho = s.rho.values
        return np.max(np.abs(u * d1(rho, g.dr, 0) + w * d1(rho, g.dz, 1)))
    # identical discrete gradients make advection cancel to round-off
    s = state(lambda r, z: 1 + r ** 2 * z ** 2, lambda r, z: 0 * r)
    u, w, _ = recover_velocity(s)
    assert adv(G, s, u.values, w.values) < 1e-12


def test_text_report():
    s = state(lambda r, z: 0 * r, lambda r, z: r ** 2)
    line = residual_report("poisson", poisson_residual(s))
    assert line.startswith("poisson: max|res| =") and "41x41" in line
