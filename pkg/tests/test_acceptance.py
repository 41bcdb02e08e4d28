"""Acceptance criteria 1-10, each at its stated tolerance.

Every check returns (passed, detail).  Under pytest each criterion is one
test and its PASS/FAIL line is echoed in the terminal summary; running this
file directly prints the same lines.
"""

import io
import math
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from axistar.boundary import (BoundaryData, closed_form_curve, closed_form_dz, closed_form_z,
                              fit_constants, integrate_surface_ode)
from axistar.cli import cloud_from_config, preset, presets, run
from axistar.grid import CylGrid
from axistar.perturb import perturbation_residual
from axistar.scenarios import (CloudLinear, bulk_density_min, bulk_pressure_scale,
                               pressure_gap_exponent)
from axistar.separated import (LEFT, RIGHT, BoundaryCondition, bessel_mode, build_exp_problem,
                               build_linear_problem, ode_residual, solve_bvp4)
from axistar.specfun import bessel_jy
from axistar.verify import convergence_study

BOUNDARY_CASES = [("h1_H0", -10.0, 1e-4), ("h1_fconst", -9.0, 1e-4),
                  ("h4rho2_H0", -8.8, 1e-3), ("h4rho2_fconst", -8.8, 1e-3)]


def _quiet(cfg, out):
    return run(cfg, out=out, stream=io.StringIO())


def check_1():
    x = np.geomspace(0.01, 50.0, 51)[1:]
    t = time.perf_counter()
    J0, J1, Y0, Y1 = bessel_jy(x)
    elapsed = time.perf_counter() - t
    err = float(np.max(np.abs(J0 * Y1 - J1 * Y0 + 2 / (math.pi * x))))
    ok = err < 1e-10 and elapsed < 0.1
    return ok, f"max cross-product defect {err:.2e}, {elapsed * 1e3:.2f} ms"


def check_2():
    worst, worst_end, slow = 0.0, 0.0, 0.0
    ok = True
    for case, B, scale in BOUNDARY_CASES:
        t = time.perf_counter()
        d = BoundaryData.from_scale(case, 1.0, B, -1.0, scale)
        c1, c2 = fit_constants(d)
        r0 = 0.01
        z0 = float(closed_form_z(d, c1, c2, r0))
        dz0 = float(closed_form_dz(d, c1, c2, r0))
        num = integrate_surface_ode(d, z0, dz0, r0, 0.99, n=99)
        diff = float(np.max(np.abs(num.z - closed_form_z(d, c1, c2, num.r))))
        e1 = abs(float(closed_form_z(d, c1, c2, 1.0)))
        e0 = abs(float(closed_form_z(d, c1, c2, 1e-6)) - 1.0)
        elapsed = time.perf_counter() - t
        ok &= diff < 1e-6 and e1 < 1e-8 and e0 < 1e-6 and elapsed < 1.0
        worst, worst_end, slow = max(worst, diff), max(worst_end, e1, e0), max(slow, elapsed)
    return ok, (f"4 cases, max |z_closed - z_ode| {worst:.2e}, max endpoint defect "
                f"{worst_end:.2e}, slowest {slow:.3f} s")


def check_3():
    ok = True
    parts = []
    for name in ("fig1", "fig2"):
        cfg = preset(name)
        d = BoundaryData.from_scale(cfg["case"], cfg["A"], cfg["B"], cfg["C"], cfg["scale"])
        c1, c2 = fit_constants(d)
        r = np.linspace(0.05, 0.95, 181)
        slope = closed_form_dz(d, c1, c2, r)
        curve = closed_form_curve(d, c1, c2, np.linspace(1e-6, 1.0, 1001))
        mono = bool(np.all(slope < 0)) and bool(np.all(np.diff(curve.z) < 0))
        ends = abs(curve.z[0] - 1.0) < 1e-6 and abs(curve.z[-1]) < 1e-8
        ok &= mono and ends
        parts.append(f"{name} z' in [{slope.min():.3g}, {slope.max():.3g}]")
    return ok, ", ".join(parts)


def check_4():
    t = time.perf_counter()
    r0, r1, G = 0.05, 1.0, 1.0
    q = lambda x: (x ** 4 + 1.0, 4.0 * x ** 3)
    bcs = (BoundaryCondition(LEFT, 0, q(r0)[0]), BoundaryCondition(LEFT, 1, q(r0)[1]),
           BoundaryCondition(RIGHT, 0, q(r1)[0]), BoundaryCondition(RIGHT, 1, q(r1)[1]))
    forcing = lambda x: 4.0 * math.pi * G * x ** 5 * (x ** 4 + 1.0)
    man = solve_bvp4(build_linear_problem(G, r0, r1, bcs, forcing))
    rr = np.linspace(r0, r1, 201)
    err = float(np.max(np.abs(man.at(rr)[0] - (rr ** 4 + 1.0))))
    sol = solve_bvp4(build_linear_problem(G=1.0))
    elapsed = time.perf_counter() - t
    ok = err < 1e-8 and sol.residual < 1e-6 and elapsed < 5.0
    return ok, (f"quartic error {err:.2e}, star residual {sol.residual:.2e}, "
                f"{elapsed:.2f} s")


def check_5():
    worst = 0.0
    r = np.linspace(0.05, 1.0, 200)
    for lam in (1.0, 2.0, -3.6):
        prob = build_exp_problem(lam, G=0.0, r0=0.05)
        for kind in ("J", "Y"):
            res, scale = ode_residual(prob, r, bessel_mode(lam, r, kind))
            worst = max(worst, float(np.max(np.abs(res) / scale)))
    return worst < 1e-8, f"max scaled residual {worst:.2e} over r J1, r Y1 and 3 lambdas"


def check_6():
    ok = True
    parts = []
    for name in ("fig3", "fig4", "fig6"):
        cfg = preset(name)
        with tempfile.TemporaryDirectory() as tmp:
            res = _quiet(cfg, tmp)
        sc = res.scenario
        p = float(np.max(np.abs(sc.pressure_on_curve(res.curve))))
        ratio = p / bulk_pressure_scale(sc, cfg.box())
        ok &= ratio < 1e-6
        parts.append(f"{name} {ratio:.1e}")
    cfg = preset("fig5")
    k, c, _ = pressure_gap_exponent(lambda G: CloudLinear(cloud_from_config(cfg, G=G)),
                                    Gs=(0.025, 0.05, 0.1))
    ok &= abs(k - 2.0) <= 0.2
    parts.append(f"fig5 exponent {k:.3f} (c = {c:.3g})")
    return ok, "surface/bulk |p|: " + ", ".join(parts)


def check_7():
    t = time.perf_counter()
    cfg = preset("fig3")
    with tempfile.TemporaryDirectory() as tmp:
        sc = _quiet(cfg, tmp).scenario
    box = (cfg["r_min"], cfg["r_max"], cfg["z_min"], cfg["z_max"])
    grids = [CylGrid(*box, n, n) for n in (65, 129, 257)]
    rep = convergence_study(sc.state, grids)
    elapsed = time.perf_counter() - t
    ok = elapsed < 30.0
    parts = []
    for eq, order in rep.orders.items():
        ok &= order == "exact" or order >= 1.5
        parts.append(f"{eq} {order}" if isinstance(order, str) else f"{eq} {order:.2f}")
    ok &= len(rep.orders) == 6
    return ok, "orders: " + ", ".join(parts) + f"; {elapsed:.2f} s"


def check_8():
    cfg = preset("fig5")
    r = np.linspace(cfg["r_min"], cfg["r_max"], 400)
    res0 = perturbation_residual(cloud_from_config(cfg), r, order=0)
    Gs = np.array([0.025, 0.05, 0.1])
    vals = [perturbation_residual(cloud_from_config(cfg, G=G), r, order=1) for G in Gs]
    k = float(np.polyfit(np.log(Gs), np.log(vals), 1)[0])
    ok = res0 < 1e-9 and abs(k - 2.0) <= 0.2
    return ok, f"zeroth order {res0:.2e}, first-order exponent {k:.3f}"


def check_9():
    ok = True
    parts = []
    for cfg in presets():
        if cfg.kind == "boundary-closed-form":
            lo = cfg["A"]                      # density is constant on these surfaces
        else:
            with tempfile.TemporaryDirectory() as tmp:
                sc = _quiet(cfg, tmp).scenario
            lo = bulk_density_min(sc, cfg.box())
        ok &= lo >= 0
        parts.append(f"{cfg.name} {lo:.3g}")
    return ok, "min rho: " + ", ".join(parts)


def check_10():
    same = True
    with tempfile.TemporaryDirectory() as tmp:
        for cfg in presets():
            a, b = Path(tmp) / "a" / cfg.name, Path(tmp) / "b" / cfg.name
            names = sorted(_quiet(cfg, a).files)
            _quiet(cfg, b)
            for n in names:
                same &= (a / n).read_bytes() == (b / n).read_bytes()
    return same, "6 presets, two runs each, CSV bytes " + ("identical" if same else "differ")


CHECKS = {1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5, 6: check_6,
          7: check_7, 8: check_8, 9: check_9, 10: check_10}


def line(n, ok, detail):
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("n", sorted(CHECKS))
def test_criterion(n, acceptance_log):
    ok, detail = CHECKS[n]()
    text = line(n, ok, detail)
    acceptance_log.append(text)
    print(text)
    assert ok, text


if __name__ == "__main__":
    for n in sorted(CHECKS):
        print(line(n, *CHECKS[n]()))
