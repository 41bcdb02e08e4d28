"""Command-line front end: presets, ``key = value`` configs and CSV output.

Usage::

    axistar --preset fig3 --out run/ [--grid 129x129] [--verify]
    axistar --config my.cfg --out run/

Config format
-------------
One ``key = value`` per line.  ``#`` starts a comment.  Keys are
case-sensitive and an unknown key is an error.  ``kind`` selects the
scenario and decides which other keys are allowed:

``boundary-closed-form``
    ``case`` (h1_H0, h1_fconst, h4rho2_H0, h4rho2_fconst), ``A``, ``B``,
    ``C``, ``scale`` (alpha or beta), optional ``z_at_0`` = 1,
    ``z_at_1`` = 0, ``n`` = 1001 samples on [``r_min`` = 1e-6, 1].
    Writes ``boundary.csv``.
``star-linear-z``
    ``D1``, ``D2``, ``C`` (rho f^2 = C^2), optional ``G`` = 1, ``r0`` =
    0.001, ``R_r0`` = 1, ``dR_r0`` = -0.003, ``R_r1`` = 1e-5, ``dR_r1`` =
    -0.015.  Writes ``radial.csv`` and ``surface.csv``.
``star-exp-z``
    ``lambda``, ``C`` (rho f^2 = C), optional ``G`` = 1, ``r0`` = 0.001,
    ``R_r0`` = 1; R, R', R'' vanish at r = 1.
``cloud-linear``
    ``D1``, ``D2``, ``A``, ``B``, ``C`` (rho f^2 = C^2), ``G``, optional
    ``D3`` .. ``D8`` = 0 and ``reading`` (printed, r10, corrected).
``cloud-bessel``
    ``lambda``, ``C1``, ``C2``, ``E``, ``C`` (rho f^2 = C^2), ``G``,
    optional ``C3``, ``C4`` = 0.  C1..C4 multiply r^3 J1, r J1, r^3 Y1,
    r Y1.
``verify``
    ``target`` (a preset name), optional ``levels`` = 3.  Runs a grid
    doubling study of the target's state and writes ``report.csv``.

All kinds except ``boundary-closed-form`` and ``verify`` take the box
``r_min``, ``r_max``, ``z_min``, ``z_max`` and resolution ``nr``, ``nz``
(default 65).  The box is where density positivity is checked and where
``--verify`` evaluates the six original equations.  Surfaces are sampled
on ``n_curve`` uniform radii.  Every kind accepts ``name`` and ``out``.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boundary import (BoundaryData, closed_form_curve, closed_form_dz, fit_constants,
                       integrate_surface_ode)
from .errors import (BvpSingularError, ConfigError, DomainError, FitError,
                     IntegrationError)
from .grid import CylGrid, ScalarField
from .perturb import (R1_READINGS, CloudScenario, best_r1_reading, printed_cloud_operator,
                      r0_bessel_derivs, r0_poly_series, radial_operator)
from .scenarios import (CloudBessel, CloudLinear, StarExp, StarLinear, bulk_density_min,
                        bulk_pressure_scale)
from .separated import (LEFT, RIGHT, BoundaryCondition, build_exp_problem,
                        build_linear_problem, phi_from_R_exp, phi_from_R_linear, solve_bvp4,
                        z_surface_exp, z_surface_linear)
from .verify import convergence_study, full_system_residuals, poisson_report

KINDS = ("boundary-closed-form", "star-linear-z", "star-exp-z", "cloud-linear",
         "cloud-bessel", "verify")
REQUIRED = object()

_COMMON = {"name": (str, "custom"), "out": (str, "out")}
_BOX = {"r_min": (float, REQUIRED), "r_max": (float, REQUIRED), "z_min": (float, REQUIRED),
        "z_max": (float, REQUIRED), "nr": (int, 65), "nz": (int, 65)}

SCHEMAS = {
    "boundary-closed-form": {
        "case": (str, REQUIRED), "A": (float, REQUIRED), "B": (float, REQUIRED),
        "C": (float, REQUIRED), "scale": (float, REQUIRED), "z_at_0": (float, 1.0),
        "z_at_1": (float, 0.0), "n": (int, 1001), "r_min": (float, 1e-6)},
    "star-linear-z": {
        "D1": (float, REQUIRED), "D2": (float, REQUIRED), "C": (float, REQUIRED),
        "G": (float, 1.0), "r0": (float, 1e-3), "R_r0": (float, 1.0),
        "dR_r0": (float, -0.003), "R_r1": (float, 1e-5), "dR_r1": (float, -0.015),
        "n_curve": (int, 2001), **_BOX},
    "star-exp-z": {
        "lambda": (float, REQUIRED), "C": (float, REQUIRED), "G": (float, 1.0),
        "r0": (float, 1e-3), "R_r0": (float, 1.0), "n_curve": (int, 2001), **_BOX},
    "cloud-linear": {
        "D1": (float, REQUIRED), "D2": (float, REQUIRED),
        **{f"D{k}": (float, 0.0) for k in range(3, 9)},
        "A": (float, REQUIRED), "B": (float, REQUIRED), "C": (float, REQUIRED),
        "G": (float, REQUIRED), "reading": (str, "printed"), "n_curve": (int, 400), **_BOX},
    "cloud-bessel": {
        "lambda": (float, REQUIRED), "C1": (float, REQUIRED), "C2": (float, REQUIRED),
        "C3": (float, 0.0), "C4": (float, 0.0), "E": (float, REQUIRED),
        "C": (float, REQUIRED), "G": (float, REQUIRED), "n_curve": (int, 400), **_BOX},
    "verify": {"target": (str, REQUIRED), "levels": (int, 3)},
}


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario: its kind and every key with defaults filled in."""

    kind: str
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        schema = {**_COMMON, **SCHEMAS[self.kind]}
        unknown = sorted(set(self.values) - set(schema))
        if unknown:
            raise ConfigError(f"unknown key(s) for kind {self.kind}: {', '.join(unknown)}")
        full = {}
        for key, (typ, default) in schema.items():
            if key in self.values:
                full[key] = _convert(key, typ, self.values[key])
            elif default is REQUIRED:
                raise ConfigError(f"missing key: {key}")
            else:
                full[key] = default
        object.__setattr__(self, "values", full)

    @property
    def name(self) -> str:
        return self.values["name"]

    def __getitem__(self, key):
        return self.values[key]

    def replace(self, **changes) -> "ScenarioConfig":
        return ScenarioConfig(self.kind, {**self.values, **changes})

    def box(self) -> CylGrid:
        v = self.values
        return CylGrid(v["r_min"], v["r_max"], v["z_min"], v["z_max"], v["nr"], v["nz"])


def _convert(key, typ, raw):
    if isinstance(raw, typ) and not (typ is int and isinstance(raw, bool)):
        return raw
    if typ is float and isinstance(raw, int) and not isinstance(raw, bool):
        return float(raw)
    if not isinstance(raw, str):
        raise ConfigError(f"key {key}: expected {typ.__name__}, got {raw!r}")
    try:
        val = typ(raw)
    except ValueError:
        raise ConfigError(f"key {key}: cannot read {raw!r} as {typ.__name__}") from None
    if typ is float and not math.isfinite(val):
        raise ConfigError(f"key {key}: value must be finite")
    return val


def parse_config(text: str) -> ScenarioConfig:
    """Parse ``key = value`` text into a validated :class:`ScenarioConfig`."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key}")
        raw[key] = value
    if not raw:
        raise ConfigError("empty config: nothing to run")
    if "kind" not in raw:
        raise ConfigError("missing key: kind")
    kind = raw.pop("kind")
    return ScenarioConfig(kind, raw)


def _format(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical text: kind first, then keys in schema order."""
    lines = [f"kind = {cfg.kind}"]
    lines += [f"{k} = {_format(v)}" for k, v in cfg.values.items()]
    return "\n".join(lines) + "\n"


def presets() -> list[ScenarioConfig]:
    """The six figure configurations, in order fig1..fig6."""
    items = [
        ("fig1", "boundary-closed-form", dict(case="h1_H0", A=1.0, B=-10.0, C=-1.0, scale=1e-4)),
        ("fig2", "boundary-closed-form", dict(case="h4rho2_H0", A=1.0, B=-8.8, C=-1.0,
                                              scale=1e-3)),
        ("fig3", "star-linear-z", dict(D1=-254.3, D2=254.3, C=1.0, G=1.0, r_min=0.2,
                                       r_max=0.95, z_min=0.0, z_max=0.9)),
        ("fig4", "star-exp-z", dict(**{"lambda": -3.6}, C=9.658e-3, G=1.0, r_min=0.05,
                                    r_max=0.95, z_min=0.0, z_max=1.0)),
        ("fig5", "cloud-linear", dict(D1=1.0, D2=1.0, A=3.0, B=0.0, C=3.0, G=0.1, r_min=0.2,
                                      r_max=2.0, z_min=0.0, z_max=2.5)),
        ("fig6", "cloud-bessel", dict(**{"lambda": 2.0}, C1=0.001, C2=-0.001, E=10.0, C=1.265,
                                      G=0.1, r_min=0.01, r_max=6.6, z_min=0.0, z_max=4.5)),
    ]
    return [ScenarioConfig(kind, {"name": name, **vals}) for name, kind, vals in items]


def preset(name: str) -> ScenarioConfig:
    for cfg in presets():
        if cfg.name == name:
            return cfg
    names = ", ".join(c.name for c in presets())
    raise ConfigError(f"unknown preset {name!r}; available: {names}")


def _rows_csv(header, cols) -> str:
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


@dataclass
class RunResult:
    """Files (name -> text) and summary lines produced by one scenario."""

    files: dict = field(default_factory=dict)
    summary: list = field(default_factory=list)
    scenario: object = None
    curve: object = None


def _curve_summary(curve) -> list:
    ok = curve.valid
    if not np.any(ok):
        return ["surface: no valid samples"]
    r, z = curve.r[ok], curve.z[ok]
    return [f"surface: {int(ok.sum())}/{ok.size} valid samples, r in [{r.min():.6g}, {r.max():.6g}],"
            f" z in [{z.min():.6g}, {z.max():.6g}]",
            f"endpoints: z({r[0]:.6g}) = {z[0]:.12g}, z({r[-1]:.6g}) = {z[-1]:.12g}"]


def _boundary(cfg: ScenarioConfig) -> RunResult:
    v = cfg.values
    data = BoundaryData.from_scale(v["case"], v["A"], v["B"], v["C"], v["scale"])
    c1, c2 = fit_constants(data, v["z_at_0"], v["z_at_1"])
    r = np.linspace(v["r_min"], 1.0, v["n"])
    curve = closed_form_curve(data, c1, c2, r)
    res = RunResult(curve=curve)
    res.files["boundary.csv"] = curve.csv_text()
    res.summary += [f"case {data.case}: c1 = {c1:.12g}, c2 = {c2:.12g}"] + _curve_summary(curve)
    res.summary.append(f"density on the surface: {data.A:.6g} (constant)")
    return res


def _boundary_check(cfg: ScenarioConfig, res: RunResult) -> None:
    v = cfg.values
    data = BoundaryData.from_scale(v["case"], v["A"], v["B"], v["C"], v["scale"])
    c1, c2 = fit_constants(data, v["z_at_0"], v["z_at_1"])
    r0, r1 = 0.01, 0.99
    z0 = float(closed_form_curve(data, c1, c2, [r0]).z[0])
    dz0 = float(closed_form_dz(data, c1, c2, r0))
    num = integrate_surface_ode(data, z0, dz0, r0, r1, n=99)
    diff = float(np.max(np.abs(num.z - closed_form_curve(data, c1, c2, num.r).z)))
    res.files["report.csv"] = f"check,value\nclosed_vs_integrated_max,{diff:.17g}\n"
    res.summary.append(f"closed form vs integrated surface ODE on [{r0}, {r1}]: max |dz| = {diff:.3e}")


def _bcs_linear(v):
    return (BoundaryCondition(LEFT, 0, v["R_r0"]), BoundaryCondition(LEFT, 1, v["dR_r0"]),
            BoundaryCondition(RIGHT, 0, v["R_r1"]), BoundaryCondition(RIGHT, 1, v["dR_r1"]))


def _bcs_exp(v):
    return (BoundaryCondition(LEFT, 0, v["R_r0"]), BoundaryCondition(RIGHT, 0, 0.0),
            BoundaryCondition(RIGHT, 1, 0.0), BoundaryCondition(RIGHT, 2, 0.0))


def _bvp_summary(sol) -> list:
    return [f"radial BVP: {sol.r.size} nodes, scaled residual {sol.residual:.3e},"
            f" max BC defect {float(np.max(sol.bc_defects)):.3e},"
            f" matching cond {sol.matching_cond:.3e}",
            f"R({sol.r[0]:g}) = {sol.R[0]:.12g}, R({sol.r[-1]:g}) = {sol.R[-1]:.12g}"]


def _finish(cfg, res, scenario, curve):
    res.scenario, res.curve = scenario, curve
    res.files["surface.csv"] = curve.csv_text()
    res.summary += _curve_summary(curve)
    box = cfg.box()
    rho_min = bulk_density_min(scenario, box)
    verdict = "yes" if rho_min >= 0 else "no"
    res.summary.append(f"density >= 0 on the box: {verdict} (min {rho_min:.6g})")
    if np.any(curve.valid):
        p = float(np.max(np.abs(scenario.pressure_on_curve(curve))))
        ratio = p / bulk_pressure_scale(scenario, box)
        res.summary.append(f"max |p| on the surface / max |p| on the box: {ratio:.3e}")
    return res


def _star_linear(cfg: ScenarioConfig) -> RunResult:
    v = cfg.values
    sol = solve_bvp4(build_linear_problem(v["G"], v["r0"], 1.0, _bcs_linear(v)))
    res = RunResult(summary=_bvp_summary(sol))
    res.files["radial.csv"] = _rows_csv(("r", "R", "Rp", "Rpp", "phi"),
                                        (sol.r, sol.R, sol.Rp, sol.Rpp,
                                         phi_from_R_linear(sol, sol.r)))
    sc = StarLinear(sol, v["D1"], v["D2"], v["C"], v["G"])
    r = np.linspace(v["r0"], 1.0, v["n_curve"])
    return _finish(cfg, res, sc, z_surface_linear(sol, v["D1"], v["D2"], v["C"], r=r))


def _star_exp(cfg: ScenarioConfig) -> RunResult:
    v = cfg.values
    lam = v["lambda"]
    sol = solve_bvp4(build_exp_problem(lam, v["G"], v["r0"], 1.0, _bcs_exp(v)))
    res = RunResult(summary=_bvp_summary(sol))
    res.files["radial.csv"] = _rows_csv(("r", "R", "Rp", "Rpp", "phi"),
                                        (sol.r, sol.R, sol.Rp, sol.Rpp,
                                         phi_from_R_exp(sol, lam, sol.r)))
    sc = StarExp(sol, lam, v["C"], v["G"])
    r = np.linspace(v["r0"], 1.0, v["n_curve"])
    return _finish(cfg, res, sc, z_surface_exp(sol, lam, v["C"], r=r))


def cloud_from_config(cfg: ScenarioConfig, G: float | None = None) -> CloudScenario:
    v = cfg.values
    G = v["G"] if G is None else G
    rng = (v["r_min"], v["r_max"])
    zr = (v["z_min"], v["z_max"])
    if cfg.kind == "cloud-linear":
        return CloudScenario(D=tuple(v[f"D{k}"] for k in range(1, 9)), A=v["A"], B=v["B"],
                             swirl_const=v["C"] ** 2, G=G, r_range=rng, z_range=zr)
    if cfg.kind == "cloud-bessel":
        return CloudScenario(lam=v["lambda"], C=(v["C1"], v["C2"], v["C3"], v["C4"]), E=v["E"],
                             swirl_const=v["C"] ** 2, G=G, r_range=rng, z_range=zr)
    raise ConfigError(f"kind {cfg.kind} is not a cloud")


def _cloud_linear_diagnostics(cloud, r, reading) -> list:
    """R0 under both third-derivative sign patterns, and the R1 reading scores."""
    d0 = r0_poly_series(cloud).derivatives(r)
    val, scale = radial_operator(r, d0)
    alt = printed_cloud_operator(r, d0)
    s = max(float(np.max(scale)), 1e-300)
    best, scores = best_r1_reading(cloud, r)
    return [f"R0 residual: -4 r^2 D^3 operator {float(np.max(np.abs(val))) / s:.3e},"
            f" +4 r^2 D^3 operator {float(np.max(np.abs(alt))) / s:.3e}",
            f"R1 reading used: {reading}; smallest first-order residual: {best} ("
            + ", ".join(f"{k} {scores[k]:.3e}" for k in R1_READINGS) + ")"]


def _cloud_linear(cfg: ScenarioConfig) -> RunResult:
    v = cfg.values
    if v["reading"] not in R1_READINGS:
        raise ConfigError(f"reading must be one of {', '.join(R1_READINGS)}")
    sc = CloudLinear(cloud_from_config(cfg), reading=v["reading"])
    r = np.linspace(v["r_min"], v["r_max"], v["n_curve"])
    R, R1, R2 = sc.radial(r)
    res = RunResult(summary=_cloud_linear_diagnostics(sc.cloud, r, v["reading"]))
    res.files["radial.csv"] = _rows_csv(("r", "R", "Rp", "Rpp", "phi"),
                                        (r, R, R1, R2, -(r * R2 - R1) / r ** 3))
    return _finish(cfg, res, sc, sc.curve(r=r))


def _cloud_bessel(cfg: ScenarioConfig) -> RunResult:
    v = cfg.values
    sc = CloudBessel(cloud_from_config(cfg))
    r = np.linspace(v["r_min"], v["r_max"], v["n_curve"])
    R, R1, R2 = r0_bessel_derivs(sc.cloud, r, 2)
    lam = v["lambda"]
    res = RunResult(summary=["zeroth order in G: the first-order correction is neglected"])
    res.files["radial.csv"] = _rows_csv(("r", "R", "Rp", "Rpp", "phi"),
                                        (r, R, R1, R2, -(lam ** 2 * r * R + r * R2 - R1) / r ** 3))
    return _finish(cfg, res, sc, sc.curve(r=r))


_RUNNERS = {"boundary-closed-form": _boundary, "star-linear-z": _star_linear,
            "star-exp-z": _star_exp, "cloud-linear": _cloud_linear,
            "cloud-bessel": _cloud_bessel}


def _report_files(rep, res):
    res.files["report.csv"] = rep.csv_text()
    res.summary += [str(line) for line in rep.lines()]


def _box_report(scenario, box):
    rr, zz = box.mesh
    rho, _, _, phi = scenario.pointwise(rr, zz)
    if np.any(rho <= 0):
        return poisson_report(ScalarField(box, rho), ScalarField(box, phi, "potential"),
                              scenario.G)
    return full_system_residuals(scenario.state(box))


def _verify_kind(cfg: ScenarioConfig, grid: tuple | None) -> RunResult:
    target = preset(cfg["target"])
    if target.kind not in _RUNNERS or target.kind == "boundary-closed-form":
        raise ConfigError(f"target {target.name} has no 2-D state to verify")
    if cfg["levels"] < 3:
        raise ConfigError("levels must be at least 3")
    if grid is not None:
        target = target.replace(nr=grid[0], nz=grid[1])
    base = _RUNNERS[target.kind](target)
    grids = [target.box()]
    for _ in range(cfg["levels"] - 1):
        grids.append(grids[-1].refined())
    rep = convergence_study(base.scenario.state, grids)
    res = RunResult(scenario=base.scenario, curve=base.curve)
    res.summary.append(f"convergence study of {target.name} over {len(grids)} grids")
    for g, level in zip(grids, rep.history):
        res.summary.append(f"  {g.nr}x{g.nz}: " + ", ".join(
            f"{eq} {level.max_abs[eq]:.3e}" for eq in level.max_abs))
    _report_files(rep, res)
    return res


def run(cfg: ScenarioConfig, out: str | Path | None = None, grid: tuple | None = None,
        verify: bool = False, stream=None) -> RunResult:
    """Compute a scenario, then write its CSV files into ``out``.

    Nothing is written unless every computation succeeds.  Returns the
    :class:`RunResult`; errors propagate as exceptions.
    """
    stream = sys.stdout if stream is None else stream
    if cfg.kind == "verify":
        res = _verify_kind(cfg, grid)
    else:
        if grid is not None:
            if "nr" not in cfg.values:
                raise ConfigError(f"--grid does not apply to kind {cfg.kind}")
            cfg = cfg.replace(nr=grid[0], nz=grid[1])
        res = _RUNNERS[cfg.kind](cfg)
        if verify:
            if cfg.kind == "boundary-closed-form":
                _boundary_check(cfg, res)
            else:
                _report_files(_box_report(res.scenario, cfg.box()), res)
    outdir = Path(cfg["out"] if out is None else out)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, text in res.files.items():
        (outdir / name).write_text(text)
    print(f"[{cfg.name}] kind {cfg.kind}", file=stream)
    for line in res.summary:
        print(f"  {line}", file=stream)
    print(f"  wrote {', '.join(sorted(res.files))} to {outdir}", file=stream)
    return res


def _parse_grid(text: str) -> tuple:
    try:
        nr, nz = (int(s) for s in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"--grid expects <nr>x<nz>, got {text!r}") from None
    return nr, nz


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="axistar",
        description="Reproduce figure data for axisymmetric stratified self-gravitating "
                    "equilibria and verify them against the full equations.")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", help="named configuration (fig1 .. fig6)")
    src.add_argument("--config", help="path to a key = value config file")
    p.add_argument("--out", help="output directory (default: the config's 'out' key)")
    p.add_argument("--grid", help="override the verification grid as <nr>x<nz>")
    p.add_argument("--verify", action="store_true",
                   help="append a residual report of the six original equations")
    p.add_argument("--list-presets", action="store_true", help="print the presets and exit")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        for cfg in presets():
            print(f"# {cfg.name}\n{serialize_config(cfg)}")
        return 0
    try:
        if args.preset:
            cfg = preset(args.preset)
        elif args.config:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
            cfg = parse_config(text)
        else:
            raise ConfigError("give --preset or --config")
        grid = _parse_grid(args.grid) if args.grid else None
        t0 = time.perf_counter()
        run(cfg, args.out, grid, args.verify)
        print(f"  elapsed {time.perf_counter() - t0:.2f} s")
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except (FitError, IntegrationError, BvpSingularError, DomainError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
