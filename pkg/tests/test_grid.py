import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axistar.errors import DomainError, ShapeError
from axistar.grid import (CylGrid, ScalarField, grad_components, jacobian_bracket,
                          laplacian_axisym, write_field_csv)

G = CylGrid(0.5, 2.0, -1.0, 1.0, 31, 41)


def field(fn, grid=G, quantity="generic"):
    return grid.sample(fn, quantity)


def test_grid_invariants():
    assert G.dr == (2.0 - 0.5) / 30
    assert G.dz == 2.0 / 40
    assert G.r[0] == 0.5 and G.r[-1] == 2.0
    for bad in [(0.0, 1, 0, 1, 10, 10), (1, 0.5, 0, 1, 10, 10), (0.1, 1, 0, 1, 7, 10),
                (0.1, 1, 1, 1, 10, 10)]:
        with pytest.raises(DomainError):
            CylGrid(*bad)
    assert G.refined().nr == 61


def test_field_invariants():
    with pytest.raises(ShapeError):
        ScalarField(G, np.zeros((3, 3)))
    with pytest.raises(DomainError):
        ScalarField(G, np.full((31, 41), np.nan))
    with pytest.raises(DomainError):
        field(lambda r, z: -r, quantity="density")
    with pytest.raises(ValueError):
        field(lambda r, z: r, quantity="colour")


def test_laplacian_polynomials():
    assert np.allclose(laplacian_axisym(field(lambda r, z: r ** 2)).values, 4.0, atol=1e-10)
    assert np.allclose(laplacian_axisym(field(lambda r, z: z ** 2)).values, 2.0, atol=1e-10)


def test_laplacian_log_is_small():
    lap = laplacian_axisym(field(lambda r, z: np.log(r))).values
    assert np.max(np.abs(lap[1:-1, 1:-1])) < 5 * G.dr ** 2 / 0.5 ** 4


def test_laplacian_order():
    errs, hs = [], []
    n = 17
    for _ in range(4):
        g = CylGrid(0.5, 2.0, -1.0, 1.0, n, n)
        rr, zz = g.mesh
        exact = -2 * np.sin(rr) * np.cos(zz) + np.cos(rr) * np.cos(zz) / rr
        err = laplacian_axisym(g.sample(lambda r, z: np.sin(r) * np.cos(z))).values - exact
        errs.append(np.max(np.abs(err)))
        hs.append(g.dr)
        n = 2 * n - 1
    order = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert abs(order - 2.0) < 0.3


def test_jacobian_examples():
    F = field(lambda r, z: np.sin(r * z))
    assert np.all(jacobian_bracket(F, F).values == 0)
    one = jacobian_bracket(field(lambda r, z: r), field(lambda r, z: z)).values
    assert np.allclose(one, 1.0, atol=1e-13)
    rr, _ = G.mesh
    two_r = jacobian_bracket(field(lambda r, z: r ** 2), field(lambda r, z: z)).values
    assert np.allclose(two_r, 2 * rr, atol=1e-12)
    with pytest.raises(ShapeError):
        jacobian_bracket(F, G.refined().sample(lambda r, z: r))


def test_gradient_examples():
    gr, gz = grad_components(field(lambda r, z: 0 * r + 3.0))
    assert np.all(gr.values == 0) and np.all(gz.values == 0)
    gr, gz = grad_components(field(lambda r, z: 3 * r + 2 * z))
    assert np.allclose(gr.values, 3) and np.allclose(gz.values, 2)
    rr, zz = G.mesh
    gr, gz = grad_components(field(lambda r, z: r * z))
    assert np.allclose(gr.values, zz, atol=1e-13) and np.allclose(gz.values, rr, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 3))
def test_jacobian_bilinear_and_antisymmetric(a, b, seed):
    rng = np.random.default_rng(seed)
    F1, F2, Gf = (ScalarField(G, rng.normal(size=(31, 41))) for _ in range(3))
    lhs = jacobian_bracket(a * F1 + b * F2, Gf).values
    rhs = a * jacobian_bracket(F1, Gf).values + b * jacobian_bracket(F2, Gf).values
    assert np.allclose(lhs, rhs, atol=1e-10 * (1 + abs(a) + abs(b)) / G.dr / G.dz)
    assert np.array_equal(jacobian_bracket(F1, Gf).values, -jacobian_bracket(Gf, F1).values)


def test_jacobian_of_composed_stream_function_vanishes():
    errs = []
    for n in (33, 65, 129):
        g = CylGrid(0.5, 2.0, 0.0, 1.0, n, n)
        rho = g.sample(lambda r, z: 1 + r ** 2 * z ** 2)
        psi = ScalarField(g, np.exp(-rho.values))
        errs.append(np.max(np.abs(jacobian_bracket(rho, psi).values)))
    assert errs[2] < errs[1] < errs[0]
    assert errs[1] / errs[2] > 3


def test_csv_layout(tmp_path):
    g = CylGrid(1.0, 2.0, 0.0, 1.0, 8, 9)
    f = g.sample(lambda r, z: r + 10 * z)
    p = tmp_path / "f.csv"
    write_field_csv(f, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "r,z,value"
    assert len(lines) == 1 + 72
    first = [float(v) for v in lines[1].split(",")]
    second = [float(v) for v in lines[2].split(",")]
    assert first[0] == second[0] == 1.0 and second[1] > first[1]


def test_field_is_immutable():
    f = field(lambda r, z: r)
    with pytest.raises(ValueError):
        f.values[0, 0] = 2.0
