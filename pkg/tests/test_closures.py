import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axistar.closures import (CASES, big_h_from_f, closure_set, f_for_power_law_H,
                              power_law_closure, q_transform)
from axistar.errors import ConfigError, DomainError

RHO = np.geomspace(1e-3, 1e3, 61)


def test_four_cases_exactly():
    assert set(CASES) == {"h1_H0", "h1_fconst", "h4rho2_H0", "h4rho2_fconst"}
    for case in CASES:
        cl = closure_set(case, swirl_const=2.0, f_const=0.5)
        assert np.all(cl.h(RHO) >= 0)
        assert np.all(cl.s_gauge(RHO) == 0) and np.all(cl.p_gauge(RHO) == 0)


def test_unknown_case():
    with pytest.raises(ConfigError):
        closure_set("h2_H0")


def test_h0_cases_have_zero_swirl_potential():
    for case in ("h1_H0", "h4rho2_H0"):
        cl = closure_set(case, swirl_const=3.0)
        assert np.max(np.abs(cl.big_h(RHO))) < 1e-12
        assert np.allclose(cl.rho_f2(RHO), 3.0)


def test_fconst_swirl_potential():
    cl = closure_set("h1_fconst", f_const=0.7)
    assert np.allclose(cl.big_h(RHO), 0.49 / 2)


def test_rho_f2_finite_at_zero_density():
    cl = closure_set("h1_H0", swirl_const=1.5)
    assert cl.rho_f2(np.array([0.0]))[0] == 1.5


@pytest.mark.parametrize("case", CASES)
def test_registered_pairs_reproduce_H(case):
    cl = closure_set(case, swirl_const=2.0, f_const=1.3)
    for rho in RHO:
        fd = big_h_from_f(lambda r: float(cl.f(r)), float(rho))
        assert abs(fd - float(cl.big_h(rho))) < 1e-8 * max(1.0, abs(float(cl.f2(rho))))


def test_derivatives_match_finite_differences():
    for case in CASES:
        cl = closure_set(case, swirl_const=2.0, f_const=1.3)
        r = np.linspace(0.5, 3, 11)
        h = 1e-6
        assert np.allclose((cl.h(r + h) - cl.h(r - h)) / (2 * h), cl.dh(r), atol=1e-6)
        assert np.allclose((cl.f2(r + h) - cl.f2(r - h)) / (2 * h), cl.df2(r), atol=1e-6)


def test_big_h_examples():
    assert big_h_from_f(lambda r: 2.5, 1.7) == pytest.approx(2.5 ** 2 / 2)
    assert abs(big_h_from_f(lambda r: np.sqrt(4.0 / r), 2.0)) < 1e-8
    assert big_h_from_f(lambda r: 0.0, 1.0) == 0.0
    # analytic derivative path
    assert big_h_from_f(lambda r: r, 2.0, fprime=lambda r: 1.0) == pytest.approx(2 + 4)
    with pytest.raises(DomainError):
        big_h_from_f(lambda r: 1.0, 0.0)


def test_power_law_examples():
    assert f_for_power_law_H(1, 2.0) == pytest.approx(2.0)
    assert big_h_from_f(lambda r: f_for_power_law_H(1, r), 2.0) == pytest.approx(4.0, abs=1e-8)
    assert f_for_power_law_H(2, 1.0) == pytest.approx(np.sqrt(2))
    assert big_h_from_f(lambda r: f_for_power_law_H(2, r), 1.0) == pytest.approx(3.0, abs=1e-8)
    assert f_for_power_law_H(3, 1e-12) < 1e-15
    with pytest.raises(DomainError):
        f_for_power_law_H(1, -1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.floats(1e-2, 10.0))
def test_power_law_closure_swirl_potential(n, rho):
    cl = power_law_closure(n)
    assert float(cl.big_h(rho)) == pytest.approx((n + 1) * rho ** n, rel=1e-12)
    fd = big_h_from_f(lambda r: f_for_power_law_H(n, r), rho)
    assert fd == pytest.approx((n + 1) * rho ** n, rel=1e-8)


def test_q_transform_closed_forms_and_quadrature():
    q = q_transform(lambda r: 1.0, 0.5, 3.0)
    assert q(2.0) == pytest.approx(1.5)
    q = q_transform(lambda r: 4 * r * r, 0.5, 3.0)
    assert q(2.0) == pytest.approx(4.0 - 0.25, rel=1e-10)
    q = q_transform(closure_set("h4rho2_H0"), 0.5, 3.0)
    assert q(np.array([2.0]))[0] == pytest.approx(3.75)
    q = q_transform(lambda r: 0.0, 0.5, 3.0)
    assert q(2.0) == 0.0
    with pytest.raises(DomainError):
        q_transform(lambda r: r - 1.0, 0.5, 3.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.0, 2.0))
def test_q_transform_nondecreasing(a, b):
    q = q_transform(lambda r: a * r * r + b, 0.2, 4.0)
    vals = np.array([q(x) for x in np.linspace(0.2, 4.0, 9)])
    assert np.all(np.diff(vals) >= -1e-14)
    assert vals[0] == 0.0


def test_gauges():
    cl = closure_set("h1_H0", 1.0).with_gauges(s_gauge=lambda r: 2 + 0 * np.asarray(r))
    assert np.all(cl.s_gauge(RHO) == 2)
