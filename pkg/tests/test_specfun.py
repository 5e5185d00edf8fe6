import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from splitmoment.arith import kronecker
from splitmoment.errors import DomainError
from splitmoment.specfun import (
    EULER_GAMMA,
    ZETA2,
    V_array,
    V_kernel,
    V_mellin_oracle,
    WeightSpec,
    digamma,
    dirichlet_L_real,
    gamma_factor,
    gamma_factor_dlog0,
    hurwitz_zeta,
    hurwitz_zeta_half,
    mellin_weight,
    mellin_weight_d1,
    regularized_lower_gamma,
    regularized_upper_gamma,
    upper_gamma_array,
)


@pytest.mark.parametrize("a", [0.25, 0.75, 0.5, 1.0])
def test_upper_gamma_at_zero(a):
    assert regularized_upper_gamma(a, 0.0) == 1.0


def test_upper_gamma_negative_x():
    with pytest.raises(DomainError):
        regularized_upper_gamma(0.25, -1.0)


@pytest.mark.parametrize("a", [0.25, 0.75])
def test_upper_gamma_vs_mpmath(a):
    for x in np.geomspace(1e-6, 80, 60):
        ref = float(mpmath.gammainc(a, x, regularized=True))
        assert abs(regularized_upper_gamma(a, x) - ref) <= 1e-12


@pytest.mark.parametrize("a", [0.25, 0.75])
def test_complementary_pair(a):
    for x in np.linspace(0.0, 30.0, 121):
        assert abs(regularized_upper_gamma(a, x) + regularized_lower_gamma(a, x) - 1.0) <= 1e-12


def test_upper_gamma_tail_monotone():
    xs = np.linspace(0, 50, 501)
    v = upper_gamma_array(0.25, xs)
    assert np.all(np.diff(v) <= 0) and v[-1] < 1e-20


@given(st.floats(0.0, 60.0))
@settings(max_examples=200)
def test_array_matches_scalar(x):
    assert upper_gamma_array(0.75, np.array([x]))[0] == pytest.approx(regularized_upper_gamma(0.75, x), abs=1e-15)


def test_V_examples():
    assert V_kernel(1, 0.0) == 1.0
    assert V_kernel(1, 3.0) < 1e-12


@pytest.mark.parametrize("j", [1, -1])
@pytest.mark.parametrize("x", [0.01, 0.1, 0.5, 1.0, 2.0, 5.0])
def test_V_matches_mellin_oracle(j, x):
    assert abs(V_kernel(j, x) - V_mellin_oracle(j, x)) <= 1e-10


def test_oracle_decreasing():
    vals = [V_mellin_oracle(1, x) for x in (0.05, 0.2, 0.6, 1.2, 2.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("j", [1, -1])
def test_V_shape_and_gaussian_bound(j):
    x = np.linspace(0, 6, 1201)
    v = V_array(j, x)
    assert v[0] == 1.0 and np.all(np.diff(v) < 0) and np.all(v[x < 5] > 0)
    # Gamma(c, y) <= y^{c-1} e^{-y} for c <= 1, so V <= (pi x^2)^{c-1} e^{-pi x^2} / Gamma(c)
    c = 0.25 if j == 1 else 0.75
    big = x >= 1
    C = 1.0 / math.gamma(c) * math.pi ** (c - 1)
    assert np.all(v[big] <= C * np.exp(-math.pi * x[big] ** 2 / 2))


def test_V_domain():
    with pytest.raises(DomainError):
        V_kernel(1, -0.1)


def test_gamma_factor_values():
    assert gamma_factor(1, 0.0) == 1.0
    # psi(1/4) = -gamma0 - 3 log 2 - pi/2, psi(3/4) = -gamma0 - 3 log 2 + pi/2
    plus = 0.5 * (-EULER_GAMMA - 3 * math.log(2) - math.pi / 2 - math.log(math.pi))
    minus = 0.5 * (-EULER_GAMMA - 3 * math.log(2) + math.pi / 2 - math.log(math.pi))
    assert gamma_factor_dlog0(1) == pytest.approx(plus, abs=1e-13)
    assert gamma_factor_dlog0(-1) == pytest.approx(minus, abs=1e-13)
    assert round(gamma_factor_dlog0(1), 5) == -2.68609
    # quoted as -1.11525; the closed form gives -1.115295
    assert abs(gamma_factor_dlog0(-1) - (-1.11525)) < 1e-4


@pytest.mark.parametrize("j", [1, -1])
def test_gamma_dlog_finite_difference(j):
    h = 1e-5
    fd = (gamma_factor(j, h) - gamma_factor(j, -h)) / (2 * h)
    assert abs(fd - gamma_factor_dlog0(j)) <= 1e-6


def test_gamma_factor_pole():
    with pytest.raises(DomainError):
        gamma_factor(1, -0.5)


def test_digamma_vs_mpmath():
    for x in (0.01, 0.25, 0.75, 1.0, 3.3, 9.99, 50.0):
        assert digamma(x) == pytest.approx(float(mpmath.digamma(x)), rel=1e-13, abs=1e-13)


def test_hurwitz_examples():
    assert hurwitz_zeta_half(1.0) == pytest.approx(-1.4603545088095868, abs=1e-10)
    # same value with a different number of direct terms
    assert hurwitz_zeta(0.5, 1.0, N=40) == pytest.approx(hurwitz_zeta(0.5, 1.0), abs=1e-12)


@given(st.floats(0.01, 1.0))
def test_hurwitz_recurrence(a):
    assert hurwitz_zeta(0.5, a) - hurwitz_zeta(0.5, a + 1) == pytest.approx(a**-0.5, abs=1e-10)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_hurwitz_duplication(m):
    lhs = sum(hurwitz_zeta_half(r / m) for r in range(1, m + 1))
    assert lhs == pytest.approx(math.sqrt(m) * hurwitz_zeta_half(1.0), abs=1e-9)


def test_hurwitz_vs_mpmath():
    for a in (0.001, 0.1, 0.5, 0.9, 1.0):
        assert hurwitz_zeta_half(a) == pytest.approx(float(mpmath.zeta(0.5, a)), abs=1e-10)
    assert hurwitz_zeta(2.0, 1.0) == pytest.approx(ZETA2, abs=1e-14)


def test_hurwitz_domain():
    with pytest.raises(DomainError):
        hurwitz_zeta_half(1.5)
    with pytest.raises(DomainError):
        hurwitz_zeta(1.0, 0.5)


@pytest.mark.parametrize(
    "D, value",
    [
        (-4, math.pi / 4),
        (-3, math.pi / (3 * math.sqrt(3))),
        (5, 2 * math.log((1 + math.sqrt(5)) / 2) / math.sqrt(5)),
        (8, 2 * math.log(1 + math.sqrt(2)) / math.sqrt(8)),
    ],
)
def test_L1_class_number_formula(D, value):
    assert dirichlet_L_real(1, D) == pytest.approx(value, abs=1e-7)


@pytest.mark.parametrize("D", [5, -4, -3, 8, 13, -8, 12])
def test_L2_bracket_and_mpmath(D):
    v = dirichlet_L_real(2, D)
    assert 1 / ZETA2 < v < ZETA2
    k = abs(D)
    ref = sum(kronecker(D, a) * mpmath.zeta(2, mpmath.mpf(a) / k) for a in range(1, k + 1)) / k**2
    assert v == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.parametrize("D", [4, 1, -12 * 9, 20])
def test_L_rejects_non_fundamental(D):
    with pytest.raises(DomainError):
        dirichlet_L_real(1, D)


def test_weight_mellin():
    w = WeightSpec()
    w1 = mellin_weight(w, 1.0)
    assert w1 > 0
    assert mellin_weight_d1(w) < 0
    assert math.isfinite(mellin_weight(w, -30.0)) and math.isfinite(mellin_weight(w, 30.0))
    x, wt = w.rule()
    assert wt.sum() == pytest.approx(w1, rel=1e-10)


def test_weight_rejects():
    with pytest.raises(DomainError):
        WeightSpec(name="gauss")
    with pytest.raises(DomainError):
        WeightSpec(lo=1.0, hi=0.5)
