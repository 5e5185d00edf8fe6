import math

import numpy as np
import pytest

from splitmoment.arith import build_factor_table, jacobi
from splitmoment.checks import field_diagnostic
from splitmoment.errors import AccuracyError, CapacityError
from splitmoment.moment import (
    C_K2_value,
    C_K_logderiv,
    C_K_value,
    compare,
    compute_constants,
    empirical_moment,
    enumerate_family,
    main_term_polynomial,
    nonvanishing_scan,
    predict_bruteforce_M0,
    predict_ksum_M0,
    predicted_main,
    prime_tail_sum,
    printed_polynomial,
)
from splitmoment.quadfield import QuadraticField
from splitmoment.specfun import V_array, WeightSpec

K5 = QuadraticField(5)


@pytest.fixture(scope="module")
def consts():
    return compute_constants(K5)


def test_family_examples():
    fam = enumerate_family(K5, 100)
    assert fam.q.tolist() == [11, 19, 29, 31, 41, 59, 61, 71, 79, 89]
    fam = enumerate_family(K5, 250)
    i = fam.q.tolist().index(209)
    assert fam.omega[i] == 2
    assert len(enumerate_family(K5, 10)) == 0


@pytest.mark.parametrize("d", [5, -1, -3, 13])
def test_family_membership_independent(d):
    K = QuadraticField(d)
    X = 20_000
    fam = enumerate_family(K, X)
    table = build_factor_table(X)
    expected = []
    for q in range(3, X + 1, 2):
        fac = table.factor(q)
        if all(e == 1 and jacobi(K.D % p, p) == 1 for p, e in fac):
            expected.append(q)
    assert fam.q.tolist() == expected
    assert all(fam.omega[i] == len(table.factor(int(q))) for i, q in enumerate(fam.q[:500]))


def test_empty_moment():
    assert empirical_moment(K5, 5.0) == 0.0


def test_engines_agree_on_moment():
    for Q in (300.0, 1000.0):
        a = empirical_moment(K5, Q, engine="afe")
        b = empirical_moment(K5, Q, engine="oracle")
        assert abs(a - b) <= 1e-6 * abs(b)


def test_moment_workers():
    a = empirical_moment(K5, 2e4, workers=1)
    b = empirical_moment(K5, 2e4, workers=3)
    assert a == b


def test_constants_positive(consts):
    for name in ("C_K1", "C_K2", "zetaK2", "C_K_at_1", "w_mellin_1"):
        assert getattr(consts, name) > 0
    assert consts.w_mellin_d1 < 0


def test_constants_values(consts):
    assert consts.C_K1 == pytest.approx(2 * math.log((1 + 5**0.5) / 2) / 5**0.5, rel=1e-12)
    # zeta_K(2) for Q(sqrt 5) = zeta(2) L(2, chi_5) = 2 pi^4 / (75 sqrt 5)
    assert consts.zetaK2 == pytest.approx(2 * math.pi**4 / (75 * 5**0.5), rel=1e-12)


def test_CK2_truncation_consistent():
    P = 20_000
    assert abs(C_K2_value(K5, P) - C_K2_value(K5, 2 * P)) < prime_tail_sum(P, 2.0, 1.0)


def test_CK_derivative_analytic(consts):
    assert consts.C_K_deriv_1 == pytest.approx(consts.C_K_at_1 * C_K_logderiv(K5, 1.0, 100_000), abs=1e-8)
    assert consts.deriv_richardson_gap < 1e-8


def test_CK_kmax_converges():
    a = C_K_value(K5, 1.0, 10_000, k_max=40)
    b = C_K_value(K5, 1.0, 10_000, k_max=80)
    assert a == pytest.approx(b, abs=1e-15)


def test_constants_tail_error():
    with pytest.raises(AccuracyError):
        compute_constants(K5, prime_cutoff=1000, tolerance=1e-6)


def test_polynomial_structure(consts):
    poly = main_term_polynomial(K5, consts)
    C = consts.prefactor
    sq = poly.square_total
    # square pole, both parities: 2 * C * (1/4) C_K(1) w~(1)
    assert sq.slope == pytest.approx(2 * C * 0.25 * consts.C_K_at_1 * consts.w_mellin_1, rel=1e-14)
    diff = poly.square_plus - poly.square_minus
    assert diff.slope == pytest.approx(0.0, abs=1e-25)
    expected = C * 0.5 * consts.C_K_at_1 * consts.w_mellin_1 * (consts.gamma_d0_plus - consts.gamma_d0_minus)
    assert diff.intercept == pytest.approx(expected, rel=1e-12)


def test_predicted_main_slope_from_Q_and_2Q(consts):
    Q = 1e5
    a, poly = predicted_main(K5, Q, consts)
    b, _ = predicted_main(K5, 2 * Q, consts)
    assert (b / (2 * Q) - a / Q) / math.log(2) == pytest.approx(poly.total.slope, rel=1e-9)


def test_predicted_main_positive(consts):
    for Q in (1e3, 1e4, 1e5, 1e6):
        assert predicted_main(K5, Q, consts)[0] > 0


def test_printed_polynomial_audit(consts):
    pp, pm = printed_polynomial(consts)
    poly = main_term_polynomial(K5, consts)
    assert all(math.isfinite(v) for v in (pp.slope, pp.intercept, pm.slope, pm.intercept))
    assert pp.intercept != poly.square_plus.intercept


def test_fk_in_range(consts):
    w = WeightSpec()
    xs, ws = w.rule()
    for k in (1, 3, 10, 30):
        fk = float(np.dot(ws, V_array(1, k * k / np.sqrt(1e4 * xs))))
        assert 0 < fk <= consts.w_mellin_1 * (1 + 1e-12)


def test_bruteforce_matches_ksum(consts):
    brute = predict_bruteforce_M0(K5, 1e4)
    exact = predict_ksum_M0(K5, 1e4, c=consts)
    assert abs(brute / exact - 1) < 1e-4


def test_residue_matches_ksum_at_large_Q(consts):
    Q = 1e8
    residue = Q * main_term_polynomial(K5, consts).square_plus(math.log(Q))
    assert abs(residue / predict_ksum_M0(K5, Q, c=consts) - 1) < 1e-3


def test_bruteforce_cutoff_error():
    with pytest.raises(AccuracyError):
        predict_bruteforce_M0(K5, 1e4, d_max=10, l_norm_max=10, m_max=100)


def test_compare_rows(consts):
    rep = compare(K5, [1e4, 1e3], constants=consts)
    assert [r.Q for r in rep.rows] == [1e3, 1e4]
    assert all(math.isfinite(r.ratio) for r in rep.rows)
    assert rep.rows[1].family_count > rep.rows[0].family_count > 0


def test_compare_capacity(consts):
    with pytest.raises(CapacityError):
        compare(K5, [1e7], constants=consts)


def test_scan_small():
    res = nonvanishing_scan(K5, 100)
    assert res.family_size == 10 and res.nonzero_count == 10
    assert res.min_abs_value > 0 and not res.witnesses


def test_scan_flags_witnesses():
    res = nonvanishing_scan(K5, 1000, threshold=0.5)
    assert len(res.witnesses) == res.family_size - res.nonzero_count > 0
    assert all(abs(v) <= 0.5 for _, v in res.witnesses)


def test_gaussian_field_diagnostic():
    # Q(i): every split prime is 1 mod 4, so the odd-parity half is empty
    # and the square-only predictor misses the second pole family
    rows = field_diagnostic(-1, (1e5,))
    r = rows[0]
    assert abs(r["ratio"] - 1) < abs(r["ratio_square_only"] - 1)
    assert abs(r["ratio"] - 1) < 0.05
