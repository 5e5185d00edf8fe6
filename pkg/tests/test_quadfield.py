import pytest
from hypothesis import given, strategies as st

from splitmoment.arith import build_factor_table, jacobi, primes_up_to
from splitmoment.errors import DomainError, VerificationError
from splitmoment.quadfield import (
    IdealFactorization,
    PrimeIdealRep,
    QuadraticField,
    SplittingType,
    enumerate_family_ideals,
    primes_above,
    residue_symbol,
    residue_symbol_ideal,
    sqrt_mod_prime,
    splitting_type,
    verify_symbol_identity,
)

K5 = QuadraticField(5)


@pytest.fixture(scope="module")
def table():
    return build_factor_table(1000)


@pytest.mark.parametrize(
    "p, kind", [(5, SplittingType.RAMIFIED), (11, SplittingType.SPLIT), (3, SplittingType.INERT)]
)
def test_splitting_examples(p, kind):
    assert splitting_type(K5, p) is kind


def test_splitting_rejects_two():
    with pytest.raises(DomainError):
        splitting_type(K5, 2)


@pytest.mark.parametrize("p, roots", [(11, (4, 8)), (19, (5, 15))])
def test_primes_above_examples(p, roots):
    assert tuple(P.root for P in primes_above(K5, p)) == roots


def test_primes_above_nonsplit():
    with pytest.raises(DomainError):
        primes_above(K5, 3)


@pytest.mark.parametrize("d", [5, 13, -3, -1, 2, -5])
def test_roots_are_distinct_and_agree_on_integers(d):
    K = QuadraticField(d)
    for p in primes_up_to(400).tolist()[1:]:
        if K.D % p == 0 or splitting_type(K, p) is not SplittingType.SPLIT:
            continue
        P1, P2 = primes_above(K, p)
        assert P1.root != P2.root
        assert K.minpoly_at(P1.root, p) == 0 == K.minpoly_at(P2.root, p)
        for m in range(1, 40):
            assert residue_symbol(K, (m, 0), P1) == residue_symbol(K, (m, 0), P2) == jacobi(m, p)


def test_residue_symbol_examples():
    P = PrimeIdealRep(11, 4)
    assert residue_symbol(K5, (0, 1), P) == 1
    # omega -> 4, so 4 - omega lies in P
    assert residue_symbol(K5, (-4, 1), P) == 0


def test_residue_symbol_ideal_examples():
    assert residue_symbol_ideal(K5, 7, IdealFactorization(())) == 1
    A = IdealFactorization(((primes_above(K5, 11)[0], 1), (primes_above(K5, 19)[1], 1)))
    assert residue_symbol_ideal(K5, 2, A) == 1


@given(st.integers(-500, 500), st.integers(-500, 500), st.integers(-500, 500), st.integers(-500, 500))
def test_residue_symbol_multiplicative(u1, v1, u2, v2):
    P = primes_above(K5, 59)[0]
    # (u1 + v1 w)(u2 + v2 w) with w^2 = w + 1
    prod = (u1 * u2 + v1 * v2, u1 * v2 + u2 * v1 + v1 * v2)
    a, b = residue_symbol(K5, (u1, v1), P), residue_symbol(K5, (u2, v2), P)
    if a and b:
        assert residue_symbol(K5, prod, P) == a * b


@pytest.mark.parametrize("q, count", [(11, 2), (209, 4), (121, 0), (3, 0), (15, 0), (1, 1)])
def test_family_ideal_counts(table, q, count):
    ideals = enumerate_family_ideals(K5, q, table)
    assert len(ideals) == count
    assert all(A.norm == q for A in ideals)


def test_family_ideals_distinct():
    ideals = enumerate_family_ideals(K5, 11 * 19 * 29, build_factor_table(11 * 19 * 29))
    assert len({tuple(P.root for P, _ in A.primes) for A in ideals}) == 8


def test_verify_symbol_identity_example(table):
    rep = verify_symbol_identity(K5, 50, 300, table)
    assert rep.failures == 0 and rep.checks_run > 0
    assert '"failures": 0' in rep.to_json()


def test_shared_factor_gives_zero(table):
    A = enumerate_family_ideals(K5, 11, table)[0]
    assert residue_symbol_ideal(K5, 22, A) == 0 == jacobi(22, 11)


def test_verify_raises_with_witness(table, monkeypatch):
    import splitmoment.quadfield as qf

    monkeypatch.setattr(qf, "residue_symbol_ideal", lambda K, m, A: 0)
    with pytest.raises(VerificationError) as exc:
        verify_symbol_identity(K5, 5, 20, table)
    assert exc.value.witness is not None


@pytest.mark.parametrize("p", [10007, 10009, 65537, 1000003])
def test_sqrt_mod_prime_tonelli(p):
    for a in (2, 3, 5, 7, 11, 13):
        if pow(a, (p - 1) // 2, p) == 1:
            r = sqrt_mod_prime(a, p)
            assert r * r % p == a


def test_quadratic_field_rejects_bad_d():
    for d in (0, 1, 4, 18):
        with pytest.raises(DomainError):
            QuadraticField(d)
