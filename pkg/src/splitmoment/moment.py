"""Weighted first moment over the split-prime family, and its predicted main term.

The empirical side sums ``2^omega(q) L(1/2, chi_q) w(q/Q)`` over odd
squarefree ``q`` whose prime factors all split in ``K``.

The predicted side is ``Q P_K(log Q)`` with ``P_K`` linear. It is assembled
from residues at ``s = 0`` of

    Q^{s/2} * X^{-s} * C_K(1 + 2s) zeta(1 + 2s) w~(1 + s/2) gamma_j(s) / s

(a double pole), one for each parity ``j`` and each pole family of the
ideal-sum L-function:

* ``square`` -- ``m`` a perfect square (``X = 1``, weight 1);
* ``disc`` -- ``m = |d| k^2`` with ``Q(sqrt d) = K`` (``X = |d|``, weight
  ``|d|^{-1/2}``). Here ``(m / N A)`` coincides with ``chi_{D_K}`` on norms of
  family ideals, which is trivial, so this L-function is ``zeta_K`` up to
  finitely many Euler factors too. For real ``K`` it enters both parities
  with a plus sign; for imaginary ``K`` it comes from the ``chi(-1)``-twisted
  half of the parity projector and enters the odd parity with a minus sign.

:func:`predict_bruteforce_M0` evaluates the square-pole contribution of the
even parity directly as a truncated triple sum, independently of the
residue calculus.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .arith import FactorTable, build_factor_table, kronecker, primes_up_to
from .errors import AccuracyError, CapacityError, DomainError
from .lcentral import AFEConfig, LValueCache, central_values
from .quadfield import QuadraticField, prime_norms
from .specfun import (
    EULER_GAMMA,
    ZETA2,
    V_array,
    WeightSpec,
    dirichlet_L_real,
    gamma_factor_dlog0,
    mellin_weight,
    mellin_weight_d1,
)
from .summation import neumaier_sum

__all__ = [
    "DEFAULT_CAPACITY",
    "FamilySlice",
    "PredictorConstants",
    "LinearPoly",
    "MainTermPolynomial",
    "MomentRow",
    "MomentReport",
    "ScanResult",
    "enumerate_family",
    "family_weights",
    "empirical_moment",
    "compute_constants",
    "C_K_value",
    "C_K_logderiv",
    "C_K2_value",
    "prime_tail_sum",
    "main_term_polynomial",
    "predicted_main",
    "printed_polynomial",
    "predict_bruteforce_M0",
    "predict_ksum_M0",
    "compare",
    "nonvanishing_scan",
]

DEFAULT_CAPACITY = 1 << 21


# ---------------------------------------------------------------------------
# family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilySlice:
    field_d: int
    X: int
    q: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)

    def __len__(self):
        return int(self.q.shape[0])


def _split_mask(K: QuadraticField, primes: np.ndarray) -> np.ndarray:
    return np.array([p != 2 and kronecker(K.D, int(p)) == 1 for p in primes], dtype=bool)


def enumerate_family(K: QuadraticField, X: int, table: FactorTable | None = None) -> FamilySlice:
    """Odd squarefree ``1 < q <= X`` all of whose prime factors split in ``K``, ascending."""
    if table is not None and X > table.limit:
        raise CapacityError(f"X={X} exceeds factor table limit {table.limit}")
    if X < 3:
        return FamilySlice(K.d, X, np.zeros(0, np.int64), np.zeros(0, np.int8))
    primes = table.primes() if table is not None else primes_up_to(X)
    primes = primes[primes <= X]
    split = _split_mask(K, primes)
    bad = np.zeros(X + 1, dtype=bool)
    bad[0::2] = True
    bad[1] = True
    omega = np.zeros(X + 1, dtype=np.int8)
    for p, ok in zip(primes.tolist(), split.tolist()):
        if ok:
            omega[p::p] += 1
            if p * p <= X:
                bad[p * p :: p * p] = True
        else:
            bad[p::p] = True
    q = np.flatnonzero(~bad).astype(np.int64)
    return FamilySlice(K.d, X, q, omega[q])


def family_weights(fam: FamilySlice, Q: float, w: WeightSpec):
    """Members with ``w(q/Q) != 0``, with their ``2^omega(q)`` and weight values."""
    inside = (fam.q > w.lo * Q) & (fam.q < w.hi * Q)
    q = fam.q[inside]
    wq = w(q / Q)
    keep = wq > 0
    return q[keep], np.ldexp(1.0, fam.omega[inside][keep].astype(np.int64)), wq[keep]


def empirical_moment(
    K: QuadraticField,
    Q: float,
    w: WeightSpec = WeightSpec(),
    engine: str = "afe",
    cache: LValueCache | None = None,
    cfg: AFEConfig = AFEConfig(),
    workers: int = 1,
    family: FamilySlice | None = None,
) -> float:
    """``sum 2^omega(q) L(1/2, chi_q) w(q/Q)`` over the family, reduced in ascending ``q``."""
    X = int(math.floor(w.hi * Q))
    if X > DEFAULT_CAPACITY * 4:
        raise CapacityError(f"Q={Q} exceeds family capacity")
    fam = family if family is not None and family.X >= X else enumerate_family(K, max(X, 3))
    q, weight2, wq = family_weights(fam, Q, w)
    vals = _values(q, engine, cfg, workers, cache)
    return neumaier_sum(weight2 * vals * wq)


def _values(q, engine, cfg, workers, cache):
    if cache is None:
        return central_values(q, engine, cfg, workers)
    vals = np.empty(q.shape[0])
    missing = []
    for i, qq in enumerate(q.tolist()):
        v = cache.get(qq, engine)
        if v is None:
            missing.append(i)
        else:
            vals[i] = v
    if missing:
        idx = np.array(missing)
        fresh = central_values(q[idx], engine, cfg, workers)
        vals[idx] = fresh
        tol = cfg.eps_tail if engine == "afe" else 1e-10
        for qq, v in zip(q[idx].tolist(), fresh.tolist()):
            cache.put(qq, v, tol, engine)
    return vals


# ---------------------------------------------------------------------------
# Euler-product constants
# ---------------------------------------------------------------------------


def _local_tables(K: QuadraticField, P: int):
    primes = primes_up_to(P)
    good = (primes != 2) & (K.D % primes != 0)
    primes = primes[good]
    kr = np.array([kronecker(K.D, int(p)) for p in primes])
    pf = primes.astype(np.float64)
    # g_p = prod_{P | p} (1 + 1/N P)^{-1}
    g = np.where(kr == 1, (1.0 + 1.0 / pf) ** -2, 1.0 / (1.0 + 1.0 / pf**2))
    one_minus_h = 1.0 - g / (1.0 - g / pf**2)
    one_minus_h[kr == -1] = 0.0
    return pf, g, one_minus_h


def prime_tail_sum(P: int, exponent: float, coeff: float = 2.0) -> float:
    """Upper bound for ``sum_{p > P} coeff * p^{-exponent}``.

    Primes are summed explicitly up to ``100 P``; beyond that the sum over
    all integers is bounded by an integral.
    """
    pr = primes_up_to(100 * P)
    pr = pr[pr > P].astype(np.float64)
    head = coeff * float(np.sum(pr**-exponent))
    N = 100.0 * P
    return head + coeff * N ** (1.0 - exponent) / (exponent - 1.0)


def C_K2_value(K: QuadraticField, P: int) -> float:
    """``prod_{P | 2D}(1 + 1/NP)^{-1} * prod_{p <= P, p !| 2D} (1 - g_p / p^2)``."""
    bad = 1.0
    for p in _bad_primes(K):
        for n in prime_norms(K, p):
            bad /= 1.0 + 1.0 / n
    pf, g, _ = _local_tables(K, P)
    return bad * math.exp(float(np.sum(np.log1p(-g / pf**2))))


def _bad_primes(K: QuadraticField) -> list[int]:
    out = [2]
    n = abs(K.D)
    p = 3
    while n > 1 and p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 2
    return out


def C_K_value(K: QuadraticField, s: float, P: int, k_max: int = 40, tables=None) -> float:
    """``C_K(s)`` as a product over ``p <= P`` of ``(1 - p^{-s}) sum_{k <= k_max} h(p^k) p^{-ks}``."""
    pf, _, omh = tables if tables is not None else _local_tables(K, P)
    x = pf**-s
    h = 1.0 - omh
    # (1 - x)(1 + h (x - x^{k_max+1})/(1 - x)) = 1 - x + h (x - x^{k_max+1})
    local = 1.0 - x + h * (x - x ** (k_max + 1))
    return math.exp(float(np.sum(np.log(local))))


def C_K_logderiv(K: QuadraticField, s: float, P: int) -> float:
    """Analytic ``C_K'(s)/C_K(s)`` (infinite ``k``), for cross-checking finite differences."""
    pf, _, omh = _local_tables(K, P)
    x = pf**-s
    return float(np.sum(omh * np.log(pf) * x / (1.0 - omh * x)))


@dataclass(frozen=True)
class PredictorConstants:
    field_d: int
    D: int
    prime_cutoff: int
    k_max: int
    C_K1: float
    C_K2: float
    zetaK2: float
    C_K_at_1: float
    C_K_deriv_1: float
    w_mellin_1: float
    w_mellin_d1: float
    gamma0: float
    gamma_d0_plus: float
    gamma_d0_minus: float
    tail_C_K2: float
    tail_C_K_1: float
    deriv_richardson_gap: float

    @property
    def prefactor(self) -> float:
        return self.C_K1 * self.C_K2 / self.zetaK2

    def to_dict(self) -> dict:
        return asdict(self)


def compute_constants(
    K: QuadraticField,
    w: WeightSpec = WeightSpec(),
    prime_cutoff: int = 100_000,
    k_max: int = 40,
    tolerance: float = 1e-4,
    step: float = 1e-5,
) -> PredictorConstants:
    """All constants entering ``P_K``, with tail bounds for the truncated products.

    Raises :class:`AccuracyError` if a relative tail bound exceeds ``tolerance``.
    """
    if prime_cutoff < 1000:
        raise DomainError("prime_cutoff must be >= 1000")
    P = prime_cutoff
    tables = _local_tables(K, P)
    CK1 = dirichlet_L_real(1, K.D)
    zK2 = ZETA2 * dirichlet_L_real(2, K.D)
    C2 = C_K2_value(K, P)
    ck = C_K_value(K, 1.0, P, k_max, tables)
    d1 = (C_K_value(K, 1.0 + step, P, k_max, tables) - C_K_value(K, 1.0 - step, P, k_max, tables)) / (2 * step)
    d2 = (C_K_value(K, 1.0 + 2 * step, P, k_max, tables) - C_K_value(K, 1.0 - 2 * step, P, k_max, tables)) / (4 * step)
    # |log(1 - g/p^2)| <= 1/p^2 * 1.01 and |log(1 - (1-h) p^{-1})| <= 2.01 p^{-2} for p > 1000
    tail2 = math.expm1(prime_tail_sum(P, 2.0, 1.01))
    tail1 = math.expm1(prime_tail_sum(P, 2.0, 2.01))
    if max(tail1, tail2) > tolerance:
        raise AccuracyError(f"Euler product tail {max(tail1, tail2):.2e} above {tolerance}")
    return PredictorConstants(
        field_d=K.d,
        D=K.D,
        prime_cutoff=P,
        k_max=k_max,
        C_K1=CK1,
        C_K2=C2,
        zetaK2=zK2,
        C_K_at_1=ck,
        C_K_deriv_1=d1,
        w_mellin_1=mellin_weight(w, 1.0),
        w_mellin_d1=mellin_weight_d1(w),
        gamma0=EULER_GAMMA,
        gamma_d0_plus=gamma_factor_dlog0(1),
        gamma_d0_minus=gamma_factor_dlog0(-1),
        tail_C_K2=tail2 * C2,
        tail_C_K_1=tail1 * ck,
        deriv_richardson_gap=abs(d2 - d1),
    )


# ---------------------------------------------------------------------------
# main term
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearPoly:
    """``slope * x + intercept``."""

    slope: float
    intercept: float

    def __call__(self, x):
        return self.slope * x + self.intercept

    def __add__(self, other):
        return LinearPoly(self.slope + other.slope, self.intercept + other.intercept)

    def __sub__(self, other):
        return LinearPoly(self.slope - other.slope, self.intercept - other.intercept)

    def scaled(self, c: float):
        return LinearPoly(c * self.slope, c * self.intercept)


@dataclass(frozen=True)
class MainTermPolynomial:
    square_plus: LinearPoly
    square_minus: LinearPoly
    disc_plus: LinearPoly
    disc_minus: LinearPoly

    @property
    def plus(self) -> LinearPoly:
        return self.square_plus + self.disc_plus

    @property
    def minus(self) -> LinearPoly:
        return self.square_minus + self.disc_minus

    @property
    def total(self) -> LinearPoly:
        return self.plus + self.minus

    @property
    def square_total(self) -> LinearPoly:
        return self.square_plus + self.square_minus

    def to_dict(self) -> dict:
        out = {}
        for name in ("square_plus", "square_minus", "disc_plus", "disc_minus", "plus", "minus", "total"):
            p = getattr(self, name)
            out[name] = {"slope": p.slope, "intercept": p.intercept}
        return out


def _residue_poly(c: PredictorConstants, j: int, shift: float) -> LinearPoly:
    """Residue at ``s = 0`` of ``Q^{s/2} X^{-s} C_K(1+2s) zeta(1+2s) w~(1+s/2) gamma_j(s)/s``.

    With ``s zeta(1+2s) = 1/2 + gamma0 s + O(s^2)`` the residue is the
    derivative at 0 of the regular product; ``shift = log X``. Returned as a
    polynomial in ``log Q`` including the overall ``C_K1 C_K2 / zeta_K(2)``.
    """
    ck, dck = c.C_K_at_1, c.C_K_deriv_1
    w1, dw1 = c.w_mellin_1, c.w_mellin_d1
    g = c.gamma_d0_plus if j == 1 else c.gamma_d0_minus
    # d/ds of each factor at 0: Q^{s/2}X^{-s} -> (x/2 - shift), C_K(1+2s) -> 2 dck,
    # s zeta(1+2s) -> gamma0 (value 1/2), w~(1+s/2) -> dw1/2, gamma_j -> g (value 1)
    slope = 0.5 * ck * w1 * 0.5
    intercept = 0.5 * (ck * w1 * (-shift) + 2.0 * dck * w1 + ck * 0.5 * dw1 + ck * w1 * g) + c.gamma0 * ck * w1
    return LinearPoly(slope, intercept).scaled(c.prefactor)


def main_term_polynomial(K: QuadraticField, c: PredictorConstants) -> MainTermPolynomial:
    dd = abs(K.d)
    sign_minus = 1.0 if K.d > 0 else -1.0
    disc_scale = 1.0 / math.sqrt(dd)
    return MainTermPolynomial(
        square_plus=_residue_poly(c, 1, 0.0),
        square_minus=_residue_poly(c, -1, 0.0),
        disc_plus=_residue_poly(c, 1, math.log(dd)).scaled(disc_scale),
        disc_minus=_residue_poly(c, -1, math.log(dd)).scaled(sign_minus * disc_scale),
    )


def predicted_main(K: QuadraticField, Q: float, c: PredictorConstants):
    """``Q * P_K(log Q)`` and the polynomial it came from."""
    poly = main_term_polynomial(K, c)
    return Q * poly.total(math.log(Q)), poly


def printed_polynomial(c: PredictorConstants) -> tuple[LinearPoly, LinearPoly]:
    """The printed closed form for ``P^+`` and ``P^-``, transcribed term by term.

    Kept for auditing only; it is not the residue of its own integrand (see
    module docstring), so no equality with :func:`main_term_polynomial` holds.
    """
    out = []
    for g in (c.gamma_d0_plus, c.gamma_d0_minus):
        slope = 0.5 * c.C_K_at_1 * c.w_mellin_1
        intercept = c.C_K_deriv_1 + 0.5 * c.w_mellin_d1 + g + c.gamma0 * (c.C_K_at_1 + c.w_mellin_1)
        out.append(LinearPoly(slope, intercept).scaled(c.prefactor))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# brute-force square-pole sum
# ---------------------------------------------------------------------------


def _local_e(K: QuadraticField, p: int) -> float:
    """``prod_{P | p} (1 - 1/N P)``."""
    e = 1.0
    for n in prime_norms(K, p):
        e *= 1.0 - 1.0 / n
    return e


def predict_bruteforce_M0(
    K: QuadraticField,
    Q: float,
    w: WeightSpec = WeightSpec(),
    d_max: int = 1000,
    l_norm_max: int = 1000,
    m_max: int = 10_000,
    tolerance: float = 0.05,
) -> float:
    """Even-parity square-pole contribution as an explicit truncated triple sum.

    sum over squarefree ``r <= d_max`` prime to ``2D`` (weight ``mu(r)/r^2``),
    squarefree ideals ``l`` with ``N l <= l_norm_max`` prime to ``2 r D``
    (weight ``mu_K(l)/N l^2``) and ``m = k^2 <= m_max`` with ``(k, r l) = 1`` of

        Q * k^{-1} * f(k^2) * C_K1 * prod_{P | 2 r k D} (1 - 1/N P),

    ``f(m) = int V_+(m / sqrt(Q x)) w(x) dx``. Ideals are grouped by norm:
    the signed count of squarefree ideals of norm ``n`` is multiplicative
    with value -2 at split ``p``, +1 at split ``p^2`` and -1 at inert ``p^2``.
    """
    D = K.D
    k_top = math.isqrt(m_max)
    L = l_norm_max
    table = build_factor_table(max(d_max, L, k_top, 2))

    # signed ideal counts c(n), n <= L, prime to 2D
    cn = np.zeros(L + 1)
    cn[1] = 1.0
    for n in range(2, L + 1):
        val = 1.0
        for p, e in table.factor(n):
            if p == 2 or D % p == 0:
                val = 0.0
                break
            kr = kronecker(D, p)
            if kr == 1:
                val *= -2.0 if e == 1 else (1.0 if e == 2 else 0.0)
            else:
                val *= -1.0 if e == 2 else 0.0
            if val == 0.0:
                break
        cn[n] = val
    n_idx = np.flatnonzero(cn)
    n_w = cn[n_idx] / n_idx.astype(np.float64) ** 2

    # r: squarefree, prime to 2D, weight mu(r) E(r) / r^2
    r_list, r_w = [], []
    for r in range(1, d_max + 1):
        if r % 2 == 0 or math.gcd(r, D) != 1:
            continue
        fac = table.factor(r) if r > 1 else []
        if any(e > 1 for _, e in fac):
            continue
        e = 1.0
        for p, _ in fac:
            e *= _local_e(K, p)
        r_list.append(r)
        r_w.append((-1) ** len(fac) * e / r**2)
    r_arr = np.array(r_list, dtype=np.int64)
    r_w = np.array(r_w)
    coprime_rn = np.gcd.outer(r_arr, n_idx) == 1

    # f(k^2) by Gauss-Legendre over the weight support
    xs, ws = w.rule()
    E2D = 1.0
    for p in _bad_primes(K):
        E2D *= _local_e(K, p)

    total = []
    for k in range(1, k_top + 1):
        fk = float(np.dot(ws, V_array(1, k * k / np.sqrt(Q * xs))))
        if fk == 0.0:
            continue
        ek = 1.0
        for p, _ in table.factor(k) if k > 1 else []:
            if p != 2 and D % p != 0:
                ek *= _local_e(K, p)
        rk = np.gcd(r_arr, k) == 1
        nk = np.gcd(n_idx, k) == 1
        inner = r_w[rk] @ (coprime_rn[rk][:, nk] @ n_w[nk])
        total.append(fk / k * ek * inner)
    value = Q * dirichlet_L_real(1, D) * E2D * neumaier_sum(np.array(total))

    # crude relative tails, no cancellation credited
    f1 = float(np.dot(ws, V_array(1, 1.0 / np.sqrt(Q * xs))))
    f_next = float(np.dot(ws, V_array(1, (k_top + 1) ** 2 / np.sqrt(Q * xs))))
    rel_tail = 1.0 / d_max + (math.log(L) + 2.0) / L + (k_top + 1) * f_next / f1
    if rel_tail > tolerance:
        raise AccuracyError(f"brute-force M0 cutoffs too small: relative tail {rel_tail:.2e}")
    return value


def predict_ksum_M0(K: QuadraticField, Q: float, w: WeightSpec = WeightSpec(), c: PredictorConstants | None = None) -> float:
    """Even-parity square-pole contribution from the collapsed one-dimensional sum.

    Summing the ``r`` and ``l`` sieves in closed form leaves

        Q * C_K1 C_K2 / zeta_K(2) * sum_k h(k) k^{-1} f(k^2),

    ``h`` multiplicative with ``h(p^e) = h_p`` at good primes and 1 at primes
    dividing ``2D``, i.e. the coefficients of ``C_K(s) zeta(s)``. No contour
    shift is involved, so this equals the triple sum up to its truncation and
    differs from the residue by the contour remainder.
    """
    if c is None:
        c = compute_constants(K, w)
    k_top = int((60.0 * Q / math.pi) ** 0.25) + 2
    table = build_factor_table(max(k_top, 2))
    xs, ws = w.rule()
    terms = []
    for k in range(1, k_top + 1):
        hk = 1.0
        for p, _ in table.factor(k) if k > 1 else []:
            # inert primes have h_p = 1, as do primes dividing 2D
            if p != 2 and K.D % p != 0 and kronecker(K.D, p) == 1:
                hk *= _split_h(p)
        fk = float(np.dot(ws, V_array(1, k * k / np.sqrt(Q * xs))))
        terms.append(hk * fk / k)
    return Q * c.prefactor * neumaier_sum(np.array(terms))


def _split_h(p: int) -> float:
    g = (1.0 + 1.0 / p) ** -2
    return g / (1.0 - g / p**2)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentRow:
    Q: float
    M_emp: float
    M_pred: float
    ratio: float
    residual: float
    residual_norm: float
    M_pred_square_only: float
    family_count: int


@dataclass
class MomentReport:
    field_d: int
    engine: str
    rows: list[MomentRow]
    constants: PredictorConstants
    polynomial: MainTermPolynomial

    CSV_COLUMNS = ("Q", "M_emp", "M_pred", "ratio", "residual", "residual_norm")

    def csv_rows(self):
        for r in self.rows:
            yield [repr(float(getattr(r, c))) if c != "Q" else _fmt_q(r.Q) for c in self.CSV_COLUMNS]


def _fmt_q(Q: float) -> str:
    return str(int(Q)) if float(Q).is_integer() else repr(float(Q))


def compare(
    K: QuadraticField,
    Q_list,
    w: WeightSpec = WeightSpec(),
    engine: str = "afe",
    constants: PredictorConstants | None = None,
    cfg: AFEConfig = AFEConfig(),
    workers: int = 1,
    cache: LValueCache | None = None,
) -> MomentReport:
    Qs = sorted(float(Q) for Q in Q_list)
    if constants is None:
        constants = compute_constants(K, w)
    X = int(math.floor(w.hi * Qs[-1]))
    if X > DEFAULT_CAPACITY:
        raise CapacityError(f"largest Q needs family bound {X} > capacity {DEFAULT_CAPACITY}")
    fam = enumerate_family(K, max(X, 3))
    poly = main_term_polynomial(K, constants)
    rows = []
    for Q in Qs:
        emp = empirical_moment(K, Q, w, engine, cache, cfg, workers, fam)
        pred = Q * poly.total(math.log(Q))
        if pred == 0:
            raise DomainError(f"predicted main term vanishes at Q={Q}")
        count = int(family_weights(fam, Q, w)[0].shape[0])
        rows.append(
            MomentRow(
                Q=Q,
                M_emp=emp,
                M_pred=pred,
                ratio=emp / pred,
                residual=emp - pred,
                residual_norm=(emp - pred) / Q**0.75,
                M_pred_square_only=Q * poly.square_total(math.log(Q)),
                family_count=count,
            )
        )
    return MomentReport(K.d, engine, rows, constants, poly)


@dataclass
class ScanResult:
    field_d: int
    X: int
    threshold: float
    family_size: int
    nonzero_count: int
    min_abs_value: float
    argmin_q: int
    witnesses: list[tuple[int, float]]


def nonvanishing_scan(
    K: QuadraticField,
    X: int,
    engine: str = "afe",
    threshold: float = 1e-6,
    cfg: AFEConfig = AFEConfig(),
    workers: int = 1,
) -> ScanResult:
    """Count family members ``q <= X`` with ``|L(1/2, chi_q)| > threshold``.

    Members at or below the threshold are returned as witnesses.
    """
    if X > DEFAULT_CAPACITY:
        raise CapacityError(f"X={X} exceeds capacity {DEFAULT_CAPACITY}")
    fam = enumerate_family(K, X)
    vals = central_values(fam.q, engine, cfg, workers)
    absval = np.abs(vals)
    small = absval <= threshold
    if len(fam):
        i = int(np.argmin(absval))
        mn, arg = float(absval[i]), int(fam.q[i])
    else:
        mn, arg = math.inf, 0
    return ScanResult(
        field_d=K.d,
        X=X,
        threshold=threshold,
        family_size=len(fam),
        nonzero_count=int((~small).sum()),
        min_abs_value=mn,
        argmin_q=arg,
        witnesses=[(int(q), float(v)) for q, v in zip(fam.q[small], vals[small])],
    )
