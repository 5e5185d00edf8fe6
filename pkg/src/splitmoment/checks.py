"""Acceptance checks, shared by ``splitmoment selftest`` and the test suite.

Each check returns a :class:`CheckResult`; tolerances are module constants so
the CLI and pytest agree on what passing means.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .arith import build_factor_table, is_squarefree, kronecker
from .lcentral import AFEConfig, l_half_afe, l_half_oracle, make_char
from .moment import (
    C_K2_value,
    C_K_value,
    compare,
    compute_constants,
    main_term_polynomial,
    nonvanishing_scan,
    predict_bruteforce_M0,
    prime_tail_sum,
)
from .quadfield import QuadraticField, enumerate_family_ideals, verify_symbol_identity
from .reporting import report_csv
from .specfun import V_kernel, V_mellin_oracle, WeightSpec, gamma_factor, gamma_factor_dlog0

__all__ = ["CheckResult", "CHECKS", "run_all", "field_diagnostic"]

SYMBOL_FIELDS = (5, 13, -3, -1)
KERNEL_XS = (0.01, 0.1, 0.5, 1.0, 2.0, 5.0)
KERNEL_TOL = 1e-10
GAMMA_FD_TOL = 1e-6
ENGINE_TOL = 1e-8
BRUTE_REL_TOL = 1e-3
DIRICHLET_TOL = 1e-6
LADDER = (1e3, 1e4, 1e5)
RATIO_BAND = (0.5, 1.5)
RESIDUAL_GROWTH = 3.0
SCAN_X = 100_000
SCAN_THRESHOLD = 1e-6
WORKER_TOL = 1e-10


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number}. {self.name}: {self.detail} ({self.elapsed:.1f}s)"


def _timed(number, name):
    def wrap(fn):
        def run() -> CheckResult:
            t0 = time.perf_counter()
            passed, detail, data = fn()
            return CheckResult(number, name, passed, detail, time.perf_counter() - t0, data)

        run.number = number
        run.check_name = name
        return run

    return wrap


@_timed(1, "symbol identity")
def check_symbol_identity():
    table = build_factor_table(300)
    runs = fails = 0
    for d in SYMBOL_FIELDS:
        rep = verify_symbol_identity(QuadraticField(d), 50, 300, table, strict=False)
        runs += rep.checks_run
        fails += rep.failures
    return fails == 0 and runs > 0, f"{runs} comparisons, {fails} failures", {"checks": runs}


@_timed(2, "ideal counting")
def check_ideal_counting():
    K = QuadraticField(5)
    table = build_factor_table(10_000)
    bad = []
    for q in range(1, 10_001, 2):
        fac = table.factor(q) if q > 1 else []
        ok = all(e == 1 and kronecker(K.D, p) == 1 for p, e in fac)
        expected = 2 ** len(fac) if ok else 0
        got = len(enumerate_family_ideals(K, q, table))
        if got != expected:
            bad.append((q, got, expected))
    return not bad, f"{len(bad)} mismatches over odd q <= 10000", {"mismatches": bad[:10]}


@_timed(3, "AFE kernel")
def check_kernel():
    worst = 0.0
    for j in (1, -1):
        for x in KERNEL_XS:
            worst = max(worst, abs(V_kernel(j, x) - V_mellin_oracle(j, x)))
    grid = np.linspace(0.0, 4.0, 401)
    mono = all(np.all(np.diff([V_kernel(j, x) for x in grid]) < 0) for j in (1, -1))
    at0 = all(V_kernel(j, 0.0) == 1.0 for j in (1, -1))
    h = 1e-5
    fd_gap = max(
        abs((gamma_factor(j, h) - gamma_factor(j, -h)) / (2 * h) - gamma_factor_dlog0(j))
        for j in (1, -1)
    )
    ok = worst <= KERNEL_TOL and mono and at0 and fd_gap <= GAMMA_FD_TOL
    detail = f"max|V-oracle|={worst:.1e}, monotone={mono}, V(0)=1 {at0}, gamma' gap={fd_gap:.1e}"
    return ok, detail, {"max_err": worst, "fd_gap": fd_gap}


@_timed(4, "engine equivalence")
def check_engines():
    cfg = AFEConfig()
    worst, arg = 0.0, 0
    for q in range(3, 501, 2):
        if not is_squarefree(q):
            continue
        chi = make_char(q)
        gap = abs(l_half_afe(chi, cfg) - l_half_oracle(chi))
        if gap > worst:
            worst, arg = gap, q
    return worst <= ENGINE_TOL, f"max gap {worst:.1e} at q={arg}", {"max_gap": worst}


@_timed(5, "predictor double derivation")
def check_double_derivation():
    K = QuadraticField(5)
    w = WeightSpec()
    Q = 1e4
    c = compute_constants(K, w)
    residue = Q * main_term_polynomial(K, c).square_plus(math.log(Q))
    brute = predict_bruteforce_M0(K, Q, w)
    rel = abs(residue - brute) / abs(brute)
    detail = f"residue {residue:.6e} vs brute force {brute:.6e}, rel gap {rel:.2e} (tol {BRUTE_REL_TOL:.0e})"
    return rel <= BRUTE_REL_TOL, detail, {"residue": residue, "brute": brute, "rel": rel}


def _dirichlet_C_K(K: QuadraticField, s: float, N: int) -> float:
    """``C_K(s)`` summed as the Dirichlet series of its completely expanded product.

    The local factor at a good prime is ``1 - (1 - h_p) p^{-s}``, so the
    coefficient is supported on squarefree ``n`` built from split primes.
    """
    table = build_factor_table(N)
    coef = np.ones(N + 1)
    coef[0] = 0.0
    for p in table.primes().tolist():
        if p == 2 or K.D % p == 0 or kronecker(K.D, p) != 1:
            coef[p::p] = 0.0
            continue
        g = (1.0 + 1.0 / p) ** -2
        coef[p::p] *= -(1.0 - g / (1.0 - g / p**2))
        coef[p * p :: p * p] = 0.0
    n = np.arange(N + 1, dtype=np.float64)
    n[0] = 1.0
    return math.fsum((coef * n**-s).tolist())


@_timed(6, "Euler-product stability")
def check_euler_products():
    K = QuadraticField(5)
    P = 100_000
    bound = prime_tail_sum(P, 2.0, 2.0)
    c2 = abs(C_K2_value(K, P) - C_K2_value(K, 2 * P))
    c1 = abs(C_K_value(K, 1.0, P) - C_K_value(K, 1.0, 2 * P))
    series = _dirichlet_C_K(K, 1.5, 1_000_000)
    prod = C_K_value(K, 1.5, P)
    gap = abs(series - prod)
    ok = c2 < bound and c1 < bound and gap <= DIRICHLET_TOL
    detail = (
        f"|dC_K2|={c2:.1e}, |dC_K(1)|={c1:.1e} vs tail {bound:.1e}; "
        f"C_K(1.5) product-series gap {gap:.1e}"
    )
    return ok, detail, {"bound": bound, "dC2": c2, "dC1": c1, "series_gap": gap}


@_timed(7, "convergence ladder")
def check_ladder():
    K = QuadraticField(5)
    rep = compare(K, LADDER)
    ratios = [r.ratio for r in rep.rows]
    norms = [abs(r.residual_norm) for r in rep.rows]
    in_band = all(RATIO_BAND[0] <= x <= RATIO_BAND[1] for x in ratios)
    improves = abs(ratios[-1] - 1) < abs(ratios[0] - 1)
    growth = max(b / a for a, b in zip(norms, norms[1:]) if a > 0) if len(norms) > 1 else 1.0
    ok = in_band and improves and growth <= RESIDUAL_GROWTH
    detail = "ratios " + ", ".join(f"{x:.4f}" for x in ratios) + f"; residual growth {growth:.2f}"
    return ok, detail, {"ratios": ratios, "residual_norm": [r.residual_norm for r in rep.rows]}


@_timed(8, "non-vanishing scan")
def check_scan():
    res = nonvanishing_scan(QuadraticField(5), SCAN_X, threshold=SCAN_THRESHOLD)
    full = res.nonzero_count == res.family_size
    flagged = not full and len(res.witnesses) == res.family_size - res.nonzero_count
    ok = res.family_size > 0 and (full or flagged)
    detail = (
        f"{res.nonzero_count}/{res.family_size} above {SCAN_THRESHOLD:.0e}, "
        f"min |L|={res.min_abs_value:.3e} at q={res.argmin_q}"
    )
    if flagged:
        detail += f", witnesses {res.witnesses[:5]}"
    return ok, detail, {"family_size": res.family_size, "nonzero": res.nonzero_count}


@_timed(9, "reproducibility")
def check_reproducibility():
    K = QuadraticField(5)
    c = compute_constants(K)
    a = report_csv(compare(K, LADDER, constants=c))
    b = report_csv(compare(K, LADDER, constants=c))
    par = compare(K, LADDER, constants=c, workers=4)
    ser = compare(K, LADDER, constants=c, workers=1)
    gap = max(abs(x.M_emp - y.M_emp) / max(abs(y.M_emp), 1.0) for x, y in zip(par.rows, ser.rows))
    ok = a == b and gap <= WORKER_TOL
    return ok, f"CSV identical={a == b}, worker gap {gap:.1e}", {"worker_gap": gap}


CHECKS = (
    check_symbol_identity,
    check_ideal_counting,
    check_kernel,
    check_engines,
    check_double_derivation,
    check_euler_products,
    check_ladder,
    check_scan,
    check_reproducibility,
)


def run_all(only=None) -> list[CheckResult]:
    return [chk() for chk in CHECKS if only is None or chk.number in only]


def field_diagnostic(d: int, Q_list=(1e4, 1e5)) -> list[dict]:
    """Empirical/predicted ratios with and without the second pole family.

    For fields where the twisted half of the parity projector is not
    negligible (``Q(i)`` in particular) the square-only predictor is visibly
    off; this makes the discrepancy explicit.
    """
    K = QuadraticField(d)
    rep = compare(K, Q_list)
    return [
        {
            "Q": r.Q,
            "ratio": r.ratio,
            "ratio_square_only": r.M_emp / r.M_pred_square_only,
            "family_count": r.family_count,
        }
        for r in rep.rows
    ]

