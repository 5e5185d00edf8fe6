"""Special functions behind the central-value engine and the main-term predictor.

Everything here is real double precision. The incomplete gamma kernel is the
hot path (it evaluates the smoothing weight of every AFE term); it is
compiled with numba unless ``SPLITMOMENT_NO_NUMBA`` is set, in which case the
vectorized numpy path is used.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import loggamma as _complex_loggamma

from ._accel import USE_NUMBA, njit
from .arith import is_squarefree, kronecker
from .errors import AccuracyError, DomainError

__all__ = [
    "EULER_GAMMA",
    "ZETA2",
    "KernelParams",
    "kernel_params",
    "regularized_upper_gamma",
    "regularized_lower_gamma",
    "upper_gamma_array",
    "V_kernel",
    "V_array",
    "V_mellin_oracle",
    "gamma_factor",
    "gamma_factor_dlog0",
    "digamma",
    "hurwitz_zeta",
    "hurwitz_zeta_half",
    "dirichlet_L_real",
    "WeightSpec",
    "mellin_weight",
    "mellin_weight_d1",
]

EULER_GAMMA = 0.57721566490153286060651209
ZETA2 = math.pi**2 / 6.0

_EPS = 1e-16
_FPMIN = 1e-300
_MAXITER = 2000


@dataclass(frozen=True)
class KernelParams:
    parity: int
    a: int
    c: float


def kernel_params(j: int) -> KernelParams:
    """Shift ``a_j = (1 - j)/2`` and gamma argument ``c_j = (1/2 + a_j)/2`` for parity ``j``."""
    if j not in (1, -1):
        raise DomainError(f"parity must be +1 or -1, got {j}")
    a = (1 - j) // 2
    return KernelParams(parity=j, a=a, c=(0.5 + a) / 2.0)


# ---------------------------------------------------------------------------
# regularized incomplete gamma
# ---------------------------------------------------------------------------


@njit
def _gammainc_series(a, x, lg):
    # lower regularized P(a, x)
    if x == 0.0:
        return 0.0
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAXITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - lg)


@njit
def _gammaincc_cf(a, x, lg):
    # upper regularized Q(a, x) by modified Lentz
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAXITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - lg) * h


@njit
def _gammaincc_scalar(a, x):
    lg = math.lgamma(a)
    if x < a + 1.0:
        return 1.0 - _gammainc_series(a, x, lg)
    return _gammaincc_cf(a, x, lg)


@njit
def _gammaincc_vec_nb(a, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _gammaincc_scalar(a, x[i])
    return out


def _gammaincc_vec_np(a: float, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    lg = math.lgamma(a)
    lo = np.flatnonzero(x < a + 1.0)
    if lo.size:
        xs = x[lo]
        term = np.full_like(xs, 1.0 / a)
        total = term.copy()
        ap = a
        for _ in range(_MAXITER):
            ap += 1.0
            term = term * xs / ap
            total += term
            if np.all(np.abs(term) <= np.abs(total) * _EPS):
                break
        with np.errstate(divide="ignore"):
            pref = np.where(xs > 0, np.exp(-xs + a * np.log(np.where(xs > 0, xs, 1.0)) - lg), 0.0)
        out[lo] = 1.0 - total * pref
    idx = np.flatnonzero(x >= a + 1.0)
    if idx.size:
        xs = x[idx]
        b = xs + 1.0 - a
        c = np.full_like(xs, 1.0 / _FPMIN)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, _MAXITER):
            an = -i * (i - a)
            b = b + 2.0
            d = an * d + b
            d[np.abs(d) < _FPMIN] = _FPMIN
            c = b + an / c
            c[np.abs(c) < _FPMIN] = _FPMIN
            d = 1.0 / d
            delta = d * c
            h = h * delta
            done = np.abs(delta - 1.0) < 2 * _EPS
            if done.any():
                out[idx[done]] = np.exp(-xs[done] + a * np.log(xs[done]) - lg) * h[done]
                keep = ~done
                idx, xs, b, c, d, h = idx[keep], xs[keep], b[keep], c[keep], d[keep], h[keep]
                if not idx.size:
                    break
        if idx.size:
            out[idx] = np.exp(-xs + a * np.log(xs) - lg) * h
    return out


def upper_gamma_array(a: float, x: np.ndarray) -> np.ndarray:
    """Vectorized ``Q(a, x)`` over a float array ``x >= 0``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if USE_NUMBA:
        return _gammaincc_vec_nb(float(a), x.ravel()).reshape(x.shape)
    return _gammaincc_vec_np(float(a), x)


def regularized_upper_gamma(a: float, x: float) -> float:
    """``Q(a, x) = Gamma(a, x) / Gamma(a)``.

    Power series for the lower function below ``x = a + 1``, Lentz continued
    fraction above. Absolute error is at the 1e-15 level for ``a`` in (0, 1].
    """
    if x < 0:
        raise DomainError(f"incomplete gamma needs x >= 0, got {x}")
    if a <= 0:
        raise DomainError(f"incomplete gamma needs a > 0, got {a}")
    if x == 0:
        return 1.0
    return float(_gammaincc_scalar(float(a), float(x)))


def regularized_lower_gamma(a: float, x: float) -> float:
    """``P(a, x)`` from the power series alone, at every ``x``.

    Deliberately does not share the continued-fraction branch, so that
    ``P + Q = 1`` is a meaningful check.
    """
    if x < 0:
        raise DomainError(f"incomplete gamma needs x >= 0, got {x}")
    if x == 0:
        return 0.0
    lg = math.lgamma(a)
    # series in the form e^{-x} x^a / Gamma(a+1) * sum x^n / ((a+1)...(a+n))
    term = 1.0
    total = 1.0
    n = 0
    while True:
        n += 1
        term *= x / (a + n)
        total += term
        if term < total * 1e-17 and n > x:
            break
    return min(1.0, total * math.exp(-x + a * math.log(x) - lg - math.log(a)))


# ---------------------------------------------------------------------------
# AFE kernels
# ---------------------------------------------------------------------------


def V_kernel(j: int, x: float) -> float:
    """Smoothing weight of the approximate functional equation, parity ``j``.

    Inverting ``gamma_j(s)/s`` along a vertical line and substituting
    ``w = (s + 1/2 + a_j)/2`` turns the contour integral into
    ``Gamma(c_j, pi x^2) / Gamma(c_j)``.
    """
    if x < 0:
        raise DomainError(f"V kernel needs x >= 0, got {x}")
    c = kernel_params(j).c
    return regularized_upper_gamma(c, math.pi * x * x)


def V_array(j: int, x: np.ndarray) -> np.ndarray:
    c = kernel_params(j).c
    x = np.asarray(x, dtype=np.float64)
    return upper_gamma_array(c, math.pi * x * x)


def V_mellin_oracle(
    j: int, x: float, line: float = 2.0, step: float = 0.05, tol: float = 1e-12
) -> float:
    """Evaluate ``(1/2 pi i) int_(line) gamma_j(s) x^{-s} ds / s`` by quadrature.

    Trapezoidal rule on the vertical line (exponentially convergent for this
    analytic integrand), truncated once the integrand magnitude falls below
    ``tol``. Uses the complex log-gamma, so it shares no code with
    :func:`V_kernel`.
    """
    if x <= 0:
        raise DomainError(f"Mellin oracle needs x > 0, got {x}")
    kp = kernel_params(j)
    base = complex(_complex_loggamma(kp.c))
    logx = math.log(x)

    def integrand(t):
        s = line + 1j * t
        lg = _complex_loggamma((0.5 + kp.a + s) / 2.0) - base
        return (np.exp(lg - s * (0.5 * math.log(math.pi) + logx)) / s).real

    # grow the window until the tail is negligible
    T = 40.0
    while True:
        edge = abs(integrand(np.array([T]))[0])
        if edge * (4.0 / math.pi + step) < tol:
            break
        T *= 1.5
        if T > 1e4:
            raise AccuracyError(f"Mellin oracle tail did not decay (x={x}, j={j})")
    t = np.arange(0.0, T + step, step)
    f = integrand(t)
    return float(step * (0.5 * f[0] + f[1:].sum()) / math.pi)


def gamma_factor(j: int, s: float) -> float:
    """``gamma_j(s) = pi^{-s/2} Gamma((1/2 + a_j + s)/2) / Gamma((1/2 + a_j)/2)``."""
    kp = kernel_params(j)
    if s <= -0.5 - kp.a:
        raise DomainError(f"gamma factor has a pole at or left of s={-0.5 - kp.a}")
    return math.exp(
        -0.5 * s * math.log(math.pi) + math.lgamma((0.5 + kp.a + s) / 2.0) - math.lgamma(kp.c)
    )


def gamma_factor_dlog0(j: int) -> float:
    """``gamma_j'(0) = (psi(c_j) - log pi)/2`` (equal to the log-derivative since ``gamma_j(0) = 1``)."""
    return 0.5 * (digamma(kernel_params(j).c) - math.log(math.pi))


def digamma(x):
    """Digamma for real ``x > 0``: upward recurrence to ``x >= 10``, then the asymptotic series."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr <= 0):
        raise DomainError("digamma implemented for x > 0 only")
    v = arr.copy()
    shift = np.zeros_like(v)
    while True:
        small = v < 10.0
        if not small.any():
            break
        shift[small] -= 1.0 / v[small]
        v[small] += 1.0
    inv2 = 1.0 / (v * v)
    series = inv2 * (
        -1.0 / 12
        + inv2 * (1.0 / 120 + inv2 * (-1.0 / 252 + inv2 * (1.0 / 240 + inv2 * (-1.0 / 132 + inv2 * (691.0 / 32760 - inv2 / 12.0)))))
    )
    out = np.log(v) - 0.5 / v + series + shift
    return float(out) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Hurwitz zeta and real L-values
# ---------------------------------------------------------------------------

# B_2k / (2k)! for k = 1..5
_BERN_FACT = (1.0 / 12, -1.0 / 720, 1.0 / 30240, -1.0 / 1209600, 1.0 / 47900160)


def hurwitz_zeta(s: float, a, N: int = 20):
    """``zeta(s, a)`` for real ``s != 1`` and ``a > 0`` by Euler-Maclaurin.

    ``N`` leading terms are summed directly; corrections run through B_10.
    Accepts an array of ``a``.
    """
    if s == 1.0:
        raise DomainError("Hurwitz zeta has a pole at s = 1")
    av = np.asarray(a, dtype=np.float64)
    if np.any(av <= 0):
        raise DomainError("Hurwitz zeta needs a > 0")
    n = np.arange(N, dtype=np.float64)
    head = np.power(np.add.outer(av, n), -s).sum(axis=-1)
    x = av + N
    tail = x ** (1.0 - s) / (s - 1.0) + 0.5 * x ** (-s)
    rising = s
    power = x ** (-s - 1.0)
    for k, coef in enumerate(_BERN_FACT):
        tail = tail + coef * rising * power
        rising *= (s + 2 * k + 1) * (s + 2 * k + 2)
        power = power / (x * x)
    out = head + tail
    return float(out) if np.ndim(a) == 0 else out


def hurwitz_zeta_half(a):
    """``zeta(1/2, a)`` for ``0 < a <= 1``."""
    av = np.asarray(a, dtype=np.float64)
    if np.any(av <= 0) or np.any(av > 1):
        raise DomainError("hurwitz_zeta_half expects 0 < a <= 1")
    return hurwitz_zeta(0.5, a)


def _check_fundamental(D: int) -> None:
    if D % 4 == 1 and is_squarefree(D) and D != 1:
        return
    if D % 4 == 0 and D // 4 % 4 in (2, 3) and is_squarefree(D // 4):
        return
    raise DomainError(f"{D} is not a fundamental discriminant")


def dirichlet_L_real(s: int, D: int) -> float:
    """``L(s, chi_D)`` for ``s`` in {1, 2}, ``chi_D = (D/.)`` Kronecker.

    Exact finite character sums over one period: the digamma form
    ``-(1/|D|) sum chi(a) psi(a/|D|)`` at ``s = 1`` and the Hurwitz form
    ``|D|^{-2} sum chi(a) zeta(2, a/|D|)`` at ``s = 2``.
    """
    _check_fundamental(D)
    if abs(D) > 10**6:
        raise DomainError(f"|D| = {abs(D)} too large for one-period character sums")
    k = abs(D)
    a = np.arange(1, k + 1)
    chi = np.array([kronecker(D, int(x)) for x in a], dtype=np.float64)
    nz = chi != 0
    if s == 1:
        return float(-(chi[nz] * digamma(a[nz] / k)).sum() / k)
    if s == 2:
        return float((chi[nz] * hurwitz_zeta(2.0, a[nz] / k)).sum() / k**2)
    raise DomainError("dirichlet_L_real supports s = 1 or s = 2")


# ---------------------------------------------------------------------------
# smooth weight
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightSpec:
    """Smooth compactly supported weight ``w``.

    Only the ``bump`` family is provided:
    ``w(x) = exp(-1 / ((x - lo)(hi - x)))`` on ``(lo, hi)``, zero elsewhere.
    ``nodes`` sets the Gauss-Legendre rule used for weighted integrals over
    the support.
    """

    name: str = "bump"
    lo: float = 0.5
    hi: float = 1.0
    nodes: int = 256

    def __post_init__(self):
        if self.name != "bump":
            raise DomainError(f"unknown weight {self.name!r}")
        if not 0 < self.lo < self.hi:
            raise DomainError("weight support must satisfy 0 < lo < hi")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        inside = (x > self.lo) & (x < self.hi)
        safe = np.where(inside, x, 0.5 * (self.lo + self.hi))
        val = np.where(inside, np.exp(-1.0 / ((safe - self.lo) * (self.hi - safe))), 0.0)
        return float(val) if val.ndim == 0 else val

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes on the support, with ``w(x)`` folded into the weights."""
        t, wt = np.polynomial.legendre.leggauss(self.nodes)
        half = 0.5 * (self.hi - self.lo)
        x = self.lo + half * (t + 1.0)
        return x, wt * half * self(x)

    def to_dict(self) -> dict:
        return {"name": self.name, "lo": self.lo, "hi": self.hi, "nodes": self.nodes}


def _quad(f, w: WeightSpec) -> float:
    val, err = integrate.quad(f, w.lo, w.hi, epsabs=1e-16, epsrel=1e-13, limit=400)
    if err > 1e-12:
        raise AccuracyError(f"weight quadrature error estimate {err:.2e} exceeds 1e-12")
    return val


def mellin_weight(w: WeightSpec, s: float) -> float:
    """``int w(x) x^{s-1} dx`` over the support."""
    return _quad(lambda x: w(x) * x ** (s - 1.0), w)


def mellin_weight_d1(w: WeightSpec) -> float:
    """Derivative of the Mellin transform at ``s = 1``: ``int w(x) log x dx``."""
    return _quad(lambda x: w(x) * math.log(x), w)
