"""Central values ``L(1/2, chi_q)`` of the quadratic character mod odd squarefree ``q``.

Two engines:

* ``afe`` -- the balanced approximate functional equation
  ``L(1/2) = 2 sum_m chi(m) m^{-1/2} V_j(m / sqrt q)`` (root number 1),
  truncated where an analytic tail bound drops below ``eps_tail``;
* ``oracle`` -- the Hurwitz decomposition
  ``q^{-1/2} sum_{a <= q} chi(a) zeta(1/2, a/q)``, cost linear in ``q``.
"""

import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._accel import USE_NUMBA, njit
from .arith import FactorTable, is_squarefree, jacobi_array
from .arith import _jacobi_kernel
from .errors import CapacityError, DomainError
from .specfun import _gammaincc_scalar, hurwitz_zeta_half, kernel_params, upper_gamma_array
from .summation import neumaier_sum

__all__ = [
    "ENGINES",
    "CharQ",
    "AFEConfig",
    "LValueCache",
    "make_char",
    "truncation_length",
    "tail_bound",
    "l_half_afe",
    "l_half_oracle",
    "l_half",
    "central_values",
]

ENGINES = ("afe", "oracle")
ORACLE_CEILING = 10_000


@dataclass(frozen=True)
class CharQ:
    """Primitive quadratic character ``m -> (m/q)`` for odd squarefree ``q > 1``."""

    q: int

    def __post_init__(self):
        if self.q <= 1 or self.q % 2 == 0:
            raise DomainError(f"conductor must be odd and > 1, got {self.q}")

    @property
    def parity(self) -> int:
        return 1 if self.q % 4 == 1 else -1

    def __call__(self, m):
        return jacobi_array(np.atleast_1d(m), self.q)


def make_char(q: int, table: FactorTable | None = None) -> CharQ:
    """Validated constructor: rejects even, trivial and non-squarefree ``q``."""
    if q <= 1 or q % 2 == 0:
        raise DomainError(f"q={q} must be odd and > 1")
    if table is not None and q <= table.limit:
        squarefree = all(e == 1 for _, e in table.factor(q))
    else:
        squarefree = is_squarefree(q)
    if not squarefree:
        raise DomainError(f"q={q} is not squarefree")
    return CharQ(q)


@dataclass(frozen=True)
class AFEConfig:
    eps_tail: float = 1e-12

    def __post_init__(self):
        if not 1e-14 < self.eps_tail < 1e-2:
            raise DomainError(f"eps_tail={self.eps_tail} outside (1e-14, 1e-2)")


@njit
def _tail_bound(q, c, M):
    # Gamma(c, y) <= y^{c-1} e^{-y} for c <= 1, and the summand is decreasing,
    # so 2 sum_{m>M} m^{-1/2} V(m/sqrt q) <= 2 g(M) * q / (2 pi M).
    y = math.pi * M * M / q
    g = math.exp(-0.5 * math.log(M) + (c - 1.0) * math.log(y) - y - math.lgamma(c))
    return g * q / (math.pi * M)


@njit
def _truncation(q, c, eps):
    hi = 1
    while _tail_bound(q, c, hi) >= eps:
        hi *= 2
    lo = hi // 2
    if lo < 1:
        return 1
    # smallest M in (lo, hi] with bound < eps
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _tail_bound(q, c, mid) < eps:
            hi = mid
        else:
            lo = mid
    return hi


def tail_bound(q: int, M: int) -> float:
    c = kernel_params(1 if q % 4 == 1 else -1).c
    return float(_tail_bound(float(q), c, float(M)))


def truncation_length(q: int, eps_tail: float) -> int:
    """Smallest ``M`` whose analytic AFE tail bound is below ``eps_tail``."""
    if not 1e-14 < eps_tail < 1e-2:
        raise DomainError(f"eps_tail={eps_tail} outside (1e-14, 1e-2)")
    c = kernel_params(1 if q % 4 == 1 else -1).c
    return int(_truncation(float(q), c, eps_tail))


@njit
def _afe_one(q, eps):
    c = 0.25 if q % 4 == 1 else 0.75
    M = _truncation(float(q), c, eps)
    s = 0.0
    comp = 0.0
    for m in range(1, M + 1):
        chi = _jacobi_kernel(m, q)
        if chi == 0:
            continue
        v = chi * _gammaincc_scalar(c, math.pi * m * m / q) / math.sqrt(m)
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
    return 2.0 * (s + comp)


@njit
def _afe_batch_nb(qs, eps, out):
    for i in range(qs.shape[0]):
        out[i] = _afe_one(qs[i], eps)


def _afe_one_np(q: int, eps: float) -> float:
    c = kernel_params(1 if q % 4 == 1 else -1).c
    M = truncation_length(q, eps)
    m = np.arange(1, M + 1, dtype=np.int64)
    chi = jacobi_array(m, q)
    mf = m.astype(np.float64)
    terms = chi * upper_gamma_array(c, math.pi * mf * mf / q) / np.sqrt(mf)
    return 2.0 * neumaier_sum(terms)


def l_half_afe(chi: CharQ, cfg: AFEConfig = AFEConfig()) -> float:
    if USE_NUMBA:
        return float(_afe_one(chi.q, cfg.eps_tail))
    return _afe_one_np(chi.q, cfg.eps_tail)


def l_half_oracle(chi: CharQ, ceiling: int = ORACLE_CEILING) -> float:
    """Hurwitz-zeta evaluation; absolute error about ``q * 1e-15``."""
    q = chi.q
    if q > ceiling:
        raise CapacityError(f"oracle ceiling is {ceiling}, got q={q}")
    if not is_squarefree(q):
        raise DomainError(f"q={q} is not squarefree")
    a = np.arange(1, q + 1)
    ch = jacobi_array(a, q).astype(np.float64)
    nz = ch != 0
    terms = ch[nz] * hurwitz_zeta_half(a[nz] / q)
    return neumaier_sum(terms) / math.sqrt(q)


def l_half(q: int, engine: str = "afe", cfg: AFEConfig = AFEConfig()) -> float:
    chi = make_char(q)
    if engine == "afe":
        return l_half_afe(chi, cfg)
    if engine == "oracle":
        return l_half_oracle(chi)
    raise DomainError(f"unknown engine {engine!r}")


def central_values(
    qs,
    engine: str = "afe",
    cfg: AFEConfig = AFEConfig(),
    workers: int = 1,
    chunk: int = 256,
) -> np.ndarray:
    """``L(1/2, chi_q)`` for each ``q`` in ``qs`` (assumed valid conductors).

    Work is split into fixed chunks handed to a thread pool; each value is
    computed independently, so the output is identical for any ``workers``.
    """
    qs = np.ascontiguousarray(qs, dtype=np.int64)
    out = np.empty(qs.shape[0], dtype=np.float64)
    if engine not in ENGINES:
        raise DomainError(f"unknown engine {engine!r}")

    def run(lo: int) -> None:
        hi = min(lo + chunk, qs.shape[0])
        if engine == "afe" and USE_NUMBA:
            _afe_batch_nb(qs[lo:hi], cfg.eps_tail, out[lo:hi])
            return
        for i in range(lo, hi):
            q = int(qs[i])
            out[i] = _afe_one_np(q, cfg.eps_tail) if engine == "afe" else l_half_oracle(CharQ(q))

    starts = range(0, qs.shape[0], chunk)
    if workers <= 1:
        for lo in starts:
            run(lo)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    return out


class LValueCache:
    """Persistent ``q -> (value, tolerance, engine)`` map.

    File layout: a header ``lcache v1 <field-d> <epsilon>`` followed by CSV
    rows ``q,value,tolerance,engine`` sorted by ``q``. Floats are written with
    ``repr`` so a load/flush cycle is byte-stable. Single writer only;
    :meth:`flush` replaces the file atomically.
    """

    HEADER = "lcache v1"

    def __init__(self, path, field_d: int, eps_tail: float):
        self.path = Path(path)
        self.field_d = field_d
        self.eps_tail = eps_tail
        self._rows: dict[int, tuple[float, float, str]] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with self.path.open("r", encoding="utf-8") as fh:
            header = fh.readline().split()
            if header[:2] != self.HEADER.split() or len(header) != 4:
                raise DomainError(f"{self.path}: not an lcache v1 file")
            if int(header[2]) != self.field_d or float(header[3]) != self.eps_tail:
                # keyed on (field, tolerance): stale cache is ignored, not merged
                return
            for line in fh:
                if not line.strip():
                    continue
                q, value, tol, engine = line.strip().split(",")
                self._rows[int(q)] = (float(value), float(tol), engine)

    def get(self, q: int, engine: str):
        row = self._rows.get(q)
        if row is None or row[2] != engine:
            return None
        return row[0]

    def put(self, q: int, value: float, tolerance: float, engine: str) -> None:
        self._rows[int(q)] = (float(value), float(tolerance), engine)

    def __len__(self):
        return len(self._rows)

    def dumps(self) -> str:
        lines = [f"{self.HEADER} {self.field_d} {self.eps_tail!r}"]
        for q in sorted(self._rows):
            v, t, e = self._rows[q]
            lines.append(f"{q},{v!r},{t!r},{e}")
        return "\n".join(lines) + "\n"

    def flush(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".lcache-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(self.dumps())
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
