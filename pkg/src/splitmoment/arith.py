"""Elementary multiplicative number theory on top of a smallest-prime-factor sieve."""

from dataclasses import dataclass, field

import numpy as np

from ._accel import njit
from .errors import CapacityError, DomainError

__all__ = [
    "MAX_SIEVE_LIMIT",
    "FactorTable",
    "FactorSummary",
    "build_factor_table",
    "summarize",
    "jacobi",
    "jacobi_array",
    "kronecker",
    "is_squarefree",
    "fundamental_discriminant",
    "primes_up_to",
]

#: int32 spf array of this length is ~256 MiB.
MAX_SIEVE_LIMIT = 1 << 26


@dataclass(frozen=True)
class FactorTable:
    """Smallest prime factor of every integer up to ``limit``.

    ``spf[0]`` is 0 and ``spf[1]`` is 1 by convention.
    """

    limit: int
    spf: np.ndarray = field(repr=False)

    def factor(self, n: int) -> list[tuple[int, int]]:
        if not 1 <= n <= self.limit:
            raise DomainError(f"n={n} outside factor table range [1, {self.limit}]")
        out: list[tuple[int, int]] = []
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def is_prime(self, n: int) -> bool:
        return 2 <= n <= self.limit and int(self.spf[n]) == n

    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1)
        return idx[(idx >= 2) & (self.spf == idx)]


@dataclass(frozen=True)
class FactorSummary:
    n: int
    factors: list[tuple[int, int]]
    omega: int
    mu: int
    tau: int
    is_squarefree: bool


def build_factor_table(limit: int, max_limit: int = MAX_SIEVE_LIMIT) -> FactorTable:
    """Sieve smallest prime factors for ``0..limit``."""
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit > max_limit:
        raise CapacityError(f"sieve limit {limit} exceeds ceiling {max_limit}")
    spf = np.zeros(limit + 1, dtype=np.int32 if limit < 2**31 else np.int64)
    r = int(limit**0.5)
    while (r + 1) * (r + 1) <= limit:
        r += 1
    for p in range(2, r + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[1] = 1
    spf.setflags(write=False)
    return FactorTable(limit=limit, spf=spf)


def summarize(n: int, table: FactorTable) -> FactorSummary:
    factors = table.factor(n)
    squarefree = all(e == 1 for _, e in factors)
    tau = 1
    for _, e in factors:
        tau *= e + 1
    mu = (-1) ** len(factors) if squarefree else 0
    return FactorSummary(
        n=n, factors=factors, omega=len(factors), mu=mu, tau=tau, is_squarefree=squarefree
    )


def primes_up_to(n: int) -> np.ndarray:
    """Plain Eratosthenes, for Euler products that need primes beyond any factor table."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _jacobi_py(m, n):
    # n odd positive; binary reciprocity with sign tracking
    a = m % n
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            r = n % 8
            if r == 3 or r == 5:
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a = a % n
    if n == 1:
        return result
    return 0


_jacobi_kernel = njit(_jacobi_py)


def jacobi(m: int, n: int) -> int:
    """Jacobi symbol ``(m/n)`` for odd ``n >= 1``; no factorization of ``n`` needed."""
    m = int(m)
    n = int(n)
    if n < 1 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs odd positive modulus, got {n}")
    if abs(m) < 2**62 and n < 2**62:
        return int(_jacobi_kernel(m, n))
    return _jacobi_py(m, n)


def jacobi_array(m: np.ndarray, n: int) -> np.ndarray:
    """Vectorized ``(m_i / n)`` over an integer array ``m`` for one odd modulus."""
    if n < 1 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs odd positive modulus, got {n}")
    a = np.mod(np.asarray(m, dtype=np.int64), n)
    nn = np.full_like(a, n)
    sign = np.ones_like(a)
    active = a != 0
    while active.any():
        while True:
            even = active & (a % 2 == 0)
            if not even.any():
                break
            a[even] //= 2
            r = nn[even] % 8
            flip = (r == 3) | (r == 5)
            sign[np.flatnonzero(even)[flip]] *= -1
        idx = np.flatnonzero(active)
        ai, ni = a[idx], nn[idx]
        flip = (ai % 4 == 3) & (ni % 4 == 3)
        sign[idx[flip]] *= -1
        a[idx] = ni % ai
        nn[idx] = ai
        active = a != 0
    return np.where(nn == 1, sign, 0)


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol ``(D/n)`` for ``n >= 1``; at ``n = 2`` it follows ``D mod 8``."""
    if n < 1:
        raise DomainError(f"kronecker needs positive n, got {n}")
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    return result * jacobi(D, n)


def is_squarefree(n: int) -> bool:
    n = abs(int(n))
    if n == 0:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 1 if p == 2 else 2
    return True


def fundamental_discriminant(d: int) -> int:
    """Discriminant of ``Q(sqrt(d))`` for squarefree ``d`` not in {0, 1}."""
    if d in (0, 1):
        raise DomainError("d must not be 0 or 1")
    if not is_squarefree(d):
        raise DomainError(f"d={d} is not squarefree")
    return d if d % 4 == 1 else 4 * d
