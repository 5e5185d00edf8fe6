"""Quadratic fields, splitting of odd primes, and the quadratic residue symbol.

Ideals are only ever products of split primes, each represented by the root
of the minimal polynomial that defines the reduction map ``O_K -> F_p``.
"""

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum

from .arith import FactorTable, fundamental_discriminant, jacobi, kronecker
from .errors import DomainError, VerificationError

__all__ = [
    "QuadraticField",
    "SplittingType",
    "PrimeIdealRep",
    "IdealFactorization",
    "SymbolReport",
    "splitting_type",
    "primes_above",
    "sqrt_mod_prime",
    "residue_symbol",
    "residue_symbol_ideal",
    "enumerate_family_ideals",
    "verify_symbol_identity",
    "prime_norms",
]


class SplittingType(Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


@dataclass(frozen=True)
class QuadraticField:
    """``K = Q(sqrt(d))`` with ring generator ``omega``.

    ``minpoly = (1, b, c)`` encodes ``x^2 + b x + c``: ``x^2 - x - (D-1)/4``
    when ``D = 1 mod 4`` (``omega = (1 + sqrt d)/2``), else ``x^2 - d``.
    """

    d: int
    D: int = field(init=False)
    minpoly: tuple[int, int, int] = field(init=False)

    def __post_init__(self):
        D = fundamental_discriminant(self.d)
        object.__setattr__(self, "D", D)
        if D % 4 == 1:
            object.__setattr__(self, "minpoly", (1, -1, -(D - 1) // 4))
        else:
            object.__setattr__(self, "minpoly", (1, 0, -self.d))

    @property
    def trace(self) -> int:
        """Trace of ``omega`` (sum of the two roots of ``minpoly``)."""
        return -self.minpoly[1]

    def minpoly_at(self, t: int, p: int) -> int:
        _, b, c = self.minpoly
        return (t * t + b * t + c) % p

    def __str__(self):
        return f"Q(sqrt({self.d}))"


@dataclass(frozen=True, order=True)
class PrimeIdealRep:
    """Prime ideal ``(p, omega - root)`` above a split odd prime ``p``."""

    p: int
    root: int


@dataclass(frozen=True)
class IdealFactorization:
    primes: tuple[tuple[PrimeIdealRep, int], ...] = ()

    @property
    def norm(self) -> int:
        n = 1
        for P, e in self.primes:
            n *= P.p**e
        return n

    def __str__(self):
        if not self.primes:
            return "(1)"
        return "*".join(
            f"P({P.p},{P.root})" + (f"^{e}" if e > 1 else "") for P, e in self.primes
        )


def splitting_type(K: QuadraticField, p: int) -> SplittingType:
    if p == 2:
        raise DomainError("p = 2 is not supported; the family is odd")
    if p < 2 or p % 2 == 0:
        raise DomainError(f"{p} is not an odd prime")
    if K.D % p == 0:
        return SplittingType.RAMIFIED
    return SplittingType.SPLIT if jacobi(K.D, p) == 1 else SplittingType.INERT


def prime_norms(K: QuadraticField, p: int) -> tuple[int, ...]:
    """Norms of the prime ideals above any rational prime ``p``, 2 included."""
    k = kronecker(K.D, p)
    if k == 1:
        return (p, p)
    if k == -1:
        return (p * p,)
    return (p,)


def sqrt_mod_prime(a: int, p: int) -> int:
    """Smallest non-negative square root of ``a`` mod odd prime ``p``.

    Direct search for ``p < 10^4``; Tonelli-Shanks otherwise.
    """
    a %= p
    if a == 0:
        return 0
    if jacobi(a, p) != 1:
        raise DomainError(f"{a} is not a square mod {p}")
    if p < 10_000:
        for t in range(1, p):
            if t * t % p == a:
                return t
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while jacobi(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return min(r, p - r)


def primes_above(K: QuadraticField, p: int) -> tuple[PrimeIdealRep, PrimeIdealRep]:
    if splitting_type(K, p) is not SplittingType.SPLIT:
        raise DomainError(f"{p} does not split in {K}")
    _, b, c = K.minpoly
    # roots of x^2 + b x + c: (-b +- sqrt(b^2 - 4c)) / 2, disc = D
    r = sqrt_mod_prime(b * b - 4 * c, p)
    inv2 = (p + 1) // 2
    t1 = (-b + r) * inv2 % p
    t2 = (-b - r) * inv2 % p
    t1, t2 = sorted((t1, t2))
    return PrimeIdealRep(p, t1), PrimeIdealRep(p, t2)


def residue_symbol(K: QuadraticField, a: tuple[int, int], P: PrimeIdealRep) -> int:
    """``(a / P)_K`` for ``a = u + v*omega``; Euler's criterion in ``O_K/P = F_p``."""
    u, v = a
    p = P.p
    if p % 2 == 0:
        raise DomainError("residue symbol needs an odd prime ideal")
    abar = (u + v * P.root) % p
    if abar == 0:
        return 0
    return 1 if pow(abar, (p - 1) // 2, p) == 1 else -1


def residue_symbol_ideal(K: QuadraticField, m: int, A: IdealFactorization) -> int:
    """Multiplicative extension of :func:`residue_symbol` to ``A``, for rational ``m``."""
    out = 1
    for P, e in A.primes:
        s = residue_symbol(K, (m, 0), P)
        if s == 0:
            return 0
        if e % 2:
            out *= s
    return out


def enumerate_family_ideals(
    K: QuadraticField, q: int, table: FactorTable
) -> list[IdealFactorization]:
    """Squarefree ideals of norm ``q`` prime to ``2 D_K`` with no rational prime divisor.

    Non-empty only for odd squarefree ``q`` built from split primes, in which
    case there is one ideal per choice of conjugate above each ``p | q``.
    """
    if q % 2 == 0:
        return []
    factors = table.factor(q)
    if any(e > 1 for _, e in factors):
        return []
    choices = []
    for p, _ in factors:
        if splitting_type(K, p) is not SplittingType.SPLIT:
            return []
        choices.append(primes_above(K, p))
    return [
        IdealFactorization(tuple((P, 1) for P in combo))
        for combo in itertools.product(*choices)
    ]


@dataclass
class SymbolReport:
    field_d: int
    m_max: int
    q_max: int
    checks_run: int = 0
    failures: int = 0
    first_witness: dict | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def verify_symbol_identity(
    K: QuadraticField, m_max: int, q_max: int, table: FactorTable, strict: bool = True
) -> SymbolReport:
    """Check ``(m/A)_K == (m / N A)`` over every family ideal of norm ``<= q_max``.

    ``m`` runs over ``1..m_max`` coprime to ``2 D_K``. With ``strict`` the
    first mismatch raises :class:`VerificationError`.
    """
    if q_max > table.limit:
        raise DomainError("q_max exceeds factor table")
    report = SymbolReport(field_d=K.d, m_max=m_max, q_max=q_max)
    ms = [m for m in range(1, m_max + 1) if m % 2 and math.gcd(m, K.D) == 1]
    for q in range(3, q_max + 1, 2):
        for A in enumerate_family_ideals(K, q, table):
            for m in ms:
                report.checks_run += 1
                lhs = residue_symbol_ideal(K, m, A)
                rhs = jacobi(m, A.norm)
                if lhs != rhs:
                    report.failures += 1
                    if report.first_witness is None:
                        report.first_witness = {"m": m, "ideal": str(A), "lhs": lhs, "rhs": rhs}
                    if strict:
                        raise VerificationError(
                            f"symbol identity fails for m={m}, A={A}", witness=(m, A)
                        )
    return report

