"""Rational quaternion algebras (a, b) and Hilbert symbols."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import DomainError
from ..quadratic import is_squarefree, kronecker, prime_factors

MODULE = "quaternion"

Quat = tuple[Fraction, Fraction, Fraction, Fraction]


def _split_valuation(x: int, p: int) -> tuple[int, int]:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """(a, b)_p for nonzero integers; p = -1 denotes the real place."""
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol of zero", MODULE)
    if p == -1:
        return -1 if a < 0 and b < 0 else 1
    alpha, u = _split_valuation(a, p)
    beta, v = _split_valuation(b, p)
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2  # noqa: E731
        omega = lambda x: ((x * x - 1) // 8) % 2  # noqa: E731
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * kronecker(u, p) ** beta * kronecker(v, p) ** alpha


@dataclass(frozen=True)
class QuaternionAlgebra:
    """B = (a, b) with i^2 = a, j^2 = b, ij = -ji = k."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a == 0 or self.b == 0:
            raise DomainError("structure constants must be nonzero", MODULE)

    @property
    def definite(self) -> bool:
        return self.a < 0 and self.b < 0

    @property
    def ramified_primes(self) -> tuple[int, ...]:
        cands = sorted(set([2] + prime_factors(self.a) + prime_factors(self.b)))
        return tuple(p for p in cands if hilbert_symbol(self.a, self.b, p) == -1)

    @property
    def discriminant(self) -> int:
        out = 1
        for p in self.ramified_primes:
            out *= p
        return out

    def is_ramified(self, p: int) -> bool:
        return hilbert_symbol(self.a, self.b, p) == -1

    # Arithmetic in the basis (1, i, j, k).

    def mul(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Quat:
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        )

    @staticmethod
    def conj(x: Sequence[Fraction]) -> Quat:
        return (x[0], -x[1], -x[2], -x[3])

    def nrd(self, x: Sequence[Fraction]) -> Fraction:
        a, b = self.a, self.b
        return Fraction(x[0] ** 2 - a * x[1] ** 2 - b * x[2] ** 2 + a * b * x[3] ** 2)

    @staticmethod
    def trd(x: Sequence[Fraction]) -> Fraction:
        return Fraction(2 * x[0])

    def inverse(self, x: Sequence[Fraction]) -> Quat:
        n = self.nrd(x)
        if n == 0:
            raise DomainError("zero divisor has no inverse", MODULE)
        c = self.conj(x)
        return tuple(Fraction(t) / n for t in c)  # type: ignore[return-value]

    def norm_diagonal(self) -> tuple[int, int, int, int]:
        """nrd(x) = sum diag_i x_i^2 in the standard basis."""
        return (1, -self.a, -self.b, self.a * self.b)

    def bilinear(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
        """Polarisation of nrd: (nrd(x+y) - nrd(x) - nrd(y)) / 2."""
        d = self.norm_diagonal()
        return sum((Fraction(d[i]) * x[i] * y[i] for i in range(4)), Fraction(0))


def _negative_squarefree(limit: int) -> list[int]:
    return [-n for n in range(1, limit + 1) if is_squarefree(n)]


def algebra_from_ramification(primes: Sequence[int] | set[int], definite: bool = True) -> QuaternionAlgebra:
    """A definite algebra (a, b) ramified exactly at ``primes`` and infinity.

    Search order: a over -1, -2, -3, -5, ... (outer), b over -1 and
    -P m for P the product of the primes (inner); the first pair whose
    Hilbert symbols match is returned.
    """
    ram = sorted(set(primes))
    if not definite:
        raise DomainError("only definite algebras are supported", MODULE)
    if len(ram) % 2 == 0:
        raise DomainError(f"ramification set {ram} plus infinity has odd cardinality", MODULE)
    for p in ram:
        if len(prime_factors(p)) != 1 or p < 2 or prime_factors(p)[0] != p:
            raise DomainError(f"{p} is not prime", MODULE)
    prod = 1
    for p in ram:
        prod *= p
    for bound in (16, 64, 256, 1024):
        for a in _negative_squarefree(bound):
            bs = [-1] + [-prod * m for m in range(1, bound + 1) if is_squarefree(m)]
            for b in bs:
                alg = QuaternionAlgebra(a, b)
                if list(alg.ramified_primes) == ram:
                    return alg
    raise DomainError(f"no algebra found for {ram}", MODULE)
