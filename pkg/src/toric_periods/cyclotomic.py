"""Exact arithmetic in cyclotomic fields Q(zeta_m).

Elements are coefficient tuples reduced modulo the m-th cyclotomic
polynomial. The complex embedding is always zeta_m -> exp(2 pi i / m).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # Exact division by a monic polynomial; coefficients low degree first.
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    while len(num) >= len(den) and any(num):
        shift = len(num) - len(den)
        c = num[-1]
        q[shift] = c
        for i, d in enumerate(den):
            num[shift + i] -= c * d
        while num and num[-1] == 0:
            num.pop()
    return q, num


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first."""
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    while poly and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


@dataclass(frozen=True)
class CyclotomicValue:
    """An element of Q(zeta_order) in the power basis 1, zeta, ..., zeta^(phi-1)."""

    coeffs: tuple[Fraction, ...]
    order: int

    @classmethod
    def _reduce(cls, coeffs: list[Fraction], m: int) -> "CyclotomicValue":
        phi = cyclotomic_polynomial(m)
        deg = len(phi) - 1
        c = list(coeffs)
        for top in range(len(c) - 1, deg - 1, -1):
            lead = c[top]
            if lead:
                for i, p in enumerate(phi):
                    c[top - deg + i] -= lead * p
        c = (c + [Fraction(0)] * deg)[:deg]
        return cls(tuple(Fraction(x) for x in c), m)

    @classmethod
    def root_of_unity(cls, k: int, m: int) -> "CyclotomicValue":
        c = [Fraction(0)] * m
        c[k % m] = Fraction(1)
        return cls._reduce(c, m)

    @classmethod
    def rational(cls, x: Fraction | int, m: int) -> "CyclotomicValue":
        return cls._reduce([Fraction(x)], m)

    def _lift(self, m: int) -> "CyclotomicValue":
        if m == self.order:
            return self
        if m % self.order:
            raise ValueError("incompatible cyclotomic orders")
        step = m // self.order
        c = [Fraction(0)] * (step * len(self.coeffs) + 1)
        for i, x in enumerate(self.coeffs):
            c[i * step] = x
        return CyclotomicValue._reduce(c, m)

    def _common(self, other: "CyclotomicValue") -> tuple["CyclotomicValue", "CyclotomicValue"]:
        from math import gcd

        m = self.order * other.order // gcd(self.order, other.order)
        return self._lift(m), other._lift(m)

    def __add__(self, other: "CyclotomicValue") -> "CyclotomicValue":
        a, b = self._common(other)
        return CyclotomicValue(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)), a.order)

    def __sub__(self, other: "CyclotomicValue") -> "CyclotomicValue":
        a, b = self._common(other)
        return CyclotomicValue(tuple(x - y for x, y in zip(a.coeffs, b.coeffs)), a.order)

    def __mul__(self, other: "CyclotomicValue | int | Fraction") -> "CyclotomicValue":
        if not isinstance(other, CyclotomicValue):
            return CyclotomicValue(tuple(x * other for x in self.coeffs), self.order)
        a, b = self._common(other)
        prod = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs))
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    prod[i + j] += x * y
        return CyclotomicValue._reduce(prod, a.order)

    __rmul__ = __mul__

    def conjugate(self) -> "CyclotomicValue":
        m = self.order
        c = [Fraction(0)] * m
        for i, x in enumerate(self.coeffs):
            c[(-i) % m] += x
        return CyclotomicValue._reduce(c, m)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CyclotomicValue.rational(other, self.order)
        if not isinstance(other, CyclotomicValue):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        return hash(complex(round(self.to_complex().real, 9), round(self.to_complex().imag, 9)))

    def rational_value(self) -> Fraction | None:
        """The value as a rational number when it lies in QQ."""
        if all(x == 0 for x in self.coeffs[1:]):
            return self.coeffs[0] if self.coeffs else Fraction(0)
        return None

    def to_complex(self, dps: int = 30) -> mpmath.mpc:
        with mpmath.workdps(dps):
            z = mpmath.expjpi(mpmath.mpf(2) / self.order)
            total = mpmath.mpc(0)
            for i, x in enumerate(self.coeffs):
                if x:
                    total += mpmath.mpf(x.numerator) / x.denominator * z**i
            return total

    def serialize(self) -> dict:
        return {"order": self.order, "coeffs": [str(x) for x in self.coeffs]}
