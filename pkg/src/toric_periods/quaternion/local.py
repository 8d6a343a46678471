"""K^x-conjugacy classes of local Eichler orders R(O_k, t O_k') containing O_k.

The local field is Q_p and K = Q_p[tau] with tau^2 = s tau + r:

* split:    K = Q_p x Q_p, tau = (1, 0), tau^2 = tau;
* inert:    tau^2 = nonresidue (p odd), tau^2 = tau - 1 (p = 2);
* ramified: tau^2 = p, so tau is a uniformizer of K.

Elements of K are pairs (x, y) meaning x + y tau, with rational entries;
every representative used here is rational, so all arithmetic is exact.
O_k = Z_p + p^k O_K has basis (1, p^k tau).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from ..errors import DomainError
from ..quadratic import kronecker

MODULE = "quaternion"

KV_TYPES = ("split", "inert", "ramified")

Elt = tuple[Fraction, Fraction]


def vp(x: Fraction | int, p: int) -> int:
    x = Fraction(x)
    if x == 0:
        raise DomainError("valuation of zero", MODULE)
    v, n, d = 0, x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _vp_or_inf(x: Fraction, p: int) -> float:
    return float("inf") if x == 0 else vp(x, p)


def _mod(x: Fraction, p: int, k: int) -> int:
    """Residue of a p-integral rational modulo p^k."""
    mod = p**k
    if k == 0:
        return 0
    return x.numerator * pow(x.denominator, -1, mod) % mod


@dataclass(frozen=True)
class LocalField:
    """K = Q_p[tau], tau^2 = s tau + r."""

    p: int
    kv_type: str
    s: int
    r: int

    @property
    def e(self) -> int:
        return 2 if self.kv_type == "ramified" else 1

    @classmethod
    def make(cls, p: int, kv_type: str) -> "LocalField":
        if kv_type not in KV_TYPES:
            raise DomainError(f"unknown splitting type {kv_type!r}", MODULE)
        if p < 2 or any(p % q == 0 for q in range(2, p)):
            raise DomainError(f"{p} is not prime", MODULE)
        if kv_type == "split":
            return cls(p, kv_type, 1, 0)
        if kv_type == "ramified":
            return cls(p, kv_type, 0, p)
        if p == 2:
            return cls(p, kv_type, 1, -1)
        n = next(a for a in range(2, p) if kronecker(a, p) == -1)
        return cls(p, kv_type, 0, n)

    def mul(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> Elt:
        x1, y1 = a
        x2, y2 = b
        return (x1 * x2 + self.r * y1 * y2, x1 * y2 + x2 * y1 + self.s * y1 * y2)

    def norm(self, a: Sequence[Fraction]) -> Fraction:
        x, y = a
        return x * x + self.s * x * y - self.r * y * y

    def conj(self, a: Sequence[Fraction]) -> Elt:
        x, y = a
        return (x + self.s * y, -y)

    def inverse(self, a: Sequence[Fraction]) -> Elt:
        n = self.norm(a)
        if n == 0:
            raise DomainError("zero divisor", MODULE)
        c = self.conj(a)
        return (c[0] / n, c[1] / n)

    def split_coords(self, a: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
        """(x + y, x): the two components of x + y tau when tau = (1, 0)."""
        return (a[0] + a[1], a[0])


def elt(x: Fraction | int, y: Fraction | int = 0) -> Elt:
    return (Fraction(x), Fraction(y))


def order_basis(field: LocalField, k: int) -> list[Elt]:
    return [elt(1), elt(0, field.p**k)]


def lattice_basis(field: LocalField, t: Sequence[Fraction], k: int) -> list[Elt]:
    """Basis of t O_k."""
    return [field.mul(t, b) for b in order_basis(field, k)]


def lattice_discriminant(basis1: Sequence[Sequence[Fraction]], basis2: Sequence[Sequence[Fraction]], p: int) -> int:
    """|2 min v(a_ij) - v(det A)| where A carries basis1 to basis2 (A C1 = C2, rows = coordinates)."""
    c1 = [[Fraction(x) for x in row] for row in basis1]
    c2 = [[Fraction(x) for x in row] for row in basis2]
    det1 = c1[0][0] * c1[1][1] - c1[0][1] * c1[1][0]
    det2 = c2[0][0] * c2[1][1] - c2[0][1] * c2[1][0]
    if det1 == 0 or det2 == 0:
        raise DomainError("lattice bases must be nonsingular", MODULE)
    inv1 = [[c1[1][1] / det1, -c1[0][1] / det1], [-c1[1][0] / det1, c1[0][0] / det1]]
    a = [[sum((c2[i][t] * inv1[t][j] for t in range(2)), Fraction(0)) for j in range(2)] for i in range(2)]
    alpha = min(_vp_or_inf(x, p) for row in a for x in row)
    beta = vp(det2 / det1, p)
    return int(abs(2 * alpha - beta))


def order_discriminant(field: LocalField, k: int, t: Sequence[Fraction], k_prime: int) -> int:
    """d(O_k, t O_k')."""
    return lattice_discriminant(order_basis(field, k), lattice_basis(field, t, k_prime), field.p)


def class_key(field: LocalField, t: Sequence[Fraction], k_prime: int) -> tuple:
    """Canonical label of t in K^x / F^x O_k'^x."""
    p = field.p
    if field.kv_type == "split":
        a, b = field.split_coords(t)
        j = vp(a, p) - vp(b, p)
        u = a / b / Fraction(p) ** j
        return ("split", j, _mod(u, p, k_prime))
    a_exp = vp(field.norm(t), p) % 2 if field.e == 2 else 0
    u = t
    if a_exp:
        u = field.mul(u, field.inverse(elt(0, 1)))
    x, y = u
    if x != 0 and (y == 0 or vp(x, p) <= vp(y, p)):
        # u = x (1 + (y/x) tau)
        z = y / x
        if k_prime == 0:
            return (field.kv_type, a_exp)
        return (field.kv_type, a_exp, "1+z", _mod(z, p, k_prime))
    z = x / y  # u = y (z + tau), z in p Z_p
    if k_prime == 0:
        return (field.kv_type, a_exp)
    return (field.kv_type, a_exp, "z+tau", _mod(z, p, k_prime))


def class_representatives(field: LocalField, k_prime: int, max_shift: int = 12) -> Iterator[Elt]:
    """All classes of K^x / F^x O_k'^x; split classes truncated to |v(t_1) - v(t_2)| <= max_shift."""
    p = field.p
    mod = p**k_prime
    if field.kv_type == "split":
        for j in range(-max_shift, max_shift + 1):
            for u in range(1, max(mod, 2)):
                if mod > 1 and u % p == 0:
                    continue
                if mod == 1 and u != 1:
                    continue
                # (p^j u, 1) = x + y tau with x = 1, y = p^j u - 1
                yield elt(1, Fraction(p) ** j * u - 1)
        return
    shifts = [elt(1)] if field.e == 1 else [elt(1), elt(0, 1)]
    units: list[Elt] = [elt(1)]
    if k_prime > 0:
        units = [elt(1, z) for z in range(mod)] + [elt(z, 1) for z in range(0, mod, p)]
    for s in shifts:
        for u in units:
            if vp(field.norm(u), p) != 0:
                continue
            yield field.mul(s, u)


@dataclass(frozen=True)
class LocalOrderClass:
    """One K^x-class of R(O_k, t O_k') with discriminant m."""

    m: int
    k: int
    k_prime: int
    t: Elt
    case_tag: int  # which family of representatives produced it: 1, 2 or 3
    description: str

    @property
    def d(self) -> int:
        return self.k + self.k_prime - self.m


def _unit_residues(p: int, r: int) -> list[int]:
    if r == 0:
        return [1]
    return [u for u in range(1, p**r) if u % p]


def local_conjugacy_classes(m: int, k: int, kv_type: str, prime: int = 2) -> list[LocalOrderClass]:
    """Closed-form representatives (k', t) of orders with discriminant p^m and R meet K = O_k."""
    if m < 0 or k < 0:
        raise DomainError("m and k must be nonnegative", MODULE)
    field = LocalField.make(prime, kv_type)
    p, e = prime, field.e
    out: list[LocalOrderClass] = []
    if m <= 2 * k:
        for kp in range(abs(m - k), k + 1):
            d = k + kp - m
            if d % 2:
                continue
            half = d // 2
            if kp == half:
                out.append(LocalOrderClass(m, k, kp, elt(1), 1, "t = 1"))
                continue
            for u in _unit_residues(p, kp - half):
                if kv_type == "split" and half == 0 and (1 + u) % p == 0:
                    # (1 + u, 1) is not a unit of O_K: its discriminant is m + 1
                    continue
                t = elt(1, Fraction(p**half * u))
                out.append(LocalOrderClass(m, k, kp, t, 1, f"t = 1 + p^{half} tau * {u}"))
    if kv_type == "split" and m >= k + 1:
        for kp in range(0, min(m - k - 1, k) + 1):
            d = k + kp - m
            for sign in (1, -1):
                for u in _unit_residues(p, kp):
                    first = Fraction(p) ** (sign * d) * u
                    t = elt(1, first - 1)
                    out.append(LocalOrderClass(m, k, kp, t, 2, f"t = (p^{sign * d} * {u}, 1)"))
    if kv_type != "split" and k + 1 <= m <= 2 * k + e - 1:
        kp = m - k - e + 1
        if 0 <= kp <= k:
            for x in range(p ** max(kp + e - 2, 0)):
                t = elt(p * x, 1)
                out.append(LocalOrderClass(m, k, kp, t, 3, f"t = p * {x} + tau"))
    return out


def brute_force_classes(m: int, k: int, kv_type: str, prime: int) -> dict[tuple[int, tuple], Elt]:
    """Oracle: every (k', [t]) with d(O_k, t O_k') = m, keyed by (k', class label)."""
    field = LocalField.make(prime, kv_type)
    found: dict[tuple[int, tuple], Elt] = {}
    for kp in range(k + 1):
        for t in class_representatives(field, kp, max_shift=m + k + 4):
            if order_discriminant(field, k, t, kp) == m:
                found.setdefault((kp, class_key(field, t, kp)), t)
    return found


def compare_with_brute_force(m: int, k: int, kv_type: str, prime: int) -> tuple[bool, str]:
    """Check that the closed-form list is a set of distinct classes equal to the oracle's."""
    field = LocalField.make(prime, kv_type)
    reps = local_conjugacy_classes(m, k, kv_type, prime)
    oracle = brute_force_classes(m, k, kv_type, prime)
    keys = []
    for c in reps:
        got = order_discriminant(field, k, c.t, c.k_prime)
        if got != m:
            return False, f"{c.description} (k'={c.k_prime}) has discriminant {got}, not {m}"
        keys.append((c.k_prime, class_key(field, c.t, c.k_prime)))
    if len(set(keys)) != len(keys):
        return False, "representatives are not pairwise inequivalent"
    if set(keys) != set(oracle):
        return False, f"{len(keys)} representatives versus {len(oracle)} oracle classes"
    return True, f"{len(keys)} classes"


def eichler_symbol(certificate: object) -> int:
    """e(R) from a local certificate: 1 (Eichler), -1 (quadratic residue field), 0 (ramified, level >= 2)."""
    kind = getattr(certificate, "kind", certificate)
    exponent = getattr(certificate, "exponent", 0)
    if kind in ("eichler", "iwahori"):
        return 1
    if kind in ("maximal-division", "inert-thickened"):
        return -1
    if kind == "ramified-thickened":
        if exponent >= 2:
            return 0
        raise DomainError("O_K + pi_K O_B with exponent 1 is an Iwahori order; use kind 'iwahori'", MODULE)
    if kind == "maximal-split":
        raise DomainError("the Eichler symbol is only defined for non-maximal orders or division algebras", MODULE)
    raise DomainError(f"unknown local order kind {kind!r}", MODULE)
