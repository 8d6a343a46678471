"""Orders and ideals in definite quaternion algebras over Q.

Every lattice lives in the fixed frame (1, i, j, k) and is stored in
Hermite normal form, so lattice equality is tuple equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import isqrt
from typing import Sequence

import numpy as np

from ..errors import DomainError, InternalInvariantError
from ..lattice import Lattice, ShortVectors, determinant, integer_kernel, lcm, rational_nullspace
from .algebra import QuaternionAlgebra, Quat

MODULE = "quaternion"

ONE: Quat = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))


def frac_sqrt(x: Fraction) -> Fraction:
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn != n or rd * rd != d:
        raise InternalInvariantError(f"{x} is not a rational square", MODULE)
    return Fraction(rn, rd)


def as_quat(v: Sequence[Fraction | int]) -> Quat:
    return tuple(Fraction(x) for x in v)  # type: ignore[return-value]


def qadd(x: Sequence[Fraction], y: Sequence[Fraction]) -> Quat:
    return tuple(a + b for a, b in zip(x, y))  # type: ignore[return-value]


def qscale(x: Sequence[Fraction], s: Fraction | int) -> Quat:
    return tuple(a * s for a in x)  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Lattice operations that need the multiplication


def lattice_product(alg: QuaternionAlgebra, left: Lattice, right: Lattice) -> Lattice:
    return Lattice.from_generators([alg.mul(x, y) for x in left.basis() for y in right.basis()])


def lattice_conjugate(alg: QuaternionAlgebra, lat: Lattice) -> Lattice:
    return Lattice.from_generators([alg.conj(x) for x in lat.basis()])


def left_multiply(alg: QuaternionAlgebra, x: Sequence[Fraction], lat: Lattice) -> Lattice:
    return Lattice.from_generators([alg.mul(x, b) for b in lat.basis()])


def right_multiply(alg: QuaternionAlgebra, lat: Lattice, x: Sequence[Fraction]) -> Lattice:
    return Lattice.from_generators([alg.mul(b, x) for b in lat.basis()])


def left_order(alg: QuaternionAlgebra, lat: Lattice) -> Lattice:
    """{x : x L in L} as the intersection of the lattices L b^{-1}."""
    out: Lattice | None = None
    for b in lat.basis():
        piece = right_multiply(alg, lat, alg.inverse(b))
        out = piece if out is None else out.intersection(piece)
    assert out is not None
    return out


def right_order(alg: QuaternionAlgebra, lat: Lattice) -> Lattice:
    out: Lattice | None = None
    for b in lat.basis():
        piece = left_multiply(alg, alg.inverse(b), lat)
        out = piece if out is None else out.intersection(piece)
    assert out is not None
    return out


def integral_gram(alg: QuaternionAlgebra, lat: Lattice) -> tuple[list[list[int]], int]:
    """(G, s) with nrd(sum c_i b_i) = c^T G c / s for the HNF basis b_i."""
    diag = alg.norm_diagonal()
    rows = lat.rows
    n = len(rows)
    g = [[sum(rows[i][t] * diag[t] * rows[j][t] for t in range(4)) for j in range(n)] for i in range(n)]
    return g, lat.denom * lat.denom


def norm_gram(alg: QuaternionAlgebra, lat: Lattice) -> list[list[Fraction]]:
    g, s = integral_gram(alg, lat)
    return [[Fraction(x, s) for x in row] for row in g]


def reduced_discriminant(alg: QuaternionAlgebra, lat: Lattice) -> Fraction:
    """sqrt |det(trd(e_i conj(e_j)))| = 4 sqrt(det G) for the norm Gram G."""
    det = determinant(norm_gram(alg, lat))
    return 4 * frac_sqrt(abs(det))


def is_integral_element(alg: QuaternionAlgebra, x: Sequence[Fraction]) -> bool:
    return alg.trd(x).denominator == 1 and alg.nrd(x).denominator == 1


def ring_closure(alg: QuaternionAlgebra, lat: Lattice, max_index: int) -> Lattice | None:
    """Smallest ring containing ``lat``; None if it is not an order of bounded index."""
    base_cov = lat.covolume()
    cur = lat
    while True:
        basis = cur.basis()
        gens = basis + [alg.mul(x, y) for x in basis for y in basis]
        nxt = Lattice.from_generators(gens)
        if nxt == cur:
            break
        if base_cov / nxt.covolume() > max_index:
            return None
        cur = nxt
    if not all(is_integral_element(alg, b) for b in cur.basis()):
        return None
    return cur


# ---------------------------------------------------------------------------
# Orders


@dataclass(frozen=True)
class LocalCertificate:
    """How the order looks at one prime: which construction produced it."""

    prime: int
    kind: str  # maximal-division | maximal-split | eichler | inert-thickened | iwahori
    exponent: int = 0
    kv_type: str = ""
    note: str = ""


@dataclass(frozen=True)
class OrderBasis:
    algebra: QuaternionAlgebra
    lattice: Lattice
    level: int = 1
    certificates: tuple[LocalCertificate, ...] = field(default=(), compare=False)

    @property
    def basis(self) -> list[Quat]:
        return self.lattice.basis()

    @cached_property
    def norm_gram(self) -> list[list[Fraction]]:
        return norm_gram(self.algebra, self.lattice)

    @cached_property
    def reduced_discriminant(self) -> int:
        d = reduced_discriminant(self.algebra, self.lattice)
        if d.denominator != 1:
            raise InternalInvariantError("non-integral discriminant", MODULE)
        return int(d)

    def contains(self, x: Sequence[Fraction]) -> bool:
        return self.lattice.contains(x)

    def certificate(self, p: int) -> LocalCertificate | None:
        return next((c for c in self.certificates if c.prime == p), None)

    def check(self) -> None:
        """Exhaustive structural checks; raises on failure."""
        alg = self.algebra
        if not self.contains(ONE):
            raise InternalInvariantError("order does not contain 1", MODULE)
        basis = self.basis
        for x in basis:
            if not self.contains(alg.conj(x)):
                raise InternalInvariantError("order not stable under conjugation", MODULE)
            for y in basis:
                if not self.contains(alg.mul(x, y)):
                    raise InternalInvariantError("order not closed under multiplication", MODULE)
        expected = self.level * alg.discriminant
        if self.reduced_discriminant != expected:
            raise InternalInvariantError(
                f"reduced discriminant {self.reduced_discriminant} differs from {expected}", MODULE
            )
        if alg.definite:
            g, _ = integral_gram(alg, self.lattice)
            mat = np.array(g, dtype=float)
            if np.linalg.eigvalsh(mat).min() <= 0:
                raise InternalInvariantError("norm form not positive definite", MODULE)

    def units(self) -> list[Quat]:
        g, s = integral_gram(self.algebra, self.lattice)
        sv = ShortVectors(g)
        basis = self.basis
        out = []
        for c in sv.vectors_of_norm(s):
            out.append(tuple(sum((ci * b[t] for ci, b in zip(c, basis)), Fraction(0)) for t in range(4)))
        return sorted(out)  # type: ignore[arg-type]


def standard_order(alg: QuaternionAlgebra) -> Lattice:
    return Lattice.from_generators([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])


def _integral_candidates(alg: QuaternionAlgebra, lat: Lattice, p: int) -> list[Quat]:
    """Elements x in (1/p) L \\ L with integral trace and norm, lexicographic in coordinates."""
    g, s = integral_gram(alg, lat)
    basis = lat.basis()
    trace = [alg.trd(b) for b in basis]
    coords = np.array(list(product(range(p), repeat=4)), dtype=object)[1:]
    gm = np.array(g, dtype=object)
    # nrd(c/p) = c^T G c / (s p^2); tr(c/p) = sum c_i tr(b_i) / p
    quad = np.einsum("ni,ij,nj->n", coords, gm, coords)
    out = []
    for c, qv in zip(coords, quad):
        if Fraction(int(qv), s * p * p).denominator != 1:
            continue
        tr = sum((int(ci) * t for ci, t in zip(c, trace)), Fraction(0)) / p
        if tr.denominator != 1:
            continue
        out.append(tuple(sum((Fraction(int(ci), p) * b[t] for ci, b in zip(c, basis)), Fraction(0)) for t in range(4)))
    return out  # type: ignore[return-value]


def maximal_order(alg: QuaternionAlgebra) -> OrderBasis:
    """Saturate Z<1, i, j, k> prime by prime until the discriminant is the product of ramified primes."""
    if not alg.definite:
        raise DomainError("only definite algebras are supported", MODULE)
    target = alg.discriminant
    cur = standard_order(alg)
    while True:
        disc = reduced_discriminant(alg, cur)
        ratio = disc / target
        if ratio == 1:
            break
        if ratio.denominator != 1:
            raise InternalInvariantError("discriminant below the ramified product", MODULE)
        ratio_int = int(ratio)
        p = next(q for q in range(2, ratio_int + 1) if ratio_int % q == 0)
        grown = None
        for x in _integral_candidates(alg, cur, p):
            closure = ring_closure(alg, cur + Lattice.from_generators([x]), ratio_int)
            if closure is not None and closure != cur:
                grown = closure
                break
        if grown is None:
            raise InternalInvariantError(f"could not enlarge order at {p}", MODULE)
        cur = grown
    order = OrderBasis(
        alg,
        cur,
        1,
        tuple(LocalCertificate(p, "maximal-division") for p in alg.ramified_primes),
    )
    order.check()
    return order


# ---------------------------------------------------------------------------
# Right ideals and neighbours


def ideal_norm(alg: QuaternionAlgebra, ideal: Lattice, order: Lattice) -> Fraction:
    """nrd(I) for a right ideal of ``order`` (sqrt of the covolume ratio)."""
    return frac_sqrt(ideal.covolume() / order.covolume())


def _elements_mod(lat: Lattice, ell: int) -> np.ndarray:
    return np.array(list(product(range(ell), repeat=4)), dtype=np.int64)[1:]


def neighbor_ideals(
    alg: QuaternionAlgebra, order: Lattice, ideal: Lattice, ideal_nrd: Fraction, ell: int
) -> list[Lattice]:
    """The ell + 1 right ideals J of ``order`` in ``ideal`` with nrd(J) = ell nrd(I).

    J = x R + ell I for x in I / ell I with nrd(x) / nrd(I) = 0 mod ell, x not in ell I.
    Requires ell coprime to the discriminant of ``order``.
    """
    g, s = integral_gram(alg, ideal)
    coords = _elements_mod(ideal, ell)
    gm = np.array(g, dtype=object)
    quad = np.einsum("ni,ij,nj->n", coords.astype(object), gm, coords.astype(object))
    scale = ideal_nrd * s  # nrd(x)/nrd(I) = c^T G c / scale
    basis = ideal.basis()
    order_basis = order.basis()
    ell_ideal = ideal.scaled(ell)
    seen: list[Lattice] = []
    # x and a x (a a unit mod ell) generate the same J: only normalized c.
    for c, qv in zip(coords, quad):
        first = next(int(t) for t in c if t)
        if first != 1:
            continue
        val = Fraction(int(qv)) / scale
        if val.denominator != 1 or val.numerator % ell:
            continue
        x = tuple(sum((Fraction(int(ci)) * b[t] for ci, b in zip(c, basis)), Fraction(0)) for t in range(4))
        gens = [alg.mul(x, r) for r in order_basis] + ell_ideal.basis()
        j = Lattice.from_generators(gens)
        if j not in seen:
            seen.append(j)
            if len(seen) == ell + 1:
                break
    if len(seen) != ell + 1:
        raise InternalInvariantError(f"found {len(seen)} neighbours at {ell}, expected {ell + 1}", MODULE)
    return seen


def principal_right_ideal(alg: QuaternionAlgebra, x: Sequence[Fraction], order: Lattice) -> Lattice:
    return left_multiply(alg, x, order)


# ---------------------------------------------------------------------------
# Intersections with quadratic subfields


def subfield_intersection(alg: QuaternionAlgebra, lat: Lattice, xi: Sequence[Fraction]) -> Lattice:
    """L intersected with Q + Q xi, computed by an integer kernel."""
    funcs = rational_nullspace([ONE, xi], 4)
    basis = lat.basis()
    rows = []
    for b in basis:
        rows.append([sum((f[t] * b[t] for t in range(4)), Fraction(0)) for f in funcs])
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, x.denominator)
    int_rows = [[int(x * den) for x in r] for r in rows]
    ker = integer_kernel(int_rows)
    gens = [tuple(sum((Fraction(k[i]) * basis[i][t] for i in range(len(basis))), Fraction(0)) for t in range(4)) for k in ker]
    return Lattice.from_generators(gens)
