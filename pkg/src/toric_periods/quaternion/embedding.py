"""Optimal embeddings of quadratic orders and admissible orders.

The admissible order for data with (c, N) = 1 is built
from a maximal order in three stages:

1. find a maximal order admitting an optimal embedding of O_K
   (neighbour search over maximal orders if the first one has none);
2. walk away from K in the p-neighbour tree at each p | c until the
   intersection with K is exactly O_c;
3. modify locally at each p | N: an Eichler order stabilising an
   eigenline of y (K split), Z[y] + p^m O (K inert), or the Iwahori order
   O_K + pi_K O (K ramified, B split at p).

Each stage only changes the order at one prime, so the local pieces are
intersected at the end.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from ..errors import ConditionViolation, DomainError, InternalInvariantError, UnsupportedConfiguration
from ..lattice import Lattice, ShortVectors, integer_kernel, lcm, solve_left
from ..quadratic import fundamental_part, kronecker, prime_factors
from .algebra import QuaternionAlgebra, Quat
from .orders import (
    ONE,
    LocalCertificate,
    OrderBasis,
    as_quat,
    integral_gram,
    left_multiply,
    left_order,
    maximal_order,
    neighbor_ideals,
    right_order,
    subfield_intersection,
)

MODULE = "quaternion"


def kv_type(d: int, p: int) -> str:
    """Splitting type of p in Q(sqrt d)."""
    s = kronecker(d, p)
    return {1: "split", -1: "inert", 0: "ramified"}[s]


def p_adic_valuation(n: int | Fraction, p: int) -> int:
    n = Fraction(n)
    if n == 0:
        raise DomainError("valuation of zero", MODULE)
    v = 0
    num, den = n.numerator, n.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class EmbeddingData:
    """A fixed embedding O_c -> R, omega = (disc + sqrt disc)/2 -> y = (disc + xi)/2."""

    image_generator: Quat  # xi, trace zero, xi^2 = disc
    order: OrderBasis = field(repr=False)
    fundamental_discriminant: int
    conductor: int
    meets: int  # c1 with R meet K = O_{c1}
    admissible: bool
    justification: tuple[tuple[int, str], ...] = ()

    @property
    def discriminant(self) -> int:
        return self.fundamental_discriminant * self.meets**2

    @property
    def omega_image(self) -> Quat:
        d = self.discriminant
        xi = self.image_generator
        return (Fraction(d, 2) + xi[0] / 2, xi[1] / 2, xi[2] / 2, xi[3] / 2)

    def embed(self, x: Fraction | int, y: Fraction | int) -> Quat:
        """Image of x + y omega."""
        w = self.omega_image
        return (Fraction(x) + y * w[0], y * w[1], y * w[2], y * w[3])


def _omega_image(xi: Sequence[Fraction], disc: int) -> Quat:
    return (Fraction(disc, 2) + Fraction(xi[0]) / 2, Fraction(xi[1]) / 2, Fraction(xi[2]) / 2, Fraction(xi[3]) / 2)


def intersection_conductor(alg: QuaternionAlgebra, lat: Lattice, xi: Sequence[Fraction], disc: int) -> int:
    """c' with lat meet Q(xi) = Z + Z (disc'/2 + xi'/2), where disc = disc_K f^2 and xi^2 = disc.

    Returns f / [lat meet K : Z[omega]] , i.e. the conductor of the
    intersection order, provided Z[omega] lies in ``lat``.
    """
    inter = subfield_intersection(alg, lat, xi)
    if inter.rank != 2:
        raise InternalInvariantError("intersection with a quadratic subfield must have rank 2", MODULE)
    frame = [ONE, as_quat(xi)]
    coords = [solve_left(frame, b) for b in inter.basis()]
    det_inter = abs(coords[0][0] * coords[1][1] - coords[0][1] * coords[1][0])
    # Z[omega] has frame determinant 1/2
    ratio = Fraction(1, 2) / det_inter
    if ratio.denominator != 1:
        raise InternalInvariantError("Z[omega] is not contained in the lattice", MODULE)
    _, f = fundamental_part(disc)
    idx = int(ratio)
    if f % idx:
        raise InternalInvariantError("intersection index does not divide the conductor", MODULE)
    return f // idx


def _trace_zero_sublattice(alg: QuaternionAlgebra, lat: Lattice) -> Lattice:
    """Trace-zero part of Z + 2 lat."""
    big = Lattice.from_generators([ONE] + [tuple(2 * x for x in b) for b in lat.basis()])
    basis = big.basis()
    den = 1
    for b in basis:
        den = lcm(den, b[0].denominator)
    rows = [[int(b[0] * den)] for b in basis]
    ker = integer_kernel(rows)
    gens = [tuple(sum((Fraction(k[i]) * basis[i][t] for i in range(4)), Fraction(0)) for t in range(4)) for k in ker]
    return Lattice.from_generators(gens)


def embeddings_in(
    alg: QuaternionAlgebra, lat: Lattice, disc: int, optimal: bool = True, limit: int | None = None
) -> list[Quat]:
    """Trace-zero xi with xi^2 = disc and (disc + xi)/2 in ``lat``, lexicographically sorted.

    With ``optimal`` only embeddings with lat meet Q(xi) = Z[(disc + xi)/2] are kept.
    """
    tz = _trace_zero_sublattice(alg, lat)
    g, s = integral_gram(alg, tz)
    sv = ShortVectors(g)
    basis = tz.basis()
    out = []
    for c in sv.vectors_of_norm(-disc * s):
        xi = tuple(sum((ci * b[t] for ci, b in zip(c, basis)), Fraction(0)) for t in range(4))
        if not lat.contains(_omega_image(xi, disc)):
            continue
        if optimal:
            _, f = fundamental_part(disc)
            if intersection_conductor(alg, lat, xi, disc) != f:
                continue
        out.append(xi)
    out.sort()
    return out[:limit] if limit else out  # type: ignore[return-value]


def _maximal_order_with_embedding(alg: QuaternionAlgebra, start: Lattice, d: int, max_orders: int = 200) -> tuple[Lattice, Quat]:
    ell = next(p for p in range(2, 1000) if alg.discriminant % p and all(p % q for q in range(2, p)))
    queue = [start]
    seen = {start}
    while queue:
        cur = queue.pop(0)
        embs = embeddings_in(alg, cur, d, optimal=False, limit=None)
        if embs:
            return cur, embs[0]
        for j in neighbor_ideals(alg, cur, cur, Fraction(1), ell):
            nb = left_order(alg, j)
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
        if len(seen) > max_orders:
            break
    raise InternalInvariantError(f"no maximal order with an embedding of discriminant {d}", MODULE)


def _push_conductor(alg: QuaternionAlgebra, order: Lattice, xi_k: Quat, d: int, current: int, p: int) -> Lattice:
    """A p-neighbour of ``order`` meeting K in O_{current p}."""
    target = current * p
    xi_t = tuple(target * x for x in xi_k)
    disc_t = d * target * target
    for j in neighbor_ideals(alg, order, order, Fraction(1), p):
        nb = left_order(alg, j)
        if not nb.contains(_omega_image(xi_t, disc_t)):
            continue
        if intersection_conductor(alg, nb, xi_t, disc_t) == target:
            return nb
    raise InternalInvariantError(f"no neighbour at {p} with conductor {target}", MODULE)


def _eichler_at(alg: QuaternionAlgebra, order: Lattice, y: Quat, trace: int, norm: int, p: int, n: int) -> Lattice:
    mod = p**n
    lam = next((t for t in range(mod) if (t * t - trace * t + norm) % mod == 0), None)
    if lam is None:
        raise InternalInvariantError(f"no eigenvalue of y modulo {p}^{n}", MODULE)
    y_minus = (y[0] - lam, y[1], y[2], y[3])
    gens = [alg.mul(b, y_minus) for b in order.basis()] + [tuple(mod * x for x in b) for b in order.basis()]
    ideal = Lattice.from_generators(gens)
    return order.intersection(right_order(alg, ideal))


def _uniformizer(alg: QuaternionAlgebra, y: Quat, trace: int, norm: int, p: int) -> Quat:
    for size in range(1, 50):
        for a in range(-size, size + 1):
            for b in range(-size, size + 1):
                if max(abs(a), abs(b)) != size:
                    continue
                nrd = a * a + a * b * trace + b * b * norm
                if nrd and p_adic_valuation(nrd, p) == 1:
                    return (Fraction(a) + b * y[0], b * y[1], b * y[2], b * y[3])
    raise InternalInvariantError(f"no uniformizer at {p}", MODULE)


def _factor(n: int) -> list[tuple[int, int]]:
    return [(p, p_adic_valuation(n, p)) for p in prime_factors(n)]


def admissible_order(
    alg: QuaternionAlgebra, level: int, d: int, c: int, chi: object | None = None
) -> tuple[OrderBasis, EmbeddingData]:
    """An order R of reduced discriminant ``level`` with R meet K = O_c, and the embedding.

    Supported when (c, level) = 1, the setting of the explicit formula over Q;
    ``chi`` is only needed for the two-class branch 0 < c1 < n, which cannot
    occur under that hypothesis.
    """
    if gcd(c, level) != 1:
        raise UnsupportedConfiguration(
            "orders with (c, N) > 1 (the two-class branch 0 < c1 < n) are not implemented", MODULE
        )
    for p in alg.ramified_primes:
        if level % p:
            raise ConditionViolation(f"B ramified at {p}, which does not divide N = {level}", MODULE)
    plan: list[tuple[int, int, str, bool]] = []
    for p, n in _factor(level):
        kind = kv_type(d, p)
        ram = alg.is_ramified(p)
        if kind == "split" and ram:
            raise ConditionViolation(f"K splits at {p} but B is ramified there: no embedding", MODULE)
        if kind == "inert" and (n % 2 == 1) != ram:
            raise ConditionViolation(
                f"K inert at {p} with ord_p(N) = {n}: B must be {'division' if n % 2 else 'split'} at {p}", MODULE
            )
        if kind == "ramified" and n > 1:
            raise ConditionViolation(f"{p} divides (N, D) with {p}^2 | N", MODULE)
        plan.append((p, n, kind, ram))

    start = maximal_order(alg)
    order, xi_k = _maximal_order_with_embedding(alg, start.lattice, d)
    current = 1
    for p, e in _factor(c):
        if alg.is_ramified(p):
            raise ConditionViolation(f"B ramified at {p} dividing c", MODULE)
        for _ in range(e):
            order = _push_conductor(alg, order, xi_k, d, current, p)
            current *= p
    disc = d * c * c
    xi = tuple(c * x for x in xi_k)
    y = _omega_image(xi, disc)
    trace, norm = disc, (disc * disc - disc) // 4

    pieces: list[Lattice] = []
    certs: list[LocalCertificate] = []
    notes: list[tuple[int, str]] = []
    for p, n, kind, ram in plan:
        if kind == "split":
            pieces.append(_eichler_at(alg, order, y, trace, norm, p, n))
            certs.append(LocalCertificate(p, "eichler", n, kind))
            notes.append((p, f"K split: Eichler order of level {p}^{n} stabilising an eigenline of y"))
        elif kind == "inert":
            m = (n - (1 if ram else 0)) // 2
            if m:
                gens = [ONE, y] + [tuple(p**m * x for x in b) for b in order.basis()]
                pieces.append(Lattice.from_generators(gens))
            certs.append(LocalCertificate(p, "inert-thickened" if m else "maximal-division", m, kind))
            notes.append((p, f"K inert: O_K + {p}^{m} O_B in {'division' if ram else 'split'} B"))
        else:
            if ram:
                certs.append(LocalCertificate(p, "maximal-division", 0, kind))
                notes.append((p, "K ramified, B division: maximal order"))
            else:
                pi = _uniformizer(alg, y, trace, norm, p)
                gens = [ONE, y] + left_multiply(alg, pi, order).basis() + [tuple(p * x for x in b) for b in order.basis()]
                pieces.append(Lattice.from_generators(gens))
                certs.append(LocalCertificate(p, "iwahori", 1, kind))
                notes.append((p, "K ramified, B split: O_K + pi_K O (Iwahori)"))
    for p, e in _factor(c):
        certs.append(LocalCertificate(p, "maximal-split", 0, kv_type(d, p), f"optimal embedding of conductor {p}^{e}"))
        notes.append((p, f"p | c: maximal order meeting K in conductor {p}^{e}"))
    lat = order
    for piece in pieces:
        lat = lat.intersection(piece)
    if level % alg.discriminant:
        raise ConditionViolation("ramified primes must divide N", MODULE)
    result = OrderBasis(alg, lat, level // alg.discriminant, tuple(sorted(certs, key=lambda t: t.prime)))
    result.check()
    if not result.contains(y):
        raise InternalInvariantError("admissible order lost the embedded generator", MODULE)
    meets = intersection_conductor(alg, lat, xi, disc)
    if meets != c:
        raise InternalInvariantError(f"R meets K in conductor {meets}, expected {c}", MODULE)
    emb = EmbeddingData(xi, result, d, c, meets, True, tuple(sorted(notes)))  # type: ignore[arg-type]
    return result, emb


def reembed(emb: EmbeddingData, xi: Sequence[Fraction]) -> EmbeddingData:
    """The same order with another optimal embedding xi."""
    alg = emb.order.algebra
    disc = emb.discriminant
    if alg.nrd(xi) != -disc or xi[0] != 0:
        raise DomainError("xi must have trace 0 and xi^2 = disc", MODULE)
    meets = intersection_conductor(alg, emb.order.lattice, xi, disc)
    return EmbeddingData(as_quat(xi), emb.order, emb.fundamental_discriminant, emb.conductor, meets, meets == emb.conductor, emb.justification)
