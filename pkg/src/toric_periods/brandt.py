"""Right ideal class sets, Brandt matrices and Hecke eigenlines.

Conventions (all over Q):

* ``weights[i]`` is w_i = #(O_L(I_i)^x) / 2, the order of the unit group
  modulo +-1.
* ``mass(R)`` is the Eichler mass sum_i 1 / #(O_L(I_i)^x) = sum_i 1/(2 w_i);
  for a maximal order ramified at p it equals (p - 1)/24.
* ``BrandtMatrix.matrix[i][j]`` is the coefficient of [g_i] in T_p [g_j],
  so column sums are p + 1 and a vector v in Q[X] is an eigenvector when
  M v = a_p v.  ``gross_matrix`` is the transpose.
* A function f on X is identified with v = sum_i f(g_i) w_i^{-1} [g_i];
  the degree of v is sum_i v_i and the height pairing is sum_i u_i v_i w_i.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import ceil, isqrt
from typing import Mapping, Sequence

import mpmath
import sympy

from .errors import DomainError, InsufficientSeparation, InternalInvariantError
from .lattice import Lattice, ShortVectors, integer_kernel, lcm
from .quadratic import prime_factors
from .quaternion.algebra import QuaternionAlgebra
from .quaternion.local import eichler_symbol
from .quaternion.orders import (
    LocalCertificate,
    OrderBasis,
    integral_gram,
    lattice_conjugate,
    lattice_product,
    left_multiply,
    neighbor_ideals,
)

MODULE = "brandt"


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, isqrt(n) + 1))


def primes_up_to(bound: int) -> list[int]:
    return [p for p in range(2, bound + 1) if _is_prime(p)]


# ---------------------------------------------------------------------------
# Mass


def local_mass_factor(cert: LocalCertificate, ramified: bool) -> Fraction:
    """Local factor of 24 * mass at one prime: (p-1)^delta(B) [R0^x : R^x]."""
    p = cert.prime
    base = Fraction(p - 1) if ramified else Fraction(1)
    if cert.kind in ("maximal-division", "maximal-split"):
        return base
    if cert.kind == "eichler":
        n = cert.exponent
    elif cert.kind == "iwahori":
        n = 1
    elif cert.kind == "inert-thickened":
        n = 2 * cert.exponent + (1 if ramified else 0)
    elif cert.kind == "ramified-thickened":
        n = cert.exponent
    else:
        raise DomainError(f"unknown local order kind {cert.kind!r}", MODULE)
    e = eichler_symbol(cert)
    index = Fraction(p) ** n * (1 - Fraction(1, p * p)) / (1 - Fraction(e, p))
    if ramified:
        index /= p - 1
    return base * index


def mass(order: OrderBasis) -> Fraction:
    """Eichler mass sum 1/#R_i^x from the local certificates of ``order``."""
    alg = order.algebra
    if not alg.definite:
        raise DomainError("mass is defined here for definite algebras only", MODULE)
    out = Fraction(1, 24)
    covered = set()
    for cert in order.certificates:
        out *= local_mass_factor(cert, alg.is_ramified(cert.prime))
        covered.add(cert.prime)
    level = order.reduced_discriminant
    missing = [p for p in prime_factors(level) if p not in covered]
    if missing:
        raise DomainError(f"no local description of the order at {missing}", MODULE)
    return out


# ---------------------------------------------------------------------------
# Ideal arithmetic helpers


def _normalized_gram(alg: QuaternionAlgebra, lat: Lattice, scale: Fraction) -> list[list[int]]:
    """Integral Gram of the even form 2 nrd(x)/scale on ``lat``."""
    g, s = integral_gram(alg, lat)
    out = []
    for row in g:
        new = []
        for x in row:
            v = 2 * Fraction(x) / (s * scale)
            if v.denominator != 1:
                raise InternalInvariantError("normalized norm form is not integral", MODULE)
            new.append(int(v))
        out.append(new)
    return out


def _combine(lat: Lattice, coeffs: Sequence[int]) -> tuple[Fraction, ...]:
    basis = lat.basis()
    return tuple(sum((Fraction(c) * b[t] for c, b in zip(coeffs, basis)), Fraction(0)) for t in range(4))


def is_isomorphic(alg: QuaternionAlgebra, i: Lattice, n_i: Fraction, j: Lattice, n_j: Fraction) -> bool:
    """Right ideals I, J are isomorphic iff J conj(I) has an element of norm nrd(I) nrd(J)."""
    prod = lattice_product(alg, j, lattice_conjugate(alg, i))
    g = _normalized_gram(alg, prod, n_i * n_j)
    return ShortVectors(g).find_norm(2) is not None


def reduce_ideal(alg: QuaternionAlgebra, ideal: Lattice, n: Fraction) -> tuple[Lattice, Fraction]:
    """An isomorphic integral right ideal of small norm: conj(x) I / nrd(I) for a shortest x in I."""
    g = _normalized_gram(alg, ideal, n)
    sv = ShortVectors(g)
    m = sv.minimum()
    coeffs = min(c for c, val in sv.vectors(m) if val == m)
    x = _combine(ideal, coeffs)
    new = left_multiply(alg, alg.conj(x), ideal).scaled(Fraction(1) / n)
    return new, Fraction(m, 2)


def unit_count(alg: QuaternionAlgebra, ideal: Lattice, n: Fraction) -> int:
    """#O_L(I)^x, counted as elements of norm nrd(I)^2 in I conj(I) = nrd(I) O_L(I)."""
    prod = lattice_product(alg, ideal, lattice_conjugate(alg, ideal))
    g = _normalized_gram(alg, prod, n * n)
    return len(ShortVectors(g).vectors_of_norm(2))


def _invariant(alg: QuaternionAlgebra, ideal: Lattice, n: Fraction, depth: int = 6) -> tuple[int, ...]:
    return tuple(ShortVectors(_normalized_gram(alg, ideal, n)).theta_series(2 * depth)[::2])


# ---------------------------------------------------------------------------
# Class sets


@dataclass(frozen=True)
class BrandtMatrix:
    prime: int
    matrix: tuple[tuple[int, ...], ...]
    kind: str = "T"

    @property
    def gross_matrix(self) -> tuple[tuple[int, ...], ...]:
        """Transpose: entry (i, j) counts neighbours of class i in class j."""
        return tuple(zip(*self.matrix))

    def as_sympy(self) -> sympy.Matrix:
        return sympy.Matrix(self.matrix)

    def apply(self, v: Sequence) -> list:
        return [sum((self.matrix[i][j] * v[j] for j in range(len(v))), 0 * v[0]) for i in range(len(v))]


@dataclass
class ClassSet:
    order: OrderBasis
    ideals: tuple[Lattice, ...]
    norms: tuple[Fraction, ...]
    weights: tuple[int, ...]
    neighbor_prime: int
    _invariants: tuple[tuple[int, ...], ...] = field(repr=False, default=())
    _theta: dict[tuple[int, int], list[int]] = field(repr=False, default_factory=dict)
    _theta_bound: int = field(repr=False, default=0)

    def __len__(self) -> int:
        return len(self.ideals)

    @property
    def algebra(self) -> QuaternionAlgebra:
        return self.order.algebra

    @property
    def level(self) -> int:
        """Reduced discriminant of the order."""
        return self.order.reduced_discriminant

    @cached_property
    def unit_counts(self) -> tuple[int, ...]:
        return tuple(2 * w for w in self.weights)

    def mass_sum(self) -> Fraction:
        return sum((Fraction(1, 2 * w) for w in self.weights), Fraction(0))

    def classify(self, ideal: Lattice, n: Fraction | None = None) -> int:
        """Index of the class of a right ideal of the order."""
        alg = self.algebra
        if n is None:
            n = _frac_sqrt(ideal.covolume() / self.order.lattice.covolume())
        inv = _invariant(alg, ideal, n)
        for idx, (other, n_o) in enumerate(zip(self.ideals, self.norms)):
            if self._invariants and self._invariants[idx] != inv:
                continue
            if is_isomorphic(alg, other, n_o, ideal, n):
                return idx
        raise InternalInvariantError("ideal not isomorphic to any class: class set incomplete", MODULE)

    # -- Brandt matrices ---------------------------------------------------

    def _ensure_theta(self, bound: int) -> None:
        if bound <= self._theta_bound:
            return
        alg = self.algebra
        for i in range(len(self)):
            for j in range(i, len(self)):
                prod = lattice_product(alg, self.ideals[j], lattice_conjugate(alg, self.ideals[i]))
                g = _normalized_gram(alg, prod, self.norms[i] * self.norms[j])
                series = ShortVectors(g).theta_series(2 * bound)[::2]
                self._theta[(i, j)] = series
                self._theta[(j, i)] = series
        self._theta_bound = bound

    def theta(self, i: int, j: int, bound: int) -> list[int]:
        """Representation numbers of nrd(x)/(n_i n_j) on I_j conj(I_i), up to ``bound``."""
        self._ensure_theta(bound)
        return self._theta[(i, j)][: bound + 1]

    def hecke_matrix(self, n: int) -> tuple[tuple[int, ...], ...]:
        """B(n)[i][j] = r_{ij}(n) / (2 w_i) for any n >= 1 (including n = 0 conventions excluded)."""
        self._ensure_theta(n)
        size = len(self)
        rows = []
        for i in range(size):
            row = []
            for j in range(size):
                count = self._theta[(i, j)][n]
                if count % (2 * self.weights[i]):
                    raise InternalInvariantError("representation count not divisible by the unit count", MODULE)
                row.append(count // (2 * self.weights[i]))
            rows.append(tuple(row))
        return tuple(rows)


def _frac_sqrt(x: Fraction) -> Fraction:
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn != n or rd * rd != d:
        raise InternalInvariantError(f"{x} is not a rational square", MODULE)
    return Fraction(rn, rd)


def class_set(order: OrderBasis, max_classes: int = 5000) -> ClassSet:
    """Neighbour search at the least good prime until the unit masses add up to mass(order)."""
    alg = order.algebra
    target = mass(order)
    level = order.reduced_discriminant
    ell = next(p for p in range(2, 10**6) if _is_prime(p) and level % p)
    root = order.lattice
    ideals: list[Lattice] = [root]
    norms: list[Fraction] = [Fraction(1)]
    weights: list[int] = []
    invariants: list[tuple[int, ...]] = []
    u0 = unit_count(alg, root, Fraction(1))
    weights.append(u0 // 2)
    invariants.append(_invariant(alg, root, Fraction(1)))
    total = Fraction(1, u0)
    queue = [0]
    while queue and total < target:
        cur = queue.pop(0)
        for nb in neighbor_ideals(alg, root, ideals[cur], norms[cur], ell):
            nb, n_nb = reduce_ideal(alg, nb, norms[cur] * ell)
            inv = _invariant(alg, nb, n_nb)
            known = any(
                invariants[k] == inv and is_isomorphic(alg, ideals[k], norms[k], nb, n_nb) for k in range(len(ideals))
            )
            if known:
                continue
            units = unit_count(alg, nb, n_nb)
            ideals.append(nb)
            norms.append(n_nb)
            weights.append(units // 2)
            invariants.append(inv)
            total += Fraction(1, units)
            queue.append(len(ideals) - 1)
            if total >= target or len(ideals) > max_classes:
                break
    if total != target:
        raise InternalInvariantError(f"unit masses sum to {total}, expected mass {target}", MODULE)
    return ClassSet(order, tuple(ideals), tuple(norms), tuple(weights), ell, tuple(invariants))


def _check_good(cs: ClassSet, p: int) -> None:
    if not _is_prime(p):
        raise DomainError(f"{p} is not prime", MODULE)
    if cs.level % p == 0:
        raise DomainError(f"{p} divides the level {cs.level}: Brandt matrices are only built at good primes", MODULE)


def brandt_matrix(cs: ClassSet, p: int) -> BrandtMatrix:
    _check_good(cs, p)
    mat = cs.hecke_matrix(p)
    for j in range(len(cs)):
        if sum(mat[i][j] for i in range(len(cs))) != p + 1:
            raise InternalInvariantError(f"column {j} of T_{p} does not sum to {p + 1}", MODULE)
    return BrandtMatrix(p, mat, "T")


def brandt_matrices(cs: ClassSet, primes: Sequence[int]) -> dict[int, BrandtMatrix]:
    if primes:
        cs._ensure_theta(max(primes))
    return {p: brandt_matrix(cs, p) for p in primes}


def s_operator(cs: ClassSet, p: int) -> BrandtMatrix:
    """[I] -> [p I] as a permutation matrix (the identity over Q)."""
    _check_good(cs, p)
    size = len(cs)
    mat = [[0] * size for _ in range(size)]
    for j, (ideal, n) in enumerate(zip(cs.ideals, cs.norms)):
        i = cs.classify(ideal.scaled(p), n * p * p)
        mat[i][j] = 1
    return BrandtMatrix(p, tuple(tuple(r) for r in mat), "S")


def two_sided_prime(order: OrderBasis, p: int) -> Lattice:
    """The two-sided ideal P = {x in R : trd(x conj(y)) = 0 mod p for y in R}.

    For p exactly dividing the reduced discriminant this is the unique
    two-sided ideal with P^2 = pR.
    """
    alg = order.algebra
    basis = order.basis
    tr = [[2 * alg.bilinear(x, y) for y in basis] for x in basis]
    den = 1
    for row in tr:
        for v in row:
            den = lcm(den, v.denominator)
    # c with tr c = 0 mod p: kernel of [tr ; p I] restricted to the first block
    rows = [[int(tr[a][b] * den) for b in range(4)] for a in range(4)] + [
        [p * den if a == b else 0 for b in range(4)] for a in range(4)
    ]
    ker = integer_kernel(rows)
    gens = [_combine(order.lattice, k[:4]) for k in ker]
    return Lattice.from_generators(gens)


def atkin_lehner(cs: ClassSet, p: int) -> BrandtMatrix:
    """[I] -> [I P] for the two-sided prime P above p (p exactly dividing the level)."""
    alg = cs.algebra
    if cs.level % p or (cs.level // p) % p == 0:
        raise DomainError(f"{p} must divide the level {cs.level} exactly once", MODULE)
    prime = two_sided_prime(cs.order, p)
    if prime.covolume() / cs.order.lattice.covolume() != p * p:
        raise InternalInvariantError(f"two-sided ideal above {p} has the wrong index", MODULE)
    size = len(cs)
    mat = [[0] * size for _ in range(size)]
    for j, (ideal, n) in enumerate(zip(cs.ideals, cs.norms)):
        prod = lattice_product(alg, ideal, prime)
        i = cs.classify(prod, n * p)
        mat[i][j] = 1
    if sorted(map(tuple, zip(*mat))) != sorted(tuple(1 if a == b else 0 for b in range(size)) for a in range(size)):
        raise InternalInvariantError("Atkin-Lehner operator is not a permutation", MODULE)
    return BrandtMatrix(p, tuple(tuple(r) for r in mat), "W")


def height_pairing(cs: ClassSet, u: Sequence, v: Sequence):
    """sum_i u_i conj(v_i) w_i."""
    if len(u) != len(cs) or len(v) != len(cs):
        raise DomainError("vector length does not match the class set", MODULE)
    total = 0
    for a, b, w in zip(u, v, cs.weights):
        bc = b.conjugate() if hasattr(b, "conjugate") else b
        total += a * bc * w
    return total


# ---------------------------------------------------------------------------
# Hecke decomposition and eigenlines


def sturm_primes(level: int, extra: int = 3) -> list[int]:
    """Good primes up to ceil(N/6 prod(1 + 1/p)) plus ``extra`` further good primes."""
    index = Fraction(level)
    for p in prime_factors(level):
        index *= Fraction(p + 1, p)
    bound = ceil(index / 6)
    good = [p for p in primes_up_to(max(bound, 2)) if level % p]
    q = max(bound, 2)
    added = 0
    while added < extra:
        q += 1
        if _is_prime(q) and level % q:
            good.append(q)
            added += 1
    return good


@dataclass
class HeckeSpace:
    """A Q-rational Hecke-stable subspace of the degree-zero space, cut out by minimal polynomials."""

    basis: sympy.Matrix  # columns in Q[X]
    polys: dict[int, sympy.Poly]

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]


@dataclass
class EigenLine:
    """Common eigenvector v of the Brandt matrices in the degree-zero part of Q[X] (or R[X])."""

    vector: list  # v_i, coordinates in Q[X]
    values: list  # f(g_i) = w_i v_i
    eigenvalues: dict[int, object]
    exact: bool
    field_degree: int = 1
    degree_zero: bool = True

    def a(self, p: int):
        return self.eigenvalues[p]


def _restrict(mat: sympy.Matrix, basis: sympy.Matrix) -> sympy.Matrix:
    """Matrix of ``mat`` on the column space of ``basis`` (assumed stable)."""
    image = mat * basis
    sol, params = basis.gauss_jordan_solve(image)
    if params.shape[0]:
        raise InternalInvariantError("subspace is not stable", MODULE)
    return sol


def degree_zero_basis(size: int) -> sympy.Matrix:
    cols = []
    for i in range(1, size):
        v = [0] * size
        v[0], v[i] = 1, -1
        cols.append(v)
    if not cols:
        return sympy.zeros(size, 0)
    return sympy.Matrix(cols).T


def hecke_decomposition(cs: ClassSet, primes: Sequence[int] | None = None) -> list[HeckeSpace]:
    """Split the degree-zero space by irreducible factors of the characteristic polynomials."""
    primes = list(primes) if primes is not None else sturm_primes(cs.level)
    mats = {p: sympy.Matrix(m.matrix) for p, m in brandt_matrices(cs, primes).items()}
    x = sympy.Symbol("x")
    spaces = [HeckeSpace(degree_zero_basis(len(cs)), {})]
    if spaces[0].dimension == 0:
        return []
    for p in primes:
        refined = []
        for sp in spaces:
            a = _restrict(mats[p], sp.basis)
            poly = sympy.Poly(a.charpoly(x).as_expr(), x)
            for fac, _ in sorted(poly.factor_list()[1], key=lambda t: (t[0].degree(), str(t[0].as_expr()))):
                ker = _poly_at(fac, a).nullspace()
                if not ker:
                    continue
                sub = sp.basis * sympy.Matrix.hstack(*ker)
                refined.append(HeckeSpace(sub, {**sp.polys, p: fac}))
        spaces = refined
    return spaces


def _poly_at(poly: sympy.Poly, mat: sympy.Matrix) -> sympy.Matrix:
    out = sympy.zeros(*mat.shape)
    for c in poly.all_coeffs():
        out = out * mat + c * sympy.eye(mat.shape[0])
    return out


def eigenlines(
    cs: ClassSet, primes: Sequence[int] | None = None, dps: int = 40, strict: bool = False
) -> list[EigenLine]:
    """Lines of the degree-zero space cut out by single Galois orbits of eigenvalues.

    Rational lines are exact; irrational orbits are resolved numerically at
    ``dps`` digits.  Pieces that are not a single orbit (old forms with
    multiplicity) are skipped, or raise InsufficientSeparation when ``strict``.
    """
    primes = list(primes) if primes is not None else sturm_primes(cs.level)
    mats = {p: m for p, m in brandt_matrices(cs, primes).items()}
    out: list[EigenLine] = []
    for sp in hecke_decomposition(cs, primes):
        degree = max((f.degree() for f in sp.polys.values()), default=1)
        if sp.dimension != degree:
            if strict:
                raise InsufficientSeparation(
                    f"Hecke operators at {primes} leave a {sp.dimension}-dimensional piece of degree {degree}",
                    MODULE,
                )
            continue
        if degree == 1:
            col = sp.basis[:, 0]
            vec = [_to_fraction(v) for v in col]
            evs = {}
            for p in primes:
                img = mats[p].apply(vec)
                k = next(i for i, t in enumerate(vec) if t != 0)
                evs[p] = img[k] / vec[k]
                if any(img[i] != evs[p] * vec[i] for i in range(len(vec))):
                    raise InternalInvariantError("rational piece is not an eigenvector", MODULE)
            out.append(_make_line(cs, vec, evs, True, 1))
        else:
            out.extend(_numeric_lines(cs, sp, mats, primes, dps))
    return out


def unseparated_pieces(cs: ClassSet, primes: Sequence[int] | None = None) -> list[HeckeSpace]:
    primes = list(primes) if primes is not None else sturm_primes(cs.level)
    return [
        sp
        for sp in hecke_decomposition(cs, primes)
        if sp.dimension != max((f.degree() for f in sp.polys.values()), default=1)
    ]


def _to_fraction(x: sympy.Expr) -> Fraction:
    num, den = sympy.fraction(sympy.Rational(x))
    return Fraction(int(num), int(den))


def _to_mpf(x: sympy.Expr) -> mpmath.mpf:
    f = _to_fraction(x)
    return mpmath.mpf(f.numerator) / f.denominator


def _make_line(cs: ClassSet, vec: list, evs: dict, exact: bool, deg: int) -> EigenLine:
    values = [w * v for w, v in zip(cs.weights, vec)]
    return EigenLine(vec, values, evs, exact, deg, True)


def _numeric_lines(cs: ClassSet, sp: HeckeSpace, mats: Mapping[int, BrandtMatrix], primes: Sequence[int], dps: int) -> list[EigenLine]:
    with mpmath.workdps(dps):
        # a generic combination separates the Galois conjugates
        size = sp.dimension
        combo = sympy.zeros(size, size)
        for k, p in enumerate(primes):
            combo += (k + 1) * _restrict(sympy.Matrix(mats[p].matrix), sp.basis)
        m = mpmath.matrix([[_to_mpf(combo[i, j]) for j in range(size)] for i in range(size)])
        _, vecs = mpmath.eig(m)
        basis = [[_to_mpf(sp.basis[i, j]) for j in range(size)] for i in range(sp.basis.shape[0])]
        lines = []
        for col in range(size):
            coords = [mpmath.re(vecs[r, col]) for r in range(size)]
            vec = [mpmath.fsum(basis[i][j] * coords[j] for j in range(size)) for i in range(len(basis))]
            k = max(range(len(vec)), key=lambda i: abs(vec[i]))
            vec = [v / vec[k] for v in vec]
            evs = {}
            for p in primes:
                img = mats[p].apply(vec)
                evs[p] = img[k] / vec[k]
                if max(abs(img[i] - evs[p] * vec[i]) for i in range(len(vec))) > mpmath.mpf(10) ** (-dps // 2):
                    raise InternalInvariantError("numerical eigenvector failed to converge", MODULE)
            lines.append(_make_line(cs, vec, evs, False, size))
    lines.sort(key=lambda ln: [float(ln.eigenvalues[p]) for p in primes])
    return lines


def eigenline(
    cs: ClassSet,
    primes: Sequence[int] | None = None,
    eigenvalues: Mapping[int, int] | None = None,
    index: int = 0,
) -> EigenLine:
    """The line with the requested eigenvalues (or the ``index``-th line, rational lines first)."""
    primes = list(primes) if primes is not None else sturm_primes(cs.level)
    lines = eigenlines(cs, primes)
    if eigenvalues:
        found = [ln for ln in lines if all(ln.eigenvalues.get(p) == a for p, a in eigenvalues.items())]
        if len(found) != 1:
            for sp in unseparated_pieces(cs, primes):
                if all(sp.polys[p].degree() == 1 and sp.polys[p].eval(a) == 0 for p, a in eigenvalues.items() if p in sp.polys):
                    raise InsufficientSeparation(
                        f"eigenvalues {dict(eigenvalues)} occur with multiplicity {sp.dimension}", MODULE
                    )
            raise DomainError(f"{len(found)} lines match eigenvalues {dict(eigenvalues)}", MODULE)
        return found[0]
    lines.sort(key=lambda ln: (not ln.exact, ln.field_degree))
    if index >= len(lines):
        raise DomainError(f"only {len(lines)} eigenlines; index {index} requested", MODULE)
    return lines[index]


def extend_eigenvalues(cs: ClassSet, line: EigenLine, bound: int) -> dict[int, object]:
    """a_p for all good p <= bound, read off one coordinate of the Brandt action."""
    cs._ensure_theta(bound)
    vec = line.vector
    k = max(range(len(vec)), key=lambda i: abs(vec[i]))
    out = dict(line.eigenvalues)
    for p in primes_up_to(bound):
        if cs.level % p == 0 or p in out:
            continue
        mat = cs.hecke_matrix(p)
        out[p] = sum((mat[k][j] * vec[j] for j in range(len(vec))), 0 * vec[0]) / vec[k]
        if line.exact:
            img = [sum((mat[i][j] * vec[j] for j in range(len(vec))), Fraction(0)) for i in range(len(vec))]
            if any(img[i] != out[p] * vec[i] for i in range(len(vec))):
                raise InternalInvariantError(f"line is not an eigenvector of T_{p}", MODULE)
    return out


def bad_prime_eigenvalues(cs: ClassSet, line: EigenLine) -> dict[int, object]:
    """a_p at p | level: 0 if p^2 divides the level, else from the Atkin-Lehner sign.

    The operator [I] -> [I P] has eigenvalue w on the line; the classical
    Atkin-Lehner sign is eps = w when B splits at p and eps = -w when B
    ramifies at p, and a_p = -eps.
    """
    out = {}
    vec = line.vector
    k = max(range(len(vec)), key=lambda i: abs(vec[i]))
    for p in prime_factors(cs.level):
        if (cs.level // p) % p == 0:
            out[p] = 0
            continue
        w_mat = atkin_lehner(cs, p)
        img = w_mat.apply(vec)
        w = img[k] / vec[k]
        eps = -w if cs.algebra.is_ramified(p) else w
        out[p] = -eps
    return out


def hecke_an(eigenvalues: Mapping[int, object], bound: int, level: int) -> list:
    """a_0..a_bound (a_0 = 0) from prime eigenvalues via the weight-2 recursion."""
    needed = [p for p in primes_up_to(bound) if p not in eigenvalues]
    if needed:
        raise DomainError(f"missing eigenvalues at primes {needed}", MODULE)
    a: list = [0] * (bound + 1)
    a[1] = 1
    for n in range(2, bound + 1):
        p = min(prime_factors(n))
        pk, r = p, 1
        while n % (pk * p) == 0:
            pk *= p
            r += 1
        m = n // pk
        if m > 1:
            a[n] = a[pk] * a[m]
            continue
        ap = eigenvalues[p]
        if r == 1:
            a[n] = ap
        elif level % p == 0:
            a[n] = ap * a[pk // p]
        else:
            a[n] = ap * a[pk // p] - p * a[pk // (p * p)]
    return a
