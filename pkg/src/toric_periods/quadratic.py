"""Imaginary quadratic orders, their Picard groups and ring class characters.

Classes in Pic(O_c) are modelled by reduced primitive binary quadratic
forms of discriminant D c^2. A form (a, b, c) corresponds to the oriented
ideal [a, (-b + sqrt(disc)) / 2]; with this orientation composition of
forms agrees with multiplication of ideals (checked against an ideal
lattice oracle in the test-suite).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, isqrt

import mpmath

from .cyclotomic import CyclotomicValue, cyclotomic_polynomial
from .errors import DomainError, InternalInvariantError, PrecisionShortfall

MODULE = "quadratic"


# ---------------------------------------------------------------------------
# Elementary arithmetic


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n)."""
    if n == 0:
        if a in (1, -1):
            return 1
        if a == 0:
            raise DomainError("kronecker symbol undefined for a = n = 0", MODULE)
        return 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a|n) for odd n > 0
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        if n % d == 0:
            n //= d
        d += 1
    return True


def is_fundamental_discriminant(d: int) -> bool:
    if d == 1:
        return True
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_part(d: int) -> tuple[int, int]:
    """Write a discriminant as (fundamental discriminant, conductor)."""
    if d % 4 not in (0, 1) or d == 0:
        raise DomainError(f"{d} is not a discriminant", MODULE)
    f = 1
    rest = d
    p = 2
    while p * p <= abs(rest):
        while rest % (p * p) == 0 and ((rest // (p * p)) % 4 in (0, 1)):
            rest //= p * p
            f *= p
        p += 1
    return rest, f


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


# ---------------------------------------------------------------------------
# Orders


@dataclass(frozen=True)
class QuadOrder:
    """The order Z + c O_K in the imaginary quadratic field of discriminant D."""

    fundamental_discriminant: int
    conductor: int = 1

    def __post_init__(self) -> None:
        d = self.fundamental_discriminant
        if d >= 0 or not is_fundamental_discriminant(d):
            raise DomainError(f"{d} is not a negative fundamental discriminant", MODULE)
        if self.conductor < 1:
            raise DomainError("conductor must be positive", MODULE)

    @property
    def discriminant(self) -> int:
        return self.fundamental_discriminant * self.conductor**2

    @classmethod
    def from_discriminant(cls, disc: int) -> "QuadOrder":
        d, f = fundamental_part(disc)
        return cls(d, f)


def unit_index(order: QuadOrder) -> int:
    """Half the number of roots of unity in the order."""
    if order.conductor == 1 and order.fundamental_discriminant == -3:
        return 3
    if order.conductor == 1 and order.fundamental_discriminant == -4:
        return 2
    return 1


def analytic_class_number(d: int) -> int:
    """h(K) from the finite Dirichlet sum -(w / 2|d|) * sum a (d|a); independent of forms."""
    w = 2 * unit_index(QuadOrder(d, 1))
    s = sum(a * kronecker(d, a) for a in range(1, abs(d)))
    h = Fraction(-w * s, 2 * abs(d))
    if h.denominator != 1 or h <= 0:
        raise InternalInvariantError(f"Dirichlet sum gave non-integral class number {h}", MODULE)
    return int(h)


def class_number_formula(order: QuadOrder) -> int:
    """h(O_c) = h(K) c prod_{p|c} (1 - (D|p)/p) / [O_K^x : O_c^x]."""
    d, c = order.fundamental_discriminant, order.conductor
    h = Fraction(analytic_class_number(d) * c)
    for p in prime_factors(c):
        h *= 1 - Fraction(kronecker(d, p), p)
    h /= Fraction(unit_index(QuadOrder(d, 1)), unit_index(order))
    if h.denominator != 1:
        raise InternalInvariantError("class number formula not integral", MODULE)
    return int(h)


# ---------------------------------------------------------------------------
# Binary quadratic forms


@dataclass(frozen=True, order=True)
class BinaryForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"

    @classmethod
    def parse(cls, text: str) -> "BinaryForm":
        a, b, c = (int(t) for t in text.strip().strip("()").split(","))
        return cls(a, b, c)

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def transform(self, x: int, u: int, y: int, v: int) -> "BinaryForm":
        """The form f(x X + u Y, y X + v Y)."""
        a, b, c = self.a, self.b, self.c
        return BinaryForm(
            self(x, y),
            2 * a * x * u + b * (x * v + y * u) + 2 * c * y * v,
            self(u, v),
        )

    def reduced(self) -> "BinaryForm":
        a, b, c = self.a, self.b, self.c
        if a <= 0 or self.discriminant >= 0:
            raise DomainError(f"{self} is not positive definite", MODULE)
        while True:
            r = (a - b) // (2 * a)
            c = a * r * r + b * r + c
            b = b + 2 * a * r
            if a > c:
                a, b, c = c, -b, a
                continue
            break
        if (a == c or a == b) and b < 0:
            b = -b
        return BinaryForm(a, b, c)

    def inverse(self) -> "BinaryForm":
        return BinaryForm(self.a, -self.b, self.c).reduced()


def principal_form(disc: int) -> BinaryForm:
    b = disc % 2
    return BinaryForm(1, b, (b * b - disc) // 4)


def _check_discriminant(disc: int) -> None:
    if disc >= 0 or disc % 4 not in (0, 1):
        raise DomainError(f"{disc} is not a negative discriminant", MODULE)


@lru_cache(maxsize=4096)
def _reduced_forms_cached(disc: int) -> tuple[BinaryForm, ...]:
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) == 1:
                out.append(BinaryForm(a, b, c))
        a += 1
    out.sort(key=lambda f: (f.a, f.b))
    return tuple(out)


def reduced_forms(discriminant: int) -> list[BinaryForm]:
    """One reduced primitive form per class, sorted by (a, b)."""
    _check_discriminant(discriminant)
    return list(_reduced_forms_cached(discriminant))


def compose(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """Gauss composition (Dirichlet's united forms), reduced."""
    disc = f.discriminant
    if g.discriminant != disc:
        raise DomainError("composition of forms with different discriminants", MODULE)
    a1, b1 = f.a, f.b
    a2, b2 = g.a, g.b
    s = (b1 + b2) // 2
    g1, x1, y1 = _xgcd(a1, a2)
    e, x2, y2 = _xgcd(g1, s)
    # x2*(x1*a1 + y1*a2) + y2*s = e
    u, v, w = x2 * x1, x2 * y1, y2
    big_a = a1 * a2 // (e * e)
    big_b = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + disc) // 2) // e
    big_b %= 2 * big_a
    big_c = (big_b * big_b - disc) // (4 * big_a)
    return BinaryForm(big_a, big_b, big_c).reduced()


# ---------------------------------------------------------------------------
# Group structure


def _diagonalize(mat: list[list[int]]) -> tuple[list[int], list[list[int]]]:
    """Return (diagonal, V) with U mat V diagonal for some unimodular U."""
    a = [list(r) for r in mat]
    n = len(a)
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def col_op(i: int, j: int, q: int) -> None:  # column j -= q column i
        for r in range(n):
            a[r][j] -= q * a[r][i]
            v[r][j] -= q * v[r][i]

    def col_swap(i: int, j: int) -> None:
        for r in range(n):
            a[r][i], a[r][j] = a[r][j], a[r][i]
            v[r][i], v[r][j] = v[r][j], v[r][i]

    for t in range(n):
        while True:
            cand = [(abs(a[i][j]), i, j) for i in range(t, n) for j in range(t, n) if a[i][j]]
            if not cand:
                break
            _, pi, pj = min(cand)
            a[t], a[pi] = a[pi], a[t]
            col_swap(t, pj)
            done = True
            for i in range(t + 1, n):
                q = a[i][t] // a[t][t]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = a[t][j] // a[t][t]
                if q:
                    col_op(t, j, q)
                if a[t][j]:
                    done = False
            if done:
                break
    return [abs(a[i][i]) for i in range(n)], v


def _mat_inverse_int(m: list[list[int]]) -> list[list[int]]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    out = [[a[i][n + j] for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for row in out for x in row):
        raise InternalInvariantError("transform not unimodular", MODULE)
    return [[int(x) for x in row] for row in out]


@dataclass(frozen=True)
class IdealClassGroup:
    """Pic(O_c) as reduced forms with an explicit cyclic decomposition.

    ``coordinates[i]`` is the exponent vector of element ``i`` against
    ``cyclic_decomposition``.
    """

    order: QuadOrder
    elements: tuple[BinaryForm, ...]
    composition_table: tuple[tuple[int, ...], ...]
    cyclic_decomposition: tuple[tuple[int, int], ...]
    coordinates: tuple[tuple[int, ...], ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def _lookup(self) -> dict[BinaryForm, int]:
        return {f: i for i, f in enumerate(self.elements)}

    def index(self, form: BinaryForm) -> int:
        return self._lookup[form.reduced()]

    @property
    def identity(self) -> int:
        return self.index(principal_form(self.order.discriminant))

    def inverse(self, i: int) -> int:
        return self.index(self.elements[i].inverse())

    @property
    def exponent(self) -> int:
        m = 1
        for _, k in self.cyclic_decomposition:
            m = m * k // gcd(m, k)
        return m

    def power(self, i: int, k: int) -> int:
        k %= len(self)
        r = self.identity
        for _ in range(k):
            r = self.composition_table[r][i]
        return r


def class_group(order: QuadOrder) -> IdealClassGroup:
    return _class_group_cached(order.fundamental_discriminant, order.conductor)


@lru_cache(maxsize=2048)
def _class_group_cached(d: int, c: int) -> IdealClassGroup:
    order = QuadOrder(d, c)
    disc = order.discriminant
    forms = tuple(reduced_forms(disc))
    idx = {f: i for i, f in enumerate(forms)}
    n = len(forms)
    table = tuple(tuple(idx[compose(forms[i], forms[j])] for j in range(n)) for i in range(n))
    ident = idx[principal_form(disc)]

    # Greedy generators with relations.
    gens: list[int] = []
    coords: dict[int, list[int]] = {ident: []}
    relations: list[list[int]] = []
    for g in range(n):
        if g in coords:
            continue
        r = len(gens)
        k, cur = 1, g
        while cur not in coords:
            cur = table[cur][g]
            k += 1
        rel = [-x for x in coords[cur]] + [0] * (r - len(coords[cur]))
        rel.append(k)
        for row in relations:
            row.append(0)
        relations.append(rel)
        new: dict[int, list[int]] = {}
        for h, vec in coords.items():
            cur = h
            for i in range(k):
                new[cur] = vec + [0] * (r - len(vec)) + [i]
                cur = table[cur][g]
        coords = new
        gens.append(g)
    r = len(gens)
    if r == 0:
        return IdealClassGroup(order, forms, table, (), tuple(() for _ in range(n)))
    diag, v = _diagonalize(relations)
    vinv = _mat_inverse_int(v)
    decomposition = []
    keep = []
    for j in range(r):
        if diag[j] == 1:
            continue
        gen = ident
        for i in range(r):
            gen = table[gen][_power_in(table, ident, gens[i], vinv[j][i])]
        decomposition.append((gen, diag[j]))
        keep.append(j)
    coordinates = []
    for e in range(n):
        x = coords[e]
        y = [sum(x[i] * v[i][j] for i in range(r)) for j in range(r)]
        coordinates.append(tuple(y[j] % diag[j] for j in keep))
    group = IdealClassGroup(order, forms, table, tuple(decomposition), tuple(coordinates))
    _check_group(group)
    return group


def _power_in(table, ident: int, g: int, k: int) -> int:
    n = len(table)
    k %= n
    cur = ident
    for _ in range(k):
        cur = table[cur][g]
    return cur


def _check_group(group: IdealClassGroup) -> None:
    # The coordinates must be an isomorphism onto the product of cyclic groups.
    orders = [k for _, k in group.cyclic_decomposition]
    seen = set(group.coordinates)
    size = 1
    for k in orders:
        size *= k
    if size != len(group) or len(seen) != len(group):
        raise InternalInvariantError("cyclic decomposition is not bijective", MODULE)
    t = group.composition_table
    co = group.coordinates
    for i in range(len(group)):
        for j in range(len(group)):
            expect = tuple((x + y) % k for x, y, k in zip(co[i], co[j], orders))
            if co[t[i][j]] != expect:
                raise InternalInvariantError("coordinates not additive", MODULE)


def class_number(order: QuadOrder) -> int:
    """h(O_c), computed by the analytic formula and by form enumeration."""
    by_formula = class_number_formula(order)
    by_forms = len(reduced_forms(order.discriminant))
    if by_formula != by_forms:
        raise InternalInvariantError(
            f"class number mismatch for {order}: formula {by_formula}, forms {by_forms}", MODULE
        )
    return by_forms


# ---------------------------------------------------------------------------
# Maps between class groups of nested orders


def _coprime_representative(form: BinaryForm, modulus: int) -> BinaryForm:
    """An equivalent form whose first coefficient is coprime to ``modulus``."""
    bound = 1
    while True:
        for x in range(-bound, bound + 1):
            for y in range(0, bound + 1):
                if (y == 0 and x <= 0) or gcd(x, y) != 1:
                    continue
                val = form(x, y)
                if gcd(val, modulus) != 1:
                    continue
                _, s, t = _xgcd(x, y)
                # x*s + y*t = 1, so [[x, -t], [y, s]] has determinant 1.
                return form.transform(x, -t, y, s)
        bound += 1


def project_form(form: BinaryForm, factor: int) -> BinaryForm:
    """Image of a class of disc D f^2 in the class group of disc D (f = factor)."""
    if factor == 1:
        return form.reduced()
    disc = form.discriminant
    if disc % (factor * factor):
        raise DomainError("factor does not divide the conductor", MODULE)
    small = disc // (factor * factor)
    if small % 4 not in (0, 1):
        raise DomainError("factor does not divide the conductor", MODULE)
    g = _coprime_representative(form, 2 * factor)
    a = g.a
    inv_f = pow(factor, -1, a) if a > 1 else 0
    b_mod_a = (g.b * inv_f) % a if a > 1 else 0
    # B = b/f mod a and B = small mod 2; a is odd.
    big_b = b_mod_a if (b_mod_a - small) % 2 == 0 else b_mod_a + a
    c = (big_b * big_b - small) // (4 * a)
    out = BinaryForm(a, big_b, c)
    if out.discriminant != small:
        raise InternalInvariantError("projection produced wrong discriminant", MODULE)
    return out.reduced()


def projection_map(group: IdealClassGroup, smaller: IdealClassGroup) -> list[int]:
    """Indices of the images of Pic(O_c) -> Pic(O_c') for c' | c."""
    c, c2 = group.order.conductor, smaller.order.conductor
    if c % c2 or group.order.fundamental_discriminant != smaller.order.fundamental_discriminant:
        raise DomainError("orders are not nested", MODULE)
    return [smaller.index(project_form(f, c // c2)) for f in group.elements]


# ---------------------------------------------------------------------------
# Characters


@dataclass(frozen=True)
class RingClassCharacter:
    """A character of Pic(O_c) with values zeta_m^k, m the group exponent.

    ``value_exponents[i]`` is k for class index i; the complex embedding is
    zeta_m = exp(2 pi i / m).
    """

    group: IdealClassGroup = field(repr=False, compare=False)
    exponents: tuple[int, ...]
    cyclotomic_order: int
    value_exponents: tuple[int, ...] = field(repr=False)
    primitive: bool
    conductor: int

    @property
    def label(self) -> str:
        if not any(self.exponents):
            return "trivial"
        return "chi[" + ",".join(str(e) for e in self.exponents) + "]"

    @property
    def character_order(self) -> int:
        g = self.cyclotomic_order
        for k in self.value_exponents:
            g = gcd(g, k)
        return self.cyclotomic_order // g

    @property
    def is_trivial(self) -> bool:
        return not any(self.exponents)

    def is_genus(self) -> bool:
        return self.character_order <= 2

    def value(self, i: int) -> CyclotomicValue:
        return CyclotomicValue.root_of_unity(self.value_exponents[i], self.cyclotomic_order)

    @property
    def values(self) -> dict[int, CyclotomicValue]:
        return {i: self.value(i) for i in range(len(self.value_exponents))}

    def complex_value(self, i: int, dps: int = 30) -> mpmath.mpc:
        with mpmath.workdps(dps):
            return mpmath.expjpi(mpmath.mpf(2 * self.value_exponents[i]) / self.cyclotomic_order)

    def real_value(self, i: int) -> int:
        """Value of a genus character as +-1."""
        if not self.is_genus():
            raise DomainError("not a genus character", MODULE)
        k = self.value_exponents[i] % self.cyclotomic_order
        return 1 if k == 0 else -1

    def conjugate(self) -> "RingClassCharacter":
        orders = [k for _, k in self.group.cyclic_decomposition]
        exps = tuple((-e) % k for e, k in zip(self.exponents, orders))
        return _make_character(self.group, exps)


def _character_exponents(group: IdealClassGroup, exps: tuple[int, ...]) -> tuple[int, ...]:
    m = group.exponent
    orders = [k for _, k in group.cyclic_decomposition]
    return tuple(
        sum(e * y * (m // k) for e, y, k in zip(exps, coord, orders)) % m for coord in group.coordinates
    )


def _factors_through(group: IdealClassGroup, value_exponents: tuple[int, ...], c_small: int) -> bool:
    smaller = class_group(QuadOrder(group.order.fundamental_discriminant, c_small))
    image = projection_map(group, smaller)
    ident = smaller.identity
    m = group.exponent
    return all(value_exponents[i] % m == 0 for i, j in enumerate(image) if j == ident)


def _make_character(group: IdealClassGroup, exps: tuple[int, ...]) -> RingClassCharacter:
    vals = _character_exponents(group, exps)
    c = group.order.conductor
    conductor = c
    for c_small in divisors(c):
        if c_small < c and _factors_through(group, vals, c_small):
            conductor = c_small
            break
    return RingClassCharacter(group, exps, group.exponent, vals, conductor == c, conductor)


def characters(group: IdealClassGroup) -> list[RingClassCharacter]:
    """All characters, trivial first, in lexicographic order of exponent vectors."""
    orders = [k for _, k in group.cyclic_decomposition]
    vecs: list[tuple[int, ...]] = [()]
    for k in orders:
        vecs = [v + (e,) for v in vecs for e in range(k)]
    return [_make_character(group, v) for v in vecs]


def character_sum_vanishes(group: IdealClassGroup, value_exponents: tuple[int, ...]) -> bool:
    """Exact test that sum_t zeta^k(t) = 0 in Q(zeta_m)."""
    m = group.exponent
    counts = [0] * m
    for k in value_exponents:
        counts[k % m] += 1
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    for top in range(m - 1, deg - 1, -1):
        lead = counts[top]
        if lead:
            for i, p in enumerate(phi):
                counts[top - deg + i] -= lead * p
    return not any(counts[:deg])


def check_orthogonality(group: IdealClassGroup, chars: list[RingClassCharacter] | None = None) -> None:
    """Exact row orthogonality: sum_t chi(t) conj(chi'(t)) = h [chi = chi']."""
    chars = chars if chars is not None else characters(group)
    m = group.exponent
    h = len(group)
    if len(chars) != h:
        raise InternalInvariantError("wrong number of characters", MODULE)
    by_vals = {c.value_exponents: c for c in chars}
    if len(by_vals) != h:
        raise InternalInvariantError("characters are not distinct", MODULE)
    # chi * conj(chi') is again a character; its sum is h or 0.
    for c1 in chars:
        for c2 in chars:
            quot = tuple((x - y) % m for x, y in zip(c1.value_exponents, c2.value_exponents))
            if quot not in by_vals:
                raise InternalInvariantError("character set not closed under division", MODULE)
    for c in chars:
        trivial = not any(v % m for v in c.value_exponents)
        if trivial != c.is_trivial:
            raise InternalInvariantError("trivial character mislabelled", MODULE)
        if not trivial and not character_sum_vanishes(group, c.value_exponents):
            raise InternalInvariantError(f"character sum of {c.label} does not vanish", MODULE)


def find_character(group: IdealClassGroup, spec: str | int) -> RingClassCharacter:
    """Resolve a character by label ('trivial', 'chi[1,0]') or index."""
    chars = characters(group)
    if isinstance(spec, int) or (isinstance(spec, str) and spec.isdigit()):
        return chars[int(spec)]
    for c in chars:
        if c.label == spec:
            return c
    raise DomainError(f"unknown character {spec!r}", MODULE)


# ---------------------------------------------------------------------------
# Prime ideal classes and genus theory


def prime_form(disc: int, p: int) -> BinaryForm | None:
    """A form (p, b, *) of the given discriminant, or None if p is inert."""
    for b in range(0, 2 * p + 1):
        if (b * b - disc) % (4 * p) == 0:
            f = BinaryForm(p, b, (b * b - disc) // (4 * p))
            if f.is_primitive():
                return f
    return None


def genus_pair(chi: RingClassCharacter) -> tuple[int, int]:
    """Fundamental discriminants (d1, d2), d1 d2 = D times a square, with chi = eta_{d1} o Norm.

    The pair is sorted with |d1| <= |d2| (then by value).
    """
    if not chi.is_genus():
        raise DomainError("only genus characters factor through norms", MODULE)
    group = chi.group
    d = group.order.fundamental_discriminant
    disc = group.order.discriminant
    # Probe each class with primes it represents.
    probes: dict[int, list[int]] = defaultdict(list)
    p = 3
    while any(len(probes[i]) < 3 for i in range(len(group))) and p < 20000:
        if disc % p and _is_prime(p):
            f = prime_form(disc, p)
            if f is not None:
                i = group.index(f)
                if len(probes[i]) < 3:
                    probes[i].append(p)
        p += 2
    candidates = []
    n = abs(disc)
    for g in divisors(4 * n):
        for d1 in (g, -g):
            if not is_fundamental_discriminant(d1):
                continue
            if all(kronecker(d1, q) == chi.real_value(i) for i, qs in probes.items() for q in qs):
                candidates.append(d1)
    if not candidates:
        raise InternalInvariantError("no genus factorization found", MODULE)
    d1 = min(candidates, key=lambda x: (abs(x), x))
    d2 = fundamental_part(d1 * d)[0]
    return tuple(sorted((d1, d2), key=lambda x: (abs(x), x)))  # type: ignore[return-value]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# Theta series


def representation_counts(form: BinaryForm, bound: int) -> list[int]:
    """r_f(n) for n = 0..bound (all integer pairs, including imprimitive)."""
    a, b, c = form.a, form.b, form.c
    disc = -form.discriminant
    counts = [0] * (bound + 1)
    ymax = isqrt(4 * a * bound // disc) + 1
    for y in range(-ymax, ymax + 1):
        # a x^2 + b y x + c y^2 <= bound
        rem = 4 * a * bound - disc * y * y
        if rem < 0:
            continue
        s = isqrt(rem)
        lo = (-b * y - s) // (2 * a) - 1
        hi = (-b * y + s) // (2 * a) + 1
        for x in range(lo, hi + 1):
            v = a * x * x + b * x * y + c * y * y
            if v <= bound:
                counts[v] += 1
    return counts


def _theta_exponent_counts(chi: RingClassCharacter, bound: int) -> list[list[Fraction]]:
    group = chi.group
    m = chi.cyclotomic_order
    units = 2 * unit_index(group.order)
    out = [[Fraction(0)] * m for _ in range(bound + 1)]
    for i, f in enumerate(group.elements):
        # ideals of norm n in class C <-> representations by the form of C^{-1}
        reps = representation_counts(f, bound)
        k = chi.value_exponents[group.inverse(i)] % m
        for n in range(1, bound + 1):
            if reps[n]:
                out[n][k] += Fraction(reps[n], units)
    return out


def theta_coefficients(chi: RingClassCharacter, bound: int) -> list[CyclotomicValue]:
    """b_1..b_bound with b_n = sum over invertible ideals of norm n of chi([a])."""
    if bound < 1:
        raise DomainError("bound must be positive", MODULE)
    m = chi.cyclotomic_order
    rows = _theta_exponent_counts(chi, bound)
    return [CyclotomicValue._reduce(rows[n], m) for n in range(1, bound + 1)]


def theta_coefficients_complex(chi: RingClassCharacter, bound: int, dps: int = 30) -> list[mpmath.mpc]:
    m = chi.cyclotomic_order
    rows = _theta_exponent_counts(chi, bound)
    with mpmath.workdps(dps):
        roots = [mpmath.expjpi(mpmath.mpf(2 * k) / m) for k in range(m)]
        return [sum((mpmath.mpf(x.numerator) / x.denominator * roots[k] for k, x in enumerate(rows[n]) if x), mpmath.mpc(0)) for n in range(1, bound + 1)]


# ---------------------------------------------------------------------------
# Relative class number formula


@dataclass(frozen=True)
class RelativeClassData:
    order_conductor: int
    pic_size: int
    kappa_size: int
    unit_ratio: int
    relative_regulator: int
    nu: int
    identity_error: float


def dirichlet_l_one(d: int, dps: int = 30) -> mpmath.mpf:
    """L(1, eta_d) = -(1/|d|) sum_a (d|a) digamma(a/|d|)."""
    k = abs(d)
    with mpmath.workdps(dps + 10):
        s = mpmath.fsum(kronecker(d, a) * mpmath.digamma(mpmath.mpf(a) / k) for a in range(1, k + 1) if kronecker(d, a))
        return -s / k


def relative_class_number(order: QuadOrder, dps: int = 30) -> RelativeClassData:
    """Relative class number data over Q, with the analytic identity checked.

    Over Q the unit rank difference is 0, kappa_b and R_b are trivial and
    w_b = [O_b^x : Z^x] = u(O_b), so nu_b = u(O_b). The identity compares
    L^{(b)}(1, eta) |D b^2|^{1/2} / pi (completed at infinity) with h / w_b.
    """
    d, c = order.fundamental_discriminant, order.conductor
    h = class_number(order)
    w = unit_index(order)
    with mpmath.workdps(dps + 10):
        lval = dirichlet_l_one(d, dps)
        for p in prime_factors(c):
            lval *= 1 - mpmath.mpf(kronecker(d, p)) / p
        lhs = lval * mpmath.sqrt(abs(d) * c * c) / mpmath.pi
        rhs = mpmath.mpf(h) / w
        err = abs(lhs - rhs) / rhs
    tol = mpmath.mpf(10) ** (-(dps - 5))
    if err > tol:
        raise PrecisionShortfall(f"relative class number identity off by {err}", float(err), MODULE)
    return RelativeClassData(c, h, 1, w, 1, w, float(err))
