"""Exact integer lattice utilities.

Hermite normal form, integer kernels, Gram-matrix LLL and Fincke-Pohst
enumeration. Enumeration uses a floating Cholesky decomposition only to
prune the search tree; every returned vector has its norm recomputed in
exact integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, gcd, isqrt, sqrt
from typing import Iterator, Sequence

import numpy as np

Vector = tuple[Fraction, ...]


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b if a and b else 0


def hnf(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form; zero rows are dropped.

    Each pivot is positive and entries above a pivot are reduced into
    ``[0, pivot)``.
    """
    mat = [list(r) for r in rows if any(r)]
    if not mat:
        return []
    m, ncol = len(mat), len(mat[0])
    prow = 0
    for col in range(ncol):
        if prow == m:
            break
        have_pivot = False
        while True:
            nz = [i for i in range(prow, m) if mat[i][col] != 0]
            if not nz:
                break
            have_pivot = True
            best = min(nz, key=lambda i: abs(mat[i][col]))
            mat[prow], mat[best] = mat[best], mat[prow]
            pivot_row = mat[prow]
            pv = pivot_row[col]
            clean = True
            for i in range(prow + 1, m):
                if mat[i][col]:
                    q = mat[i][col] // pv
                    row = mat[i]
                    mat[i] = [x - q * y for x, y in zip(row, pivot_row)]
                    if mat[i][col]:
                        clean = False
            if clean:
                break
        if not have_pivot:
            continue
        if mat[prow][col] < 0:
            mat[prow] = [-x for x in mat[prow]]
        pv = mat[prow][col]
        for i in range(prow):
            q = mat[i][col] // pv
            if q:
                mat[i] = [x - q * y for x, y in zip(mat[i], mat[prow])]
        prow += 1
    return [r for r in mat[:prow] if any(r)]


def integer_kernel(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis (as rows) of the integer vectors ``v`` with ``sum v_i rows_i = 0``."""
    m = len(rows)
    if m == 0:
        return []
    ncol = len(rows[0])
    # Row-reduce [rows | I]; rows whose left part vanishes span the kernel.
    aug = [list(rows[i]) + [1 if j == i else 0 for j in range(m)] for i in range(m)]
    reduced = hnf(aug)
    kernel = [r[ncol:] for r in reduced if not any(r[:ncol])]
    return hnf(kernel)


def determinant(mat: Sequence[Sequence[Fraction | int]]) -> Fraction:
    a = [[Fraction(x) for x in row] for row in mat]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def solve_left(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction] | None:
    """Coefficients ``x`` with ``x @ basis == v`` (basis rows independent), or None."""
    n, dim = len(basis), len(v)
    # Columns of the system are basis rows; augment with v.
    a = [[Fraction(basis[i][j]) for i in range(n)] + [Fraction(v[j])] for j in range(dim)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, dim) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(dim):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
    if any(a[i][n] != 0 for i in range(r, dim)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = a[i][n]
    return x


@dataclass(frozen=True)
class Lattice:
    """A full or partial rank lattice ``(1/denom) * rowspan(rows)`` in QQ^dim.

    ``rows`` is in row Hermite normal form and ``denom`` is minimal, so two
    lattices are equal exactly when their fields are equal.
    """

    rows: tuple[tuple[int, ...], ...]
    denom: int

    @classmethod
    def from_generators(cls, gens: Sequence[Sequence[Fraction | int]]) -> "Lattice":
        den = 1
        for g in gens:
            for x in g:
                den = lcm(den, Fraction(x).denominator)
        ints = [[int(Fraction(x) * den) for x in g] for g in gens]
        h = hnf(ints)
        content = den
        for r in h:
            for x in r:
                content = gcd(content, x)
        if content > 1:
            h = [[x // content for x in r] for r in h]
            den //= content
        return cls(tuple(tuple(r) for r in h), den)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def basis(self) -> list[Vector]:
        return [tuple(Fraction(x, self.denom) for x in r) for r in self.rows]

    def contains(self, v: Sequence[Fraction | int]) -> bool:
        w = [Fraction(x) * self.denom for x in v]
        if any(x.denominator != 1 for x in w):
            return False
        rest = [int(x) for x in w]
        for r in self.rows:
            col = next(i for i, x in enumerate(r) if x)
            if rest[col] % r[col]:
                return False
            q = rest[col] // r[col]
            if q:
                rest = [x - q * y for x, y in zip(rest, r)]
        return not any(rest)

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(v) for v in other.basis())

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.from_generators(self.basis() + other.basis())

    def scaled(self, s: Fraction | int) -> "Lattice":
        s = Fraction(s)
        return Lattice.from_generators([[x * s for x in v] for v in self.basis()])

    def covolume(self) -> Fraction:
        """Absolute determinant of a basis (full rank only)."""
        return abs(determinant(self.basis()))

    def index_in(self, bigger: "Lattice") -> int:
        q = self.covolume() / bigger.covolume()
        if q.denominator != 1:
            raise ValueError("not a sublattice")
        return int(q)

    def intersection(self, other: "Lattice") -> "Lattice":
        """Exact intersection via the integer kernel of the stacked bases."""
        den = lcm(self.denom, other.denom)
        a = [[x * (den // self.denom) for x in r] for r in self.rows]
        b = [[-x * (den // other.denom) for x in r] for r in other.rows]
        ker = integer_kernel(a + b)
        gens = []
        for k in ker:
            coeffs = k[: len(a)]
            gens.append(
                [Fraction(sum(c * a[i][j] for i, c in enumerate(coeffs)), den) for j in range(len(a[0]))]
            )
        if not gens:
            return Lattice((), 1)
        return Lattice.from_generators(gens)


# ---------------------------------------------------------------------------
# Reduction and enumeration of positive definite integral forms


def _gram_schmidt(g: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    n = len(g)
    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = g[i][j] - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))
            mu[i][j] = s / bstar[j]
        bstar[i] = g[i][i] - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
    return mu, bstar


def lll_gram(gram: Sequence[Sequence[int | Fraction]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """LLL-reduce a positive definite Gram matrix; returns the unimodular transform U.

    Reduced Gram is ``U G U^T``.
    """
    g0 = [[Fraction(x) for x in row] for row in gram]
    n = len(g0)
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def current() -> list[list[Fraction]]:
        return [[sum(u[i][a] * g0[a][b] * u[j][b] for a in range(n) for b in range(n)) for j in range(n)] for i in range(n)]

    g = current()
    mu, bstar = _gram_schmidt(g)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                u[k] = [x - q * y for x, y in zip(u[k], u[j])]
                g = current()
                mu, bstar = _gram_schmidt(g)
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            u[k], u[k - 1] = u[k - 1], u[k]
            g = current()
            mu, bstar = _gram_schmidt(g)
            k = max(k - 1, 1)
    return u


class ShortVectors:
    """Fincke-Pohst enumeration for an integral positive definite Gram matrix.

    The Gram matrix is LLL-reduced once at construction; vectors are
    returned as coordinate vectors in the *original* basis.
    """

    def __init__(self, gram: Sequence[Sequence[int]]):
        self.gram = [[int(x) for x in row] for row in gram]
        self.n = len(self.gram)
        self.transform = lll_gram(self.gram)
        u = self.transform
        n = self.n
        self.reduced = [
            [sum(u[i][a] * self.gram[a][b] * u[j][b] for a in range(n) for b in range(n)) for j in range(n)]
            for i in range(n)
        ]
        q = [[float(x) for x in row] for row in self.reduced]
        for i in range(n):
            for j in range(i + 1, n):
                q[j][i] = q[i][j]
                q[i][j] = q[i][j] / q[i][i]
            for k in range(i + 1, n):
                for l in range(k, n):
                    q[k][l] -= q[k][i] * q[i][l]
        self._chol = q

    def _norm(self, x: Sequence[int]) -> int:
        g = self.reduced
        n = self.n
        return sum(x[i] * g[i][j] * x[j] for i in range(n) for j in range(n))

    def _enumerate(self, bound: int) -> Iterator[tuple[list[int], int]]:
        n, q = self.n, self._chol
        eps = 1e-6 * (1 + bound)
        x = [0] * n

        def rec(i: int, remaining: float) -> Iterator[None]:
            center = -sum(q[i][j] * x[j] for j in range(i + 1, n))
            r = sqrt(max(remaining, 0.0) / q[i][i])
            lo, hi = ceil(center - r - 1e-9), floor(center + r + 1e-9)
            for xi in range(lo, hi + 1):
                t = q[i][i] * (xi - center) ** 2
                if t > remaining + eps:
                    continue
                x[i] = xi
                if i == 0:
                    yield None
                else:
                    yield from rec(i - 1, remaining - t)
            x[i] = 0

        for _ in rec(n - 1, float(bound) + eps):
            val = self._norm(x)
            if val <= bound:
                yield list(x), val

    def _to_original(self, y: Sequence[int]) -> list[int]:
        u, n = self.transform, self.n
        return [sum(y[i] * u[i][j] for i in range(n)) for j in range(n)]

    def vectors(self, bound: int, include_zero: bool = False) -> Iterator[tuple[list[int], int]]:
        """All coordinate vectors of norm ``<= bound`` with their norms."""
        for y, val in self._enumerate(bound):
            if val == 0 and not include_zero:
                continue
            yield self._to_original(y), val

    def norm_counts(self, bound: int) -> dict[int, int]:
        counts: dict[int, int] = {}
        for _, val in self._enumerate(bound):
            counts[val] = counts.get(val, 0) + 1
        return counts

    def theta_series(self, bound: int) -> list[int]:
        """r(n) for 0 <= n <= bound; the innermost coordinate is handled in bulk with numpy."""
        n, q, g = self.n, self._chol, self.reduced
        out = np.zeros(bound + 1, dtype=np.int64)
        if n == 1:
            r = isqrt(bound // g[0][0])
            xs = np.arange(-r, r + 1, dtype=np.int64)
            out += np.bincount(g[0][0] * xs * xs, minlength=bound + 1)[: bound + 1]
            return [int(v) for v in out]
        eps = 1e-6 * (1 + bound)
        x = [0] * n
        g00 = g[0][0]

        def rec(i: int, remaining: float) -> None:
            center = -sum(q[i][j] * x[j] for j in range(i + 1, n))
            r = sqrt(max(remaining, 0.0) / q[i][i])
            lo, hi = ceil(center - r - 1e-9), floor(center + r + 1e-9)
            for xi in range(lo, hi + 1):
                t = q[i][i] * (xi - center) ** 2
                if t > remaining + eps:
                    continue
                x[i] = xi
                if i == 1:
                    rest = sum(x[a] * g[a][b] * x[b] for a in range(1, n) for b in range(1, n))
                    lin = sum(g[0][b] * x[b] for b in range(1, n))
                    c0 = -sum(q[0][j] * x[j] for j in range(1, n))
                    r0 = sqrt(max(remaining - t, 0.0) / q[0][0]) + 1
                    xs = np.arange(ceil(c0 - r0), floor(c0 + r0) + 1, dtype=np.int64)
                    vals = g00 * xs * xs + 2 * lin * xs + rest
                    vals = vals[vals <= bound]
                    out[:] += np.bincount(vals, minlength=bound + 1)[: bound + 1]
                else:
                    rec(i - 1, remaining - t)
            x[i] = 0

        rec(n - 1, float(bound) + eps)
        return [int(v) for v in out]

    def vectors_of_norm(self, target: int) -> list[list[int]]:
        return [self._to_original(y) for y, val in self._enumerate(target) if val == target]

    def find_norm(self, target: int) -> list[int] | None:
        for y, val in self._enumerate(target):
            if val == target:
                return self._to_original(y)
        return None

    def minimum(self) -> int:
        bound = min(self.reduced[i][i] for i in range(self.n))
        return min(val for _, val in self._enumerate(bound) if val > 0)


def rational_nullspace(rows: Sequence[Sequence[Fraction | int]], dim: int) -> list[list[Fraction]]:
    """Basis of {x in QQ^dim : r . x = 0 for every row r}."""
    a = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(dim):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(dim) if c not in pivots]
    out = []
    for fcol in free:
        v = [Fraction(0)] * dim
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][fcol]
        out.append(v)
    return out
