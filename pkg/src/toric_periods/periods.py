"""Toric periods of Brandt eigenvectors against ring class characters.

Pic(O_c) is mapped to the class set X through the fixed embedding: the
form (a, b, c) corresponds to the O_c-ideal [a, (-b + sqrt(Dc^2))/2], and
sqrt(Dc^2) goes to the trace-zero quaternion xi of the embedding.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import mpmath

from .brandt import ClassSet, EigenLine, height_pairing
from .cyclotomic import CyclotomicValue
from .errors import ConditionViolation, DomainError, InternalInvariantError
from .lattice import Lattice
from .local_constants import LocalInput, tunnell_saito
from .quadratic import (
    BinaryForm,
    IdealClassGroup,
    QuadOrder,
    RingClassCharacter,
    characters,
    class_group,
    is_fundamental_discriminant,
    kronecker,
    prime_factors,
    prime_form,
    unit_index,
)
from .quaternion.embedding import EmbeddingData, p_adic_valuation

MODULE = "periods"


def _ord(n: int, p: int) -> int:
    return p_adic_valuation(n, p) if n else 0


def kv_type(d: int, p: int) -> str:
    return {1: "split", -1: "inert", 0: "ramified"}[kronecker(d, p)]


@dataclass
class PrimeLedger:
    prime: int
    ord_n: int
    ord_c: int
    kv_type: str
    in_s: bool | None  # None while chi([p]) = a_p is undecided
    reason: str


@dataclass
class SignAnalysis:
    level: int
    discriminant: int
    conductor: int
    sigma1: tuple[int, ...]
    c1: int
    n1: int
    n2: int
    sigma: tuple[int, ...]
    sigma_d: tuple[int, ...]
    s_finite: tuple[int, ...]
    mu: int
    global_sign: int
    case: str  # waldspurger | heegner | inapplicable | pending
    ledger: list[PrimeLedger] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    pending: tuple[int, ...] = ()

    @property
    def s_set(self) -> tuple[str, ...]:
        return tuple(str(p) for p in self.s_finite) + ("inf",)

    @property
    def ramification(self) -> tuple[int, ...]:
        """Finite primes at which the quaternion algebra must ramify."""
        return self.s_finite

    def to_json(self) -> dict:
        out = asdict(self)
        out["S"] = list(self.s_set)
        return out


def analyze_signs(
    level: int,
    d: int,
    c: int,
    chi: RingClassCharacter | None = None,
    a_p: dict[int, int] | None = None,
) -> SignAnalysis:
    """Local sign conditions deciding whether the period formula applies over Q.

    With ``a_p`` missing at a ramified p | (N, D) the result has case
    'pending' and lists the undecided primes; call again with the
    eigenvalues to confirm.
    """
    if level < 1 or c < 1:
        raise DomainError("level and conductor must be positive", MODULE)
    if d >= 0 or not is_fundamental_discriminant(d):
        raise DomainError(f"{d} is not a negative fundamental discriminant", MODULE)
    if chi is not None:
        if chi.group.order.discriminant != d * c * c:
            raise DomainError("character lives on a different Picard group", MODULE)
        if chi.conductor != c:
            raise DomainError(f"character has conductor {chi.conductor}, not {c}", MODULE)
    elif c != 1:
        raise DomainError("the trivial character has conductor 1", MODULE)
    a_p = a_p or {}
    nprimes = prime_factors(level)
    sigma1 = tuple(p for p in nprimes if kv_type(d, p) != "split" and _ord(c, p) < _ord(level, p))
    c1 = 1
    for p in prime_factors(c):
        if p not in sigma1:
            c1 *= p ** _ord(c, p)
    n1 = 1
    for p in nprimes:
        if p not in sigma1:
            n1 *= p ** _ord(level, p)
    n2 = level // n1
    common = gcd(level, abs(d))
    sigma_d = tuple(p for p in prime_factors(common) if _ord(c, p) < _ord(level, p))
    sigma = tuple(
        p
        for p in prime_factors(gcd(level, abs(d) * c))
        if not (_ord(level, p) == 1 and _ord(c, p) < 1)
    )
    mu = len(prime_factors(common))
    notes = []
    applicable = True
    if gcd(c, level) != 1:
        applicable = False
        notes.append(f"(c, N) = {gcd(c, level)} is not 1")
    for p in prime_factors(common):
        if _ord(level, p) >= 2:
            applicable = False
            notes.append(f"{p} divides (N, D) and {p}^2 divides N")

    ledger: list[PrimeLedger] = []
    s_finite: list[int] = []
    pending: list[int] = []
    group = chi.group if chi is not None else class_group(QuadOrder(d, 1))
    for p in nprimes:
        kind = kv_type(d, p)
        n = _ord(level, p)
        if kind == "split":
            ledger.append(PrimeLedger(p, n, _ord(c, p), kind, False, "split in K"))
        elif kind == "inert":
            inside = n % 2 == 1
            if _ord(c, p) == 0 and tunnell_saito(LocalInput("inert", n, 0)) != (-1 if inside else 1):
                raise InternalInvariantError(f"local sign rule disagrees at inert {p}", MODULE)
            ledger.append(PrimeLedger(p, n, _ord(c, p), kind, inside, f"inert, ord_p(N) = {n} {'odd' if inside else 'even'}"))
            if inside:
                s_finite.append(p)
        else:
            form = prime_form(group.order.discriminant, p)
            if form is None:
                raise InternalInvariantError(f"no prime ideal above ramified {p}", MODULE)
            idx = group.index(form)
            if chi is None:
                val = 1
            else:
                rv = chi.value(idx).rational_value()
                if rv is None:
                    raise InternalInvariantError(f"chi of the prime above {p} is not real", MODULE)
                val = int(rv)
            if p not in a_p:
                pending.append(p)
                ledger.append(PrimeLedger(p, n, _ord(c, p), kind, None, f"ramified, chi([p]) = {val}, a_p unknown"))
                continue
            inside = val == a_p[p]
            if n == 1 and _ord(c, p) == 0:
                # sigma_p is the unramified twist of Steinberg with mu(p) = a_p
                eps = tunnell_saito(LocalInput("ramified", 1, 0), special=True, mu_chi_trivial=inside)
                if eps != (-1 if inside else 1):
                    raise InternalInvariantError(f"local sign rule disagrees at ramified {p}", MODULE)
            ledger.append(
                PrimeLedger(p, n, _ord(c, p), kind, inside, f"ramified, chi([p]) = {val}, a_p = {a_p[p]}")
            )
            if inside:
                s_finite.append(p)
    size = len(s_finite) + 1
    if not applicable:
        case = "inapplicable"
    elif pending:
        case = "pending"
    else:
        case = "waldspurger" if size % 2 == 0 else "heegner"
    sign = 1 if size % 2 == 0 else -1
    return SignAnalysis(
        level, d, c, sigma1, c1, n1, n2, sigma, sigma_d, tuple(s_finite), mu, sign, case, ledger, notes, tuple(pending)
    )


def mu_count(level: int, d: int) -> int:
    """Number of prime factors of gcd(N, D)."""
    return len(prime_factors(gcd(level, abs(d))))


# ---------------------------------------------------------------------------
# Pic(O_c) -> X


def form_ideal(emb: EmbeddingData, form: BinaryForm) -> Lattice:
    """The right ideal a R for a = [a, (-b + sqrt(disc))/2] under the embedding."""
    disc = emb.fundamental_discriminant * emb.conductor**2
    if form.discriminant != disc:
        raise DomainError("form discriminant does not match the embedding", MODULE)
    alg = emb.order.algebra
    # sqrt(D c^2) = (c / c1) xi when the embedding is only optimal for O_{c1}
    s = Fraction(emb.conductor, emb.meets)
    xi = [s * x for x in emb.image_generator]
    beta = (Fraction(-form.b, 2) + xi[0] / 2, xi[1] / 2, xi[2] / 2, xi[3] / 2)
    alpha = (Fraction(form.a), Fraction(0), Fraction(0), Fraction(0))
    gens = [alg.mul(g, r) for g in (alpha, beta) for r in emb.order.basis]
    return Lattice.from_generators(gens)


def pic_to_classset(emb: EmbeddingData, cs: ClassSet, group: IdealClassGroup) -> list[int]:
    """x_t for every class t of Pic(O_c), as indices into the class set."""
    if emb.order.lattice != cs.order.lattice:
        raise DomainError("class set was built on a different order", MODULE)
    if group.order.discriminant != emb.fundamental_discriminant * emb.conductor**2:
        raise DomainError("Picard group and embedding have different discriminants", MODULE)
    out = []
    for form in group.elements:
        ideal = form_ideal(emb, form)
        out.append(cs.classify(ideal, Fraction(form.a)))
    if out[group.identity] != cs.classify(cs.order.lattice, Fraction(1)):
        raise InternalInvariantError("principal class is not sent to the class of R", MODULE)
    return out


# ---------------------------------------------------------------------------
# Period vectors and pairings


@dataclass
class PeriodVector:
    entries: list[CyclotomicValue]
    chi: RingClassCharacter = field(repr=False)

    def total(self) -> CyclotomicValue:
        out = CyclotomicValue.rational(0, self.chi.cyclotomic_order)
        for e in self.entries:
            out = out + e
        return out


def period_vector(mapping: Sequence[int], size: int, chi: RingClassCharacter) -> PeriodVector:
    """P_chi = sum_t chi^{-1}(t) x_t in Q(zeta)[X]."""
    m = chi.cyclotomic_order
    entries = [CyclotomicValue.rational(0, m) for _ in range(size)]
    for t, x in enumerate(mapping):
        entries[x] = entries[x] + chi.value(t).conjugate()
    return PeriodVector(entries, chi)


@dataclass
class PeriodPairing:
    p0: object  # CyclotomicValue (exact lines) or mpc
    ratio: object  # Fraction / CyclotomicValue (exact) or mpf
    projection_height: object
    exact: bool

    def ratio_float(self) -> float:
        return float(_as_real(self.ratio))


def _as_real(x) -> mpmath.mpf:
    if isinstance(x, CyclotomicValue):
        return mpmath.re(x.to_complex(40))
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.re(mpmath.mpmathify(x))


def period_pairing(
    mapping: Sequence[int], cs: ClassSet, line: EigenLine, chi: RingClassCharacter, dps: int = 40
) -> PeriodPairing:
    """P0 = sum_t f(x_t) chi(t) and |P0|^2 / <f, f>, cross-checked against the projection of P_chi."""
    pv = period_vector(mapping, len(cs), chi)
    ff = height_pairing(cs, line.vector, line.vector)
    if line.exact:
        m = chi.cyclotomic_order
        p0 = CyclotomicValue.rational(0, m)
        for t, x in enumerate(mapping):
            p0 = p0 + chi.value(t) * line.values[x]
        if ff == 0:
            raise InternalInvariantError("height pairing vanished on a nonzero vector", MODULE)
        ratio = (p0 * p0.conjugate()) * (Fraction(1) / ff)
        # <P, f> = sum_i P_i conj(v_i) w_i, then |<P, f>|^2 / <f, f>
        pf = CyclotomicValue.rational(0, m)
        for e, v, w in zip(pv.entries, line.vector, cs.weights):
            pf = pf + e * (v * w)
        proj = (pf * pf.conjugate()) * (Fraction(1) / ff)
        if proj != ratio:
            raise InternalInvariantError("projection height differs from |P0|^2/<f,f>", MODULE)
        rv = ratio.rational_value()
        return PeriodPairing(p0, rv if rv is not None else ratio, proj, True)
    with mpmath.workdps(dps):
        p0 = mpmath.mpc(0)
        for t, x in enumerate(mapping):
            p0 += chi.complex_value(t, dps) * line.values[x]
        ratio = abs(p0) ** 2 / ff
        pf = mpmath.mpc(0)
        for e, v, w in zip(pv.entries, line.vector, cs.weights):
            pf += e.to_complex(dps) * v * w
        proj = abs(pf) ** 2 / ff
        if abs(proj - ratio) > mpmath.mpf(10) ** (-dps // 2) * (1 + abs(ratio)):
            raise InternalInvariantError("projection height differs from |P0|^2/<f,f>", MODULE)
        return PeriodPairing(p0, ratio, proj, False)


def period_formula_rhs(analysis: SignAnalysis, ratio, petersson, u: int, dps: int = 30) -> mpmath.mpf:
    """2^-mu 8 pi^2 (phi, phi) / (u^2 sqrt|D c^2|) * ratio."""
    with mpmath.workdps(dps):
        disc = abs(analysis.discriminant) * analysis.conductor**2
        pref = mpmath.mpf(2) ** (-analysis.mu) * 8 * mpmath.pi**2 / (u * u * mpmath.sqrt(disc))
        return pref * mpmath.mpmathify(petersson) * _as_real(ratio)


def order_unit_index(d: int, c: int) -> int:
    """u = [O_c^x : Z^x]."""
    return unit_index(QuadOrder(d, c))


def parseval_check(mapping: Sequence[int], cs: ClassSet, line: EigenLine, group: IdealClassGroup) -> tuple[object, object]:
    """(sum_chi |P0_chi(f)|^2, h sum_t f(x_t)^2); equal by orthogonality."""
    chars = characters(group)
    h = len(group)
    if line.exact:
        total = Fraction(0)
        for chi in chars:
            m = chi.cyclotomic_order
            p0 = CyclotomicValue.rational(0, m)
            for t, x in enumerate(mapping):
                p0 = p0 + chi.value(t) * line.values[x]
            val = (p0 * p0.conjugate()).rational_value()
            if val is None:
                raise InternalInvariantError("|P0|^2 is not rational for a rational line", MODULE)
            total += val
        direct = h * sum((line.values[x] ** 2 for x in mapping), Fraction(0))
        return total, direct
    total = mpmath.mpf(0)
    for chi in chars:
        p0 = mpmath.fsum(chi.complex_value(t) * line.values[x] for t, x in enumerate(mapping))
        total += abs(p0) ** 2
    direct = h * mpmath.fsum(line.values[x] ** 2 for x in mapping)
    return total, direct


# ---------------------------------------------------------------------------
# Configuration search


@dataclass(frozen=True)
class Configuration:
    level: int
    discriminant: int
    conductor: int
    character: str
    ramification: tuple[int, ...]


def genus_configurations(
    levels: Sequence[int], max_conductor: int = 5, max_abs_disc: int = 40, min_conductor: int = 2
) -> list[Configuration]:
    """(N, D, c, chi) with chi a primitive nontrivial genus character of conductor c and an even sign set.

    Configurations with a ramified p | (N, D) are skipped because their sign
    depends on a_p; the caller may re-check them once eigenvalues exist.
    """
    out = []
    for level in levels:
        for absd in range(3, max_abs_disc + 1):
            d = -absd
            if not is_fundamental_discriminant(d):
                continue
            for c in range(min_conductor, max_conductor + 1):
                if gcd(c, level) != 1:
                    continue
                group = class_group(QuadOrder(d, c))
                for chi in characters(group):
                    if chi.is_trivial or not chi.is_genus() or not chi.primitive:
                        continue
                    try:
                        sa = analyze_signs(level, d, c, chi)
                    except ConditionViolation:
                        continue
                    if sa.case != "waldspurger":
                        continue
                    out.append(Configuration(level, d, c, chi.label, sa.ramification))
    return out


# ---------------------------------------------------------------------------
# Embedding invariance


def conjugate_embedding(emb: EmbeddingData, b: Sequence[Fraction]) -> EmbeddingData:
    """Transport (R, xi) to (b R b^-1, b xi b^-1)."""
    from .quaternion import OrderBasis

    alg = emb.order.algebra
    if alg.nrd(b) == 0:
        raise DomainError("conjugating element must be invertible", MODULE)
    binv = alg.inverse(b)

    def conj(x):
        return alg.mul(alg.mul(b, x), binv)

    lattice = Lattice.from_generators([conj(x) for x in emb.order.basis])
    order = OrderBasis(alg, lattice, emb.order.level, emb.order.certificates)
    return EmbeddingData(
        conj(emb.image_generator),
        order,
        emb.fundamental_discriminant,
        emb.conductor,
        emb.meets,
        emb.admissible,
        emb.justification,
    )


def invariance_ratios(
    emb: EmbeddingData,
    cs: ClassSet,
    line: EigenLine,
    chi: RingClassCharacter,
    conjugations: int = 3,
    seed: int = 0,
) -> list:
    """Period ratios after random conjugations (b R b^-1 rebuilt from scratch) and other optimal embeddings.

    The eigenline is carried over by matching classes through I -> b I b^-1.
    """
    import random

    from .brandt import class_set
    from .quaternion.embedding import embeddings_in, reembed

    rng = random.Random(seed)
    group = chi.group
    alg = emb.order.algebra
    out = []
    disc = emb.fundamental_discriminant * emb.conductor**2
    for xi in embeddings_in(alg, emb.order.lattice, disc, optimal=True):
        other = reembed(emb, xi)
        out.append(period_pairing(pic_to_classset(other, cs, group), cs, line, chi).ratio)
    basis = emb.order.basis
    made = 0
    while made < conjugations:
        coeffs = [rng.randint(-3, 3) for _ in basis]
        b = tuple(sum((Fraction(k) * v[i] for k, v in zip(coeffs, basis)), Fraction(0)) for i in range(4))
        if alg.nrd(b) == 0 or all(x == 0 for x in b[1:]):
            continue
        new = conjugate_embedding(emb, b)
        cs2 = class_set(new.order)
        binv = alg.inverse(b)
        moved = [
            Lattice.from_generators([alg.mul(alg.mul(b, x), binv) for x in ideal.basis()]) for ideal in cs.ideals
        ]
        perm = [cs2.classify(m, n) for m, n in zip(moved, cs.norms)]
        if sorted(perm) != list(range(len(cs))):
            raise InternalInvariantError("conjugation does not permute the class set", MODULE)
        vec = [None] * len(cs)
        vals = [None] * len(cs)
        for i, j in enumerate(perm):
            vec[j] = line.vector[i]
            vals[j] = line.values[i]
        moved_line = EigenLine(vec, vals, dict(line.eigenvalues), line.exact, line.field_degree, line.degree_zero)
        out.append(period_pairing(pic_to_classset(new, cs2, group), cs2, moved_line, chi).ratio)
        made += 1
    return out
