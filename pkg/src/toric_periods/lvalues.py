"""Central values of weight-2 L-series, their quadratic twists, and the adjoint L-value.

All series are evaluated with mpmath at a configurable precision.  Central
values of L(s, f) use the exponentially convergent series for a self-dual
weight-2 form; the adjoint value uses a smoothed approximate functional
equation whose weights are Meijer G-functions.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import (
    ConditionViolation,
    DomainError,
    InsufficientSeparation,
    InternalInvariantError,
    PrecisionShortfall,
    UnsupportedConfiguration,
)
from .quadratic import fundamental_part, kronecker, prime_factors

MODULE = "lvalues"


# ---------------------------------------------------------------------------
# Coefficient oracles


def eta_product(exponents: dict[int, int], bound: int) -> list[int]:
    """Coefficients c_0..c_bound of prod_m prod_n (1 - q^{mn})^{e_m} (without the q-shift)."""
    series = [0] * (bound + 1)
    series[0] = 1
    for m, e in exponents.items():
        for n in range(1, bound // m + 1):
            step = m * n
            for _ in range(e):
                # multiply by (1 - q^step)
                for i in range(bound, step - 1, -1):
                    series[i] -= series[i - step]
    return series


def eta_11a_coefficients(bound: int) -> list[int]:
    """a_0..a_bound of q prod (1 - q^n)^2 (1 - q^{11n})^2."""
    body = eta_product({1: 2, 11: 2}, bound)
    return [0] + body[: bound]


def ramanujan_tau(bound: int) -> list[int]:
    """tau(0..bound) from q prod (1 - q^n)^24."""
    body = eta_product({1: 24}, bound)
    return [0] + body[: bound]


def _divisor_count(n: int) -> int:
    count, m, p = 1, n, 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        count *= e + 1
        p += 1
    return count * (2 if m > 1 else 1)


def check_deligne(a: Sequence, weight: int = 2) -> None:
    """Assert |a_p| <= 2 p^{(k-1)/2} at every prime index."""
    for p in range(2, len(a)):
        if len(prime_factors(p)) == 1 and prime_factors(p)[0] == p:
            if abs(float(a[p])) ** 2 > 4 * p ** (weight - 1) * (1 + 1e-12):
                raise InternalInvariantError(f"|a_{p}| = {a[p]} violates the Ramanujan bound", MODULE)


# ---------------------------------------------------------------------------
# Weight-2 central values


@dataclass
class DirichletSeries:
    coefficients: list  # a_0 .. a_T with a_0 unused
    conductor: int
    gamma_shape: tuple[float, ...] = (0.0,)  # Gamma_C(s + shift) factors, analytic normalization
    root_number: int | None = None


@dataclass
class LValue:
    value: mpmath.mpf
    error: mpmath.mpf
    terms: int
    conductor: int
    root_number: int | None = None

    def to_json(self) -> dict:
        return {
            "value": mpmath.nstr(self.value, 20),
            "err": mpmath.nstr(self.error, 5),
            "terms": self.terms,
            "conductor": self.conductor,
            "root_number": self.root_number,
        }


def term_budget(conductor: int, digits: int) -> int:
    return math.ceil(math.sqrt(conductor) / (2 * math.pi) * (digits * math.log(10) + 5))


def tail_bound(conductor: int, terms: int) -> mpmath.mpf:
    """Bound for 2 sum_{n > T} |a_n|/n e^{-2 pi n / sqrt Q} using |a_n| <= d(n) sqrt(n) <= 2n."""
    r = mpmath.exp(-2 * mpmath.pi / mpmath.sqrt(conductor))
    return 4 * r ** (terms + 1) / (1 - r)


def fricke_sign(a: Sequence, conductor: int, dps: int = 30) -> int:
    """Sign w of Lambda(s) = w Lambda(2 - s), read off g(1/t) = w t^2 g(t) at t = 1.1.

    Here g(t) = sum a_n exp(-2 pi n t / sqrt Q).
    """
    with mpmath.workdps(dps):
        sq = mpmath.sqrt(conductor)

        def g(t):
            return mpmath.fsum(a[n] * mpmath.exp(-2 * mpmath.pi * n * t / sq) for n in range(1, len(a)))

        t = mpmath.mpf("1.1")
        left = g(1 / t)
        right = t * t * g(t)
        tail = tail_bound(conductor, len(a) - 1) * len(a)
        if abs(right) < 1e-8:
            raise PrecisionShortfall("theta value too small to read the sign", float(abs(right)), MODULE)
        ratio = left / right
        if abs(ratio - 1) < 1e-6 + tail:
            return 1
        if abs(ratio + 1) < 1e-6 + tail:
            return -1
        raise InternalInvariantError(
            f"functional equation fails (ratio {mpmath.nstr(ratio, 8)}): wrong conductor or coefficients", MODULE
        )


def elliptic_lvalue(a: Sequence, conductor: int, digits: int = 25, check_sign: bool = True) -> LValue:
    """L(1) = 2 sum a_n/n exp(-2 pi n / sqrt Q) for a weight-2 series with root number +1."""
    if conductor < 1:
        raise DomainError("conductor must be positive", MODULE)
    terms = term_budget(conductor, digits)
    if len(a) - 1 < terms:
        raise PrecisionShortfall(f"need {terms} coefficients, have {len(a) - 1}", None, MODULE)
    dps = digits + 10
    sign = None
    if check_sign:
        sign = fricke_sign(a[: terms + 1], conductor, dps)
        if sign == -1:
            return LValue(mpmath.mpf(0), mpmath.mpf(0), 0, conductor, -1)
    with mpmath.workdps(dps):
        sq = mpmath.sqrt(conductor)
        val = 2 * mpmath.fsum(
            mpmath.mpf(a[n]) / n * mpmath.exp(-2 * mpmath.pi * n / sq) for n in range(1, terms + 1) if a[n]
        )
        return LValue(+val, tail_bound(conductor, terms), terms, conductor, sign)


def twist_conductor(level: int, d: int) -> int:
    """Conductor of f tensor eta_d for a newform of level N and fundamental d.

    Exact when every p | (N, d) exactly divides N (multiplicative reduction there).
    """
    q = level * d * d
    for p in prime_factors(math.gcd(level, abs(d))):
        if (level // p) % p == 0:
            raise UnsupportedConfiguration(f"twist conductor at p = {p} with p^2 | N is not computed", MODULE)
        q //= p
    return q


def twisted_coefficients(a: Sequence, d: int) -> list:
    if d == 1:
        return list(a)
    return [a[n] * kronecker(d, n) if n else 0 for n in range(len(a))]


def twisted_lvalue(a: Sequence, level: int, d: int, digits: int = 25) -> LValue:
    q = level if d == 1 else twist_conductor(level, d)
    terms = term_budget(q, digits)
    if len(a) - 1 < terms:
        raise PrecisionShortfall(f"twist by {d} needs {terms} coefficients", None, MODULE)
    return elliptic_lvalue(twisted_coefficients(a[: terms + 1], d), q, digits)


def coefficients_needed(level: int, discs: Sequence[int], digits: int = 25) -> int:
    return max(term_budget(level if d == 1 else twist_conductor(level, d), digits) for d in discs)


@dataclass
class RankinValue:
    value: mpmath.mpf
    error: mpmath.mpf
    factors: list[tuple[int, LValue]]
    route: str


def rankin_lvalue(a: Sequence, level: int, pair: tuple[int, int], digits: int = 25, degree4: bool = False) -> RankinValue:
    """L(1, f, chi) for a genus character chi = eta_{d1} o Nm, as L(1, f x eta_d1) L(1, f x eta_d2).

    ``pair`` comes from the genus decomposition of chi (d1 = 1 for trivial chi).
    """
    if degree4:
        raise UnsupportedConfiguration("the degree-4 approximate functional equation is not implemented", MODULE)
    factors = []
    for d in pair:
        d0 = fundamental_part(d)[0] if d != 1 else 1
        if d0 != d:
            raise DomainError(f"{d} is not a fundamental discriminant", MODULE)
        factors.append((d, twisted_lvalue(a, level, d, digits)))
    with mpmath.workdps(digits + 10):
        v1, v2 = factors[0][1], factors[1][1]
        value = v1.value * v2.value
        err = abs(v1.value) * v2.error + abs(v2.value) * v1.error + v1.error * v2.error
    return RankinValue(value, err, factors, "factorized")


# ---------------------------------------------------------------------------
# Adjoint L-value and the Petersson norm


def adjoint_coefficients(a: Sequence, level: int, weight: int, bound: int, dps: int = 40) -> list[mpmath.mpf]:
    """Dirichlet coefficients of the finite adjoint L-function, analytic normalization.

    Good p: (1 - alpha^2 X)(1 - X)(1 - beta^2 X) with alpha beta = 1.
    p || N: (1 - X/p).  p^2 | N: the factor is omitted (partial L-function).
    """
    with mpmath.workdps(dps):
        lam = [mpmath.mpf(0)] * (bound + 1)
        lam[1] = mpmath.mpf(1)
        local: dict[int, list[mpmath.mpf]] = {}
        for p in range(2, bound + 1):
            if len(prime_factors(p)) != 1 or prime_factors(p)[0] != p:
                continue
            kmax = int(math.log(bound) / math.log(p) + 1e-9)
            if level % p == 0:
                if (level // p) % p == 0:
                    coeffs = [mpmath.mpf(1)] + [mpmath.mpf(0)] * kmax
                else:
                    coeffs = [mpmath.mpf(1) / p**j for j in range(kmax + 1)]
            else:
                # e1 = e2 = alpha^2 + 1 + beta^2 = lambda^2 - 1, e3 = 1
                t = mpmath.mpf(a[p]) ** 2 / mpmath.mpf(p) ** (weight - 1) - 1
                e1, e2, e3 = t, t, mpmath.mpf(1)
                coeffs = [mpmath.mpf(1)]
                for j in range(1, kmax + 1):
                    c = e1 * coeffs[j - 1]
                    if j >= 2:
                        c -= e2 * coeffs[j - 2]
                    if j >= 3:
                        c += e3 * coeffs[j - 3]
                    coeffs.append(c)
            local[p] = coeffs
        for n in range(2, bound + 1):
            p = prime_factors(n)[0]
            pk, j = p, 1
            while n % (pk * p) == 0:
                pk *= p
                j += 1
            lam[n] = local[p][j] * lam[n // pk]
        return lam


def _adjoint_weight(x: mpmath.mpf, s: mpmath.mpf, weight: int) -> mpmath.mpf:
    """(1 / 2 pi i) int gamma(s + z) X^{-(s+z)/2 ...} dz / z in Meijer G form."""
    b = [mpmath.mpf(1) / 2, mpmath.mpf(weight - 1) / 2, mpmath.mpf(weight) / 2, -s / 2]
    return mpmath.meijerg([[], [1 - s / 2]], [b, []], x) / mpmath.pi**weight


def adjoint_gamma(s: mpmath.mpf, weight: int) -> mpmath.mpf:
    """Gamma_R(s + 1) Gamma_C(s + k - 1)."""
    return (
        mpmath.pi ** (-(s + 1) / 2)
        * mpmath.gamma((s + 1) / 2)
        * 2
        * (2 * mpmath.pi) ** (-(s + weight - 1))
        * mpmath.gamma(s + weight - 1)
    )


@dataclass
class AdjointValue:
    value: mpmath.mpf
    error: mpmath.mpf
    terms: int
    conductor: int


def adjoint_lvalue(a: Sequence, level: int, weight: int = 2, digits: int = 20, terms: int | None = None) -> AdjointValue:
    """L(1, ad f) by the smoothed functional equation (root number 1, conductor N^2).

    Requires squarefree N; for p^2 | N the local conductor of ad depends on
    the local type and is not derived here.
    """
    if any((level // p) % p == 0 for p in prime_factors(level)):
        raise UnsupportedConfiguration("adjoint L-value only for squarefree level", MODULE)
    check_deligne(a, weight)
    q = level * level
    dps = digits + 15
    with mpmath.workdps(dps):
        sq = mpmath.sqrt(q)
        # weight ~ exp(-3 (pi^3 n^2 / Q)^{1/3}); stop once below 10^-(digits + 5)
        target = (digits + 5) * math.log(10) / 3
        auto = int(math.ceil((target / math.pi) ** 1.5 * math.sqrt(q))) + 10
        terms = terms or auto
        if len(a) - 1 < terms:
            raise PrecisionShortfall(f"adjoint value needs {terms} coefficients, have {len(a) - 1}", None, MODULE)
        lam = adjoint_coefficients(a, level, weight, terms, dps)
        one, zero = mpmath.mpf(1), mpmath.mpf(0)
        total = mpmath.mpf(0)
        last = mpmath.mpf(0)
        for n in range(1, terms + 1):
            if lam[n] == 0:
                continue
            x = mpmath.pi**3 * n * n / q
            w = _adjoint_weight(x, one, weight) + _adjoint_weight(x, zero, weight)
            total += lam[n] * w
            last = abs(w) * (n + 1)
        value = total / (sq * adjoint_gamma(one, weight))
        err = last * 10 / (sq * adjoint_gamma(one, weight))
        return AdjointValue(value, err, terms, q)


@dataclass
class PeterssonNorm:
    value: mpmath.mpf
    error: mpmath.mpf
    adjoint: AdjointValue


def petersson_norm(a: Sequence, level: int, weight: int = 2, digits: int = 20, terms: int | None = None) -> PeterssonNorm:
    """(phi, phi) = N Lambda^{(S)}(1, ad) / 2^k.

    Lambda includes the archimedean factor Gamma_R(s + 1) Gamma_C(s + k - 1);
    at level 1 this is the classical Petersson norm over SL_2(Z)\\H.
    """
    adj = adjoint_lvalue(a, level, weight, digits, terms)
    with mpmath.workdps(digits + 15):
        scale = mpmath.mpf(level) / 2**weight * adjoint_gamma(mpmath.mpf(1), weight)
        value = adj.value * scale
        err = adj.error * scale
    if value <= 0:
        raise InternalInvariantError("Petersson norm is not positive", MODULE)
    return PeterssonNorm(value, err, adj)


def classical_adjoint_value(norm: float | mpmath.mpf, weight: int) -> mpmath.mpf:
    """Finite L(1, ad f) from the classical level-1 norm: 2^{2k-1} pi^{k+1} / (k-1)! <f, f>."""
    return mpmath.mpf(2) ** (2 * weight - 1) * mpmath.pi ** (weight + 1) / mpmath.factorial(weight - 1) * norm


# ---------------------------------------------------------------------------
# End-to-end verification


@dataclass
class VerifyOptions:
    digits: int = 25
    petersson_digits: int = 20
    tolerance: float = 1e-4
    degree4: bool = False
    terms: int | None = None  # coefficient budget for the adjoint series


@dataclass
class VerificationReport:
    inputs: dict
    sign_analysis: dict
    class_set: dict
    eigenvalues: dict
    petersson: dict
    lhs: dict
    rhs: dict
    period: dict
    relative_error: float
    passed: bool
    runtime_ms: int | None = None
    cache: dict = field(default_factory=lambda: {"hits": 0, "misses": 0})
    conventions: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return mpmath.nstr(mpmath.mpmathify(x), 20)


def relative_error(lhs, rhs, floor: float = 1e-30) -> float:
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), floor))


def verify(level: int, d: int, c: int = 1, chi_spec: str | int = "trivial", options: VerifyOptions | None = None, cache=None) -> VerificationReport:
    """Compute both sides of the period identity for one (N, D, c, chi)."""
    from .brandt import bad_prime_eigenvalues, class_set, eigenline, extend_eigenvalues, hecke_an
    from .periods import analyze_signs, order_unit_index, period_pairing, pic_to_classset, period_formula_rhs
    from .quadratic import QuadOrder, class_group, find_character, genus_pair
    from .quaternion import algebra_from_ramification
    from .quaternion.embedding import admissible_order

    opts = options or VerifyOptions()
    start = time.perf_counter()
    group = class_group(QuadOrder(d, c))
    chi = find_character(group, chi_spec)
    if chi.conductor != c:
        raise ConditionViolation(f"character {chi.label} has conductor {chi.conductor}, not {c}", "periods")
    provisional = analyze_signs(level, d, c, chi)
    if provisional.case == "inapplicable":
        raise ConditionViolation("; ".join(provisional.notes), "periods")
    if provisional.case == "heegner":
        raise ConditionViolation("sign set S has odd size: Heegner case, the period formula does not apply", "periods")
    if not chi.is_genus() and not opts.degree4:
        raise UnsupportedConfiguration("non-genus characters need the degree-4 route", MODULE)

    # The algebra depends on a_p at ramified p | (N, D) when pending; try both choices.
    candidates = [provisional.ramification]
    if provisional.case == "pending":
        base = provisional.ramification
        candidates = []
        pend = list(provisional.pending)
        for mask in range(2 ** len(pend)):
            extra = tuple(p for i, p in enumerate(pend) if mask >> i & 1)
            if (len(base) + len(extra)) % 2 == 1:
                candidates.append(tuple(sorted(base + extra)))
    report = None
    for ram in candidates:
        alg = algebra_from_ramification(list(ram))
        order, emb = admissible_order(alg, level, d, c, chi)
        cs = cache.class_set(order) if cache is not None else class_set(order)
        try:
            line = eigenline(cs)
        except (DomainError, InsufficientSeparation):
            if len(candidates) > 1:
                continue
            raise
        bad = bad_prime_eigenvalues(cs, line)
        analysis = analyze_signs(level, d, c, chi, {p: int(v) for p, v in bad.items()})
        if analysis.case != "waldspurger" or analysis.ramification != tuple(sorted(ram)):
            if len(candidates) > 1:
                continue
            raise ConditionViolation(f"confirmed sign analysis gives {analysis.case}", "periods")
        report = (alg, order, emb, cs, line, bad, analysis)
        break
    if report is None:
        raise ConditionViolation("no algebra compatible with the confirmed eigenvalues", "periods")
    alg, order, emb, cs, line, bad, analysis = report
    if not line.exact:
        raise UnsupportedConfiguration("eigenline with irrational eigenvalues: L-series route needs rational a_n", MODULE)

    pair = genus_pair(chi) if not chi.is_trivial else (1, d)
    if pair[0] != 1 and chi.is_trivial:
        raise InternalInvariantError("trivial character with nontrivial genus pair", MODULE)
    bound = coefficients_needed(level, pair, opts.digits)
    adj_bound = int(math.ceil((((opts.petersson_digits + 5) * math.log(10) / 3) / math.pi) ** 1.5 * level)) + 10
    bound = max(bound, adj_bound, opts.terms or 0)
    eig = extend_eigenvalues(cs, line, bound)
    eig.update(bad)
    a = hecke_an(eig, bound, level)
    a = [int(x) for x in a]
    check_deligne(a)

    lhs = rankin_lvalue(a, level, pair, opts.digits, opts.degree4)
    pet = petersson_norm(a, level, 2, opts.petersson_digits, opts.terms)
    mapping = pic_to_classset(emb, cs, group)
    pp = period_pairing(mapping, cs, line, chi)
    u = order_unit_index(d, c)
    rhs = period_formula_rhs(analysis, pp.ratio, pet.value, u, opts.digits)
    rel = relative_error(lhs.value, rhs)
    if cache is not None:
        cache.store(cs)
    runtime = int((time.perf_counter() - start) * 1000)
    return VerificationReport(
        inputs={"level": level, "disc": d, "conductor": c, "character": chi.label},
        sign_analysis=analysis.to_json(),
        class_set={"n": len(cs), "weights": list(cs.weights), "ramified": list(alg.ramified_primes)},
        eigenvalues={str(p): str(v) for p, v in sorted(eig.items()) if p <= 50},
        petersson={"value": _fmt(pet.value), "err": mpmath.nstr(pet.error, 5), "terms": pet.adjoint.terms},
        lhs={
            "value": _fmt(lhs.value),
            "err": mpmath.nstr(lhs.error, 5),
            "route": lhs.route,
            "factors": {str(dd): lv.to_json() for dd, lv in lhs.factors},
        },
        rhs={"value": _fmt(rhs), "u": u, "mu": analysis.mu},
        period={"map": mapping, "P0": str(pp.p0) if pp.exact else _fmt(pp.p0), "ratio": str(pp.ratio) if pp.exact else _fmt(pp.ratio)},
        relative_error=rel,
        passed=rel <= opts.tolerance,
        runtime_ms=runtime,
        cache=cache.stats() if cache is not None else {"hits": 0, "misses": 0},
        conventions={"L": "finite part, analytic normalization, center s = 1 in the weight-2 variable"},
    )
