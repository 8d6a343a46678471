"""Local factors alpha(W_0), beta(f), gamma at one place, as exact symbolic products.

A :class:`SymbolicValue` is a rational function in the residue size ``q``
times a monomial in formal L-factor tokens.  Nothing here is evaluated
numerically: identities are checked by expanding the abelian tokens
L(1, 1), L(2, 1), L(1, eta) into rational functions of q and comparing
what is left exactly.

Local representations are those with trivial central character, so a
ramified sigma has delta_sigma = 0 exactly when it is an unramified twist
of Steinberg (conductor exponent 1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import sympy

from .errors import DomainError, InternalInvariantError, UnsupportedConfiguration
from .quaternion.local import KV_TYPES, eichler_symbol

MODULE = "local-constants"

q = sympy.Symbol("q", positive=True)

L_HALF = "L(1/2,pi,chi)"
L_AD = "L(1,pi,ad)"
L_ETA = "L(1,eta)"
L_ONE = "L(1,1)"
L_TWO = "L(2,1)"
ABS_D = "|D|^(1/2)"
ABS_DELTA = "|delta|^(1/2)"

TOKENS = (L_HALF, L_AD, L_ETA, L_ONE, L_TWO, ABS_D, ABS_DELTA)


@dataclass(frozen=True)
class SymbolicValue:
    coeff: sympy.Expr
    tokens: tuple[tuple[str, int], ...] = ()

    @classmethod
    def make(cls, coeff=1, **_unused) -> "SymbolicValue":
        return cls(sympy.nsimplify(coeff) if not isinstance(coeff, sympy.Basic) else coeff)

    @classmethod
    def token(cls, name: str, exponent: int = 1) -> "SymbolicValue":
        if name not in TOKENS:
            raise DomainError(f"unknown token {name}", MODULE)
        return cls(sympy.Integer(1), ((name, exponent),) if exponent else ())

    @property
    def ledger(self) -> dict[str, int]:
        return dict(self.tokens)

    def __mul__(self, other: "SymbolicValue | int | sympy.Expr") -> "SymbolicValue":
        if not isinstance(other, SymbolicValue):
            other = SymbolicValue(sympy.sympify(other))
        led = self.ledger
        for k, e in other.tokens:
            led[k] = led.get(k, 0) + e
        toks = tuple(sorted((k, e) for k, e in led.items() if e))
        return SymbolicValue(sympy.cancel(self.coeff * other.coeff), toks)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SymbolicValue":
        return SymbolicValue(sympy.cancel(self.coeff**n), tuple((k, e * n) for k, e in self.tokens if e * n))

    def inverse(self) -> "SymbolicValue":
        return self**-1

    def __truediv__(self, other: "SymbolicValue") -> "SymbolicValue":
        return self * other.inverse()

    def substitute(self, values: dict[str, sympy.Expr]) -> "SymbolicValue":
        """Replace the named tokens by rational functions of q."""
        coeff = self.coeff
        rest = []
        for k, e in self.tokens:
            if k in values:
                coeff = coeff * values[k] ** e
            else:
                rest.append((k, e))
        return SymbolicValue(sympy.cancel(coeff), tuple(rest))

    def equals(self, other: "SymbolicValue") -> bool:
        return self.ledger == other.ledger and sympy.cancel(self.coeff - other.coeff) == 0

    def __str__(self) -> str:
        parts = [str(self.coeff)]
        for k, e in self.tokens:
            parts.append(k if e == 1 else f"{k}^{e}")
        return " * ".join(parts)


ONE = SymbolicValue(sympy.Integer(1))


def abelian_factors(kv_type: str) -> dict[str, sympy.Expr]:
    """L(1, 1), L(2, 1), L(1, eta) at a place with residue size q."""
    eta = {"split": 1, "inert": -1, "ramified": 0}[kv_type]
    return {
        L_ONE: 1 / (1 - 1 / q),
        L_TWO: 1 / (1 - q**-2),
        L_ETA: 1 / (1 - eta / q),
    }


@dataclass(frozen=True)
class LocalInput:
    """n = conductor exponent of sigma, c = conductor exponent of chi."""

    kv_type: str
    n: int
    c: int
    b_split: bool | None = None  # only needed for ramified K, n = 1, c = 0
    weight: int = 2

    def __post_init__(self) -> None:
        if self.kv_type not in KV_TYPES:
            raise DomainError(f"unknown splitting type {self.kv_type!r}", MODULE)
        if self.n < 0 or self.c < 0:
            raise DomainError("n and c must be nonnegative", MODULE)

    @property
    def delta_sigma(self) -> int:
        if self.n == 0:
            raise DomainError("delta_sigma is only defined for ramified sigma", MODULE)
        return 1 if self.n >= 2 else 0

    @property
    def e(self) -> int:
        return 2 if self.kv_type == "ramified" else 1

    @property
    def nonsplit(self) -> bool:
        return self.kv_type != "split"

    @property
    def c1(self) -> int:
        """Local exponent of c_1: c with the primes of Sigma_1 removed."""
        return 0 if (self.nonsplit and self.c < self.n) else self.c

    @property
    def b_division(self) -> bool:
        """Whether B_v must be division; raises when the data do not decide it."""
        return tunnell_saito(self) == -1


# ---------------------------------------------------------------------------
# The three local factors


@dataclass(frozen=True)
class OrderCase:
    kind: str  # certificate kind understood by eichler_symbol, or 'maximal-split'
    exponent: int
    rule: str


def order_case(inp: LocalInput) -> OrderCase:
    """Type of the local order R_v determined by (K, n, c, B)."""
    if inp.n == 0:
        return OrderCase("maximal-split", 0, "n = 0")
    if inp.kv_type == "split":
        return OrderCase("eichler", inp.n, "K split")
    if inp.c >= inp.n:
        return OrderCase("eichler", inp.n, "K nonsplit, c >= n")
    if inp.kv_type == "inert":
        return OrderCase("inert-thickened", inp.n, "K inert, c < n")
    if inp.n >= 2:
        return OrderCase("ramified-thickened", inp.n, "K ramified, n >= 2, c < n")
    if inp.b_division:
        return OrderCase("maximal-division", 1, "K ramified, n = 1, B division, c = 0")
    return OrderCase("iwahori", 1, "K ramified, n = 1, B split")


def gamma_factor(inp: LocalInput) -> SymbolicValue:
    """gamma = L(1, 1)(1 - e(R)/q); 1 for the maximal order of the split algebra."""
    case = order_case(inp)
    if case.kind == "maximal-split":
        return ONE
    e = eichler_symbol(case)
    return SymbolicValue.token(L_ONE) * (1 - sympy.Integer(e) / q)


def alpha_w0(inp: LocalInput) -> SymbolicValue:
    """alpha(W_0) (nonarchimedean), including the |delta|^{-1/2} normalization."""
    base = SymbolicValue.token(ABS_DELTA, -1)
    if inp.n == 0:
        return base
    return (
        base
        * SymbolicValue.token(L_TWO)
        * SymbolicValue.token(L_ONE, -1)
        * SymbolicValue.token(L_AD, -inp.delta_sigma)
    )


def alpha_w0_archimedean(weight: int) -> sympy.Expr:
    if weight < 2:
        raise UnsupportedConfiguration("only discrete series of weight >= 2", MODULE)
    return sympy.Integer(2) ** (-weight)


@dataclass(frozen=True)
class BetaCase:
    index: int
    value: SymbolicValue
    rule: str


def beta0_case(inp: LocalInput) -> BetaCase:
    """beta(f) |D delta|^{-1/2} with the case that produced it."""
    n, c = inp.n, inp.c
    split = inp.kv_type == "split"
    eta2 = SymbolicValue.token(L_ETA, 2) * q ** (-c)
    ratio = SymbolicValue.token(L_ONE) * SymbolicValue.token(L_TWO, -1)
    cases = []
    if n == 0 and c == 0:
        cases.append(BetaCase(1, ONE, "n = c = 0"))
    if n == 0 and c > 0:
        cases.append(BetaCase(2, eta2, "n = 0, c > 0"))
    if n > 0 and c == 0 and split:
        cases.append(BetaCase(3, ratio * SymbolicValue.token(L_AD, inp.delta_sigma), "n > 0, c = 0, K split"))
    if n * c > 0 and (split or c >= n):
        v = ratio * eta2 * SymbolicValue.token(L_AD, inp.delta_sigma) * SymbolicValue.token(L_HALF, -1)
        cases.append(BetaCase(4, v, "nc > 0, K split or c >= n"))
    if n > c and not split:
        e = inp.e
        v = SymbolicValue(sympy.Integer(e) * (1 - q ** (-e))) * SymbolicValue.token(L_AD) * SymbolicValue.token(L_HALF, -1)
        cases.append(BetaCase(5, v, "n > c, K nonsplit"))
    if len(cases) != 1:
        raise InternalInvariantError(f"{len(cases)} beta cases fire for {inp}", MODULE)
    return cases[0]


def beta(inp: LocalInput) -> SymbolicValue:
    return beta0_case(inp).value * SymbolicValue.token(ABS_D) * SymbolicValue.token(ABS_DELTA)


# ---------------------------------------------------------------------------
# The combined identity


def sigma_flags(inp: LocalInput) -> dict[str, int]:
    n, c = inp.n, inp.c
    d_sigma_d = int(inp.kv_type == "ramified" and n > 0 and c < n)
    d_sigma = int(n > 0 and (inp.kv_type == "ramified" or c > 0) and (n != 1 or c >= n))
    d_c1 = int(inp.c1 != 0)
    return {"sigma_D": d_sigma_d, "sigma": d_sigma, "c1": d_c1}


def representation_values(inp: LocalInput) -> dict[str, sympy.Expr]:
    """Values of L(1/2, pi, chi) and L(1, ad) forced by the local type when chi is unramified.

    Only the nonsplit, c = 0, n > 0 inputs need them:

    * n = 1: sigma is an unramified quadratic twist of Steinberg, L(1, ad) = L(2, 1),
      and L(1/2, pi, chi) = (1 - eps q_K^{-1/2 - 1/2})^{-1} with eps = +1 iff B is division;
    * n >= 2, K inert: the base change to K stays ramified, so L(1/2, pi, chi) = 1.
    """
    if not (inp.nonsplit and inp.c == 0 and inp.n > 0):
        return {}
    if inp.n == 1:
        eps = 1 if inp.b_division else -1
        qk = q**2 if inp.kv_type == "inert" else q
        return {L_AD: 1 / (1 - q**-2), L_HALF: 1 / (1 - eps / qk)}
    if inp.kv_type == "inert":
        return {L_HALF: sympy.Integer(1)}
    return {}


@dataclass
class IdentityRow:
    inp: LocalInput
    lhs: SymbolicValue
    rhs: SymbolicValue
    equal: bool
    beta_case: int
    order_kind: str
    flags: dict[str, int] = field(default_factory=dict)
    substitutions: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "kv_type": self.inp.kv_type,
            "n": self.inp.n,
            "c": self.inp.c,
            "b_split": self.inp.b_split,
            "beta_case": self.beta_case,
            "order": self.order_kind,
            "flags": self.flags,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "substituted": list(self.substitutions),
            "equal": self.equal,
        }


def closed_form(inp: LocalInput) -> SymbolicValue:
    f = sigma_flags(inp)
    return (
        SymbolicValue(sympy.Integer(2) ** f["sigma_D"])
        * SymbolicValue.token(L_HALF, -f["sigma"])
        * SymbolicValue.token(L_ETA, 2 * f["c1"])
        * q ** (-inp.c1)
    )


def combined_identity(inp: LocalInput) -> IdentityRow:
    """alpha(W_0) beta(f) gamma |D|^{-1/2} against the closed form."""
    lhs = alpha_w0(inp) * beta(inp) * gamma_factor(inp) * SymbolicValue.token(ABS_D, -1)
    rhs = closed_form(inp)
    ab = abelian_factors(inp.kv_type)
    rep = representation_values(inp)
    left = lhs.substitute(ab).substitute(rep)
    right = rhs.substitute(ab).substitute(rep)
    return IdentityRow(
        inp,
        lhs,
        rhs,
        left.equals(right),
        beta0_case(inp).index,
        order_case(inp).kind,
        sigma_flags(inp),
        tuple(sorted(rep)),
    )


def grid_inputs(n_max: int = 3, c_max: int = 3) -> Iterator[LocalInput]:
    for kv in KV_TYPES:
        for n in range(n_max + 1):
            for c in range(c_max + 1):
                if kv == "ramified" and n == 1 and c == 0:
                    yield LocalInput(kv, n, c, b_split=True)
                    yield LocalInput(kv, n, c, b_split=False)
                else:
                    yield LocalInput(kv, n, c)


def identity_grid(n_max: int = 3, c_max: int = 3) -> list[IdentityRow]:
    return [combined_identity(inp) for inp in grid_inputs(n_max, c_max)]


# ---------------------------------------------------------------------------
# Archimedean constant and sign rules


def whittaker_norm_archimedean(weight: int) -> sympy.Expr:
    """(W_0, W_0) = 2 (4 pi)^{-k} Gamma(k) for the weight-k discrete series."""
    return 2 * (4 * sympy.pi) ** (-weight) * sympy.gamma(weight)


def c_archimedean(weight: int, kv_type: str) -> sympy.Expr:
    """C(pi, chi) at a real place: 4^{k-1} pi^{k+1} / Gamma(k) for K = C, 1 for K = R^2."""
    if weight < 2:
        raise UnsupportedConfiguration("only discrete series of weight >= 2", MODULE)
    if kv_type in ("split", "R2"):
        return sympy.Integer(1)
    if kv_type not in ("C", "complex", "nonsplit"):
        raise DomainError(f"unknown archimedean type {kv_type!r}", MODULE)
    value = sympy.pi / 2 / whittaker_norm_archimedean(weight)
    closed = sympy.Integer(4) ** (weight - 1) * sympy.pi ** (weight + 1) / sympy.gamma(weight)
    if sympy.simplify(value - closed) != 0:
        raise InternalInvariantError("archimedean constant disagrees with its closed form", MODULE)
    return closed


def global_constant_check() -> bool:
    """2^2 C(2, C) (2 pi)^{-1} = 8 pi^2, the prefactor of the weight-2 formula over Q."""
    return sympy.simplify(4 * c_archimedean(2, "C") / (2 * sympy.pi) - 8 * sympy.pi**2) == 0


def tunnell_saito(inp: LocalInput, special: bool | None = None, mu_chi_trivial: bool | None = None) -> int:
    """epsilon(B_v): +1 if B must split at v, -1 if it must be division.

    ``special`` marks sigma as a twist of Steinberg; ``mu_chi_trivial`` is
    whether mu_K chi = 1 for sigma = sp(2) x mu.  When the data do not decide
    the sign an UnsupportedConfiguration asks for the global sign instead.
    """
    if inp.kv_type == "split" or inp.n == 0:
        return 1
    if inp.c >= inp.n:
        return 1
    if inp.kv_type == "inert" and inp.c == 0:
        return 1 if inp.n % 2 == 0 else -1
    if inp.b_split is not None:
        return 1 if inp.b_split else -1
    if special is None and inp.n == 1:
        special = True  # conductor exponent 1 with trivial central character
    if special and mu_chi_trivial is not None:
        return -1 if mu_chi_trivial else 1
    raise UnsupportedConfiguration("local sign of B undetermined: requires global sign input", MODULE)


# ---------------------------------------------------------------------------
# The e_p factor


@dataclass(frozen=True)
class EpFactor:
    """e_p as c0 + c1 alpha in Q(alpha), alpha the p-adic unit root of X^2 - a_p X + p."""

    p: int
    a_p: int
    c0: sympy.Expr
    c1: sympy.Expr
    alpha_residue: int  # alpha mod p

    def value(self, alpha: sympy.Expr) -> sympy.Expr:
        return self.c0 + self.c1 * alpha

    def complex_value(self, sign: int = 1) -> complex:
        """Image under the complex embedding alpha -> (a_p + sign i sqrt(4p - a_p^2)) / 2."""
        disc = self.a_p**2 - 4 * self.p
        alpha = (self.a_p + sign * sympy.sqrt(disc)) / 2
        return complex(sympy.N(self.value(alpha), 30))


def ep_factor(a_p: int, p: int, chi1_at_p: int | sympy.Expr = 1) -> EpFactor:
    """L(2, 1_p) / L(1, pi_p, ad) (1 - chi_1(p)/alpha)^{-1} (1 - 1/(beta chi_1(p)))^{-1}."""
    if a_p % p == 0:
        raise DomainError(f"a_{p} = {a_p} is not ordinary at {p}", MODULE)
    x = sympy.Symbol("alpha")
    minpoly = sympy.Poly(x**2 - a_p * x + p, x)
    alpha, beta = x, a_p - x  # beta = p / alpha
    if sympy.rem(sympy.expand(alpha * beta - p), minpoly.as_expr(), x) != 0:
        raise InternalInvariantError("Vieta check failed", MODULE)
    chi = sympy.sympify(chi1_at_p)
    pp = sympy.Integer(p)
    # L(s, ad) at s = 1 with unitary Satake parameters alpha/sqrt p, beta/sqrt p
    l_ad_inv = (1 - alpha / (beta * pp)) * (1 - 1 / pp) * (1 - beta / (alpha * pp))
    l_two = 1 / (1 - pp**-2)
    expr = l_two * l_ad_inv / ((1 - chi / alpha) * (1 - 1 / (beta * chi)))
    num, den = sympy.fraction(sympy.together(expr))
    num = sympy.Poly(sympy.rem(sympy.expand(num), minpoly.as_expr(), x), x)
    den = sympy.Poly(sympy.rem(sympy.expand(den), minpoly.as_expr(), x), x)
    if den.is_zero:
        raise DomainError("e_p has a pole at this chi_1(p)", MODULE)
    # invert den = d0 + d1 x in Q(alpha): (d0 + d1 x)(d0 + d1 (a_p - x)) = norm
    d1 = den.coeff_monomial(x)
    d0 = den.coeff_monomial(1)
    conj = d0 + d1 * (a_p - x)
    norm = sympy.expand(d0 * d0 + a_p * d0 * d1 + p * d1 * d1)
    if sympy.simplify(norm) == 0:
        raise DomainError("e_p has a pole at this chi_1(p)", MODULE)
    val = sympy.rem(sympy.expand(num.as_expr() * conj), minpoly.as_expr(), x) / norm
    val = sympy.Poly(sympy.expand(val), x)
    return EpFactor(p, a_p, sympy.simplify(val.coeff_monomial(1)), sympy.simplify(val.coeff_monomial(x)), a_p % p)
