import cmath

import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from toric_periods.errors import DomainError, UnsupportedConfiguration
from toric_periods.local_constants import (
    L_ETA,
    SymbolicValue,
    LocalInput,
    abelian_factors,
    beta0_case,
    c_archimedean,
    combined_identity,
    ep_factor,
    global_constant_check,
    identity_grid,
    order_case,
    q,
    tunnell_saito,
)


def test_identity_holds_on_whole_grid():
    rows = identity_grid()
    bad = [r.to_json() for r in rows if not r.equal]
    assert not bad
    assert {r.beta_case for r in rows} == {1, 2, 3, 4, 5}


def test_grid_has_both_algebras_for_ramified_steinberg():
    rows = [r for r in identity_grid() if r.inp.kv_type == "ramified" and r.inp.n == 1 and r.inp.c == 0]
    assert sorted(r.inp.b_split for r in rows) == [False, True]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["split", "inert", "ramified"]), st.integers(0, 5), st.integers(0, 5))
def test_exactly_one_beta_case(kv, n, c):
    inp = LocalInput(kv, n, c, b_split=True if (kv == "ramified" and n == 1 and c == 0) else None)
    case = beta0_case(inp)
    assert 1 <= case.index <= 5


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["split", "inert", "ramified"]), st.integers(0, 5), st.integers(0, 5))
def test_identity_beyond_grid(kv, n, c):
    inp = LocalInput(kv, n, c, b_split=True if (kv == "ramified" and n == 1 and c == 0) else None)
    assert combined_identity(inp).equal


def test_order_case_examples():
    assert order_case(LocalInput("split", 2, 0)).kind == "eichler"
    assert order_case(LocalInput("split", 0, 3)).kind == "maximal-split"
    assert order_case(LocalInput("inert", 2, 1)).kind == "inert-thickened"
    assert order_case(LocalInput("ramified", 1, 0, b_split=True)).kind == "iwahori"
    assert order_case(LocalInput("ramified", 1, 0, b_split=False)).kind == "maximal-division"


def test_local_input_validation():
    with pytest.raises(DomainError):
        LocalInput("bogus", 1, 0)
    with pytest.raises(DomainError):
        LocalInput("split", -1, 0)
    with pytest.raises(DomainError):
        _ = LocalInput("split", 0, 0).delta_sigma


def test_abelian_factors():
    f = abelian_factors("inert")
    assert sympy.simplify(f[L_ETA] - 1 / (1 + 1 / q)) == 0
    assert abelian_factors("ramified")[L_ETA] == 1


def test_symbolic_value_algebra():
    a = SymbolicValue.token(L_ETA, 2) * q
    b = a / SymbolicValue.token(L_ETA)
    assert b.equals(SymbolicValue.token(L_ETA) * q)
    assert (a * a.inverse()).equals(SymbolicValue(sympy.Integer(1)))


def test_archimedean_constants():
    assert c_archimedean(2, "C") == 4 * sympy.pi**3
    assert c_archimedean(12, "C") == 16384 * sympy.pi**13 / 155925
    assert c_archimedean(2, "split") == 1
    assert global_constant_check()
    with pytest.raises(UnsupportedConfiguration):
        c_archimedean(1, "C")


def test_tunnell_saito_signs():
    assert tunnell_saito(LocalInput("split", 2, 0)) == 1
    assert tunnell_saito(LocalInput("inert", 1, 0)) == -1
    assert tunnell_saito(LocalInput("inert", 2, 0)) == 1
    assert tunnell_saito(LocalInput("inert", 1, 1)) == 1
    assert tunnell_saito(LocalInput("ramified", 1, 0), mu_chi_trivial=True) == -1
    assert tunnell_saito(LocalInput("ramified", 1, 0), mu_chi_trivial=False) == 1
    with pytest.raises(UnsupportedConfiguration):
        tunnell_saito(LocalInput("ramified", 2, 0))


def test_ep_factor_for_11a_at_three():
    e = ep_factor(-1, 3)
    assert e.c0 == sympy.Rational(3, 4) and e.c1 == 0
    assert e.alpha_residue == 2


def _ep_direct(a_p, p, chi=1):
    alpha = (a_p + cmath.sqrt(a_p * a_p - 4 * p)) / 2
    beta = p / alpha
    l_ad_inv = (1 - alpha / (beta * p)) * (1 - 1 / p) * (1 - beta / (alpha * p))
    return (1 / (1 - p**-2)) * l_ad_inv / ((1 - chi / alpha) * (1 - 1 / (beta * chi)))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13, 17]), st.integers(-8, 8), st.sampled_from([1, -1]))
def test_ep_factor_matches_direct_evaluation(p, a_p, chi):
    assume(a_p * a_p < 4 * p and a_p % p)
    e = ep_factor(a_p, p, chi)
    assert abs(e.complex_value() - _ep_direct(a_p, p, chi)) < 1e-12 * max(1, abs(e.complex_value()))


def test_ep_factor_rejects_supersingular():
    with pytest.raises(DomainError):
        ep_factor(0, 5)
