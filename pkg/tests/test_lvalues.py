import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_periods.quadratic import kronecker
from toric_periods.errors import PrecisionShortfall, UnsupportedConfiguration
from toric_periods.lvalues import (
    adjoint_coefficients,
    adjoint_lvalue,
    classical_adjoint_value,
    coefficients_needed,
    elliptic_lvalue,
    eta_11a_coefficients,
    eta_product,
    fricke_sign,
    petersson_norm,
    ramanujan_tau,
    rankin_lvalue,
    tail_bound,
    term_budget,
    twist_conductor,
    twisted_lvalue,
)

# published values
L_11A = "0.25384186085591068433775892335"
DELTA_NORM = "1.035362056804320922347816812225e-6"


def test_eta_product_oracles():
    assert eta_11a_coefficients(12)[1:] == [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2]
    assert ramanujan_tau(10)[1:] == [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]
    assert eta_product({1: 24}, 3) == [1, -24, 252, -1472]


def test_l_value_of_11a():
    val = elliptic_lvalue(eta_11a_coefficients(200), 11, digits=25)
    assert val.root_number == 1
    with mpmath.workdps(30):
        assert abs(val.value - mpmath.mpf(L_11A)) < 1e-24
    assert val.error < 1e-25


def test_l_value_needs_enough_coefficients():
    with pytest.raises(PrecisionShortfall):
        elliptic_lvalue(eta_11a_coefficients(5), 11, digits=25)


def test_fricke_signs():
    a = eta_11a_coefficients(300)
    assert fricke_sign(a, 11) == 1
    # twist by -7 has conductor 539 and odd rank
    q = twist_conductor(11, -7)
    assert q == 539
    tw = [a[n] * kronecker(-7, n) if n else 0 for n in range(len(a))]
    assert fricke_sign(tw, q) == -1


def test_twist_conductor():
    assert twist_conductor(11, -4) == 176
    assert twist_conductor(11, -11) == 121
    assert twist_conductor(14, -4) == 14 * 16 // 2
    with pytest.raises(UnsupportedConfiguration):
        twist_conductor(44, -4)


@pytest.mark.parametrize("d", [-3, -4, -8])
def test_twisted_value_is_stable_in_precision(d):
    a = eta_11a_coefficients(coefficients_needed(11, [d], 30))
    lo = twisted_lvalue(a, 11, d, digits=15)
    hi = twisted_lvalue(a, 11, d, digits=30)
    assert abs(lo.value - hi.value) < 1e-14
    assert hi.error < 1e-29


def test_rankin_value_factorizes():
    a = eta_11a_coefficients(coefficients_needed(11, [-3, 12, -4], 20))
    rv = rankin_lvalue(a, 11, (-3, 12), digits=20)
    assert rv.route == "factorized"
    prod = twisted_lvalue(a, 11, -3, 20).value * twisted_lvalue(a, 11, 12, 20).value
    assert abs(rv.value / prod - 1) < 1e-15
    with pytest.raises(UnsupportedConfiguration):
        rankin_lvalue(a, 11, (1, -4), degree4=True)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 2000), st.integers(10, 400))
def test_tail_bound_decreases_with_terms(q, t):
    assert tail_bound(q, t + 1) < tail_bound(q, t)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5000), st.integers(5, 60))
def test_term_budget_meets_tail_target(q, digits):
    t = term_budget(q, digits)
    assert tail_bound(q, t) < mpmath.mpf(10) ** (-digits)


def test_adjoint_coefficients_at_good_prime():
    a = eta_11a_coefficients(30)
    lam = adjoint_coefficients(a, 11, 2, 30)
    # p = 2: lambda = a_2 / sqrt 2 and the p^-s coefficient is lambda^2 - 1
    assert abs(lam[2] - (mpmath.mpf(a[2]) ** 2 / 2 - 1)) < 1e-14
    assert abs(lam[11] - mpmath.mpf(1) / 11) < 1e-14


def test_level_one_petersson_norm_matches_classical_value():
    tau = ramanujan_tau(200)
    with mpmath.workdps(30):
        ref = mpmath.mpf(DELTA_NORM)
        norm = petersson_norm(tau, 1, weight=12, digits=16)
        assert abs(norm.value / ref - 1) < 1e-12
        adj = adjoint_lvalue(tau, 1, weight=12, digits=16)
        assert abs(adj.value / classical_adjoint_value(ref, 12) - 1) < 1e-12


def test_adjoint_value_stable_in_terms():
    a = eta_11a_coefficients(400)
    v1 = adjoint_lvalue(a, 11, digits=15)
    v2 = adjoint_lvalue(a, 11, digits=15, terms=v1.terms + 50)
    assert abs(v1.value - v2.value) < 1e-14
    assert v1.value > 0


def test_adjoint_requires_squarefree_level():
    with pytest.raises(UnsupportedConfiguration):
        adjoint_lvalue([0, 1] + [0] * 100, 27)
