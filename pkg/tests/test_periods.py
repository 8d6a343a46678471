from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_periods.cyclotomic import CyclotomicValue
from toric_periods.errors import DomainError
from toric_periods.periods import (
    analyze_signs,
    form_ideal,
    genus_configurations,
    invariance_ratios,
    mu_count,
    order_unit_index,
    parseval_check,
    period_pairing,
    period_vector,
    pic_to_classset,
    period_formula_rhs,
)
from toric_periods.quadratic import QuadOrder, characters, class_group, find_character

from .conftest import build_setup

SIGN_CASES = [
    # level, d, c, case, S (finite part), pending
    (11, -4, 1, "waldspurger", (11,), ()),
    (11, -7, 1, "heegner", (), ()),
    (33, -4, 1, "heegner", (3, 11), ()),
    (35, -3, 1, "waldspurger", (5,), ()),
    (14, -4, 1, "pending", (7,), (2,)),
    (11, -11, 1, "pending", (), (11,)),
]


@pytest.mark.parametrize("level,d,c,case,s_finite,pending", SIGN_CASES)
def test_sign_analysis(level, d, c, case, s_finite, pending):
    sa = analyze_signs(level, d, c)
    assert sa.case == case
    assert sa.s_finite == s_finite
    assert sa.pending == pending
    assert sa.global_sign == (1 if len(sa.s_set) % 2 == 0 else -1) or sa.case == "pending"


def test_pending_primes_resolve_with_eigenvalues():
    # 11a has a_11 = 1
    sa = analyze_signs(11, -11, 1, a_p={11: 1})
    assert sa.case == "waldspurger" and sa.s_finite == (11,)
    assert sa.s_set == ("11", "inf")


def test_sign_analysis_rejects_bad_input():
    with pytest.raises(DomainError):
        analyze_signs(11, -12, 1)
    with pytest.raises(DomainError):
        analyze_signs(11, -4, 3)  # nontrivial conductor needs a character
    group = class_group(QuadOrder(-4, 3))
    with pytest.raises(DomainError):
        analyze_signs(11, -4, 3, find_character(group, "trivial"))


def test_mu_count():
    assert mu_count(11, -4) == 0
    assert mu_count(14, -4) == 1
    assert mu_count(15, -15) == 2


def test_unit_index():
    assert order_unit_index(-4, 1) == 2
    assert order_unit_index(-3, 1) == 3
    assert order_unit_index(-4, 3) == 1


def test_principal_ideal_maps_to_order(level11_gaussian):
    s = level11_gaussian
    mapping = pic_to_classset(s.emb, s.cs, s.group)
    assert len(mapping) == len(s.group)
    ideal = form_ideal(s.emb, s.group.elements[s.group.identity])
    assert s.cs.classify(ideal, Fraction(1)) == s.cs.classify(s.cs.order.lattice, Fraction(1))


def test_period_vector_total_is_character_sum(level11_genus):
    s = level11_genus
    mapping = pic_to_classset(s.emb, s.cs, s.group)
    for chi in characters(s.group):
        pv = period_vector(mapping, len(s.cs), chi)
        expected = sum(1 for _ in mapping) if chi.is_trivial else 0
        assert pv.total() == CyclotomicValue.rational(expected, chi.cyclotomic_order)


def test_period_ratios_level11(level11_gaussian, level11_genus):
    g = level11_gaussian
    pair = period_pairing(pic_to_classset(g.emb, g.cs, g.group), g.cs, g.line, g.chi)
    assert pair.exact and pair.ratio == Fraction(4, 5)
    n = level11_genus
    pair = period_pairing(pic_to_classset(n.emb, n.cs, n.group), n.cs, n.line, n.chi)
    assert pair.ratio == Fraction(5)
    assert pair.projection_height.rational_value() == 5


@pytest.mark.parametrize("key", [(11, -4, 3, 1, (11,)), (11, -4, 1, "trivial", (11,)), (35, -3, 1, "trivial", (5,))])
def test_parseval(key):
    s = build_setup(*key)
    mapping = pic_to_classset(s.emb, s.cs, s.group)
    total, direct = parseval_check(mapping, s.cs, s.line, s.group)
    assert total == direct


@pytest.mark.parametrize(
    "key,expected",
    [((11, -4, 1, "trivial", (11,)), Fraction(4, 5)), ((11, -4, 3, 1, (11,)), Fraction(5)), ((14, -4, 1, "trivial", (7,)), Fraction(4, 3))],
)
def test_invariance_under_embedding_choice(key, expected):
    s = build_setup(*key)
    ratios = invariance_ratios(s.emb, s.cs, s.line, s.chi, conjugations=2, seed=1)
    assert ratios and all(r == expected for r in ratios)


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=Fraction(1, 100), max_value=100), st.floats(0.01, 10.0))
def test_rhs_is_linear_in_ratio_and_norm(ratio, norm):
    sa = analyze_signs(11, -4, 1)
    one = period_formula_rhs(sa, Fraction(1), mpmath.mpf(1), 2)
    val = period_formula_rhs(sa, ratio, mpmath.mpf(norm), 2)
    assert abs(val - one * float(ratio) * norm) <= 1e-12 * abs(val)


def test_rhs_prefactor_value():
    sa = analyze_signs(11, -4, 1)
    with mpmath.workdps(30):
        got = period_formula_rhs(sa, Fraction(1), mpmath.mpf(1), 2)
        assert abs(got - 8 * mpmath.pi**2 / (4 * 2)) < 1e-25


def test_genus_configuration_search():
    configs = genus_configurations([11])
    assert len(configs) == 17
    keys = {(c.level, c.discriminant, c.conductor) for c in configs}
    assert (11, -4, 3) in keys
    assert all(c.ramification == (11,) for c in configs)
