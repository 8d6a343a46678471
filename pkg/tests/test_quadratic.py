from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_periods.cyclotomic import CyclotomicValue
from toric_periods.errors import DomainError
from toric_periods.quadratic import (
    BinaryForm,
    QuadOrder,
    characters,
    check_orthogonality,
    class_group,
    class_number,
    compose,
    dirichlet_l_one,
    find_character,
    genus_pair,
    is_fundamental_discriminant,
    kronecker,
    prime_form,
    principal_form,
    projection_map,
    reduced_forms,
    relative_class_number,
    theta_coefficients,
    unit_index,
)

FUNDAMENTAL = [d for d in range(-3, -200, -1) if is_fundamental_discriminant(d)]

# h(D c^2) from published class number tables
CLASS_NUMBERS = [
    (-3, 1, 1), (-4, 1, 1), (-7, 1, 1), (-15, 1, 2), (-20, 1, 2), (-23, 1, 3), (-47, 1, 5),
    (-71, 1, 7), (-84, 1, 4), (-163, 1, 1), (-3, 2, 1), (-3, 4, 2), (-4, 3, 2), (-3, 5, 2),
    (-4, 5, 2), (-7, 2, 1), (-4, 2, 1), (-3, 3, 1),
]


@pytest.mark.parametrize("d,c,h", CLASS_NUMBERS)
def test_class_numbers_match_tables(d, c, h):
    assert class_number(QuadOrder(d, c)) == h


def test_kronecker_small_values():
    assert [kronecker(-4, n) for n in range(1, 9)] == [1, 0, -1, 0, 1, 0, -1, 0]
    assert kronecker(-3, 2) == -1 and kronecker(-7, 2) == 1 and kronecker(-8, 3) == 1


def test_fundamental_discriminants():
    assert is_fundamental_discriminant(-4) and is_fundamental_discriminant(-8)
    assert not is_fundamental_discriminant(-16) and not is_fundamental_discriminant(-12 * 4)
    with pytest.raises(DomainError):
        QuadOrder(-12 * 4, 1)


def test_unit_index():
    assert unit_index(QuadOrder(-3, 1)) == 3
    assert unit_index(QuadOrder(-4, 1)) == 2
    assert unit_index(QuadOrder(-4, 2)) == 1
    assert unit_index(QuadOrder(-7, 1)) == 1


def test_reduced_forms_of_minus_23():
    assert sorted((f.a, f.b, f.c) for f in reduced_forms(-23)) == [(1, 1, 6), (2, -1, 3), (2, 1, 3)]


def test_class_group_structure_minus_84():
    group = class_group(QuadOrder(-84, 1))
    assert sorted(k for _, k in group.cyclic_decomposition) == [2, 2]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FUNDAMENTAL), st.integers(1, 4))
def test_group_axioms(d, c):
    group = class_group(QuadOrder(d, c))
    h = len(group)
    ident = group.identity
    for i in range(h):
        assert group.composition_table[i][ident] == i
        assert group.composition_table[i][group.inverse(i)] == ident
    for i in range(h):
        for j in range(h):
            assert group.composition_table[i][j] == group.composition_table[j][i]
            f = compose(group.elements[i], group.elements[j])
            assert group.index(f) == group.composition_table[i][j]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FUNDAMENTAL), st.integers(1, 5))
def test_character_orthogonality(d, c):
    check_orthogonality(class_group(QuadOrder(d, c)))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(FUNDAMENTAL), st.integers(1, 4))
def test_characters_are_homomorphisms(d, c):
    group = class_group(QuadOrder(d, c))
    for chi in characters(group):
        for i in range(len(group)):
            for j in range(len(group)):
                k = group.composition_table[i][j]
                assert chi.value(i) * chi.value(j) == chi.value(k)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(FUNDAMENTAL[:30]), st.sampled_from([2, 3, 4, 6]))
def test_projection_is_surjective_homomorphism(d, c):
    big = class_group(QuadOrder(d, c))
    small = class_group(QuadOrder(d, 1))
    image = projection_map(big, small)
    assert set(image) == set(range(len(small)))
    for i in range(len(big)):
        for j in range(len(big)):
            assert image[big.composition_table[i][j]] == small.composition_table[image[i]][image[j]]


def test_character_conductors():
    group = class_group(QuadOrder(-4, 3))
    conductors = sorted(chi.conductor for chi in characters(group))
    assert conductors == [1, 3]
    assert find_character(group, "trivial").is_trivial


def test_genus_pair_for_conductor_three():
    group = class_group(QuadOrder(-4, 3))
    chi = find_character(group, 1)
    assert chi.is_genus()
    assert genus_pair(chi) == (-3, 12)


def test_genus_pair_matches_theta_series():
    group = class_group(QuadOrder(-4, 3))
    chi = find_character(group, 1)
    d1, d2 = genus_pair(chi)
    theta = theta_coefficients(chi, 60)
    for n in range(1, 61):
        expected = sum(kronecker(d1, k) * kronecker(d2, n // k) for k in range(1, n + 1) if n % k == 0)
        assert theta[n - 1] == CyclotomicValue.rational(expected, chi.cyclotomic_order)


def test_prime_forms():
    assert prime_form(-4, 3) is None
    f = prime_form(-4, 5)
    assert f is not None and f.discriminant == -4 and f.a == 5
    assert principal_form(-23) == BinaryForm(1, 1, 6)


def test_dirichlet_l_one_values():
    with mpmath.workdps(30):
        assert abs(dirichlet_l_one(-4) - mpmath.pi / 4) < 1e-25
        assert abs(dirichlet_l_one(-3) - mpmath.pi / (3 * mpmath.sqrt(3))) < 1e-25


@pytest.mark.parametrize("d,c", [(-4, 1), (-3, 1), (-23, 1), (-4, 3), (-7, 5), (-15, 2)])
def test_relative_class_number_identity(d, c):
    data = relative_class_number(QuadOrder(d, c))
    assert data.identity_error < 1e-20


def test_form_reduction_is_idempotent():
    f = BinaryForm(6, 13, 8).reduced()
    assert f.is_reduced() and f.reduced() == f
    assert f.discriminant == 13 * 13 - 4 * 48


def test_cyclotomic_arithmetic():
    z = CyclotomicValue.root_of_unity(1, 3)
    one = CyclotomicValue.rational(1, 3)
    assert z * z * z == one
    assert (one + z + z * z).is_zero()
    assert z.conjugate() == z * z
    assert (z * Fraction(1, 2)).rational_value() is None
    assert abs(z.to_complex() - mpmath.expjpi(mpmath.mpf(2) / 3)) < 1e-14
