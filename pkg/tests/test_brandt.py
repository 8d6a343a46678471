from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_periods.brandt import (
    atkin_lehner,
    bad_prime_eigenvalues,
    brandt_matrix,
    class_set,
    eigenline,
    extend_eigenvalues,
    hecke_an,
    height_pairing,
    mass,
    primes_up_to,
    s_operator,
)
from toric_periods.errors import DomainError
from toric_periods.lvalues import check_deligne, eta_11a_coefficients
from toric_periods.quaternion import algebra_from_ramification, maximal_order
from toric_periods.quaternion.embedding import admissible_order

from .conftest import build_setup

# class numbers of maximal orders ramified at p (Eichler's formula)
CLASS_NUMBERS = {2: 1, 3: 1, 5: 1, 7: 1, 11: 2, 13: 1, 17: 2, 19: 2, 23: 3, 29: 3, 31: 3, 37: 3}


@pytest.mark.parametrize("p", sorted(CLASS_NUMBERS))
def test_mass_and_class_number_of_maximal_orders(p):
    cs = class_set(maximal_order(algebra_from_ramification([p])))
    assert len(cs) == CLASS_NUMBERS[p]
    assert cs.mass_sum() == Fraction(p - 1, 24) == mass(cs.order)


@pytest.mark.parametrize("level,d,c,ram", [(11, -4, 3, (11,)), (14, -4, 1, (7,)), (15, -3, 1, (5,)), (35, -3, 1, (5,))])
def test_mass_of_admissible_orders(level, d, c, ram):
    order, _ = admissible_order(algebra_from_ramification(list(ram)), level, d, c)
    cs = class_set(order)
    assert cs.mass_sum() == mass(order)


def test_level11_brandt_matrix(level11_classset):
    bm = brandt_matrix(level11_classset, 2)
    assert bm.matrix == ((1, 3), (2, 0))
    assert bm.gross_matrix == tuple(zip(*bm.matrix))


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
def test_neighbour_counts_are_p_plus_one(level11_classset, p):
    bm = brandt_matrix(level11_classset, p)
    assert all(sum(row) == p + 1 for row in bm.gross_matrix)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.sampled_from([3, 5, 7, 11, 13]))
def test_hecke_operators_commute_level_35(p, q):
    cs = build_setup(35, -3, 1, "trivial", (5,)).cs
    if 35 % p == 0 or 35 % q == 0:
        return
    a = sympy.Matrix(brandt_matrix(cs, p).matrix)
    b = sympy.Matrix(brandt_matrix(cs, q).matrix)
    assert a * b == b * a


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_brandt_self_adjoint_for_height(p, level11_classset):
    cs = level11_classset
    m = brandt_matrix(cs, p).matrix
    w = cs.weights
    for i in range(len(cs)):
        for j in range(len(cs)):
            assert w[i] * m[i][j] == w[j] * m[j][i]


def test_eigenvalues_match_eta_product(level11_gaussian):
    setup = level11_gaussian
    coeffs = eta_11a_coefficients(60)
    evs = extend_eigenvalues(setup.cs, setup.line, 60)
    for p in primes_up_to(60):
        if p != 11:
            assert evs[p] == coeffs[p], p
    bad = bad_prime_eigenvalues(setup.cs, setup.line)
    assert bad[11] == coeffs[11] == 1


def test_hecke_an_recursion_matches_eta_product(level11_gaussian):
    setup = level11_gaussian
    evs = extend_eigenvalues(setup.cs, setup.line, 80)
    evs.update(bad_prime_eigenvalues(setup.cs, setup.line))
    an = hecke_an(evs, 80, 11)
    assert an[1:] == eta_11a_coefficients(80)[1:]
    check_deligne(an)


def test_eigenline_has_degree_zero(level11_gaussian):
    cs, line = level11_gaussian.cs, level11_gaussian.line
    assert sum(line.vector) == 0
    assert line.values == [w * v for w, v in zip(cs.weights, line.vector)]
    # orthogonal to the Eisenstein line for the height pairing
    inv_w = [Fraction(1, w) for w in cs.weights]
    assert height_pairing(cs, line.vector, inv_w) == 0


def test_s_operator_is_identity_for_trivial_character(level11_classset):
    s = s_operator(level11_classset, 3)
    assert s.matrix == ((1, 0), (0, 1))


def test_atkin_lehner_is_involution():
    cs = build_setup(14, -4, 1, "trivial", (7,)).cs
    for p in (2, 7):
        w = sympy.Matrix(atkin_lehner(cs, p).matrix)
        assert w * w == sympy.eye(len(cs))


def test_atkin_lehner_requires_exact_division():
    cs = build_setup(11, -4, 3, 1, (11,)).cs
    with pytest.raises(DomainError):
        atkin_lehner(cs, 3)


def test_level14_eigenvalues():
    # 14a: a_3 = -2, a_5 = 0, a_13 = -4; a_2 = -1, a_7 = 1
    setup = build_setup(14, -4, 1, "trivial", (7,))
    evs = extend_eigenvalues(setup.cs, setup.line, 13)
    evs.update(bad_prime_eigenvalues(setup.cs, setup.line))
    assert (evs[2], evs[3], evs[5], evs[7], evs[13]) == (-1, -2, 0, 1, -4)


def test_eigenline_lookup_by_eigenvalue(level11_classset):
    line = eigenline(level11_classset, eigenvalues={2: -2})
    assert line.exact and line.eigenvalues[2] == -2
    with pytest.raises(DomainError):
        eigenline(level11_classset, eigenvalues={2: 5})
