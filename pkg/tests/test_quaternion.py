from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_periods.errors import ConditionViolation, DomainError, UnsupportedConfiguration
from toric_periods.lattice import Lattice
from toric_periods.quaternion import QuaternionAlgebra, algebra_from_ramification, hilbert_symbol, maximal_order
from toric_periods.quaternion.embedding import admissible_order, embeddings_in, kv_type, reembed
from toric_periods.quaternion.local import (
    compare_with_brute_force,
    eichler_symbol,
    local_conjugacy_classes,
)

PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23]


def test_hilbert_symbol_values():
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, -1) == -1
    assert hilbert_symbol(-1, -1, 3) == 1
    assert hilbert_symbol(-1, -3, 3) == -1
    assert hilbert_symbol(2, 3, 5) == 1
    with pytest.raises(DomainError):
        hilbert_symbol(0, 1, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(-60, 60).filter(bool), st.integers(-60, 60).filter(bool))
def test_hilbert_reciprocity(a, b):
    places = [-1] + [p for p in range(2, 62) if all(p % q for q in range(2, p))]
    prod = 1
    for p in places:
        prod *= hilbert_symbol(a, b, p)
    assert prod == 1


@pytest.mark.parametrize("ram", [[2], [3], [5], [7], [11], [13], [2, 3, 5], [3, 5, 7]])
def test_algebra_from_ramification(ram):
    alg = algebra_from_ramification(ram)
    assert alg.definite
    assert list(alg.ramified_primes) == ram


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=4, max_size=4), st.lists(st.integers(-9, 9), min_size=4, max_size=4))
def test_norm_is_multiplicative(x, y):
    alg = QuaternionAlgebra(-1, -11)
    x = tuple(Fraction(t) for t in x)
    y = tuple(Fraction(t) for t in y)
    assert alg.nrd(alg.mul(x, y)) == alg.nrd(x) * alg.nrd(y)
    assert alg.mul(x, alg.conj(x)) == (alg.nrd(x), 0, 0, 0)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 17, 23])
def test_maximal_order_discriminant(p):
    order = maximal_order(algebra_from_ramification([p]))
    assert order.reduced_discriminant == p
    order.check()


def test_maximal_order_units_at_two():
    # Hurwitz order: 24 units
    order = maximal_order(algebra_from_ramification([2]))
    assert len(order.units()) == 24


def test_maximal_order_rejects_indefinite():
    with pytest.raises(DomainError):
        maximal_order(QuaternionAlgebra(1, 1))


def test_lattice_hnf_is_canonical():
    a = Lattice.from_generators([(2, 2), (0, 3), (1, 1)])
    b = Lattice.from_generators([(1, 1), (1, -2)])
    assert a == b
    assert a.covolume() == 3
    half = Lattice.from_generators([(Fraction(1, 2), 0), (0, 1)])
    assert half.contains((Fraction(1, 2), 5)) and not half.contains((Fraction(1, 3), 0))


@pytest.mark.parametrize(
    "level,d,c,ram",
    [(11, -4, 1, (11,)), (11, -4, 3, (11,)), (14, -4, 1, (7,)), (15, -3, 1, (5,)), (11, -11, 1, (11,)), (35, -3, 1, (5,))],
)
def test_admissible_order_properties(level, d, c, ram):
    alg = algebra_from_ramification(list(ram))
    order, emb = admissible_order(alg, level, d, c)
    assert order.reduced_discriminant == level
    assert emb.meets == c and emb.admissible
    xi = emb.image_generator
    assert xi[0] == 0 and alg.nrd(xi) == -d * c * c
    assert order.contains(emb.omega_image)
    for p in {q for q in range(2, level + 1) if level % q == 0 and all(q % r for r in range(2, q))}:
        assert order.certificate(p) is not None


def test_admissible_order_rejects_split_ramified():
    alg = algebra_from_ramification([11])
    with pytest.raises(ConditionViolation):
        admissible_order(alg, 11, -7, 1)


def test_admissible_order_rejects_conductor_sharing_level():
    alg = algebra_from_ramification([11])
    with pytest.raises(UnsupportedConfiguration):
        admissible_order(alg, 11, -4, 11)


def test_embeddings_are_optimal_and_reembed():
    alg = algebra_from_ramification([11])
    order, emb = admissible_order(alg, 11, -4, 1)
    xis = embeddings_in(alg, order.lattice, -4)
    assert emb.image_generator in xis
    for xi in xis:
        other = reembed(emb, xi)
        assert other.admissible and other.meets == 1


def test_kv_types():
    assert kv_type(-4, 5) == "split"
    assert kv_type(-4, 3) == "inert"
    assert kv_type(-4, 2) == "ramified"
    assert kv_type(-3, 11) == "inert"


def test_eichler_symbol():
    assert eichler_symbol("eichler") == 1
    assert eichler_symbol("maximal-division") == -1
    with pytest.raises(DomainError):
        eichler_symbol("maximal-split")


LOCAL_CASES = [
    (m, k, kind, p)
    for p in (2, 3)
    for kind in ("split", "inert", "ramified")
    for k in range(0, 3)
    for m in range(0, 2 * k + 3)
    if not (p == 3 and m > 4)
]


@pytest.mark.parametrize("m,k,kind,p", LOCAL_CASES)
def test_local_classes_match_brute_force(m, k, kind, p):
    ok, msg = compare_with_brute_force(m, k, kind, p)
    assert ok, msg


def test_split_level_zero_excludes_minus_one():
    # t = 1 + tau * u with u = -1 mod p is not a unit of O_K when K splits
    reps = local_conjugacy_classes(0, 1, "split", prime=3)
    units = [c.description for c in reps if "tau" in c.description]
    assert all("* 2" not in d for d in units)
