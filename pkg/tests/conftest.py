from dataclasses import dataclass

import pytest

from toric_periods.brandt import ClassSet, EigenLine, class_set, eigenline
from toric_periods.quadratic import IdealClassGroup, QuadOrder, RingClassCharacter, class_group, find_character
from toric_periods.quaternion import algebra_from_ramification
from toric_periods.quaternion.embedding import EmbeddingData, admissible_order


@dataclass
class Setup:
    emb: EmbeddingData
    cs: ClassSet
    line: EigenLine
    group: IdealClassGroup
    chi: RingClassCharacter


_SETUPS: dict = {}


def build_setup(level: int, d: int, c: int, chi: str | int, ramified: tuple[int, ...]) -> Setup:
    key = (level, d, c, chi, ramified)
    if key not in _SETUPS:
        alg = algebra_from_ramification(list(ramified))
        order, emb = admissible_order(alg, level, d, c)
        cs = class_set(order)
        group = class_group(QuadOrder(d, c))
        _SETUPS[key] = Setup(emb, cs, eigenline(cs), group, find_character(group, chi))
    return _SETUPS[key]


@pytest.fixture(scope="session")
def level11_gaussian() -> Setup:
    return build_setup(11, -4, 1, "trivial", (11,))


@pytest.fixture(scope="session")
def level11_genus() -> Setup:
    return build_setup(11, -4, 3, 1, (11,))


@pytest.fixture(scope="session")
def level11_classset():
    from toric_periods.quaternion import maximal_order

    return class_set(maximal_order(algebra_from_ramification([11])))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
