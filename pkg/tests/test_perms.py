import pytest

from ultrahom.errors import GraphError
from ultrahom.perms import (IndexPerm, all_perms, closure, generates_symmetric,
                            word_to)


def test_construction_and_parse():
    p = IndexPerm.from_cycles(4, [(1, 2), (3, 4)])
    assert p(1) == 2 and p(3) == 4
    assert IndexPerm.parse(4, "(1 2)(3 4)") == p
    assert IndexPerm.parse(3, "id").is_identity()
    assert p.cycle_notation() == "(1 2)(3 4)"
    with pytest.raises(GraphError):
        IndexPerm((1, 1, 3))


def test_algebra():
    a = IndexPerm.from_cycles(3, [(1, 2, 3)])
    b = IndexPerm.from_cycles(3, [(1, 2)])
    assert (a * a * a).is_identity()
    assert (a * a.inverse()).is_identity()
    assert a.order() == 3 and b.order() == 2 and (a * b).order() == 2
    assert a.power(-1) == a.inverse()
    assert a.support() == {1, 2, 3}
    assert a.orbit(1) == [1, 2, 3]
    # right action: (1)(ab) = ((1)a)b = (2)b = 1
    assert (a * b)(1) == 1


def test_closure_sizes():
    a = IndexPerm.from_cycles(3, [(1, 2, 3)])
    assert len(closure(3, [a])) == 3
    b = IndexPerm.from_cycles(3, [(1, 2)])
    assert len(closure(3, [a, b])) == 6
    assert generates_symmetric(3, [a, b])
    assert not generates_symmetric(4, [IndexPerm.from_cycles(4, [(1, 2), (3, 4)]),
                                       IndexPerm.from_cycles(4, [(1, 3), (2, 4)])])


def test_all_perms_count():
    assert len(list(all_perms(4))) == 24


def test_word_to_reaches_target():
    a = IndexPerm.from_cycles(4, [(1, 2, 3, 4)])
    b = IndexPerm.from_cycles(4, [(1, 2)])
    for target in all_perms(4):
        steps = word_to(4, a, b, target)
        acc = IndexPerm.identity(4)
        for letter, sign in steps:
            gen = a if letter == "a" else (b if sign > 0 else b.inverse())
            acc = acc * gen
        assert acc == target
        assert all(not (letter == "a" and sign < 0) for letter, sign in steps)


def test_word_to_unreachable():
    a = IndexPerm.from_cycles(3, [(1, 2, 3)])
    with pytest.raises(GraphError):
        word_to(3, a, a, IndexPerm.from_cycles(3, [(1, 2)]))
