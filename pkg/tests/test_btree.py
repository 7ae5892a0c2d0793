import pytest

from hmfkernel.btree import (BTTree, TreeDepthError, TreeDivisor, distance, frobenius_translate, hecke_apply,
                             hecke_point, norm_relation_check, sphere)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_tree_is_regular_and_sphere_sizes(q):
    t = BTTree(q, 8)
    for x in [(0, ()), (2, (0,)), (-1, (0, q - 1))]:
        assert len(t.neighbours(x)) == q + 1
        for y in t.neighbours(x):
            assert x in t.neighbours(y)
        for k in range(1, 4):
            assert len(sphere(t, x, k)) == (q + 1) * q ** (k - 1)


def test_small_counts():
    assert len(sphere(BTTree(3, 6), (0, ()), 2)) == 12
    assert len(hecke_point(BTTree(2, 6), (0, ()), 2)) == 7


@pytest.mark.parametrize("q", [2, 3])
def test_distance_matches_breadth_first_search(q):
    t = BTTree(q, 8)
    for x in [(0, ()), (1, (0, 1)), (-2, (0,))]:
        for y, d in t.ball(x, 4).items():
            assert distance(x, y) == d == distance(y, x)


def test_depth_limit():
    t = BTTree(2, 3)
    with pytest.raises(TreeDepthError):
        t.ball((0, ()), 4)
    with pytest.raises(TreeDepthError):
        t.check((2, (0, 1)))
    with pytest.raises(ValueError):
        t.check((0, (1,)))                     # first off-line letter takes only q - 1 values
    with pytest.raises(TreeDepthError):
        norm_relation_check(t, 1)


def test_divisor_arithmetic():
    a = TreeDivisor.point((0, ()), 2) + TreeDivisor.point((1, ()))
    b = a - TreeDivisor.point((0, ()), 2)
    assert b == TreeDivisor.point((1, ()))
    assert a.degree() == 3 and len(a) == 2
    assert (a - a).items() == []


def test_translation_is_an_isometry_commuting_with_hecke():
    t = BTTree(3, 9)
    pts = [(0, ()), (1, (1,)), (-1, (0, 2))]
    for x in pts:
        for y in pts:
            tx = frobenius_translate(t, TreeDivisor.point(x), 2).support()[0]
            ty = frobenius_translate(t, TreeDivisor.point(y), 2).support()[0]
            assert distance(tx, ty) == distance(x, y)
    x = TreeDivisor.point((0, (1,)))
    for k in range(4):
        assert frobenius_translate(t, hecke_apply(t, k, x), 1) == hecke_apply(t, k, frobenius_translate(t, x, 1))


@pytest.mark.parametrize("q", [2, 3, 5])
def test_hecke_recursion_on_the_tree(q):
    t = BTTree(q, 9)
    x = TreeDivisor.point((0, ()))
    for k in range(2, 5):
        lhs = hecke_apply(t, k, x)
        rhs = hecke_apply(t, 1, hecke_apply(t, k - 1, x)) - hecke_apply(t, k - 2, x).scale(q)
        assert lhs == rhs
        assert lhs.degree() == sum(q ** j for j in range(k + 1))


@pytest.mark.parametrize("q,k", [(2, 0), (2, 3), (3, 1), (5, 2)])
def test_norm_relation(q, k):
    t = BTTree(q, k + 4)
    rep = norm_relation_check(t, k)
    assert rep.equal and rep.containments
    assert rep.size == (q - 1) * q ** (k + 1)
    assert all(m == 1 and n == 0 and len(w) == k + 2 for (n, w), m in rep.lhs.items())


def test_norm_relation_negative_control():
    t = BTTree(3, 8)
    assert not norm_relation_check(t, 1, offsets=(-2, 1)).equal
