from fractions import Fraction
from math import isqrt

import pytest
from sympy.functions.combinatorial.numbers import kronecker_symbol

from hmfkernel.basefield import RationalField, RealQuadraticField
from hmfkernel.cmext import (INERT, RAMIFIED, SPLIT, CMExtension, EHeckeCharacter, ScenarioError, class_number,
                             list_ideals_of_norm, local_eps, r_count, splitting_type)


@pytest.fixture(scope="module")
def Q():
    return RationalField(5000)


def form_reps(a, b, c, n):
    """Number of (x, y) with a x^2 + b x y + c y^2 = n, by direct search."""
    disc = b * b - 4 * a * c
    ymax = isqrt(4 * a * n // -disc) + 1
    count = 0
    for y in range(-ymax, ymax + 1):
        # a x^2 + b y x + (c y^2 - n) = 0
        d = b * b * y * y - 4 * a * (c * y * y - n)
        if d < 0:
            continue
        s = isqrt(d)
        if s * s != d:
            continue
        for x in {(-b * y + s), (-b * y - s)}:
            if x % (2 * a) == 0:
                count += 1
    return count


def test_splitting_over_q(Q):
    E = CMExtension(Q, -7)
    kinds = [splitting_type(E, Q.prime(str(l)))[0] for l in (2, 3, 5, 7, 11, 13)]
    assert kinds == [SPLIT, INERT, INERT, RAMIFIED, SPLIT, INERT]
    for P in Q.enumerate_primes(200):
        assert E.eps(P) == int(kronecker_symbol(-7, P.p))


def test_even_discriminant_is_rejected(Q):
    with pytest.raises(ScenarioError):
        CMExtension(Q, -1)


@pytest.mark.parametrize("disc,h", [(-3, 1), (-4, 1), (-23, 3), (-47, 5), (-71, 7), (-84, 4), (-163, 1), (-199, 9)])
def test_class_numbers(disc, h):
    assert class_number(disc) == h


def test_non_cyclic_class_group(Q):
    from hmfkernel.cmext import ClassGroupE
    G = ClassGroupE(-84)
    assert sorted(G.gen_orders) == [2, 2]
    assert not G.is_cyclic()


def test_r_count_against_element_search(Q):
    # class number one: ideals of norm n correspond to elements of norm n up to the two units
    E = CMExtension(Q, -7)
    for n in range(1, 400):
        assert r_count(E, Q.int_ideal(n)) == form_reps(1, 1, 2, n) // 2, n


def test_principal_class_against_element_search(Q):
    # h = 3: the ideals of norm n in the principal class come from elements of x^2 + xy + 6y^2
    E = CMExtension(Q, -23)
    G = E.class_group
    for n in range(1, 300):
        Js = list_ideals_of_norm(E, Q.int_ideal(n))
        assert len(Js) == r_count(E, Q.int_ideal(n))
        principal = sum(1 for J in Js if J.class_label == G.identity)
        assert principal == form_reps(1, 1, 6, n) // 2, n


def test_cubic_character_theta_value(Q):
    E = CMExtension(Q, -23)
    chi = EHeckeCharacter(E, (1,))
    total = sum(chi(J) for J in list_ideals_of_norm(E, Q.int_ideal(2)))
    assert total == -1


def test_local_eps_unit_only(Q):
    E = CMExtension(Q, -7)
    v = Q.prime("7")
    assert local_eps(E, v, Fraction(3)) == -1
    assert local_eps(E, v, Fraction(2)) == 1
    with pytest.raises(Exception):
        local_eps(E, v, Fraction(7))
    assert E.hilbert_eps(v, Fraction(7)) == 1
    assert E.hilbert_eps(v, Fraction(-1)) == -1


def hilbert_q(x: Fraction, y: int, p: int) -> int:
    """Hilbert symbol (x, y)_p over Q for odd p, from the textbook formula."""
    def split(z):
        z = Fraction(z)
        k = 0
        num, den = z.numerator, z.denominator
        while num % p == 0:
            num //= p
            k += 1
        while den % p == 0:
            den //= p
            k -= 1
        return k, num * den
    a, u = split(x)
    b, w = split(y)
    s = (-1) ** (a * b * ((p - 1) // 2))
    s *= int(kronecker_symbol(u, p)) ** b * int(kronecker_symbol(w, p)) ** a
    return s


def test_hilbert_symbol_against_formula(Q):
    E = CMExtension(Q, -7)
    v = Q.prime("7")
    for num in range(-60, 61):
        for den in (1, 3, 7, 49, 11):
            if num == 0:
                continue
            x = Fraction(num, den)
            assert E.hilbert_eps(v, x) == hilbert_q(x, -7, 7)


def test_real_quadratic_splitting_and_product_formula():
    K = RealQuadraticField(5, prime_bound=600)
    E = CMExtension(K, -7)
    assert K.ideal_label(E.D) == "49"
    assert E.splitting_type(K.prime("4")) == SPLIT
    assert E.splitting_type(K.prime("9")) == SPLIT
    # product formula: the local signs at D, at inert primes and at the two real places multiply to 1
    for u in range(-6, 7):
        for w in range(-6, 7):
            x = K.element(u, w)
            if not x:
                continue
            s = 1
            for P in E.ramified:
                s *= E.hilbert_eps(P, x)
            for i, e in K.ideal_of(x).exps:
                if E.splitting[i] == INERT and e % 2:
                    s = -s
            for sg in K.signs(x):
                s *= sg
            assert s == 1


def test_real_quadratic_delta_must_be_totally_negative():
    K = RealQuadraticField(5, prime_bound=200)
    with pytest.raises(ScenarioError):
        CMExtension(K, 7)


def test_validity_lists_problems(Q):
    E = CMExtension(Q, -7)
    probs = E.validity(Q.int_ideal(3), 4)
    assert any("not odd" in p for p in probs)
    assert any("of N does not split" in p for p in probs)
    assert E.validity(Q.int_ideal(11), 23) == []
