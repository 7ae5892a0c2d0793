import random
from fractions import Fraction

import pytest

from hmfkernel.basefield import RationalField, RealQuadraticField
from hmfkernel.coeffs import FormalLog, PAdic, TagMismatch, to_padic
from hmfkernel.qexp import (QExpansion, QExpansionError, TruncationError, deserialize, qexp_add, qexp_mul,
                            serialize)


@pytest.fixture(scope="module")
def Q():
    return RationalField(2000)


@pytest.fixture(scope="module")
def K():
    return RealQuadraticField(5, prime_bound=400)


def rand_exp(F, bound, seed, a0=True):
    rng = random.Random(seed)
    return QExpansion.from_function(F, bound, lambda I: Fraction(rng.randint(-5, 5)),
                                    Fraction(rng.randint(-3, 3)) if a0 else None)


def test_product_over_q_is_convolution(Q):
    f, g = rand_exp(Q, 60, 1), rand_exp(Q, 60, 2)
    h = qexp_mul(f, g)
    a = [f.a0] + [f[Q.int_ideal(n)] for n in range(1, 61)]
    b = [g.a0] + [g[Q.int_ideal(n)] for n in range(1, 61)]
    for n in range(1, 61):
        assert h[Q.int_ideal(n)] == sum(a[i] * b[n - i] for i in range(n + 1))
    assert h.a0 == f.a0 * g.a0
    assert h.weight == 4


def test_product_over_q5_is_commutative_and_associative(K):
    f, g, h = rand_exp(K, 40, 3), rand_exp(K, 40, 4), rand_exp(K, 40, 5)
    assert qexp_mul(f, g) == qexp_mul(g, f)
    assert qexp_mul(qexp_mul(f, g), h) == qexp_mul(f, qexp_mul(g, h))
    one = QExpansion.unit(K, 40)
    assert qexp_mul(one, f) == f


def test_omitted_constant_term(Q):
    f = rand_exp(Q, 20, 6, a0=False)
    g = rand_exp(Q, 20, 7)
    with pytest.raises(QExpansionError):
        f.a0
    with pytest.raises(QExpansionError):
        qexp_mul(f, g)[Q.int_ideal(3)]
    assert not qexp_add(f, g).has_a0


def test_truncation(Q):
    f = rand_exp(Q, 20, 8)
    with pytest.raises(TruncationError):
        f[Q.int_ideal(21)]
    with pytest.raises(TruncationError):
        f.restrict(30)
    coeffs = {I: Fraction(1) for I in Q.ideals_up_to(21)}
    with pytest.raises(TruncationError):
        QExpansion(Q, 20, coeffs)


def test_formal_log_product_is_refused(Q):
    f = QExpansion.from_function(Q, 5, lambda I: FormalLog.basis("3"), None)
    with pytest.raises(TagMismatch):
        qexp_mul(f, f)


@pytest.mark.parametrize("kind", ["rational", "padic", "formallog", "omitted"])
def test_roundtrip(K, kind):
    f = rand_exp(K, 50, 9)
    if kind == "padic":
        f = f.map(lambda v: to_padic(v, 11, 3))
    elif kind == "formallog":
        f = QExpansion.from_function(K, 50, lambda I: FormalLog.basis("3", int(I.norm) % 4), None)
    elif kind == "omitted":
        f = rand_exp(K, 50, 9, a0=False)
    text = serialize(f)
    g = deserialize(text, K)
    assert g == f
    assert serialize(g) == text


def test_serialized_records(Q):
    f = QExpansion.from_function(Q, 3, lambda I: Fraction(int(I.norm), 2), Fraction(1, 3))
    lines = serialize(f).splitlines()
    assert lines[0] == "hmfkernel-qexp 1"
    assert lines[7] == "a0 1/3"
    assert lines[8:] == ["1 1 1/2", "2 2 1/1", "3 3 3/2"]


def test_malformed_files(Q, K):
    text = serialize(rand_exp(Q, 5, 10))
    lines = text.splitlines()
    with pytest.raises(QExpansionError):
        deserialize("\n".join(lines + [lines[-1]]), Q)          # duplicate record
    with pytest.raises(TruncationError):
        deserialize("\n".join(lines + ["7 7 1/1"]), Q)           # beyond bound
    with pytest.raises(QExpansionError):
        deserialize("\n".join(lines[:-1]), Q)                   # missing record
    with pytest.raises(QExpansionError):
        deserialize(text.replace("hmfkernel-qexp 1", "hmfkernel-qexp 9"), Q)
    with pytest.raises(QExpansionError):
        deserialize(text.replace("\n4 2^2", "\n5 2^2"), Q)               # norm disagrees with label
    with pytest.raises(QExpansionError):
        deserialize(text, K)                                   # different field


def test_padic_precision_is_read_from_the_tag(Q):
    f = rand_exp(Q, 5, 11).map(lambda v: to_padic(v, 3, 4))
    g = deserialize(serialize(f), Q)
    assert isinstance(g[Q.int_ideal(1)], PAdic) and (g[Q.int_ideal(1)].p, g[Q.int_ideal(1)].M) == (3, 4)


def test_file_loads_under_a_larger_prime_table(Q):
    f = rand_exp(Q, 30, 12)
    big = RationalField(5000)
    g = deserialize(serialize(f), big)
    assert g.field is big
    assert [g[big.int_ideal(n)] for n in range(1, 31)] == [f[Q.int_ideal(n)] for n in range(1, 31)]
