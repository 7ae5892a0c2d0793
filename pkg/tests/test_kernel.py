from collections import Counter
from fractions import Fraction

import pytest
from sympy import divisors, factorint
from sympy.functions.combinatorial.numbers import kronecker_symbol

from hmfkernel.basefield import RationalField, RealQuadraticField
from hmfkernel.cmext import INERT, CMExtension, EHeckeCharacter, ScenarioError
from hmfkernel.kernel import (FULL, INTEGRAL, CycloLog, FiniteCharacter, KernelError, KernelScenario,
                              choose_split_prime, compare_kernels, derivative_local, geometric_local,
                              kernel_coeff, product_vs_kernel_check, qualifying_ideals)

BOUND = 700


@pytest.fixture(scope="module")
def sc():
    Q = RationalField(7 * BOUND + 100)
    E = CMExtension(Q, -7)
    return KernelScenario(E, Q.int_ideal(11), choose_split_prime(E, Q.int_ideal(11)), BOUND)


# -- an independent integer transcription of the formal-log kernel over Q, D = 7 --------------

def kr(m):
    return int(kronecker_symbol(-7, m))


def r(m):
    return sum(kr(d) for d in divisors(m))


def hilbert_7(x: Fraction) -> int:
    """(x, -7)_7 from the textbook formula for odd p."""
    num, den, k = x.numerator, x.denominator, 0
    while num % 7 == 0:
        num //= 7
        k += 1
    while den % 7 == 0:
        den //= 7
        k -= 1
    u = num * den
    # (7^k u, -7)_7 = (-1)^(k*3) * (u/7) * ((-1)/7)^k
    return (-1) ** (3 * k) * kr_legendre(u) * kr_legendre(-1) ** k


def kr_legendre(u):
    return int(kronecker_symbol(u, 7))


def brute_log_kernel(n, N=11, p=23, full=False):
    out = Counter()
    for d1 in (1, 7):
        den = d1 * n if full else n
        for a in range(1, den):
            alpha = Fraction(a, den)
            beta = 1 - alpha
            A, B = alpha * d1 * n, beta * d1 * n
            assert A.denominator == 1 and B.denominator == 1
            A, B = int(A), int(B)
            if A % p == 0 or B % N or r(A) == 0:
                continue
            sign = hilbert_7(-alpha * beta) if d1 == 7 else 1
            b7 = 7 ** factorint(B).get(7, 0) if d1 == 7 else 1
            for K in divisors(B // N):
                if K % p == 0 or K % 7 == 0:
                    continue
                c = r(A) * kr(K) * sign
                for q, e in factorint(A).items():
                    out[q] += c * e
                for q, e in factorint(d1).items():
                    out[q] -= c * e
                for q, e in factorint(b7).items():
                    out[q] -= 2 * c * e
                for q, e in factorint(K).items():
                    out[q] -= 2 * c * e
    return {str(q): Fraction(v) for q, v in out.items() if v}


def test_default_split_prime(sc):
    assert sc.p == 23
    assert sc.sign_hypothesis


def test_sign_hypothesis_fails_for_split_level_over_q5():
    K = RealQuadraticField(5, prime_bound=49 * 20)
    sc5 = KernelScenario(CMExtension(K, -7), K.parse_ideal("11a"), 3, 20)
    assert not sc5.sign_hypothesis
    assert sc5.validity_report()["problems"] == []


@pytest.mark.parametrize("n", [23, 46, 69, 115, 161, 253, 299, 345, 529, 644])
def test_integral_lattice_matches_brute_force(sc, n):
    F = sc.F
    assert derivative_local(sc, F.int_ideal(n)) == brute_log_kernel(n)


@pytest.mark.parametrize("n", [23, 69, 161])
def test_full_lattice_matches_brute_force(sc, n):
    F = sc.F
    got = kernel_coeff(sc, CycloLog(), F.int_ideal(n), lattice=FULL).terms
    assert {k: v for k, v in got.items() if v} == brute_log_kernel(n, full=True)


def test_goldens(sc):
    F = sc.F
    assert derivative_local(sc, F.int_ideal(23)) == {"7": 4}
    assert derivative_local(sc, F.int_ideal(69)) == {"3": 12, "5": 8, "7": 14}
    assert geometric_local(sc, F.int_ideal(138)) == {"3": 32, "5": 24, "7": 44}


def test_analytic_equals_geometric_with_split_primes_vanishing(sc):
    reps = compare_kernels(sc, qualifying_ideals(sc, 700))
    assert len(reps) == 30
    assert all(r.equal and r.split_vanishing for r in reps)
    kinds = {kind for r in reps for _, kind, _, _ in r.rows}
    assert kinds <= {INERT, "ramified"}


def test_full_lattice_disagrees_with_geometric(sc):
    # the lattice (D1 I)^{-1} carries extra alpha for D1 = 7 and never reproduces the closed forms
    F = sc.F
    for n in (23, 46, 69, 115):
        I = F.int_ideal(n)
        assert derivative_local(sc, I, lattice=FULL) != geometric_local(sc, I)


def test_worker_count_does_not_change_results(sc):
    ideals = qualifying_ideals(sc, 300)
    a = compare_kernels(sc, ideals, workers=1)
    b = compare_kernels(sc, ideals, workers=2)
    assert a == b


def test_log_functional_needs_p_dividing_I(sc):
    F = sc.F
    with pytest.raises(KernelError):
        derivative_local(sc, F.int_ideal(22))
    with pytest.raises(KernelError):
        geometric_local(sc, F.int_ideal(22))
    with pytest.raises(KernelError):
        kernel_coeff(sc, CycloLog(), F.int_ideal(23 * 31))
    with pytest.raises(KernelError):
        kernel_coeff(sc, CycloLog(), F.int_ideal(23), lattice="other")


def test_kernel_is_additive_over_d1(sc):
    F = sc.F
    I = F.int_ideal(3 * 23)
    whole = kernel_coeff(sc, CycloLog(), I, lattice=INTEGRAL)
    parts = [kernel_coeff(sc, CycloLog(), I, lattice=INTEGRAL, d1_only=D1) for D1 in sc.D.divisors()]
    assert parts[0] + parts[1] == whole


def test_product_check_for_a_cubic_character():
    Q = RationalField(23 * 60 + 100)
    E = CMExtension(Q, -23)
    sc3 = KernelScenario(E, Q.int_ideal(2), 3, 60, chi=EHeckeCharacter(E, (1,)))
    assert product_vs_kernel_check(sc3).equal
    # the cubic character takes values in Q(zeta_3) but its kernel coefficients are rational here
    v = kernel_coeff(sc3, FiniteCharacter(sc3.chi), Q.int_ideal(4), d1_only=Q.unit_ideal)
    assert isinstance(v, Fraction)


def test_invalid_scenarios():
    Q = RationalField(3000)
    E = CMExtension(Q, -7)
    with pytest.raises(ScenarioError):
        KernelScenario(E, Q.int_ideal(3), 23, 100)          # 3 is inert
    with pytest.raises(ScenarioError):
        KernelScenario(E, Q.int_ideal(11), 3, 100)           # p not split
    with pytest.raises(ScenarioError):
        KernelScenario(E, Q.int_ideal(11), 23, 1000)         # prime table too small for N(D)*B


def test_local_signs_on_surviving_terms_follow_the_degree():
    # for alpha with r(alpha I) != 0 and beta I N^{-1} integral, prod over w | D of (-alpha beta, delta)_w
    # is (-1)^[F:Q] times the parity of inert valuations; surviving terms have that parity even.
    cases = []
    Q = RationalField(6000)
    cases.append((Q, CMExtension(Q, -7), Q.int_ideal(11), [Q.int_ideal(n) for n in (23, 69, 253)], -1))
    K = RealQuadraticField(5, prime_bound=3000)
    cases.append((K, CMExtension(K, -7), K.parse_ideal("11a"), [K.parse_ideal(s) for s in ("5*9", "9^2")], 1))
    for F, E, N, ideals, want in cases:
        seen = 0
        for I in ideals:
            DI = E.D * I
            for pt in F.convex_lattice_points(I.inverse()):
                aI = F.ideal_times(pt.alpha, I)
                bI = F.ideal_times(pt.beta, I)
                if E.r_count(aI) == 0 or not N.divides(bI):
                    continue
                x = -(pt.alpha * pt.beta)
                inert_odd = sum(e for i, e in F.ideal_of(x).exps if E.splitting[i] == INERT) % 2
                if inert_odd:
                    continue
                s = 1
                for w in E.ramified:
                    s *= E.hilbert_eps(w, x)
                assert s == want
                seen += 1
        assert seen > 0
