"""Named acceptance checks, shared by the `verify-all` command and the test suite.

Every check returns a CheckResult whose detail lines are deterministic, so
the files written from them can be compared byte for byte across runs.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from sympy.functions.combinatorial.numbers import kronecker_symbol

from .basefield import make_field
from .btree import BTTree, TreeDivisor, hecke_apply, norm_relation_check
from .characters import KroneckerCharacter, QuadraticCharacter, is_fundamental_discriminant
from .cmext import CMExtension, EHeckeCharacter
from .coeffs import PAdic, to_padic
from .kernel import KernelScenario, choose_split_prime, compare_kernels, product_vs_kernel_check, qualifying_ideals
from .operators import (OperatorContext, PStabilizationData, compare_expansions, e_ord_iterate,
                        eis_level_raise, gen_eigen, hecke_recursion_check, hecke_T, p_stabilize,
                        unit_root_hensel, v_op)
from .qexp import QExpansion
from .thetaeis import (COMPUTED, EisSpec, ThetaSpec, class_number_formula_value, eis_coeffs,
                       l_value_at_zero, theta_coeffs)


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    lines: list = field(default_factory=list)

    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def text(self) -> str:
        head = [f"check {self.key}", f"title {self.title}", f"status {self.status()}"]
        return "\n".join(head + self.lines) + "\n"


FULL = {
    "c1_bound_q": 300, "c1_bound_rq": 150, "c1_count": 20,
    "c2_bound_q": 300, "c2_bound_rq": 150, "c2_count": 20,
    "c3_bound": 500,
    "c4_bound": 500,
    "c5_min": -200,
    "c6_bound": 500,
    "c7_bound_q": 2000, "c7_bound_rq": 400,
    "c9_bound": 2187, "c9_rq_bound": 150,
    "c10_q": (2, 3, 5), "c10_kmax": 3,
}

QUICK = dict(FULL, c1_bound_q=100, c1_bound_rq=60, c1_count=4, c2_bound_q=100, c2_bound_rq=60, c2_count=4,
             c3_bound=100, c4_bound=100, c5_min=-60, c6_bound=100, c7_bound_q=300, c7_bound_rq=100,
             c9_bound=729, c9_rq_bound=60, c10_kmax=2)


def _q():
    return make_field("Q", None, 50000)


def _q5(prime_bound=20000):
    return make_field("Q(sqrt D)", 5, prime_bound)


def random_expansion(F, bound, rng: random.Random, density=0.15, level=None) -> QExpansion:
    def coeff(I):
        return Fraction(rng.randint(-9, 9)) if rng.random() < density else Fraction(0)
    return QExpansion.from_function(F, bound, coeff, Fraction(rng.randint(-3, 3)), weight=2, level=level)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, PAdic):
        return f"{x.residue} mod {x.p}^{x.M}"
    return str(x)


# -- 1, 2: Hecke algebra identities ----------------------------------------------------

def _hecke_fields(prm):
    Q = _q()
    R = _q5()
    return [
        (Q, prm["c1_bound_q"], [Q.prime(str(l)) for l in (2, 3, 5, 7)]),
        (R, prm["c1_bound_rq"], [R.prime(l) for l in ("4", "5", "11a")]),
    ]


def check_hecke_recursion(prm, workers=1) -> CheckResult:
    lines, ok = [], True
    rng = random.Random(1)
    for F, bound, primes in _hecke_fields(prm):
        for P in primes:
            for j in range(prm["c1_count"]):
                level = F.unit_ideal if j % 2 == 0 else F.prime_ideal(P)
                f = random_expansion(F, bound, rng, level=level)
                ctx = OperatorContext.trivial(F, level)
                for m in (2, 3):
                    rep = hecke_recursion_check(ctx, P, m, f)
                    ok &= rep.equal
                    if not rep.equal:
                        lines.append(f"mismatch {F.name()} {P.label} m={m} sample={j}: {rep.mismatches[:3]}")
            lines.append(f"{F.name()} P={P.label} samples={prm['c1_count']} m=2,3 bound={bound} ok")
    return CheckResult("C1", "Hecke recursion", ok, lines)


def check_hecke_algebra(prm, workers=1) -> CheckResult:
    lines, ok = [], True
    rng = random.Random(2)
    Q, R = _q(), _q5()
    pairs = [
        (Q, prm["c2_bound_q"], [("2", "3"), ("2^2", "5"), ("3", "7"), ("2*3", "5")]),
        (R, prm["c2_bound_rq"], [("4", "5"), ("4", "11a"), ("5", "11a"), ("11a", "11b")]),
    ]
    for F, bound, ps in _hecke_fields(prm):
        for P in ps:
            Pi = F.prime_ideal(P)
            ctx = OperatorContext.trivial(F, Pi)
            good = True
            for _ in range(prm["c2_count"]):
                f = random_expansion(F, bound, rng)
                g = hecke_T(ctx, Pi, v_op(Pi, f))
                rep = compare_expansions(g, f.restrict(g.bound))
                good &= rep.equal
            ok &= good
            lines.append(f"{F.name()} T({P.label}) V({P.label}) = id bound={bound}: {'ok' if good else 'FAILED'}")
    for F, bound, ms in pairs:
        for a, b in ms:
            M, M2 = F.parse_ideal(a), F.parse_ideal(b)
            good = True
            for j in range(prm["c2_count"]):
                level = F.unit_ideal if j % 2 == 0 else M
                ctx = OperatorContext.trivial(F, level)
                f = random_expansion(F, bound, rng, level=level)
                lhs = hecke_T(ctx, M, hecke_T(ctx, M2, f))
                rhs = hecke_T(ctx, M * M2, f)
                good &= compare_expansions(lhs, rhs).equal
            ok &= good
            lines.append(f"{F.name()} T({a})T({b}) = T({a}*{b}) bound={bound}: {'ok' if good else 'FAILED'}")
    return CheckResult("C2", "T(P)V(P) = id and T(M)T(M') = T(MM')", ok, lines)


# -- 3, 4, 5: building blocks ---------------------------------------------------------

def check_theta_divisor_sum(prm, workers=1) -> CheckResult:
    F = _q()
    E = CMExtension(F, -7)
    b = prm["c3_bound"]
    th = theta_coeffs(ThetaSpec(E, EHeckeCharacter(E), b))
    bad = []
    for n in range(1, b + 1):
        want = sum(int(kronecker_symbol(-7, d)) for d in range(1, n + 1) if n % d == 0)
        if th[F.int_ideal(n)] != want:
            bad.append(n)
    lines = [f"n<={b} mismatches={len(bad)}", f"a(2)={th[F.int_ideal(2)]} a(8)={th[F.int_ideal(8)]} "
             f"a(11)={th[F.int_ideal(11)]} a(3)={th[F.int_ideal(3)]}"]
    if bad:
        lines.append(f"first bad n: {bad[:10]}")
    return CheckResult("C3", "theta series against the divisor sum of chi_-7", not bad, lines)


def check_eisenstein_levels(prm, workers=1) -> CheckResult:
    F = _q()
    E = CMExtension(F, -7)
    eps = QuadraticCharacter(E)
    b = prm["c4_bound"]
    base = eis_coeffs(EisSpec(eps, 1, F.int_ideal(7), b, COMPUTED))
    lines, ok = [f"primitive a0={base.a0}"], True
    for raise_by in ((3,), (2, 3)):
        f = base
        level = F.int_ideal(7)
        for ell in raise_by:
            level = level * F.int_ideal(ell)
            ctx = OperatorContext(F, level, 1, eps)
            f = eis_level_raise(ctx, F.prime(str(ell)), f)
        direct = eis_coeffs(EisSpec(eps, 1, level, f.bound, COMPUTED))
        rep = compare_expansions(f, direct)
        ok &= rep.equal
        lines.append(f"level {F.ideal_label(level)} bound={f.bound} a0={f.a0} equal={rep.equal}")
    return CheckResult("C4", "Eisenstein level raising against direct coefficients", ok, lines)


def check_class_number_formula(prm, workers=1) -> CheckResult:
    F = _q()
    lines, ok, count = [], True, 0
    for d in range(prm["c5_min"] + 1, 0):
        if not is_fundamental_discriminant(d):
            continue
        count += 1
        lv = l_value_at_zero(KroneckerCharacter(F, d))
        cn = class_number_formula_value(d)
        if lv != cn:
            ok = False
            lines.append(f"d={d}: L(0)={lv} 2h/w={cn}")
    lines.insert(0, f"fundamental discriminants in ({prm['c5_min']}, 0): {count}")
    return CheckResult("C5", "L(0, chi_d) = 2h/w", ok, lines)


# -- 6, 7: kernels --------------------------------------------------------------------

def scenario_q(bound: int) -> KernelScenario:
    F = _q()
    E = CMExtension(F, -7)
    N = F.int_ideal(11)
    return KernelScenario(E, N, choose_split_prime(E, N), bound)


def scenario_rq(bound: int) -> KernelScenario:
    F = _q5(max(2000, 49 * bound))
    E = CMExtension(F, -7)
    N = F.parse_ideal("11a")
    return KernelScenario(E, N, choose_split_prime(E, N), bound)


def check_product_vs_kernel(prm, workers=1) -> CheckResult:
    sc = scenario_q(prm["c6_bound"])
    rep = product_vs_kernel_check(sc)
    lines = [f"scenario Q(sqrt -7) N=11 p={sc.p} bound={rep.bound} mismatches={len(rep.mismatches)}"]
    for lab, x, k in rep.mismatches[:10]:
        lines.append(f"  {lab}: product={x} kernel={k}")
    return CheckResult("C6", "product Theta * V_N(E) against the D1=(1) kernel summand", rep.equal, lines)


def _kernel_lines(sc, reports):
    lines = []
    total = sum(1 for r in reports if r.equal)
    lines.append(f"ideals={len(reports)} equal={total} split_and_p_zero={sum(r.split_vanishing for r in reports)}")
    for r in reports:
        for lab, kind, a, g in r.rows:
            lines.append(f"{r.ideal}\t{lab}\t{kind}\t{a}\t{g}\t{'yes' if a == g else 'no'}")
    return lines


def check_kernels_q(prm, workers=1) -> CheckResult:
    sc = scenario_q(prm["c7_bound_q"])
    reps = compare_kernels(sc, qualifying_ideals(sc), workers=workers)
    ok = all(r.equal and r.split_vanishing for r in reps)
    lines = [f"scenario Q(sqrt -7) N=11 p={sc.p} I<={sc.bound} with p | I"] + _kernel_lines(sc, reps)
    return CheckResult("C7a", "analytic against geometric local coefficients over Q", ok, lines)


def check_kernels_rq(prm, workers=1) -> CheckResult:
    sc = scenario_rq(prm["c7_bound_rq"])
    reps = compare_kernels(sc, qualifying_ideals(sc), workers=workers)
    ok = all(r.equal and r.split_vanishing for r in reps)
    lines = [f"scenario Q(sqrt 5), delta=-7, D={sc.F.ideal_label(sc.D)}, N=11a, p={sc.p}, I<={sc.bound} with p | I",
             "expected to fail: with [F:Q] even and every prime of N split, eps(N) = (-1)^([F:Q]-1) cannot hold"]
    lines += _kernel_lines(sc, reps)
    return CheckResult("C7b", "analytic against geometric local coefficients over Q(sqrt 5)", ok, lines)


# -- 8, 9: p-adic -------------------------------------------------------------------

def check_hensel(prm, workers=1) -> CheckResult:
    a, normP, p, M = 1, 5, 5, 6
    al = unit_root_hensel(a, normP, p, M)
    be = to_padic(Fraction(a), p, M) - al
    checks = {
        "root": al * al - al * a + normP == 0,
        "alpha = 21 mod 25": al.residue % 25 == 21,
        "alpha + beta = a": al + be == a,
        "alpha * beta = normP": al * be == normP,
        "alpha unit": al.is_unit(),
    }
    lines = [f"alpha={al.residue} mod 5^6 beta={be.residue}"] + [f"{k}: {v}" for k, v in checks.items()]
    return CheckResult("C8", "Hensel unit root", all(checks.values()), lines)


def _eigen_input(F, bound, special: dict):
    ctx = OperatorContext.trivial(F, F.unit_ideal, 2)
    lam = {P.id: Fraction(1 + P.norm) for P in F.primes if P.norm <= bound}
    for lab, v in special.items():
        lam[F.prime(lab).id] = Fraction(v)
    return gen_eigen(ctx, lam, bound)


def check_stabilization(prm, workers=1) -> CheckResult:
    lines, ok = [], True
    # eigen-property, over Q (p = 3) and over Q(sqrt 5) (p = 11, two primes above p)
    cases = [(_q(), prm["c9_bound"], 3, {"3": 2}, 6), (_q5(), prm["c9_rq_bound"], 11, {"11a": 3, "11b": 5}, 3)]
    for F, bound, p, special, M in cases:
        f = _eigen_input(F, bound, special)
        data = PStabilizationData.build(F, p, {lab: f[F.prime_ideal(F.prime(lab))] for lab in special}, M)
        f0 = p_stabilize(f, data, "alpha")
        good = True
        for P in data.primes_above:
            Pi = F.prime_ideal(P)
            for L in F.ideals_up_to(bound // P.norm):
                if not (f0[L * Pi] == data.alpha[P.label] * f0[L]):
                    good = False
        ok &= good
        alphas = ", ".join(f"{lab}:{data.alpha[lab].residue}" for lab in sorted(data.alpha))
        lines.append(f"{F.name()} p={p} M={M} alpha=({alphas}) eigen-property {'ok' if good else 'FAILED'}")
    # e_ord over Q: alpha-direction stabilizes mod 3, beta-direction vanishes mod 3^6
    F = _q()
    f = _eigen_input(F, prm["c9_bound"], {"3": 2})
    for direction, M, iters in (("alpha", 1, 3), ("beta", 6, 3)):
        data = PStabilizationData.build(F, 3, {"3": 2}, M)
        g = p_stabilize(f, data, direction)
        _, rep = e_ord_iterate(g, data, iters)
        good = rep.stabilized if direction == "alpha" else rep.vanished
        ok &= bool(good)
        steps = "; ".join(f"k={s.step} bound={s.bound} stable={s.stabilized} zero={s.vanished}" for s in rep.steps)
        lines.append(f"e_ord {direction} M={M}: {steps} -> {'ok' if good else 'FAILED'}")
    return CheckResult("C9", "p-stabilization eigen-property and ordinary projection", ok, lines)


# -- 10: tree -----------------------------------------------------------------------

def check_tree(prm, workers=1) -> CheckResult:
    lines, ok = [], True
    for q in prm["c10_q"]:
        for k in range(prm["c10_kmax"] + 1):
            t = BTTree(q, k + 5)
            r = norm_relation_check(t, k)
            neg = norm_relation_check(t, k, offsets=(-2, 1))
            good = r.equal and r.size == (q - 1) * q ** (k + 1) and r.containments and not neg.equal
            ok &= good
            lines.append(f"q={q} k={k} equal={r.equal} size={r.size} containments={r.containments} "
                         f"negative_control_equal={neg.equal}")
        # tree Hecke recursion against the q-expansion Hecke recursion at a prime of norm q
        F = _q()
        t = BTTree(q, prm["c10_kmax"] + 4)
        x = TreeDivisor.point((1, (0,)))
        ctx = OperatorContext.trivial(F, F.unit_ideal, 2)
        top = q ** (prm["c10_kmax"] + 1)
        g = gen_eigen(ctx, {P.id: Fraction(1 + P.norm) for P in F.primes if P.norm <= top}, top)
        for k in range(2, prm["c10_kmax"] + 2):
            lhs = hecke_apply(t, k, x)
            rhs = hecke_apply(t, 1, hecke_apply(t, k - 1, x)) - hecke_apply(t, k - 2, x).scale(q)
            deg_ok = lhs.degree() == g[F.int_ideal(q ** k)]
            good = lhs == rhs and deg_ok
            ok &= good
            lines.append(f"q={q} k={k} tree recursion={lhs == rhs} degree={lhs.degree()} "
                         f"sigma={g[F.int_ideal(q ** k)]}")
    return CheckResult("C10", "tree norm relation and Hecke recursion", ok, lines)


CHECKS = [
    ("C1", check_hecke_recursion),
    ("C2", check_hecke_algebra),
    ("C3", check_theta_divisor_sum),
    ("C4", check_eisenstein_levels),
    ("C5", check_class_number_formula),
    ("C6", check_product_vs_kernel),
    ("C7a", check_kernels_q),
    ("C7b", check_kernels_rq),
    ("C8", check_hensel),
    ("C9", check_stabilization),
    ("C10", check_tree),
]

# checks that fail for a reason analysed in the decision ledger
KNOWN_FAILURES = {"C7b"}


def run_checks(scale: str = "full", keys=None, workers: int = 1) -> list[CheckResult]:
    prm = FULL if scale == "full" else QUICK
    out = []
    for key, fn in CHECKS:
        if keys is not None and key not in keys:
            continue
        out.append(fn(prm, workers))
    return out
