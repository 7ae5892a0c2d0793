"""Analytic and geometric kernel coefficients and their per-prime comparison.

The analytic side is a general machine: a sum over divisors D1 of the
relative discriminant, convex pairs (alpha, beta), ideals J of O_E of norm
alpha*D1*I and divisors K of beta*D1*I/N, against an ideal functional.  The
central-derivative pieces are read off by feeding it the formal-log
functional.

The geometric side evaluates closed forms prime by prime.  The two sides
share nothing beyond ideal arithmetic, splitting data and r(I).
"""
from __future__ import annotations

import multiprocessing
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .basefield import Ideal, RationalField
from .characters import KroneckerCharacter
from .cmext import INERT, SPLIT, CMExtension, EHeckeCharacter, ScenarioError
from .coeffs import FormalLog
from .thetaeis import l_value_imprimitive

FULL, INTEGRAL = "full", "integral"


class KernelError(ValueError):
    pass


@dataclass
class KernelScenario:
    E: CMExtension
    N: Ideal
    p: int
    bound: int
    chi: EHeckeCharacter | None = None
    constant: object = None          # 2^{-n} L_{pD}(0, .) when supplied

    def __post_init__(self):
        problems = self.E.validity(self.N, self.p)
        need = int(self.E.D.norm) * self.bound
        if self.E.base.prime_bound < need:
            problems.append(f"prime table bound {self.E.base.prime_bound} is below N(D)*B = {need}")
        if problems:
            raise ScenarioError("invalid kernel scenario: " + "; ".join(problems))
        F = self.E.base
        self.p_primes = tuple(F.primes_above(self.p))
        self.pO = F.ideal({P.id: P.e for P in self.p_primes})
        if self.chi is None:
            self.chi = EHeckeCharacter(self.E)

    @property
    def F(self):
        return self.E.base

    @property
    def D(self) -> Ideal:
        return self.E.D

    @property
    def sign_hypothesis(self) -> bool:
        """epsilon(N) = (-1)^([F:Q]-1), assumed by both local-coefficient formulas."""
        return self.E.eps_ideal(self.N) == (-1) ** (self.F.degree - 1)

    def validity_report(self) -> dict:
        F = self.F
        return {
            "N": F.ideal_label(self.N),
            "D": F.ideal_label(self.D),
            "p": self.p,
            "primes_above_p": [P.label for P in self.p_primes],
            "problems": self.E.validity(self.N, self.p),
            "sign_hypothesis": self.sign_hypothesis,
        }


def choose_split_prime(E: CMExtension, N: Ideal, limit: int = 1000) -> int:
    """Smallest odd prime p, prime to N*D, with every prime above p split in E."""
    F = E.base
    for P in F.primes:
        ell = P.p
        if ell == 2 or ell > limit:
            continue
        above = F.primes_above(ell)
        if any(not F.prime_ideal(Q).coprime_to(N * E.D) for Q in above):
            continue
        if all(E.splitting_type(Q) == SPLIT for Q in above):
            return ell
    raise ScenarioError(f"no split prime below {limit}")


class FiniteCharacter:
    """chi_[p] for a class-group character chi of E."""

    def __init__(self, chi: EHeckeCharacter):
        self.chi = chi


class CycloLog:
    """J -> sum_v ord_v(N_{E/F} J) log|q_v|, vanishing on J not prime to p."""


def _logvec(I: Ideal, F, acc: dict, c) -> None:
    for i, e in I.exps:
        lab = F.primes[i].label
        acc[lab] = acc.get(lab, 0) + c * e


def _constant_term(sc: KernelScenario):
    if sc.constant is not None:
        return sc.constant
    F = sc.F
    if not isinstance(F, RationalField):
        raise KernelError("the constant term must be supplied over a real quadratic base")
    eps = KroneckerCharacter(F, sc.E.disc)
    return Fraction(1, 2) * l_value_imprimitive(eps, sc.pO * sc.D)


def kernel_coeff(sc: KernelScenario, fun, I: Ideal, lattice: str = FULL, d1_only: Ideal | None = None,
                 include_constant: bool = True, terms: list | None = None):
    """Coefficient a(I) of the analytic kernel against an ideal functional.

    lattice FULL draws alpha from (D1 I)^{-1}; INTEGRAL draws it from I^{-1}.
    d1_only restricts the outer sum to a single D1.  terms, when given,
    collects (D1, alpha, contribution) triples for debugging.
    """
    if lattice not in (FULL, INTEGRAL):
        raise KernelError(f"unknown lattice {lattice!r}")
    if not I.is_integral() or I.norm > sc.bound:
        raise KernelError("I must be integral and within the scenario bound")
    E, F = sc.E, sc.F
    is_log = isinstance(fun, CycloLog)
    if is_log and not sc.pO.divides(I):
        raise KernelError("the formal-log functional needs p | I")
    chi = fun.chi if not is_log else None
    pO, N, D = sc.pO, sc.N, sc.D
    pD = pO * D
    total = {} if is_log else Fraction(0)
    d1_list = [d1_only] if d1_only is not None else list(D.divisors())
    for D1 in d1_list:
        T = D1 * I
        d1_primes = [F.primes[i] for i, _ in D1.exps]
        d1_ids = [P.id for P in d1_primes]
        delta1 = E.ramified_part(D1)
        chi_delta1 = None if is_log else _conj(chi.on_class(delta1.class_label))
        base = T if lattice == FULL else I
        for pt in F.convex_lattice_points(base.inverse()):
            alpha, beta = pt.alpha, pt.beta
            A = F.ideal_times(alpha, T)
            if not A.is_integral():
                raise KernelError("alpha*D1*I is not integral")
            if not A.coprime_to(pO):
                continue
            B = F.ideal_times(beta, T)
            if not N.divides(B):
                continue
            rA = E.r_count(A)
            if rA == 0:
                continue
            sign = 1
            if d1_primes:
                x = -(alpha * beta)
                for v in d1_primes:
                    sign *= E.hilbert_eps(v, x)
            BN = B / N
            Bd1 = B.part_at(d1_ids)
            if is_log:
                contrib = {}
                head = {}
                _logvec(A, F, head, 1)
                _logvec(D1, F, head, -1)
                _logvec(Bd1, F, head, -2)
                for K in BN.divisors():
                    if not K.coprime_to(pD):
                        continue
                    c = rA * E.eps_ideal(K) * sign
                    for lab, e in head.items():
                        contrib[lab] = contrib.get(lab, 0) + c * e
                    _logvec(K, F, contrib, -2 * c)
                for lab, e in contrib.items():
                    total[lab] = total.get(lab, 0) + e
                if terms is not None and any(contrib.values()):
                    terms.append((F.ideal_label(D1), alpha, {k: v for k, v in contrib.items() if v}))
            else:
                th = Fraction(0)
                mod_p = chi.with_modulus(pO)
                for J in E.list_ideals_of_norm(A) if not chi.is_trivial else ():
                    th = th + mod_p(J)
                if chi.is_trivial:
                    th = Fraction(rA)
                ksum = Fraction(0)
                for K in BN.divisors():
                    if not K.coprime_to(pD):
                        continue
                    val = Fraction(E.eps_ideal(K))
                    if not chi.is_trivial:
                        val = val * _conj(chi.on_class(E.extend(K).class_label))
                    ksum = ksum + val
                if ksum == 0 or th == 0:
                    continue
                c = th * ksum * sign
                if not chi.is_trivial:
                    c = c * chi_delta1 * _conj(chi.on_class(E.extend(Bd1).class_label))
                total = total + c
                if terms is not None:
                    terms.append((F.ideal_label(D1), alpha, c))
    if is_log:
        return FormalLog({k: v for k, v in total.items()})
    if include_constant and (d1_only is None or d1_only.is_unit()):
        if I.coprime_to(pO):
            s = Fraction(0)
            mod_p = chi.with_modulus(pO)
            for J in E.list_ideals_of_norm(I):
                s = s + mod_p(J)
            if s != 0:
                total = total + _constant_term(sc) * s
    return total


def _conj(v):
    if isinstance(v, Fraction):
        return v
    return v.conjugate().simplify()


def derivative_local(sc: KernelScenario, I: Ideal, lattice: str = INTEGRAL) -> dict[str, Fraction]:
    """Per-prime coefficients of log|q_v| in the formal-log kernel coefficient."""
    if not sc.pO.divides(I):
        raise KernelError("derivative_local needs p | I")
    val = kernel_coeff(sc, CycloLog(), I, lattice=lattice)
    return dict(val.terms)


def geometric_local(sc: KernelScenario, I: Ideal) -> dict[str, Fraction]:
    """Closed-form local coefficients, prime by prime."""
    if not sc.pO.divides(I):
        raise KernelError("geometric_local needs p | I")
    E, F = sc.E, sc.F
    N, D, pO = sc.N, sc.D, sc.pO
    d_primes = [F.primes[i] for i, _ in D.exps]
    DI = D * I
    out: dict[str, Fraction] = defaultdict(Fraction)
    for pt in F.convex_lattice_points(DI.inverse()):
        alpha, beta = pt.alpha, pt.beta
        aI = F.ideal_times(alpha, I)
        if not aI.is_integral():
            continue
        r_a = E.r_count(aI)
        if r_a == 0:
            continue
        bDI = F.ideal_times(beta, DI)
        if not N.divides(bDI) or not bDI.coprime_to(pO):
            continue
        x = -(alpha * beta)
        eps_w = {w.id: E.hilbert_eps(w, x) for w in d_primes}
        delta = 2 ** sum(1 for w in d_primes if bDI.val(w.id) > 0)
        bIN = F.ideal_times(beta, I) / N
        if not bIN.is_integral():
            continue
        if all(s == 1 for s in eps_w.values()):
            for i, e in bIN.exps:
                if E.splitting[i] != INERT:
                    continue
                q = F.primes[i]
                rest = bIN / F.prime_ideal(q)
                out[q.label] += delta * r_a * E.r_count(rest) * (e + 1)
        for v in d_primes:
            if eps_w[v.id] != -1 or any(s != 1 for w, s in eps_w.items() if w != v.id):
                continue
            bI = bIN * N
            out[v.label] += delta * r_a * E.r_count(bIN) * (bI.val(v.id) + 1)
    return {k: v for k, v in out.items() if v}


@dataclass
class LocalCoefficientReport:
    ideal: str
    norm: int
    rows: list = field(default_factory=list)      # (prime label, kind, analytic, geometric)

    @property
    def equal(self) -> bool:
        return all(a == g for _, _, a, g in self.rows)

    @property
    def split_vanishing(self) -> bool:
        return all(a == 0 and g == 0 for _, kind, a, g in self.rows if kind in (SPLIT, "above_p"))


def prime_kind(sc: KernelScenario, label: str) -> str:
    P = sc.F.prime(label)
    if P.p == sc.p:
        return "above_p"
    return sc.E.splitting[P.id]


def _compare_one(args) -> LocalCoefficientReport:
    sc, I, lattice = args
    a = derivative_local(sc, I, lattice=lattice)
    g = geometric_local(sc, I)
    F = sc.F
    labels = sorted(set(a) | set(g), key=lambda s: F.prime(s).id)
    rows = [(lab, prime_kind(sc, lab), a.get(lab, Fraction(0)), g.get(lab, Fraction(0))) for lab in labels]
    return LocalCoefficientReport(F.ideal_label(I), int(I.norm), rows)


def qualifying_ideals(sc: KernelScenario, norm_max: int | None = None) -> list[Ideal]:
    b = sc.bound if norm_max is None else norm_max
    return [I for I in sc.F.ideals_up_to(b) if sc.pO.divides(I)]


# forked workers inherit the scenario; only ideals cross the process boundary
_WORKER_STATE = None


def _init_worker(sc, lattice):
    global _WORKER_STATE
    _WORKER_STATE = (sc, lattice)


def _compare_in_worker(I: Ideal) -> LocalCoefficientReport:
    sc, lattice = _WORKER_STATE
    return _compare_one((sc, I, lattice))


def compare_kernels(sc: KernelScenario, ideals: list[Ideal], workers: int = 1,
                    lattice: str = INTEGRAL) -> list[LocalCoefficientReport]:
    if workers > 1 and len(ideals) > 1:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx, initializer=_init_worker,
                                 initargs=(sc, lattice)) as ex:
            return list(ex.map(_compare_in_worker, ideals, chunksize=max(1, len(ideals) // (4 * workers))))
    return [_compare_one((sc, I, lattice)) for I in ideals]


@dataclass
class ProductCheckReport:
    bound: int
    mismatches: list = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return not self.mismatches


def product_vs_kernel_check(sc: KernelScenario, bound: int | None = None) -> ProductCheckReport:
    """Theta(chi) * V_N(E) against the D1 = (1) summand of the kernel."""
    from .characters import QuadraticCharacter
    from .operators import v_op
    from .qexp import qexp_mul
    from .thetaeis import COMPUTED, SUPPLIED, EisSpec, ThetaSpec, eis_coeffs, theta_coeffs

    F, E = sc.F, sc.E
    b = sc.bound if bound is None else bound
    theta = theta_coeffs(ThetaSpec(E, sc.chi.with_modulus(sc.pO), b))
    eps = QuadraticCharacter(E)
    if sc.constant is not None:
        spec = EisSpec(eps, 1, sc.pO * sc.D, b, SUPPLIED, sc.constant)
    else:
        spec = EisSpec(eps, 1, sc.pO * sc.D, b, COMPUTED)
    eis = eis_coeffs(spec)
    X = qexp_mul(theta, v_op(sc.N, eis))
    fun = FiniteCharacter(sc.chi)
    rep = ProductCheckReport(b)
    for I in F.ideals_up_to(b):
        k = kernel_coeff(sc, fun, I, lattice=FULL, d1_only=F.unit_ideal)
        if not (X[I] == k):
            rep.mismatches.append((F.ideal_label(I), X[I], k))
    return rep
