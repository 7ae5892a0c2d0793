"""Hecke-type operators on truncated q-expansions.

Every operator shrinks the output bound so that each source coefficient it
reads lies inside the input truncation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .basefield import BaseField, Ideal, PrimeIdealF
from .characters import FCharacter, TrivialCharacter
from .coeffs import PAdic, is_zero, to_padic
from .qexp import QExpansion, qexp_scale, qexp_sub


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorContext:
    field: BaseField
    level: Ideal
    weight: int
    chi: FCharacter

    def __post_init__(self):
        if not self.chi.conductor.divides(self.level):
            raise OperatorError("character conductor must divide the level")

    @classmethod
    def trivial(cls, F: BaseField, level: Ideal | None = None, weight: int = 2) -> "OperatorContext":
        return cls(F, level if level is not None else F.unit_ideal, weight, TrivialCharacter(F))

    def chi_norm(self, J: Ideal):
        """chi_[N](J) N(J)^(k-1)."""
        c = self.chi(J, self.level)
        if c == 0:
            return c
        return c * Fraction(int(J.norm)) ** (self.weight - 1)


def hecke_T(ctx: OperatorContext, M: Ideal, f: QExpansion) -> QExpansion:
    if not M.is_integral():
        raise OperatorError("T(M) needs an integral ideal")
    out_bound = f.bound // int(M.norm)
    divs = [(J, ctx.chi_norm(J)) for J in M.divisors()]
    divs = [(J, c) for J, c in divs if c != 0]

    def coeff(L: Ideal):
        total = Fraction(0)
        for J, c in divs:
            if J.divides(L):
                total = total + c * f[L * M / (J * J)]
        return total

    if f.has_a0:
        a0 = Fraction(0)
        for _, c in divs:
            a0 = a0 + c * f.a0
    else:
        a0 = None
    return QExpansion.from_function(f.field, out_bound, coeff, a0, **f.meta())


def hecke_T_prime(ctx: OperatorContext, P: PrimeIdealF, f: QExpansion, m: int = 1) -> QExpansion:
    return hecke_T(ctx, ctx.field.prime_ideal(P) ** m, f)


@dataclass
class IdentityReport:
    equal: bool
    bound: int
    mismatches: list = field(default_factory=list)

    def __bool__(self):
        return self.equal


def compare_expansions(f: QExpansion, g: QExpansion, bound: int | None = None, modulus=None) -> IdentityReport:
    b = min(f.bound, g.bound) if bound is None else bound
    bad = []
    for I in f.field.ideals_up_to(b):
        x, y = f[I], g[I]
        if not (x == y):
            bad.append((f.field.ideal_label(I), x, y))
    if f.has_a0 and g.has_a0 and not (f.a0 == g.a0):
        bad.append(("a0", f.a0, g.a0))
    return IdentityReport(not bad, b, bad)


def hecke_recursion_check(ctx: OperatorContext, P: PrimeIdealF, m: int, f: QExpansion) -> IdentityReport:
    if m < 2:
        raise OperatorError("recursion needs m >= 2")
    Pi = ctx.field.prime_ideal(P)
    lhs = hecke_T(ctx, Pi ** m, f)
    rhs1 = hecke_T(ctx, Pi ** (m - 1), hecke_T(ctx, Pi, f))
    c = ctx.chi_norm(Pi)
    rhs2 = hecke_T(ctx, Pi ** (m - 2), f).restrict(rhs1.bound)
    rhs = qexp_sub(rhs1, qexp_scale(c, rhs2))
    return compare_expansions(lhs, rhs)


def v_op(D: Ideal, f: QExpansion) -> QExpansion:
    if not D.is_integral():
        raise OperatorError("V_D needs an integral ideal")

    def coeff(I: Ideal):
        if not D.divides(I):
            return Fraction(0)
        return f[I / D]

    return QExpansion.from_function(f.field, f.bound, coeff, f._a0, **f.meta(level=f.level * D))


def eis_level_raise(ctx: OperatorContext, Q: PrimeIdealF, f: QExpansion) -> QExpansion:
    """F(Q) = T(Q) - chi_[D](Q) N(Q)^(k-1), with T(Q) taken at the target level."""
    Qi = ctx.field.prime_ideal(Q)
    if not Qi.divides(ctx.level):
        raise OperatorError(f"{Q.label} must divide the target level")
    if Qi.divides(ctx.chi.conductor):
        raise OperatorError(f"{Q.label} divides the conductor")
    c = ctx.chi(Qi) * Fraction(Q.norm) ** (ctx.weight - 1)
    t = hecke_T(ctx, Qi, f)
    out = qexp_sub(t, qexp_scale(c, f.restrict(t.bound)))
    out.level = ctx.level
    return out


# -- p-stabilization -------------------------------------------------------------

def unit_root_hensel(a, normP: int, p: int, M: int) -> PAdic:
    """Unit root of X^2 - aX + normP modulo p^M."""
    if M < 1:
        raise OperatorError("precision must be at least 1")
    a = to_padic(Fraction(a), p, M)
    if not a.is_unit():
        raise OperatorError("a is not a p-adic unit (non-ordinary)")
    if normP % p:
        raise OperatorError("normP must be divisible by p")
    x = a
    for _ in range(M.bit_length() + 1):
        g = x * x - a * x + normP
        x = x - g / (2 * x - a)
    if not (x * x - a * x + normP == 0):
        raise OperatorError("Hensel iteration failed to converge")
    return x


@dataclass
class PStabilizationData:
    p: int
    M: int
    primes_above: list
    a_values: dict
    alpha: dict = field(default_factory=dict)
    beta: dict = field(default_factory=dict)

    @classmethod
    def build(cls, F: BaseField, p: int, a_values: dict, M: int) -> "PStabilizationData":
        if p % 2 == 0:
            raise OperatorError("p must be odd")
        above = F.primes_above(p)
        vals = {}
        for P in above:
            key = P.label
            if key not in a_values:
                raise OperatorError(f"missing a({P.label}, f)")
            vals[key] = Fraction(a_values[key])
        data = cls(p, M, above, vals)
        for P in above:
            al = unit_root_hensel(vals[P.label], P.norm, p, M)
            data.alpha[P.label] = al
            data.beta[P.label] = to_padic(vals[P.label], p, M) - al
        return data


def p_stabilize(f: QExpansion, data: PStabilizationData, direction: str = "alpha") -> QExpansion:
    """prod_i (1 - beta_i V_{P_i}) f  (direction 'beta' swaps the roots)."""
    if direction not in ("alpha", "beta"):
        raise OperatorError("direction must be 'alpha' or 'beta'")
    F = f.field
    p, M = data.p, data.M
    g = f.map(lambda v: to_padic(v, p, M))
    for P in data.primes_above:
        c = data.beta[P.label] if direction == "alpha" else data.alpha[P.label]
        Pi = F.prime_ideal(P)
        g = qexp_sub(g, qexp_scale(c, v_op(Pi, g)), level=g.level * Pi)
    return g


def gen_eigen(ctx: OperatorContext, eigenvalues: dict, bound: int) -> QExpansion:
    """Multiplicative family with T(P) f = lambda_P f for every prime in bound."""
    F = ctx.field
    lam = {}
    for k, v in eigenvalues.items():
        pid = k.id if isinstance(k, PrimeIdealF) else (F.prime(k).id if isinstance(k, str) else int(k))
        lam[pid] = v
    cache: dict[tuple[int, int], object] = {}

    def prime_power(pid: int, m: int):
        if (pid, m) in cache:
            return cache[(pid, m)]
        if m == 0:
            r = Fraction(1)
        elif pid not in lam:
            raise OperatorError(f"missing eigenvalue at {F.primes[pid].label}")
        elif m == 1:
            r = lam[pid]
        else:
            c = ctx.chi_norm(F.prime_ideal(F.primes[pid]))
            r = lam[pid] * prime_power(pid, m - 1) - c * prime_power(pid, m - 2)
        cache[(pid, m)] = r
        return r

    def coeff(I: Ideal):
        out = Fraction(1)
        for i, e in I.exps:
            out = out * prime_power(i, e)
        return out

    return QExpansion.from_function(F, bound, coeff, 0, weight=ctx.weight, level=ctx.level,
                                    character=ctx.chi.label)


@dataclass
class EordStep:
    step: int
    power: int
    bound: int
    stabilized: bool | None
    vanished: bool


@dataclass
class EordReport:
    steps: list
    exhausted: bool = False

    @property
    def stabilized(self) -> bool:
        return bool(self.steps) and self.steps[-1].stabilized is True

    @property
    def vanished(self) -> bool:
        return bool(self.steps) and self.steps[-1].vanished


def _t_p(ctx: OperatorContext, data: PStabilizationData, f: QExpansion) -> QExpansion:
    F = ctx.field
    for P in data.primes_above:
        f = hecke_T(ctx, F.prime_ideal(P) ** P.e, f)
    return f


def e_ord_iterate(f: QExpansion, data: PStabilizationData, iterations: int,
                  ctx: OperatorContext | None = None) -> tuple[QExpansion, EordReport]:
    """Apply T(p)^{k!} for k = 1..iterations, reporting stabilization mod p^M."""
    F = f.field
    if ctx is None:
        ctx = OperatorContext.trivial(F, f.level, f.weight)
    for P in data.primes_above:
        if not F.prime_ideal(P).divides(ctx.level):
            raise OperatorError(f"level must be divisible by {P.label}")
    step_norm = 1
    for P in data.primes_above:
        step_norm *= P.norm ** P.e
    report = EordReport([])
    prev = None
    g = f
    done = 0
    for k in range(1, iterations + 1):
        target = factorial(k)
        need = target - done
        if g.bound // step_norm ** need < 1:
            report.exhausted = True
            break
        for _ in range(need):
            g = _t_p(ctx, data, g)
        done = target
        vanished = all(is_zero(g[I]) for I in g.ideals()) and (not g.has_a0 or is_zero(g.a0))
        stab = None
        if prev is not None:
            stab = compare_expansions(g, prev.restrict(g.bound)).equal
        report.steps.append(EordStep(k, target, g.bound, stab, vanished))
        prev = g
    return g, report


def eigen_project(basis: list, target: QExpansion, which: int):
    """a((1)) of the which-th component of target in the span of basis."""
    exps = [b[0] if isinstance(b, tuple) else b for b in basis]
    F = target.field
    bound = min([target.bound] + [b.bound for b in exps])
    slots = F.ideals_up_to(bound)
    n = len(exps)
    if len(slots) < n:
        raise OperatorError("fewer coefficient slots than basis elements")
    rows = [[b[I] for b in exps] + [target[I]] for I in slots]

    def nonzero(x):
        return x.is_unit() if isinstance(x, PAdic) else x != 0

    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(rows)) if nonzero(rows[i][c])), None)
        if pr is None:
            raise OperatorError("singular system: basis not independent on available slots")
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not is_zero(rows[i][c]):
                m = rows[i][c]
                rows[i] = [x - m * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(rows)):
        if not is_zero(rows[i][n]):
            raise OperatorError("inconsistent system: target is not in the span of the basis")
    coeffs = [rows[i][n] for i in range(n)]
    return coeffs[which] * exps[which][F.unit_ideal]
