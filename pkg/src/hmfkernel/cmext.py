"""CM extensions E = F(sqrt(delta)) of the base field.

Splitting of F-primes, the relative discriminant, counting and listing of
O_E-ideals of given relative norm, class groups (over Q, through reduced
binary quadratic forms), class-group characters and local quadratic
characters at ramified primes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd

from sympy.functions.combinatorial.numbers import kronecker_symbol

from .basefield import BaseField, FieldError, Ideal, PrimeIdealF, RationalField
from .coeffs import Cyclotomic

SPLIT, INERT, RAMIFIED = "split", "inert", "ramified"


class ScenarioError(ValueError):
    pass


# -- binary quadratic forms ---------------------------------------------------

Form = tuple[int, int, int]


def _normalize(f: Form) -> Form:
    a, b, c = f
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def reduce_form(f: Form) -> Form:
    a, b, c = _normalize(f)
    while a > c:
        a, b, c = _normalize((c, -b, a))
    if a == c and b < 0:
        b = -b
    return a, b, c


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def compose_forms(f1: Form, f2: Form) -> Form:
    """Gauss composition of primitive positive definite forms."""
    (a1, b1, c1), (a2, b2, c2) = f1, f2
    disc = b1 * b1 - 4 * a1 * c1
    if a1 > a2:
        (a1, b1, c1), (a2, b2, c2) = (a2, b2, c2), (a1, b1, c1)
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, u, v = _xgcd(s, d)
        x2, y2 = u, -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - disc) // (4 * a3)
    return reduce_form((a3, b3, c3))


def reduced_forms(disc: int) -> list[Form]:
    if disc >= 0 or disc % 4 not in (0, 1):
        raise FieldError(f"{disc} is not a negative discriminant")
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, abs(b)), c) == 1:
                out.append((a, b, c))
        a += 1
    return sorted(out)


class ClassGroupE:
    """Form class group of a negative discriminant, with an invariant-factor basis."""

    def __init__(self, disc: int):
        self.disc = disc
        self.forms = reduced_forms(disc)
        self.order = len(self.forms)
        self.identity = reduce_form((1, disc % 2, (disc % 2 - disc) // 4))
        self._mul: dict[tuple[Form, Form], Form] = {}
        self.generators, self.gen_orders = self._basis()
        self._dlog = {}
        for es in product(*(range(n) for n in self.gen_orders)):
            g = self.identity
            for gen, e in zip(self.generators, es):
                g = self.mul(g, self.pow(gen, e))
            if g in self._dlog:
                raise FieldError("class group basis is not independent")
            self._dlog[g] = es
        if len(self._dlog) != self.order:
            raise FieldError("class group basis does not generate")

    def mul(self, f: Form, g: Form) -> Form:
        key = (f, g)
        r = self._mul.get(key)
        if r is None:
            r = compose_forms(f, g)
            self._mul[key] = r
        return r

    def inverse(self, f: Form) -> Form:
        return reduce_form((f[0], -f[1], f[2]))

    def pow(self, f: Form, k: int) -> Form:
        if k < 0:
            f, k = self.inverse(f), -k
        out = self.identity
        for _ in range(k % max(self.order, 1)):
            out = self.mul(out, f)
        return out

    def element_order(self, f: Form) -> int:
        g, k = f, 1
        while g != self.identity:
            g = self.mul(g, f)
            k += 1
        return k

    def _span(self, gens) -> set:
        span = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
        return span

    def _basis(self):
        gens, orders = [], []
        H = {self.identity}
        while len(H) < self.order:
            best = None
            for f in self.forms:
                if f in H:
                    continue
                # order of f modulo H must equal its order (direct summand)
                k, g = 1, f
                while g not in H:
                    g = self.mul(g, f)
                    k += 1
                if g == self.identity and k == self.element_order(f):
                    if best is None or k > best[1]:
                        best = (f, k)
            f, k = best
            gens.append(f)
            orders.append(k)
            H = self._span(gens)
        return gens, orders

    def dlog(self, f: Form) -> tuple[int, ...]:
        try:
            return self._dlog[reduce_form(f)]
        except KeyError:
            raise FieldError(f"class label {f} outside group of discriminant {self.disc}") from None

    def is_cyclic(self) -> bool:
        return len(self.generators) <= 1


def class_group(E: "CMExtension") -> ClassGroupE:
    if not isinstance(E.base, RationalField):
        raise FieldError("class groups are only available over Q")
    return E.class_group


def class_number(disc: int) -> int:
    return len(reduced_forms(disc))


# -- E-ideals -----------------------------------------------------------------

@dataclass(frozen=True)
class EIdeal:
    """Ideal of O_E: ((F-prime id, part, exponent), ...).

    part is 1 or 2 for the two primes above a split prime, 0 otherwise.
    """
    factors: tuple[tuple[int, int, int], ...]
    class_label: object = ()


@dataclass(frozen=True)
class PrimeIdealE:
    below: int
    kind: str
    which: int
    relative_norm: Ideal
    class_label: object


# -- the extension --------------------------------------------------------------

def _squarefree_part(n: int) -> int:
    s = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    q = 2
    while q * q <= n:
        while n % (q * q) == 0:
            n //= q * q
        if n % q == 0:
            out *= q
            n //= q
        q += 1
    return s * out * n


class CMExtension:
    def __init__(self, F: BaseField, delta, declared_D: Ideal | None = None):
        self.base = F
        self.splitting: dict[int, str] = {}
        if isinstance(F, RationalField):
            d0 = _squarefree_part(int(delta))
            if d0 >= 0:
                raise ScenarioError("delta must be negative")
            self.disc = d0 if d0 % 4 == 1 else 4 * d0
            if self.disc % 2 == 0:
                raise ScenarioError(f"even relative discriminant {self.disc} is not supported")
            self.delta = Fraction(self.disc)
            for P in F.primes:
                k = int(kronecker_symbol(self.disc, P.p))
                self.splitting[P.id] = {1: SPLIT, -1: INERT, 0: RAMIFIED}[k]
        else:
            delta = F.element(delta)
            if F.signs(delta) != (-1, -1):
                raise ScenarioError("delta must be totally negative")
            self.delta = delta
            self.disc = None
            for P in F.primes:
                self.splitting[P.id] = self._quadratic_splitting(P)
        ram = [P for P in F.primes if self.splitting[P.id] == RAMIFIED]
        self.ramified = tuple(ram)
        self.D = F.ideal({P.id: 1 for P in ram})
        if declared_D is not None and declared_D != self.D:
            raise ScenarioError(f"declared relative discriminant {F.ideal_label(declared_D)} "
                                f"differs from computed {F.ideal_label(self.D)}")
        self.class_group = ClassGroupE(self.disc) if self.disc is not None else None
        self._prime_class: dict[tuple[int, int], object] = {}

    def _quadratic_splitting(self, P: PrimeIdealF) -> str:
        F = self.base
        v = F.valuation(P, self.delta)
        if v % 2:
            if P.p == 2:
                raise ScenarioError(f"prime {P.label} above 2 ramifies in E")
            return RAMIFIED
        u = self.delta / P.generator ** v if v else self.delta
        if P.p != 2:
            return SPLIT if F.unit_character(P, u) == 1 else INERT
        # residue characteristic 2: square classes modulo P^(2e+1) and P^(2e)
        if self._square_mod(P, u, 2 * P.e + 1):
            return SPLIT
        if self._square_mod(P, u, 2 * P.e):
            return INERT
        raise ScenarioError(f"prime {P.label} above 2 ramifies in E")

    def _square_mod(self, P: PrimeIdealF, u, k: int) -> bool:
        F = self.base
        c = -(-k // P.e)
        for x in F.residues_mod(2 ** c):
            z = u - x * x
            if not z or F.valuation(P, z) >= k:
                return True
        return False

    # -- splitting --
    def splitting_type(self, P: PrimeIdealF) -> str:
        return self.splitting[P.id]

    def eps(self, P: PrimeIdealF) -> int:
        return {SPLIT: 1, INERT: -1, RAMIFIED: 0}[self.splitting[P.id]]

    def eps_ideal(self, I: Ideal) -> int:
        """epsilon_[D] on an integral ideal."""
        s = 1
        for i, e in I.exps:
            t = self.splitting[i]
            if t == RAMIFIED:
                return 0
            if t == INERT and e % 2:
                s = -s
        return s

    # -- norms --
    def r_count(self, I: Ideal) -> int:
        if not I.is_integral():
            return 0
        out = 1
        for i, e in I.exps:
            t = self.splitting[i]
            if t == SPLIT:
                out *= e + 1
            elif t == INERT and e % 2:
                return 0
        return out

    def prime_class(self, pid: int, which: int):
        """Class label of the E-prime above F-prime pid (which=1,2 for split, 0 otherwise)."""
        if self.class_group is None:
            return ()
        key = (pid, which)
        if key not in self._prime_class:
            P = self.base.primes[pid]
            t = self.splitting[pid]
            G = self.class_group
            if t == INERT:
                f = G.identity
            else:
                ell, disc = P.p, self.disc
                bs = [b for b in range(2 * ell) if (b - disc) % 2 == 0 and (b * b - disc) % (4 * ell) == 0]
                b = bs[0] if which in (0, 1) else bs[-1]
                if t == SPLIT and len(bs) != 2:
                    raise FieldError(f"unexpected form data above {ell}")
                f = reduce_form((ell, b, (b * b - disc) // (4 * ell)))
            self._prime_class[key] = f
        return self._prime_class[key]

    def list_ideals_of_norm(self, I: Ideal) -> list[EIdeal]:
        if not I.is_integral():
            return []
        choices = []
        for i, e in I.exps:
            t = self.splitting[i]
            if t == SPLIT:
                choices.append([((i, 1, k), (i, 2, e - k)) for k in range(e + 1)])
            elif t == INERT:
                if e % 2:
                    return []
                choices.append([((i, 0, e // 2),)])
            else:
                choices.append([((i, 0, e),)])
        out = []
        for combo in product(*choices):
            facs = tuple(f for part in combo for f in part if f[2])
            out.append(EIdeal(facs, self.class_of(facs)))
        return out

    def class_of(self, factors) -> object:
        G = self.class_group
        if G is None:
            return ()
        c = G.identity
        for pid, which, e in factors:
            c = G.mul(c, G.pow(self.prime_class(pid, which), e))
        return c

    def relative_norm(self, J: EIdeal) -> Ideal:
        exps = {}
        for pid, which, e in J.factors:
            k = 2 * e if self.splitting[pid] == INERT else e
            exps[pid] = exps.get(pid, 0) + k
        return self.base.ideal(exps)

    def ramified_part(self, D1: Ideal) -> EIdeal:
        """The E-ideal whose square is D1*O_E, for D1 | D."""
        facs = tuple((i, 0, 1) for i, _ in D1.exps)
        return EIdeal(facs, self.class_of(facs))

    def extend(self, K: Ideal) -> EIdeal:
        """K*O_E for an integral F-ideal K."""
        facs = []
        for i, e in K.exps:
            t = self.splitting[i]
            if t == SPLIT:
                facs += [(i, 1, e), (i, 2, e)]
            elif t == INERT:
                facs.append((i, 0, e))
            else:
                facs.append((i, 0, 2 * e))
        facs = tuple(facs)
        return EIdeal(facs, self.class_of(facs))

    # -- local characters at ramified primes --
    def local_eps(self, v: PrimeIdealF, x) -> int:
        """Residue-field square test of a v-unit x at a ramified prime v."""
        if self.splitting[v.id] != RAMIFIED:
            raise FieldError(f"{v.label} is not ramified in E")
        if v.p == 2:
            raise FieldError("residue characteristic 2")
        if self.base.valuation(v, x) != 0:
            raise FieldError(f"{x} is not a unit at {v.label}")
        return self.base.unit_character(v, x)

    def hilbert_eps(self, v: PrimeIdealF, x) -> int:
        """Local character of E at v evaluated on any nonzero x: (x, delta)_v."""
        if self.splitting[v.id] != RAMIFIED:
            raise FieldError(f"{v.label} is not ramified in E")
        return self.base.hilbert_symbol(v, x, self.delta)

    # -- scenario validity --
    def validity(self, N: Ideal, p: int) -> list[str]:
        """Violated standing hypotheses for (N, p); empty when valid."""
        F = self.base
        problems = []
        if p % 2 == 0:
            problems.append(f"p={p} is not odd")
        for P in F.primes_above(2):
            if self.splitting[P.id] != SPLIT:
                problems.append(f"prime {P.label} above 2 does not split in E")
        for i, _ in N.exps:
            if self.splitting[i] != SPLIT:
                problems.append(f"prime {F.primes[i].label} of N does not split in E")
        try:
            above_p = F.primes_above(p)
        except FieldError:
            above_p = []
            problems.append(f"p={p} beyond prime table")
        for P in above_p:
            if self.splitting[P.id] != SPLIT:
                problems.append(f"prime {P.label} above p does not split in E")
        if not N.coprime_to(self.D):
            problems.append("N is not prime to D")
        pO = F.ideal({P.id: P.e for P in above_p})
        if not pO.coprime_to(self.D):
            problems.append("p is not prime to D")
        if not pO.coprime_to(N):
            problems.append("p is not prime to N")
        return problems


def splitting_type(E: CMExtension, P: PrimeIdealF) -> tuple[str, int]:
    return E.splitting_type(P), E.eps(P)


def r_count(E: CMExtension, I: Ideal) -> int:
    return E.r_count(I)


def list_ideals_of_norm(E: CMExtension, I: Ideal) -> list[EIdeal]:
    return E.list_ideals_of_norm(I)


def local_eps(E: CMExtension, v: PrimeIdealF, x) -> int:
    return E.local_eps(v, x)


# -- characters of E ----------------------------------------------------------------

class EHeckeCharacter:
    """Finite-order character of the class group of E, vanishing off a modulus.

    ``values`` gives, per class-group generator, k meaning exp(2 pi i k / n).
    """

    def __init__(self, E: CMExtension, values: tuple[int, ...] = (), modulus: Ideal | None = None):
        self.E = E
        G = E.class_group
        if G is None:
            if any(values):
                raise FieldError("only the trivial character is available over a real quadratic base")
            self.values = ()
        else:
            if values and len(values) != len(G.generators):
                raise FieldError("one value per class-group generator is required")
            self.values = tuple(values) if values else (0,) * len(G.generators)
        self.modulus = modulus if modulus is not None else E.base.unit_ideal

    @property
    def is_trivial(self) -> bool:
        return not any(self.values)

    def with_modulus(self, modulus: Ideal) -> "EHeckeCharacter":
        return EHeckeCharacter(self.E, self.values, modulus)

    def order(self) -> int:
        G = self.E.class_group
        if G is None:
            return 1
        m = 1
        for k, n in zip(self.values, G.gen_orders):
            den = Fraction(k, n).denominator
            m = m * den // gcd(m, den)
        return m

    def on_class(self, label):
        """Value on a class label (ignores the modulus)."""
        G = self.E.class_group
        if G is None or self.is_trivial:
            return Fraction(1)
        es = G.dlog(label)
        t = sum(Fraction(k * e, n) for k, e, n in zip(self.values, es, G.gen_orders)) % 1
        return root_of_unity(t.numerator, t.denominator)

    def __call__(self, J: EIdeal):
        mod_ids = set(self.modulus.prime_ids())
        if any(pid in mod_ids for pid, _, _ in J.factors):
            return Fraction(0)
        return self.on_class(J.class_label)

    def label(self) -> str:
        base = "trivial" if self.is_trivial else "class" + ",".join(map(str, self.values))
        if self.modulus.is_unit():
            return base
        return f"{base}[{self.E.base.ideal_label(self.modulus)}]"


def root_of_unity(k: int, m: int):
    """exp(2 pi i k/m) as an exact value (rational when m <= 2)."""
    k %= m
    if k == 0:
        return Fraction(1)
    if 2 * k == m:
        return Fraction(-1)
    return Cyclotomic.root_of_unity(k, m)


def char_eval(chi: EHeckeCharacter, J: EIdeal):
    return chi(J)
