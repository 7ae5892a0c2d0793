"""Totally real base fields of narrow class number one.

Two backends: ``RationalField`` and ``RealQuadraticField``.  Prime tables
are built once, up to an explicit norm bound, and every ideal operation
that would need a prime outside the table raises ``PrimeTableExhausted``.
Field elements are ``Fraction`` for Q and ``QuadNumber`` (a + b*sqrt(d))
for real quadratic fields.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, isqrt
from typing import Iterator, Sequence

from sympy import factorint, primerange
from sympy.ntheory import sqrt_mod
from sympy.functions.combinatorial.numbers import legendre_symbol


class FieldError(ValueError):
    pass


class PrimeTableExhausted(FieldError):
    pass


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class QuadNumber:
    """a + b*sqrt(d) with rational a, b."""

    __slots__ = ("a", "b", "d", "_h")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d
        self._h = None

    def _lift(self, other) -> "QuadNumber":
        if isinstance(other, QuadNumber):
            if other.d != self.d:
                raise FieldError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadNumber(other, 0, self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadNumber(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadNumber(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadNumber(self.a * o.a + self.d * self.b * o.b,
                          self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def conj(self) -> "QuadNumber":
        return QuadNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def inverse(self) -> "QuadNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadNumber(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = QuadNumber(1, 0, self.d), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def signs(self) -> tuple[int, int]:
        """Exact signs of the embeddings sqrt(d) -> +sqrt(d), -sqrt(d)."""
        return _emb_sign(self.a, self.b, self.d), _emb_sign(self.a, -self.b, self.d)

    def __eq__(self, other):
        if isinstance(other, QuadNumber):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash(self.a) if self.b == 0 else hash((self.a, self.b, self.d))
        return self._h

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt{self.d})"


def _emb_sign(a: Fraction, b: Fraction, d: int) -> int:
    sa, sb = _sgn(a), _sgn(b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb if sa == 0 else sa
    c = a * a - d * b * b
    return sa if c > 0 else sb


@dataclass(frozen=True, eq=False)
class PrimeIdealF:
    id: int
    p: int            # residue characteristic
    f: int            # residue degree
    e: int            # ramification index
    norm: int
    generator: object
    label: str
    root: int | None = None   # image of the integral generator omega for degree-one primes

    def __eq__(self, other):
        return isinstance(other, PrimeIdealF) and self.id == other.id and self.label == other.label

    def __hash__(self):
        return hash((self.id, self.label))

    def __repr__(self):
        return f"P[{self.label}]"


class Ideal:
    """Fractional ideal in factored form: sorted ((prime id, exponent), ...)."""

    __slots__ = ("exps", "_norm", "_pn", "_h")

    def __init__(self, exps, pnorms: Sequence[int]):
        self.exps = tuple(sorted((i, e) for i, e in exps if e))
        self._pn = pnorms
        self._norm = None
        self._h = hash(self.exps)

    @property
    def norm(self) -> Fraction:
        if self._norm is None:
            num = den = 1
            for i, e in self.exps:
                if e > 0:
                    num *= self._pn[i] ** e
                else:
                    den *= self._pn[i] ** -e
            self._norm = Fraction(num, den)
        return self._norm

    def _make(self, d: dict) -> "Ideal":
        return Ideal(d.items(), self._pn)

    def val(self, pid: int) -> int:
        for i, e in self.exps:
            if i == pid:
                return e
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.exps)

    def __mul__(self, other: "Ideal") -> "Ideal":
        d = dict(self.exps)
        for i, e in other.exps:
            d[i] = d.get(i, 0) + e
        return self._make(d)

    def __pow__(self, k: int) -> "Ideal":
        return self._make({i: e * k for i, e in self.exps})

    def inverse(self) -> "Ideal":
        return self ** -1

    def __truediv__(self, other: "Ideal") -> "Ideal":
        return self * other.inverse()

    def divide_exact(self, other: "Ideal") -> "Ideal":
        if not other.divides(self):
            raise FieldError(f"{other} does not divide {self}")
        return self / other

    def is_integral(self) -> bool:
        return all(e > 0 for _, e in self.exps)

    def is_unit(self) -> bool:
        return not self.exps

    def divides(self, other: "Ideal") -> bool:
        """self | other, i.e. other/self is integral."""
        b = dict(other.exps)
        for i, e in self.exps:
            if b.pop(i, 0) < e:
                return False
        return all(e > 0 for e in b.values())

    def gcd(self, other: "Ideal") -> "Ideal":
        a, b = dict(self.exps), dict(other.exps)
        return self._make({i: min(a.get(i, 0), b.get(i, 0)) for i in set(a) | set(b)})

    def coprime_to(self, other: "Ideal") -> bool:
        a = {i for i, _ in other.exps}
        return not any(i in a for i, _ in self.exps)

    def part_at(self, pids) -> "Ideal":
        s = set(pids)
        return self._make({i: e for i, e in self.exps if i in s})

    def prime_ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.exps)

    def divisors(self) -> Iterator["Ideal"]:
        if not self.is_integral():
            raise FieldError("divisors of a non-integral ideal")
        ids = [i for i, _ in self.exps]
        for es in product(*(range(e + 1) for _, e in self.exps)):
            yield Ideal(zip(ids, es), self._pn)

    def sort_key(self):
        return (self.norm, self.exps)

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.exps == other.exps

    def __hash__(self):
        return self._h

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return f"Ideal({self.exps}, N={self.norm})"


@dataclass(frozen=True)
class ConvexCombination:
    alpha: object
    beta: object
    boundary: bool = False


class BaseField:
    kind: str
    degree: int
    discriminant: int
    prime_bound: int
    primes: tuple[PrimeIdealF, ...]

    def _finish_tables(self, primes: list[PrimeIdealF]) -> None:
        self.primes = tuple(primes)
        self.prime_norms = tuple(P.norm for P in primes)
        self._by_label = {P.label: P for P in primes}
        self._above: dict[int, list[PrimeIdealF]] = {}
        for P in primes:
            self._above.setdefault(P.p, []).append(P)
        self._norm_list = [P.norm for P in primes]
        self.unit_ideal = Ideal((), self.prime_norms)
        self._ideals_cache: dict[int, tuple[Ideal, ...]] = {}

    # -- prime tables --
    def enumerate_primes(self, bound: int) -> list[PrimeIdealF]:
        if bound < 2:
            raise FieldError("bound must be at least 2")
        if bound > self.prime_bound:
            raise PrimeTableExhausted(f"bound {bound} exceeds prime table bound {self.prime_bound}")
        return list(self.primes[:bisect.bisect_right(self._norm_list, bound)])

    def prime(self, label: str) -> PrimeIdealF:
        try:
            return self._by_label[label]
        except KeyError:
            raise FieldError(f"unknown prime label {label!r}") from None

    def primes_above(self, ell: int) -> list[PrimeIdealF]:
        if ell not in self._above:
            raise PrimeTableExhausted(f"no table entry above {ell}")
        return list(self._above[ell])

    def ideal(self, exps: dict) -> Ideal:
        """Ideal from {PrimeIdealF or id: exponent}."""
        out = {}
        for k, e in exps.items():
            i = k.id if isinstance(k, PrimeIdealF) else int(k)
            if not 0 <= i < len(self.primes):
                raise PrimeTableExhausted(f"prime index {i} outside table")
            out[i] = out.get(i, 0) + e
        return Ideal(out.items(), self.prime_norms)

    def prime_ideal(self, P: PrimeIdealF) -> Ideal:
        return Ideal(((P.id, 1),), self.prime_norms)

    def ideal_of_rational(self, ell_power: dict[int, int]) -> Ideal:
        """Extension to O of the rational ideal prod ell^e."""
        out = {}
        for ell, k in ell_power.items():
            for P in self.primes_above(ell):
                out[P.id] = out.get(P.id, 0) + P.e * k
        return Ideal(out.items(), self.prime_norms)

    # -- ideal enumeration --
    def ideals_up_to(self, bound: int) -> tuple[Ideal, ...]:
        """All integral ideals of norm <= bound in canonical order."""
        bound = int(bound)
        if bound in self._ideals_cache:
            return self._ideals_cache[bound]
        if bound > self.prime_bound:
            raise PrimeTableExhausted(f"ideal bound {bound} exceeds prime table bound {self.prime_bound}")
        ps = self.enumerate_primes(max(bound, 2)) if bound >= 2 else []
        found: list[tuple[int, tuple]] = []

        def walk(start: int, norm: int, exps: list):
            found.append((norm, tuple(exps)))
            for j in range(start, len(ps)):
                P = ps[j]
                n, e = norm * P.norm, 1
                if n > bound:
                    break
                while n <= bound:
                    walk(j + 1, n, exps + [(P.id, e)])
                    n *= P.norm
                    e += 1

        if bound >= 1:
            walk(0, 1, [])
        out = sorted((Ideal(ex, self.prime_norms) for _, ex in found), key=Ideal.sort_key)
        self._ideals_cache[bound] = tuple(out)
        return self._ideals_cache[bound]

    def enumerate_integral_ideals(self, bound: int) -> Iterator[Ideal]:
        return iter(self.ideals_up_to(bound))

    def ideal_label(self, I: Ideal) -> str:
        if I.is_unit():
            return "1"
        return "*".join(self.primes[i].label + (f"^{e}" if e != 1 else "") for i, e in I.exps)

    def parse_ideal(self, text: str) -> Ideal:
        text = text.strip()
        if text == "1":
            return self.unit_ideal
        exps = {}
        for part in text.split("*"):
            lab, _, e = part.partition("^")
            P = self.prime(lab)
            exps[P.id] = exps.get(P.id, 0) + (int(e) if e else 1)
        return self.ideal(exps)

    # -- elements --
    def generator(self, I: Ideal):
        """A generator of I (product of the stored prime generators)."""
        g = self.one()
        for i, e in I.exps:
            g = g * self.primes[i].generator ** e
        return g

    def hilbert_symbol(self, P: PrimeIdealF, x, y) -> int:
        """Local quadratic Hilbert symbol (x, y)_P for odd residue characteristic."""
        if P.p == 2:
            raise FieldError("Hilbert symbol at residue characteristic 2 is not supported")
        a, b = self.valuation(P, x), self.valuation(P, y)
        u = x / P.generator ** a if a else x
        w = y / P.generator ** b if b else y
        s = 1
        if (a * b) % 2:
            s *= self.unit_character(P, self.element(-1))
        if b % 2:
            s *= self.unit_character(P, u)
        if a % 2:
            s *= self.unit_character(P, w)
        return s

    def convex_lattice_points(self, I_inv: Ideal, include_boundary: bool = False) -> list[ConvexCombination]:
        I = I_inv.inverse()
        if not I.is_integral():
            raise FieldError("lattice must be the inverse of an integral ideal (1 must lie in it)")
        pts = self._interior_points(I)
        if include_boundary:
            pts = [ConvexCombination(self.zero(), self.one(), True)] + pts + \
                  [ConvexCombination(self.one(), self.zero(), True)]
        return pts

    def ideal_times(self, x, I: Ideal) -> Ideal:
        return self.ideal_of(x) * I


class RationalField(BaseField):
    kind = "Rational"
    degree = 1
    discriminant = 1

    def __init__(self, prime_bound: int = 50000):
        if prime_bound < 2:
            raise FieldError("prime bound must be at least 2")
        self.prime_bound = prime_bound
        self.d = None
        spf = list(range(prime_bound + 1))
        for i in range(2, isqrt(prime_bound) + 1):
            if spf[i] == i:
                for j in range(i * i, prime_bound + 1, i):
                    if spf[j] == j:
                        spf[j] = i
        self._spf = spf
        primes = []
        for ell in range(2, prime_bound + 1):
            if spf[ell] == ell:
                primes.append(PrimeIdealF(len(primes), ell, 1, 1, ell, Fraction(ell), str(ell), 0))
        self._finish_tables(primes)
        self._pid = {P.p: P.id for P in primes}
        self._int_ideal = lru_cache(maxsize=1 << 16)(self._int_ideal_uncached)

    def spec(self) -> dict:
        return {"field": "Q", "prime_bound": self.prime_bound}

    def name(self) -> str:
        return "Q"

    def one(self):
        return Fraction(1)

    def zero(self):
        return Fraction(0)

    def element(self, x):
        return Fraction(x)

    def factor_int(self, n: int) -> dict[int, int]:
        n = abs(int(n))
        if n == 0:
            raise FieldError("cannot factor 0")
        out: dict[int, int] = {}
        if n > self.prime_bound:
            for P in self.primes:
                ell = P.p
                if ell * ell > n:
                    break
                while n % ell == 0:
                    out[ell] = out.get(ell, 0) + 1
                    n //= ell
                if n <= self.prime_bound:
                    break
            if n > self.prime_bound:
                raise PrimeTableExhausted(f"prime factor of {n} beyond table bound {self.prime_bound}")
        while n > 1:
            ell = self._spf[n]
            out[ell] = out.get(ell, 0) + 1
            n //= ell
        return out

    def _int_ideal_uncached(self, n: int) -> Ideal:
        return Ideal(((self._pid[ell], e) for ell, e in self.factor_int(n).items()), self.prime_norms)

    def int_ideal(self, n: int) -> Ideal:
        return self._int_ideal(abs(int(n)))

    def ideal_of(self, x) -> Ideal:
        x = Fraction(x)
        if x == 0:
            raise FieldError("ideal of zero")
        if x.denominator == 1:
            return self._int_ideal(abs(x.numerator))
        return self._int_ideal(abs(x.numerator)) / self._int_ideal(x.denominator)

    def valuation(self, P: PrimeIdealF, x) -> int:
        x = Fraction(x)
        if x == 0:
            raise FieldError("valuation of zero")
        v, n, d = 0, abs(x.numerator), x.denominator
        while n % P.p == 0:
            n //= P.p
            v += 1
        while d % P.p == 0:
            d //= P.p
            v -= 1
        return v

    def unit_character(self, P: PrimeIdealF, u) -> int:
        u = Fraction(u)
        if self.valuation(P, u) != 0:
            raise FieldError(f"{u} is not a unit at {P}")
        if P.p == 2:
            raise FieldError("quadratic residue character at 2")
        return int(legendre_symbol(u.numerator * pow(u.denominator, -1, P.p) % P.p, P.p))

    def is_totally_positive(self, x) -> bool:
        return Fraction(x) > 0

    def signs(self, x) -> tuple[int, ...]:
        return (_sgn(Fraction(x)),)

    def norm(self, x) -> Fraction:
        return Fraction(x)

    def is_integral(self, x) -> bool:
        return Fraction(x).denominator == 1

    def _interior_points(self, I: Ideal) -> list[ConvexCombination]:
        m = int(I.norm)
        return [ConvexCombination(Fraction(k, m), Fraction(m - k, m)) for k in range(1, m)]

    def format_element(self, x) -> str:
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}"


class RealQuadraticField(BaseField):
    """F = Q(sqrt d), d squarefree, narrow class number one."""

    kind = "RealQuadratic"
    degree = 2

    def __init__(self, d: int, prime_bound: int = 2000):
        if d < 2 or any(d % (q * q) == 0 for q in range(2, isqrt(d) + 1)):
            raise FieldError(f"d={d} must be a squarefree integer > 1")
        if prime_bound < 2:
            raise FieldError("prime bound must be at least 2")
        self.d = d
        self.prime_bound = prime_bound
        if d % 4 == 1:
            self.discriminant = d
            self._t, self._n0 = 1, (1 - d) // 4          # omega = (1+sqrt d)/2
            self.omega = QuadNumber(Fraction(1, 2), Fraction(1, 2), d)
        else:
            self.discriminant = 4 * d
            self._t, self._n0 = 0, -d                    # omega = sqrt d
            self.omega = QuadNumber(0, 1, d)
        self.fundamental_unit = self._find_fundamental_unit()
        if self.fundamental_unit.norm() != -1:
            raise FieldError(f"Q(sqrt {d}) has no unit of norm -1, narrow class number is not 1")
        primes = self._build_primes()
        self._finish_tables(primes)
        # class number one: every prime below the Minkowski bound must be principal
        for ell in primerange(2, isqrt(self.discriminant // 4) + 2):
            if ell <= prime_bound:
                self.primes_above(ell)
        self.narrow_class_number = 1
        self._ideal_of_cache: dict = {}

    def spec(self) -> dict:
        return {"field": "Q(sqrt D)", "D": self.d, "prime_bound": self.prime_bound}

    def name(self) -> str:
        return f"Q(sqrt{self.d})"

    def one(self):
        return QuadNumber(1, 0, self.d)

    def zero(self):
        return QuadNumber(0, 0, self.d)

    def element(self, a, b=0) -> QuadNumber:
        """a + b*omega for integral-basis coordinates a, b."""
        if isinstance(a, QuadNumber):
            return a
        return QuadNumber(a, 0, self.d) + self.omega * Fraction(b)

    def coords(self, x) -> tuple[Fraction, Fraction]:
        """Coordinates of x in the basis (1, omega)."""
        x = self._q(x)
        if self._t:
            return x.a - x.b, 2 * x.b
        return x.a, x.b

    def _q(self, x) -> QuadNumber:
        if isinstance(x, QuadNumber):
            return x
        return QuadNumber(x, 0, self.d)

    def is_integral(self, x) -> bool:
        u, v = self.coords(x)
        return u.denominator == 1 and v.denominator == 1

    def norm(self, x) -> Fraction:
        return self._q(x).norm()

    def signs(self, x) -> tuple[int, int]:
        return self._q(x).signs()

    def is_totally_positive(self, x) -> bool:
        return self.signs(x) == (1, 1)

    def _norm_coords(self, u: int, v: int) -> int:
        return u * u + self._t * u * v + self._n0 * v * v

    def _find_fundamental_unit(self) -> QuadNumber:
        D = self.discriminant
        for v in range(1, 10 ** 7):
            for s in (-4, 4):
                disc = v * v * D + s
                r = isqrt(disc) if disc >= 0 else -1
                if r >= 0 and r * r == disc and (r - self._t * v) % 2 == 0:
                    u = (r - self._t * v) // 2
                    eps = self.element(u, v)
                    if eps.signs()[0] < 0:
                        eps = -eps
                    if (eps - 1).signs()[0] < 0:
                        eps = eps.inverse()
                    return eps
        raise FieldError("fundamental unit search exhausted")

    def _roots_mod(self, ell: int) -> list[int]:
        # roots of the minimal polynomial of omega modulo ell
        if ell == 2:
            return [r for r in range(2) if (r * r - self._t * r + self._n0) % 2 == 0]
        if self._t:
            s = sqrt_mod(self.d % ell, ell, all_roots=True) if self.d % ell else [0]
            inv2 = pow(2, -1, ell)
            return sorted({(1 + r) * inv2 % ell for r in s})
        s = sqrt_mod(self.d % ell, ell, all_roots=True) if self.d % ell else [0]
        return sorted(set(int(r) % ell for r in s))

    def _build_primes(self) -> list[PrimeIdealF]:
        rows = []
        for ell in primerange(2, self.prime_bound + 1):
            roots = self._roots_mod(ell)
            if len(roots) == 2:
                gens = self._split_generators(ell, roots)
                for k, r in enumerate(roots):
                    rows.append((ell, ell, 1, 1, gens[r], f"{ell}{'ab'[k]}", r))
            elif len(roots) == 1:
                g = self._degree_one_generator(ell, roots[0])
                rows.append((ell, ell, 1, 2, g, f"{ell}", roots[0]))
            elif ell * ell <= self.prime_bound:
                rows.append((ell * ell, ell, 2, 1, self.element(ell), f"{ell * ell}", None))
        rows.sort(key=lambda r: (r[0], r[1], r[6] if r[6] is not None else -1))
        return [PrimeIdealF(i, r[1], r[2], r[3], r[0], r[4], r[5], r[6]) for i, r in enumerate(rows)]

    def _generator_candidates(self, ell: int) -> Iterator[tuple[int, int]]:
        eps = self.fundamental_unit
        e_up = int(abs(eps.a) + abs(eps.b) * (isqrt(self.d) + 1)) + 1
        vmax = isqrt(4 * ell * e_up) + 2
        D = self.discriminant
        for v in range(0, vmax + 1):
            for s in (4 * ell, -4 * ell):
                disc = v * v * D + s
                if disc < 0:
                    continue
                r = isqrt(disc)
                if r * r != disc:
                    continue
                for rr in {r, -r}:
                    if (rr - self._t * v) % 2 == 0:
                        yield (rr - self._t * v) // 2, v

    def _degree_one_generator(self, ell: int, root: int) -> QuadNumber:
        for u, v in self._generator_candidates(ell):
            if abs(self._norm_coords(u, v)) == ell and (u + v * root) % ell == 0:
                return self._make_totally_positive(self.element(u, v))
        raise FieldError(f"prime above {ell} is not principal")

    def _split_generators(self, ell: int, roots: list[int]) -> dict[int, QuadNumber]:
        out = {}
        for r in roots:
            out[r] = self._degree_one_generator(ell, r)
        return out

    def _make_totally_positive(self, x: QuadNumber) -> QuadNumber:
        eps = self.fundamental_unit
        for c in (x, -x, x * eps, -(x * eps)):
            if c.signs() == (1, 1):
                return c
        raise FieldError("no totally positive associate, narrow class number is not 1")

    def valuation(self, P: PrimeIdealF, x) -> int:
        x = self._q(x)
        if not x:
            raise FieldError("valuation of zero")
        u, v = self.coords(x)
        n = u.denominator * v.denominator // gcd(u.denominator, v.denominator)
        y = x * n
        k = 0
        nn = n
        while nn % P.p == 0:
            nn //= P.p
            k += 1
        return self._int_valuation(P, y) - P.e * k

    def _int_valuation(self, P: PrimeIdealF, y: QuadNumber) -> int:
        pi_bar = P.generator.conj()
        npi = P.generator.norm()
        k = 0
        while True:
            z = y * pi_bar / npi
            if not self.is_integral(z):
                return k
            y = z
            k += 1

    def ideal_of(self, x) -> Ideal:
        x = self._q(x)
        if x in self._ideal_of_cache:
            return self._ideal_of_cache[x]
        n = x.norm()
        if n == 0:
            raise FieldError("ideal of zero")
        ells = set(factorint(abs(n.numerator))) | set(factorint(n.denominator))
        if any(ell > self.prime_bound for ell in ells):
            raise PrimeTableExhausted(f"factorization of {x} needs primes beyond the table")
        exps = {}
        for ell in ells:
            for P in self.primes_above(ell):
                e = self.valuation(P, x)
                if e:
                    exps[P.id] = e
        I = Ideal(exps.items(), self.prime_norms)
        if I.norm != abs(n):
            raise PrimeTableExhausted(f"factorization of {x} needs primes beyond the table")
        if len(self._ideal_of_cache) < 1 << 18:
            self._ideal_of_cache[x] = I
        return I

    def _unit_residue_char(self, P: PrimeIdealF, y: QuadNumber) -> int:
        # y integral and a P-unit
        u, v = self.coords(y)
        u, v = int(u), int(v)
        if P.f == 1:
            r = (u + v * P.root) % P.p
            return int(legendre_symbol(r, P.p))
        return int(legendre_symbol(self._norm_coords(u, v) % P.p, P.p))

    def unit_character(self, P: PrimeIdealF, x) -> int:
        """Quadratic residue character of the residue field at P on a P-unit."""
        x = self._q(x)
        if P.p == 2:
            raise FieldError("quadratic residue character at 2")
        if self.valuation(P, x) != 0:
            raise FieldError(f"{x} is not a unit at {P}")
        u, v = self.coords(x)
        n = u.denominator * v.denominator // gcd(u.denominator, v.denominator)
        y = x * n
        k = self.valuation(P, self._q(n))
        ny = self._q(n)
        if k:
            g = P.generator ** k
            y = y / g
            ny = ny / g
        return self._unit_residue_char(P, y) * self._unit_residue_char(P, ny)

    def residues_mod(self, m: int) -> list[QuadNumber]:
        return [self.element(a, b) for a in range(m) for b in range(m)]

    def _interior_points(self, I: Ideal) -> list[ConvexCombination]:
        if I.is_unit():
            gamma = self.one()
        else:
            gamma = self.generator(I)
        n = abs(int(gamma.norm()))
        gb = gamma.conj()
        u1, v1 = (int(c) for c in self.coords(gb))
        u2, v2 = (int(c) for c in self.coords(gb * self.omega))
        g, s, t = _xgcd(v1, v2)
        B = s * u1 + t * u2
        C = g
        A = abs((v2 // g) * u1 - (v1 // g) * u2)
        B %= A
        D = self.discriminant
        out = []
        jmax = isqrt(max(n * n - 1, 0) // (C * C * D)) if C else 0
        for j in range(-jmax, jmax + 1):
            v = j * C
            base = B * j
            # 0 < 2u + t v < 2n from the trace condition
            lo = -self._t * v // 2 - 1
            hi = n - self._t * v // 2 + 1
            i0 = -((base - lo) // A)
            i = i0
            while True:
                u = base + i * A
                if u > hi:
                    break
                if u >= lo:
                    x = self.element(u, v)
                    if x.signs() == (1, 1) and (n - x).signs() == (1, 1):
                        alpha = x / n
                        out.append(ConvexCombination(alpha, 1 - alpha))
                i += 1
        return out

    def format_element(self, x) -> str:
        a, b = self.coords(x)
        return f"{a.numerator}/{a.denominator},{b.numerator}/{b.denominator}"


@lru_cache(maxsize=None)
def make_field(kind: str, d: int | None = None, prime_bound: int | None = None) -> BaseField:
    """Cached field constructor from a config-style spec."""
    if kind in ("Q", "Rational"):
        return RationalField(prime_bound or 50000)
    if kind in ("Q(sqrt D)", "RealQuadratic"):
        if d is None:
            raise FieldError("real quadratic field needs D")
        return RealQuadraticField(int(d), prime_bound or 2000)
    raise FieldError(f"unsupported field kind {kind!r}")


def field_from_spec(spec: dict) -> BaseField:
    kind = spec.get("field")
    if kind not in ("Q", "Q(sqrt D)"):
        raise FieldError(f"unsupported field spec {spec!r}")
    return make_field(kind, spec.get("D"), spec.get("prime_bound"))


def convex_lattice_points(F: BaseField, I_inv: Ideal, include_boundary: bool = False) -> list[ConvexCombination]:
    return F.convex_lattice_points(I_inv, include_boundary)


def enumerate_primes(F: BaseField, bound: int) -> list[PrimeIdealF]:
    return F.enumerate_primes(bound)


def enumerate_integral_ideals(F: BaseField, bound: int) -> Iterator[Ideal]:
    return F.enumerate_integral_ideals(bound)
