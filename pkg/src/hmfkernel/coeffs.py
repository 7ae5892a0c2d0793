"""Exact coefficient values.

Four tags are supported: Rational (``fractions.Fraction``), Cyclotomic,
FormalLog and PAdic.  Rationals embed into every other tag; any other
mixture raises ``TagMismatch``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Mapping, Union

from sympy import Poly, Symbol, cyclotomic_poly


class TagMismatch(TypeError):
    pass


def _frac(x) -> Fraction | None:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    return None


# -- cyclotomic -------------------------------------------------------------

@lru_cache(maxsize=None)
def _phi_coeffs(m: int) -> tuple[int, ...]:
    # low-to-high coefficients of the m-th cyclotomic polynomial
    x = Symbol("x")
    return tuple(int(c) for c in reversed(Poly(cyclotomic_poly(m, x), x).all_coeffs()))


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Coordinates of x^j mod Phi_m for 0 <= j < m."""
    phi = _phi_coeffs(m)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by x, reduce the overflow with the monic relation
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return tuple(rows)


def _reduce_poly(m: int, poly: list) -> tuple[Fraction, ...]:
    table = _power_table(m)
    deg = len(table[0])
    out = [Fraction(0)] * deg
    for j, c in enumerate(poly):
        if c:
            row = table[j % m]
            for i in range(deg):
                if row[i]:
                    out[i] += c * row[i]
    return tuple(out)


class Cyclotomic:
    """Element of Q(zeta_m) in the power basis modulo Phi_m."""

    __slots__ = ("m", "coords")

    def __init__(self, m: int, coords):
        if m < 1:
            raise ValueError("order must be positive")
        deg = len(_phi_coeffs(m)) - 1
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != deg:
            coords = _reduce_poly(m, list(coords))
        self.m = m
        self.coords = coords

    @classmethod
    def root_of_unity(cls, k: int, m: int) -> "Cyclotomic":
        k %= m
        poly = [0] * (k + 1)
        poly[k] = 1
        return cls(m, _reduce_poly(m, poly))

    def lift(self, M: int) -> "Cyclotomic":
        if M % self.m:
            raise ValueError(f"cannot lift Q(zeta_{self.m}) into Q(zeta_{M})")
        step = M // self.m
        poly = [Fraction(0)] * (step * len(self.coords))
        for i, c in enumerate(self.coords):
            poly[i * step] = c
        return Cyclotomic(M, _reduce_poly(M, poly))

    def rational_value(self) -> Fraction | None:
        if all(c == 0 for c in self.coords[1:]):
            return self.coords[0]
        return None

    def simplify(self):
        r = self.rational_value()
        return r if r is not None else self

    def _common(self, other):
        if isinstance(other, Cyclotomic):
            M = self.m * other.m // gcd(self.m, other.m)
            return self.lift(M), other.lift(M)
        r = _frac(other)
        if r is None:
            raise TagMismatch(f"cannot combine Cyclotomic with {type(other).__name__}")
        return self, Cyclotomic(self.m, [r] + [0] * (len(self.coords) - 1))

    def __add__(self, other):
        a, b = self._common(other)
        return Cyclotomic(a.m, [x + y for x, y in zip(a.coords, b.coords)]).simplify()

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.m, [-c for c in self.coords])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        r = _frac(other)
        if r is not None:
            return Cyclotomic(self.m, [c * r for c in self.coords]).simplify()
        a, b = self._common(other)
        poly = [Fraction(0)] * (2 * len(a.coords))
        for i, x in enumerate(a.coords):
            if x:
                for j, y in enumerate(b.coords):
                    if y:
                        poly[i + j] += x * y
        return Cyclotomic(a.m, _reduce_poly(a.m, poly)).simplify()

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of cyclotomic values are not supported")
        out = Fraction(1)
        for _ in range(n):
            out = self * out
        return out

    def conjugate(self) -> "Cyclotomic":
        # zeta -> zeta^{-1}
        poly = [Fraction(0)] * self.m
        for i, c in enumerate(self.coords):
            poly[(-i) % self.m] += c
        return Cyclotomic(self.m, _reduce_poly(self.m, poly))

    def __eq__(self, other):
        try:
            a, b = self._common(other)
        except TagMismatch:
            return NotImplemented
        return a.coords == b.coords

    __hash__ = None  # equality spans different orders m

    def __repr__(self):
        return f"Cyclotomic({self.m}, {[str(c) for c in self.coords]})"


# -- formal logarithms --------------------------------------------------------

class FormalLog:
    """Finite rational combination of formal symbols log|q|.

    Keys are prime labels.  Only additive structure and rational scaling.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[str, Fraction] | None = None):
        clean = {}
        for k, v in (terms or {}).items():
            v = Fraction(v)
            if v:
                clean[k] = v
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def basis(cls, label: str, coeff=1) -> "FormalLog":
        return cls({label: Fraction(coeff)})

    def _other(self, other) -> "FormalLog":
        if isinstance(other, FormalLog):
            return other
        r = _frac(other)
        if r == 0:
            return FormalLog()
        raise TagMismatch("only FormalLog or 0 may be added to FormalLog")

    def __add__(self, other):
        o = self._other(other)
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t.get(k, 0) + v
        return FormalLog(t)

    __radd__ = __add__

    def __neg__(self):
        return FormalLog({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        r = _frac(other)
        if r is None:
            raise TagMismatch("FormalLog can only be scaled by rationals")
        return FormalLog({k: v * r for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            o = self._other(other)
        except TagMismatch:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        inner = ", ".join(f"{k}: {v}" for k, v in self.terms.items())
        return f"FormalLog({{{inner}}})"


# -- truncated p-adic integers -----------------------------------------------

class PAdic:
    """Residue modulo p^M."""

    __slots__ = ("p", "M", "residue")

    def __init__(self, p: int, M: int, residue):
        if M < 1:
            raise ValueError("precision must be at least 1")
        mod = p ** M
        r = _frac(residue)
        if r is None:
            raise TagMismatch("PAdic residue must be rational")
        if r.denominator % p == 0:
            raise ValueError(f"{r} is not {p}-integral")
        self.p = p
        self.M = M
        self.residue = r.numerator * pow(r.denominator, -1, mod) % mod

    @property
    def modulus(self) -> int:
        return self.p ** self.M

    def _other(self, other) -> "PAdic":
        if isinstance(other, PAdic):
            if (other.p, other.M) != (self.p, self.M):
                raise TagMismatch("p-adic precision mismatch")
            return other
        r = _frac(other)
        if r is None:
            raise TagMismatch(f"cannot combine PAdic with {type(other).__name__}")
        return PAdic(self.p, self.M, r)

    def __add__(self, other):
        return PAdic(self.p, self.M, self.residue + self._other(other).residue)

    __radd__ = __add__

    def __neg__(self):
        return PAdic(self.p, self.M, -self.residue)

    def __sub__(self, other):
        return PAdic(self.p, self.M, self.residue - self._other(other).residue)

    def __rsub__(self, other):
        return PAdic(self.p, self.M, self._other(other).residue - self.residue)

    def __mul__(self, other):
        return PAdic(self.p, self.M, self.residue * self._other(other).residue)

    __rmul__ = __mul__

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def inverse(self) -> "PAdic":
        if not self.is_unit():
            raise ZeroDivisionError("not a p-adic unit")
        return PAdic(self.p, self.M, pow(self.residue, -1, self.modulus))

    def __truediv__(self, other):
        return self * self._other(other).inverse()

    def __rtruediv__(self, other):
        return self._other(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return PAdic(self.p, self.M, pow(self.residue, n, self.modulus))

    def __eq__(self, other):
        try:
            o = self._other(other)
        except (TagMismatch, ValueError):
            return NotImplemented
        return self.residue == o.residue

    def __hash__(self):
        return hash((self.p, self.M, self.residue))

    def __repr__(self):
        return f"PAdic({self.p}^{self.M}: {self.residue})"


Value = Union[Fraction, Cyclotomic, FormalLog, PAdic]


def coerce(x) -> Value:
    if isinstance(x, (Cyclotomic, FormalLog, PAdic)):
        return x
    r = _frac(x)
    if r is None:
        raise TagMismatch(f"unsupported coefficient type {type(x).__name__}")
    return r


def tag_of(x) -> str:
    if isinstance(x, Cyclotomic):
        return "cyclotomic"
    if isinstance(x, FormalLog):
        return "formallog"
    if isinstance(x, PAdic):
        return "padic"
    if _frac(x) is not None:
        return "rational"
    raise TagMismatch(f"unsupported coefficient type {type(x).__name__}")


def is_zero(x) -> bool:
    if isinstance(x, FormalLog):
        return not x.terms
    if isinstance(x, PAdic):
        return x.residue == 0
    return x == 0


def to_padic(x, p: int, M: int) -> PAdic:
    if isinstance(x, PAdic):
        if (x.p, x.M) != (p, M):
            raise TagMismatch("p-adic precision mismatch")
        return x
    r = _frac(x)
    if r is None:
        raise TagMismatch("only rationals reduce to p-adic residues")
    return PAdic(p, M, r)
