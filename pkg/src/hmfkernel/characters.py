"""Finite-order characters on ideals of the base field F."""
from __future__ import annotations

from fractions import Fraction
from math import gcd

from sympy.functions.combinatorial.numbers import kronecker_symbol

from .basefield import BaseField, FieldError, Ideal, PrimeIdealF, RationalField
from .cmext import CMExtension, root_of_unity


class FCharacter:
    field: BaseField
    conductor: Ideal
    label: str = "chi"

    def value(self, P: PrimeIdealF):
        raise NotImplementedError

    @property
    def is_trivial(self) -> bool:
        return False

    def __call__(self, J: Ideal, modulus: Ideal | None = None):
        """chi_[modulus](J): zero unless J is prime to the modulus (default: conductor)."""
        M = self.conductor if modulus is None else modulus
        if not J.coprime_to(M) or not J.coprime_to(self.conductor):
            return Fraction(0)
        out = Fraction(1)
        for i, e in J.exps:
            v = self.value(self.field.primes[i])
            out = out * (Fraction(v) ** e if isinstance(v, int) else v ** e)
        return out


class TrivialCharacter(FCharacter):
    def __init__(self, F: BaseField):
        self.field = F
        self.conductor = F.unit_ideal
        self.label = "trivial"

    @property
    def is_trivial(self) -> bool:
        return True

    def value(self, P):
        return 1

    def value_int(self, a: int) -> int:
        return 1

    @property
    def modulus_int(self) -> int:
        return 1


class QuadraticCharacter(FCharacter):
    """The character epsilon of a CM extension E/F."""

    def __init__(self, E: CMExtension):
        self.E = E
        self.field = E.base
        self.conductor = E.D
        if isinstance(E.base, RationalField):
            self.label = f"eps[{E.disc}]"
        else:
            self.label = f"eps[{E.base.format_element(E.delta)}]"

    def value(self, P):
        return self.E.eps(P)

    def value_int(self, a: int) -> int:
        if self.E.disc is None:
            raise FieldError("integer values only over Q")
        return int(kronecker_symbol(self.E.disc, a))

    @property
    def modulus_int(self) -> int:
        return abs(self.E.disc)


class DirichletCharacter(FCharacter):
    """Dirichlet character over Q given by exact values k/m on a residue table.

    ``table`` maps each a in (Z/f)^* to a pair (k, m) meaning exp(2 pi i k/m).
    """

    def __init__(self, F: RationalField, f: int, table: dict[int, tuple[int, int]], label: str | None = None):
        if not isinstance(F, RationalField):
            raise FieldError("Dirichlet characters live over Q")
        self.field = F
        self.f = f
        self.table = {a % f: t for a, t in table.items()}
        for a in range(1, f):
            if gcd(a, f) == 1 and a not in self.table:
                raise FieldError(f"missing value at {a} mod {f}")
        for a in self.table:
            for b in self.table:
                ka, ma = self.table[a]
                kb, mb = self.table[b]
                kc, mc = self.table[a * b % f]
                if (Fraction(ka, ma) + Fraction(kb, mb) - Fraction(kc, mc)) % 1:
                    raise FieldError("table is not multiplicative")
        self.conductor = F.int_ideal(f)
        self.label = label or f"dirichlet[{f}]"

    def value_int(self, a: int):
        a %= self.f
        if gcd(a, self.f) != 1:
            return 0
        k, m = self.table[a]
        return root_of_unity(k, m)

    def value(self, P):
        return self.value_int(P.p)

    @property
    def modulus_int(self) -> int:
        return self.f


class KroneckerCharacter(FCharacter):
    """n -> (disc / n) over Q for a fundamental discriminant disc."""

    def __init__(self, F: RationalField, disc: int):
        if not isinstance(F, RationalField):
            raise FieldError("Kronecker characters live over Q")
        if not is_fundamental_discriminant(disc):
            raise FieldError(f"{disc} is not a fundamental discriminant")
        self.field = F
        self.disc = disc
        self.conductor = F.int_ideal(abs(disc))
        self.label = f"kronecker[{disc}]"

    def value_int(self, a: int) -> int:
        return int(kronecker_symbol(self.disc, a))

    def value(self, P):
        return self.value_int(P.p)

    @property
    def modulus_int(self) -> int:
        return abs(self.disc)


def _squarefree(n: int) -> bool:
    n = abs(n)
    q = 2
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 1
    return True


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False
