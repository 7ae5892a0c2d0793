"""Theta series of E-characters and Eisenstein series of F-characters."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .basefield import FieldError, Ideal, RationalField
from .characters import FCharacter
from .cmext import CMExtension, EHeckeCharacter, class_number
from .qexp import QExpansion


class ConstantTermError(ValueError):
    pass


@dataclass
class ThetaSpec:
    E: CMExtension
    chi: EHeckeCharacter
    bound: int


def theta_coeffs(spec: ThetaSpec) -> QExpansion:
    """a(I) = sum over O_E-ideals J of norm I of chi_[N](J).

    The constant term vanishes for a nontrivial modulus.  For modulus (1) it
    is omitted: the coefficients are still available, the constant is not.
    """
    E, chi = spec.E, spec.chi
    F = E.base
    mod = chi.modulus

    if chi.is_trivial:
        def coeff(I: Ideal):
            return Fraction(E.r_count(I)) if I.coprime_to(mod) else Fraction(0)
    else:
        def coeff(I: Ideal):
            total = Fraction(0)
            for J in E.list_ideals_of_norm(I):
                total = total + chi(J)
            return total

    a0 = 0 if not mod.is_unit() else None
    return QExpansion.from_function(F, spec.bound, coeff, a0, weight=1, level=E.D * mod,
                                    character="theta:" + chi.label())


# -- Eisenstein series -----------------------------------------------------------------

COMPUTED, SUPPLIED, OMITTED = "computed", "supplied", "omitted"


@dataclass
class EisSpec:
    chi: FCharacter
    weight: int
    level: Ideal
    bound: int
    constant: str = OMITTED
    supplied: object = None


def sigma(chi: FCharacter, level: Ideal, k: int, I: Ideal):
    """sigma_{chi_[N], k-1}(I)."""
    total = Fraction(0)
    for J in I.divisors():
        c = chi(J, level)
        if c != 0:
            total = total + c * Fraction(int(J.norm)) ** (k - 1)
    return total


def eis_coeffs(spec: EisSpec) -> QExpansion:
    chi, k, N = spec.chi, spec.weight, spec.level
    F = chi.field
    if not chi.conductor.divides(N):
        raise FieldError("character conductor must divide the level")
    if spec.constant == COMPUTED:
        if not isinstance(F, RationalField) or k != 1:
            raise ConstantTermError("computed constant terms need F = Q and weight 1")
        if chi.conductor.is_unit():
            raise ConstantTermError("everywhere unramified character at weight 1: supply the constant term")
        a0 = Fraction(1, 2) * l_value_imprimitive(chi, N)
    elif spec.constant == SUPPLIED:
        if spec.supplied is None:
            raise ConstantTermError("supplied constant term is missing")
        a0 = spec.supplied
    elif spec.constant == OMITTED:
        a0 = None
    else:
        raise ConstantTermError(f"unknown constant-term source {spec.constant!r}")
    return QExpansion.from_function(F, spec.bound, lambda I: sigma(chi, N, k, I), a0,
                                    weight=k, level=N, character=chi.label)


def l_value_at_zero(chi) -> object:
    """L(0, chi) = -B_{1,chi} for a primitive Dirichlet character over Q."""
    if not isinstance(chi.field, RationalField):
        raise FieldError("L-values at 0 only over Q")
    f = chi.modulus_int
    if f == 1:
        # zeta(0)
        return Fraction(-1, 2)
    minus_one = chi.value_int(f - 1)
    if minus_one == 1:
        return Fraction(0)  # even character
    total = Fraction(0)
    for a in range(1, f):
        v = chi.value_int(a)
        if v != 0:
            total = total + v * Fraction(a)
    return -(total * Fraction(1, f))


def l_value_imprimitive(chi, N: Ideal):
    """L_N(0, chi): the Euler factors (1 - chi(l)) at l | N removed."""
    val = l_value_at_zero(chi)
    F = chi.field
    for i, _ in N.exps:
        P = F.primes[i]
        if not F.prime_ideal(P).divides(chi.conductor):
            val = val * (1 - chi.value_int(P.p))
    return val


def class_number_formula_value(disc: int) -> Fraction:
    """2h/w for an imaginary quadratic discriminant."""
    w = 6 if disc == -3 else 4 if disc == -4 else 2
    return Fraction(2 * class_number(disc), w)
