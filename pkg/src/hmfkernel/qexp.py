"""Truncated q-expansions indexed by integral ideals."""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Mapping

from .basefield import BaseField, Ideal, field_from_spec
from .coeffs import Cyclotomic, FormalLog, PAdic, TagMismatch, coerce, tag_of

FORMAT_VERSION = 1
HEADER = "hmfkernel-qexp"


class TruncationError(KeyError):
    pass


class QExpansionError(ValueError):
    pass


_TAG_RANK = {"rational": 0, "cyclotomic": 1, "formallog": 1, "padic": 1}


class QExpansion:
    """a0 + sum a(I) q^I over integral ideals I with N(I) <= bound.

    ``a0`` may be None, meaning the constant term is deliberately omitted;
    reading it then raises.
    """

    __slots__ = ("field", "weight", "level", "character", "bound", "_a0", "coeffs")

    def __init__(self, field: BaseField, bound: int, coeffs: Mapping[Ideal, object], a0=0,
                 weight: int = 2, level: Ideal | None = None, character: str = "trivial",
                 check: bool = True):
        self.field = field
        self.bound = int(bound)
        self.weight = weight
        self.level = level if level is not None else field.unit_ideal
        self.character = character
        self._a0 = None if a0 is None else coerce(a0)
        self.coeffs = {I: coerce(v) for I, v in coeffs.items()}
        if check:
            expected = field.ideals_up_to(self.bound)
            if len(self.coeffs) != len(expected) or any(I not in self.coeffs for I in expected):
                extra = [I for I in self.coeffs if I.norm > self.bound]
                if extra:
                    raise TruncationError(f"coefficient at norm {extra[0].norm} exceeds bound {self.bound}")
                raise QExpansionError("coefficients must be given on exactly the ideals up to the bound")

    @classmethod
    def from_function(cls, field: BaseField, bound: int, fn: Callable[[Ideal], object], a0=0, **meta):
        return cls(field, bound, {I: fn(I) for I in field.ideals_up_to(bound)}, a0, check=False, **meta)

    @classmethod
    def zero(cls, field: BaseField, bound: int, **meta):
        return cls.from_function(field, bound, lambda I: Fraction(0), 0, **meta)

    @classmethod
    def unit(cls, field: BaseField, bound: int, **meta):
        return cls.from_function(field, bound, lambda I: Fraction(0), 1, **meta)

    @property
    def a0(self):
        if self._a0 is None:
            raise QExpansionError("constant term was omitted and cannot be used")
        return self._a0

    @property
    def has_a0(self) -> bool:
        return self._a0 is not None

    def __getitem__(self, I: Ideal):
        if not I.is_integral():
            return Fraction(0)
        try:
            return self.coeffs[I]
        except KeyError:
            if I.norm > self.bound:
                raise TruncationError(f"ideal of norm {I.norm} beyond bound {self.bound}") from None
            raise TruncationError(f"missing coefficient at ideal of norm {I.norm}") from None

    def ideals(self):
        return self.field.ideals_up_to(self.bound)

    def meta(self, **override) -> dict:
        d = dict(weight=self.weight, level=self.level, character=self.character)
        d.update(override)
        return d

    def restrict(self, bound: int) -> "QExpansion":
        if bound > self.bound:
            raise TruncationError("cannot extend a truncated expansion")
        return QExpansion.from_function(self.field, bound, self.__getitem__, self._a0, **self.meta())

    def map(self, fn: Callable, **override) -> "QExpansion":
        a0 = None if self._a0 is None else fn(self._a0)
        return QExpansion.from_function(self.field, self.bound, lambda I: fn(self[I]), a0,
                                        **self.meta(**override))

    def tag(self) -> str:
        tags = {tag_of(v) for v in self.coeffs.values()}
        if self._a0 is not None:
            tags.add(tag_of(self._a0))
        wide = tags - {"rational"}
        if len(wide) > 1:
            raise TagMismatch(f"mixed coefficient tags {sorted(wide)}")
        return wide.pop() if wide else "rational"

    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        return (self.field is other.field and self.bound == other.bound and self._a0 == other._a0
                and all(self.coeffs[I] == other.coeffs[I] for I in self.ideals()))

    __hash__ = None

    def __repr__(self):
        return f"QExpansion({self.field.name()}, bound={self.bound}, weight={self.weight})"


def _same_frame(f: QExpansion, g: QExpansion) -> None:
    if f.field is not g.field:
        raise QExpansionError("expansions over different fields")
    if f.bound != g.bound:
        raise QExpansionError(f"bound mismatch {f.bound} != {g.bound}")


def qexp_add(f: QExpansion, g: QExpansion, **override) -> QExpansion:
    _same_frame(f, g)
    a0 = None if (not f.has_a0 or not g.has_a0) else f.a0 + g.a0
    return QExpansion.from_function(f.field, f.bound, lambda I: f[I] + g[I], a0, **f.meta(**override))


def qexp_sub(f: QExpansion, g: QExpansion, **override) -> QExpansion:
    return qexp_add(f, qexp_scale(-1, g), **override)


def qexp_scale(c, f: QExpansion) -> QExpansion:
    c = coerce(c)
    return f.map(lambda v: c * v)


def qexp_mul(f: QExpansion, g: QExpansion, **override) -> QExpansion:
    if f.field is not g.field:
        raise QExpansionError("expansions over different fields")
    for h in (f, g):
        if h.tag() == "formallog":
            raise TagMismatch("formal-log expansions are never multiplied")
    F = f.field
    bound = min(f.bound, g.bound)
    a0f = f._a0
    a0g = g._a0

    def coeff(I: Ideal):
        total = Fraction(0)
        for pt in F.convex_lattice_points(I.inverse(), include_boundary=True):
            if pt.boundary:
                if pt.alpha == 0:
                    if a0f is None:
                        raise QExpansionError("product rule needs the omitted constant term of the first factor")
                    total = total + a0f * g[I]
                else:
                    if a0g is None:
                        raise QExpansionError("product rule needs the omitted constant term of the second factor")
                    total = total + f[I] * a0g
                continue
            total = total + f[F.ideal_times(pt.alpha, I)] * g[F.ideal_times(pt.beta, I)]
        return total

    a0 = None if (a0f is None or a0g is None) else a0f * a0g
    meta = dict(weight=f.weight + g.weight, level=f.level, character=f.character)
    meta.update(override)
    return QExpansion.from_function(F, bound, coeff, a0, **meta)


# -- serialization -----------------------------------------------------------------

def _fmt_value(v) -> str:
    if isinstance(v, (Fraction, int)):
        v = Fraction(v)
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, Cyclotomic):
        return f"cyc{v.m}:" + ",".join(_fmt_value(c) for c in v.coords)
    if isinstance(v, FormalLog):
        return json.dumps({f"log_{k}": _fmt_value(c) for k, c in v.terms.items()}, sort_keys=True,
                          separators=(",", ":"))
    if isinstance(v, PAdic):
        return f"padic:{v.residue}"
    raise TagMismatch(f"cannot serialize {type(v).__name__}")


def _parse_frac(s: str) -> Fraction:
    num, sep, den = s.partition("/")
    if not sep:
        raise QExpansionError(f"malformed rational {s!r}")
    return Fraction(int(num), int(den))


def _parse_value(s: str, tag: str, padic: tuple[int, int] | None):
    if s.startswith("cyc"):
        m, _, rest = s[3:].partition(":")
        return Cyclotomic(int(m), [_parse_frac(c) for c in rest.split(",")]).simplify()
    if s.startswith("{"):
        d = json.loads(s)
        return FormalLog({k[4:]: _parse_frac(v) for k, v in d.items()})
    if s.startswith("padic:"):
        if padic is None:
            raise QExpansionError("p-adic value in a non-p-adic expansion")
        return PAdic(padic[0], padic[1], int(s[6:]))
    return _parse_frac(s)


def serialize(f: QExpansion) -> str:
    F = f.field
    tag = f.tag()
    tagline = tag
    if tag == "padic":
        v = next(x for x in list(f.coeffs.values()) + [f._a0] if isinstance(x, PAdic))
        tagline = f"padic {v.p} {v.M}"
    lines = [
        f"{HEADER} {FORMAT_VERSION}",
        "field " + json.dumps(F.spec(), sort_keys=True, separators=(",", ":")),
        f"weight {f.weight}",
        f"level {F.ideal_label(f.level)}",
        f"character {f.character}",
        f"bound {f.bound}",
        f"tag {tagline}",
        "a0 " + ("omitted" if f._a0 is None else _fmt_value(f._a0)),
    ]
    for I in f.ideals():
        n = I.norm
        lines.append(f"{n.numerator} {F.ideal_label(I)} {_fmt_value(f.coeffs[I])}")
    return "\n".join(lines) + "\n"


def deserialize(text: str, field: BaseField | None = None) -> QExpansion:
    lines = text.splitlines()
    try:
        head = lines[0].split()
        if head[0] != HEADER:
            raise QExpansionError("not a q-expansion file")
        if int(head[1]) != FORMAT_VERSION:
            raise QExpansionError(f"unsupported format version {head[1]}")
        meta = {}
        keys = ["field", "weight", "level", "character", "bound", "tag", "a0"]
        for k, line in zip(keys, lines[1:8]):
            name, _, rest = line.partition(" ")
            if name != k:
                raise QExpansionError(f"expected header key {k!r}, found {name!r}")
            meta[k] = rest
    except (IndexError, ValueError) as e:
        if isinstance(e, QExpansionError):
            raise
        raise QExpansionError(f"malformed header: {e}") from None
    spec = json.loads(meta["field"])
    F = field if field is not None else field_from_spec(spec)
    # the prime table size is bookkeeping; labels are stable across table sizes
    if {k: v for k, v in F.spec().items() if k != "prime_bound"} != {k: v for k, v in spec.items() if k != "prime_bound"}:
        raise QExpansionError("field in file differs from the supplied field")
    tagparts = meta["tag"].split()
    padic = (int(tagparts[1]), int(tagparts[2])) if tagparts[0] == "padic" else None
    bound = int(meta["bound"])
    coeffs = {}
    for line in lines[8:]:
        if not line.strip():
            continue
        parts = line.split(" ", 2)
        if len(parts) != 3:
            raise QExpansionError(f"malformed record {line!r}")
        I = F.parse_ideal(parts[1])
        if I.norm != int(parts[0]):
            raise QExpansionError(f"record norm {parts[0]} disagrees with ideal {parts[1]}")
        if I.norm > bound:
            raise TruncationError(f"coefficient at norm {I.norm} exceeds bound {bound}")
        if I in coeffs:
            raise QExpansionError(f"duplicate record for {parts[1]}")
        v = _parse_value(parts[2], tagparts[0], padic)
        if isinstance(v, PAdic) and (v.p, v.M) != padic:
            raise QExpansionError("precision mismatch")
        coeffs[I] = v
    a0 = None if meta["a0"] == "omitted" else _parse_value(meta["a0"], tagparts[0], padic)
    return QExpansion(F, bound, coeffs, a0, weight=int(meta["weight"]), level=F.parse_ideal(meta["level"]),
                      character=meta["character"])
