"""Scenario configuration: a versioned JSON file, validated before any computation.

Keys (all optional unless a command needs them):

    format          1
    field           {"field": "Q"} or {"field": "Q(sqrt D)", "D": 5}
    cm              {"delta": -7, "D": "7"}           delta and the declared relative discriminant
    level           ideal label, e.g. "11" or "11a"
    p               odd prime, or "auto" for the smallest one split in E and prime to N*D
    precision       p-adic precision M
    weight          parallel weight
    character       {"type": "trivial" | "epsilon" | "class" | "dirichlet", ...}
    constant_term   "computed" | "omitted" | {"supplied": "1/2"}
    bounds          {"ideal_norm": 500, "prime_table": 50000, "tree_depth": 6}
    output_dir      directory for result files
    workers         process count for per-ideal work
    eigenvalues     {"3": 2, ...}: a(P, f) at the primes above p, used by stabilize and eord
    verify          {"scale": "full" | "quick"}
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .basefield import FieldError, make_field
from .characters import DirichletCharacter, QuadraticCharacter, TrivialCharacter
from .cmext import CMExtension, EHeckeCharacter, ScenarioError

CONFIG_FORMAT = 1
KNOWN_KEYS = {"format", "field", "cm", "level", "p", "precision", "weight", "character", "constant_term",
              "bounds", "output_dir", "workers", "verify", "eigenvalues", "comment"}


class ConfigError(ValueError):
    """Invalid configuration; carries every problem found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class ScenarioConfig:
    raw: dict
    digest: str
    path: str | None = None
    overrides: dict = field(default_factory=dict)

    # -- construction --
    @classmethod
    def load(cls, path: str | None, overrides: dict | None = None) -> "ScenarioConfig":
        if path is None:
            raw = {}
            text = b"{}"
        else:
            with open(path, "rb") as fh:
                text = fh.read()
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as e:
                raise ConfigError([f"config is not valid JSON: {e}"]) from None
        cfg = cls(raw, hashlib.sha256(text).hexdigest(), path, dict(overrides or {}))
        cfg.check_keys()
        return cfg

    def check_keys(self) -> None:
        raw = self.raw
        problems = []
        if not isinstance(raw, dict):
            raise ConfigError(["config must be a JSON object"])
        if raw.get("format", CONFIG_FORMAT) != CONFIG_FORMAT:
            problems.append(f"unsupported config format {raw.get('format')!r}")
        for k in sorted(set(raw) - KNOWN_KEYS):
            problems.append(f"unknown key {k!r}")
        b = raw.get("bounds", {})
        if not isinstance(b, dict):
            problems.append("bounds must be an object")
        else:
            for k, v in b.items():
                if k not in ("ideal_norm", "prime_table", "tree_depth"):
                    problems.append(f"unknown bound {k!r}")
                elif not isinstance(v, int) or v < 1:
                    problems.append(f"bound {k} must be a positive integer")
        for k in ("precision", "weight", "workers"):
            if k in raw and (not isinstance(raw[k], int) or raw[k] < 1):
                problems.append(f"{k} must be a positive integer")
        p = raw.get("p")
        if p is not None and p != "auto" and not isinstance(p, int):
            problems.append("p must be an integer or 'auto'")
        ev = raw.get("eigenvalues", {})
        if not isinstance(ev, dict) or not all(isinstance(v, (int, str)) for v in ev.values()):
            problems.append("eigenvalues must map prime labels to integers or 'a/b' strings")
        ct = raw.get("constant_term", "omitted")
        if not (ct in ("computed", "omitted") or (isinstance(ct, dict) and set(ct) == {"supplied"})):
            problems.append("constant_term must be 'computed', 'omitted' or {'supplied': value}")
        if problems:
            raise ConfigError(problems)

    # -- scalars --
    def get(self, key, default=None):
        if key in self.overrides and self.overrides[key] is not None:
            return self.overrides[key]
        return self.raw.get(key, default)

    def bound(self, name: str, default: int) -> int:
        if name == "ideal_norm" and self.overrides.get("bound") is not None:
            return int(self.overrides["bound"])
        return int(self.raw.get("bounds", {}).get(name, default))

    @property
    def output_dir(self) -> str:
        return self.get("output_dir", "out")

    @property
    def workers(self) -> int:
        return int(self.get("workers", os.cpu_count() or 1))

    @property
    def weight(self) -> int:
        return int(self.get("weight", 2))

    # -- objects --
    def field(self):
        spec = self.raw.get("field", {"field": "Q"})
        try:
            return make_field(spec.get("field"), spec.get("D"),
                              self.bound("prime_table", 50000 if spec.get("field") == "Q" else 2000))
        except FieldError as e:
            raise ConfigError([f"field: {e}"]) from None

    def ideal(self, key: str):
        F = self.field()
        text = self.get(key)
        if text is None:
            raise ConfigError([f"missing key {key!r}"])
        try:
            return F.parse_ideal(str(text))
        except FieldError as e:
            raise ConfigError([f"{key}: {e}"]) from None

    def cm(self) -> CMExtension:
        F = self.field()
        spec = self.raw.get("cm")
        if not spec or "delta" not in spec:
            raise ConfigError(["missing cm.delta"])
        declared = F.parse_ideal(str(spec["D"])) if "D" in spec else None
        delta = spec["delta"]
        if isinstance(delta, list):
            delta = F.element(Fraction(delta[0]), Fraction(delta[1]))
        try:
            return CMExtension(F, delta, declared)
        except (ScenarioError, FieldError) as e:
            raise ConfigError([f"cm: {e}"]) from None

    def character_spec(self) -> dict:
        return self.raw.get("character", {"type": "trivial"})

    def e_character(self, E: CMExtension) -> EHeckeCharacter:
        spec = self.character_spec()
        t = spec.get("type", "trivial")
        if t == "trivial":
            chi = EHeckeCharacter(E)
        elif t == "class":
            chi = EHeckeCharacter(E, tuple(spec.get("values", ())))
        else:
            raise ConfigError([f"character type {t!r} is not a character of E"])
        if "modulus" in spec:
            chi = chi.with_modulus(E.base.parse_ideal(str(spec["modulus"])))
        return chi

    def f_character(self, E: CMExtension | None = None):
        F = self.field()
        spec = self.character_spec()
        t = spec.get("type", "trivial")
        if t == "trivial":
            return TrivialCharacter(F)
        if t == "epsilon":
            return QuadraticCharacter(E if E is not None else self.cm())
        if t == "dirichlet":
            table = {int(a): (int(v[0]), int(v[1])) for a, v in spec.get("table", {}).items()}
            try:
                return DirichletCharacter(F, int(spec["modulus"]), table)
            except (FieldError, KeyError) as e:
                raise ConfigError([f"character: {e}"]) from None
        raise ConfigError([f"character type {t!r} is not a character of F"])

    def constant_term(self):
        ct = self.raw.get("constant_term", "omitted")
        if isinstance(ct, dict):
            num, _, den = str(ct["supplied"]).partition("/")
            return "supplied", Fraction(int(num), int(den or 1))
        return ct, None
