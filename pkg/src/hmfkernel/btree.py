"""The (q+1)-regular tree with a distinguished line, as reduced words.

A vertex is (n, w): n is the position of the nearest point on the line and w
the off-line path from there.  The first letter of w takes q-1 values (the
two line directions are excluded), later letters take q values.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field


class TreeDepthError(ValueError):
    pass


Vertex = tuple  # (int, tuple[int, ...])


@dataclass(frozen=True)
class BTTree:
    q: int
    depth_limit: int

    def __post_init__(self):
        if self.q < 2 or self.depth_limit < 1:
            raise ValueError("need q >= 2 and a positive depth limit")

    def depth(self, x: Vertex) -> int:
        return abs(x[0]) + len(x[1])

    def check(self, x: Vertex) -> Vertex:
        n, w = x
        if w and not 0 <= w[0] < self.q - 1:
            raise ValueError(f"bad first letter in {x}")
        if any(not 0 <= a < self.q for a in w[1:]):
            raise ValueError(f"bad letter in {x}")
        if self.depth(x) > self.depth_limit:
            raise TreeDepthError(f"{x} lies beyond depth {self.depth_limit}")
        return x

    def neighbours(self, x: Vertex) -> list[Vertex]:
        n, w = x
        if not w:
            out = [(n - 1, ()), (n + 1, ())]
            out += [(n, (a,)) for a in range(self.q - 1)]
        else:
            out = [(n, w[:-1])]
            out += [(n, w + (a,)) for a in range(self.q)]
        return out

    def ball(self, x: Vertex, k: int) -> dict[Vertex, int]:
        """Vertices within distance k of x, with their distance."""
        if self.depth(x) + k > self.depth_limit:
            raise TreeDepthError(f"radius {k} around {x} exceeds depth {self.depth_limit}")
        dist = {x: 0}
        frontier = [x]
        for d in range(1, k + 1):
            nxt = []
            for y in frontier:
                for z in self.neighbours(y):
                    if z not in dist:
                        dist[z] = d
                        nxt.append(z)
            frontier = nxt
        return dist


def distance(x: Vertex, y: Vertex) -> int:
    (n, w), (m, v) = x, y
    if n != m:
        return len(w) + len(v) + abs(n - m)
    c = 0
    for a, b in zip(w, v):
        if a != b:
            break
        c += 1
    return len(w) + len(v) - 2 * c


@dataclass
class TreeDivisor:
    mult: Counter = field(default_factory=Counter)

    @classmethod
    def point(cls, x: Vertex, m: int = 1) -> "TreeDivisor":
        return cls(Counter({x: m}))

    def _clean(self) -> "TreeDivisor":
        return TreeDivisor(Counter({x: m for x, m in self.mult.items() if m}))

    def __add__(self, other: "TreeDivisor") -> "TreeDivisor":
        c = Counter(self.mult)
        for x, m in other.mult.items():
            c[x] += m
        return TreeDivisor(c)._clean()

    def scale(self, m: int) -> "TreeDivisor":
        return TreeDivisor(Counter({x: m * v for x, v in self.mult.items()}))._clean()

    def __sub__(self, other: "TreeDivisor") -> "TreeDivisor":
        return self + other.scale(-1)

    def degree(self) -> int:
        return sum(self.mult.values())

    def support(self) -> list[Vertex]:
        return sorted(x for x, m in self.mult.items() if m)

    def items(self) -> list[tuple[Vertex, int]]:
        return sorted((x, m) for x, m in self.mult.items() if m)

    def __eq__(self, other):
        return isinstance(other, TreeDivisor) and self.items() == other.items()

    def __len__(self):
        return sum(1 for m in self.mult.values() if m)


def sphere(t: BTTree, x: Vertex, k: int) -> TreeDivisor:
    return TreeDivisor(Counter({y: 1 for y, d in t.ball(t.check(x), k).items() if d == k}))


def hecke_point(t: BTTree, x: Vertex, k: int) -> TreeDivisor:
    """T(P^k) x: every y with d(x, y) <= k and d = k mod 2."""
    return TreeDivisor(Counter({y: 1 for y, d in t.ball(t.check(x), k).items() if d % 2 == k % 2}))


def hecke_apply(t: BTTree, k: int, D: TreeDivisor) -> TreeDivisor:
    out = TreeDivisor()
    for x, m in D.items():
        out = out + hecke_point(t, x, k).scale(m)
    return out


def frobenius_translate(t: BTTree, D: TreeDivisor, steps: int) -> TreeDivisor:
    c = Counter()
    for (n, w), m in D.items():
        c[t.check((n + steps, w))] += m
    return TreeDivisor(c)


@dataclass
class NormRelationReport:
    q: int
    k: int
    lhs: TreeDivisor
    rhs: TreeDivisor
    equal: bool
    size: int
    containments: bool


def norm_relation_check(t: BTTree, k: int, offsets: tuple[int, int] = (-1, 1)) -> NormRelationReport:
    """(T_{k+2} + T_k)(x_B) - T_{k+1}(x_A + x_C) against the off-line sphere at x_B.

    offsets place x_A and x_C relative to x_B = (0, ()); anything other than
    (-1, 1) is a negative control.
    """
    if k + 2 + max(abs(o) for o in offsets) > t.depth_limit:
        raise TreeDepthError("depth limit too small for this k")
    xB = (0, ())
    xA, xC = (offsets[0], ()), (offsets[1], ())
    R1 = hecke_point(t, xB, k + 2)
    lhs = R1 + hecke_point(t, xB, k) - hecke_apply(t, k + 1, TreeDivisor.point(xA) + TreeDivisor.point(xC))
    rhs = TreeDivisor(Counter({(0, w): 1 for (n, w) in sphere(t, xB, k + 2).support() if n == 0 and len(w) == k + 2}))
    # inclusion-exclusion pieces: R2, R3 the odd balls around the neighbours, R4 their overlap
    R2 = set(hecke_point(t, xA, k + 1).support())
    R3 = set(hecke_point(t, xC, k + 1).support())
    R4 = set(hecke_point(t, xB, k).support())
    S1 = set(R1.support())
    contain = R2 <= S1 and R3 <= S1 and R4 <= S1 and (R2 & R3) == R4
    return NormRelationReport(t.q, k, lhs, rhs, lhs == rhs, len(rhs), contain)
