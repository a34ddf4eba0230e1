"""Finite Weyl groups of type A and C (and products), coset representatives,
Bruhat order and the zip order on ^JW.

Type A_{n-1} elements are permutations of range(n) in one-line notation;
type C_d elements are permutations of range(2d) commuting with
i -> 2d-1-i.  Products are tuples with one entry per factor.  Frobenius acts
on a product by a permutation of its factors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

Perm = tuple[int, ...]
Elem = tuple[Perm, ...]


@dataclass(frozen=True)
class WeylFactor:
    kind: str   # "A" (symmetric group on n points) or "C" (rank n)
    n: int

    def __post_init__(self):
        if self.kind not in ("A", "C") or self.n < 1:
            raise ValueError(f"unsupported factor {self.kind}{self.n}")

    @property
    def points(self) -> int:
        return self.n if self.kind == "A" else 2 * self.n

    @property
    def rank(self) -> int:
        return self.n - 1 if self.kind == "A" else self.n

    @property
    def identity(self) -> Perm:
        return tuple(range(self.points))

    def simple(self, i: int) -> Perm:
        w = list(range(self.points))
        if self.kind == "A" or i < self.n - 1:
            w[i], w[i + 1] = w[i + 1], w[i]
            if self.kind == "C":
                a, b = 2 * self.n - 2 - i, 2 * self.n - 1 - i
                w[a], w[b] = w[b], w[a]
        else:
            w[self.n - 1], w[self.n] = w[self.n], w[self.n - 1]
        return tuple(w)

    def length(self, w: Perm) -> int:
        inv = sum(1 for a, b in itertools.combinations(w, 2) if a > b)
        if self.kind == "A":
            return inv
        neg = sum(1 for i in range(self.n) if w[i] >= self.n)
        return (inv + neg) // 2

    def is_right_descent(self, w: Perm, i: int) -> bool:
        if self.kind == "C" and i == self.n - 1:
            return w[self.n - 1] > w[self.n]
        return w[i] > w[i + 1]

    def longest(self) -> Perm:
        return tuple(reversed(range(self.points)))

    def elements(self) -> list[Perm]:
        if self.kind == "A":
            return list(itertools.permutations(range(self.n)))
        d = self.n
        out = []
        for perm in itertools.permutations(range(d)):
            for signs in itertools.product((0, 1), repeat=d):
                w = [0] * (2 * d)
                for i, (pi, s) in enumerate(zip(perm, signs)):
                    img = pi if not s else 2 * d - 1 - pi
                    w[i] = img
                    w[2 * d - 1 - i] = 2 * d - 1 - img
                out.append(tuple(w))
        return out

    def contains(self, w: Perm) -> bool:
        if sorted(w) != list(range(self.points)):
            return False
        if self.kind == "C":
            m = 2 * self.n - 1
            return all(w[m - i] == m - w[i] for i in range(self.points))
        return True


def pmul(u: Perm, w: Perm) -> Perm:
    """(u w)(i) = u(w(i))."""
    return tuple(u[i] for i in w)


def pinv(w: Perm) -> Perm:
    out = [0] * len(w)
    for i, x in enumerate(w):
        out[x] = i
    return tuple(out)


@lru_cache(maxsize=None)
def _bruhat_leq(factor: WeylFactor, u: Perm, w: Perm) -> bool:
    lu, lw = factor.length(u), factor.length(w)
    if lu > lw:
        return False
    if lw == 0:
        return u == w
    s = next(i for i in range(factor.rank) if factor.is_right_descent(w, i))
    ws = pmul(w, factor.simple(s))
    if factor.is_right_descent(u, s):
        return _bruhat_leq(factor, pmul(u, factor.simple(s)), ws)
    return _bruhat_leq(factor, u, ws)


def tableau_leq(u: Perm, w: Perm) -> bool:
    """Bruhat order on S_n by the tableau criterion (used as an oracle)."""
    n = len(u)
    for k in range(1, n):
        if any(a > b for a, b in zip(sorted(u[:k]), sorted(w[:k]))):
            return False
    return True


@dataclass(frozen=True)
class WeylCtx:
    factors: tuple[WeylFactor, ...]
    phi: tuple[int, ...] | None = None   # factor i is sent to factor phi[i]

    def __post_init__(self):
        if self.phi is None:
            object.__setattr__(self, "phi", tuple(range(len(self.factors))))
        if sorted(self.phi) != list(range(len(self.factors))):
            raise ValueError("phi must permute the factors")
        for i, t in enumerate(self.phi):
            if self.factors[i] != self.factors[t]:
                raise ValueError("phi must preserve factor types")

    @staticmethod
    def cyclic(factors: Sequence[WeylFactor]) -> "WeylCtx":
        n = len(factors)
        return WeylCtx(tuple(factors), tuple((i + 1) % n for i in range(n)))

    @property
    def identity(self) -> Elem:
        return tuple(f.identity for f in self.factors)

    def simple_reflections(self) -> list[tuple[int, int]]:
        return [(k, i) for k, f in enumerate(self.factors) for i in range(f.rank)]

    def simple(self, k: int, i: int) -> Elem:
        return tuple(f.simple(i) if a == k else f.identity for a, f in enumerate(self.factors))

    def mul(self, u: Elem, w: Elem) -> Elem:
        return tuple(pmul(a, b) for a, b in zip(u, w))

    def inv(self, w: Elem) -> Elem:
        return tuple(pinv(a) for a in w)

    def length(self, w: Elem) -> int:
        return sum(f.length(a) for f, a in zip(self.factors, w))

    def longest(self) -> Elem:
        return tuple(f.longest() for f in self.factors)

    def elements(self) -> Iterable[Elem]:
        return itertools.product(*(f.elements() for f in self.factors))

    def order(self) -> int:
        total = 1
        for f in self.factors:
            total *= len(f.elements())
        return total

    def phi_apply(self, w: Elem) -> Elem:
        out: list = [None] * len(w)
        for i, a in enumerate(w):
            out[self.phi[i]] = a
        return tuple(out)

    def phi_inverse(self, w: Elem) -> Elem:
        return tuple(w[self.phi[i]] for i in range(len(w)))

    def right_descents(self, w: Elem) -> list[tuple[int, int]]:
        return [(k, i) for k, f in enumerate(self.factors) for i in range(f.rank) if f.is_right_descent(w[k], i)]

    def left_descents(self, w: Elem) -> list[tuple[int, int]]:
        return self.right_descents(self.inv(w))

    def reduced_word(self, w: Elem) -> list[tuple[int, int]]:
        word = []
        while True:
            ds = self.right_descents(w)
            if not ds:
                break
            k, i = ds[0]
            word.append((k, i))
            w = self.mul(w, self.simple(k, i))
        return list(reversed(word))

    def word_label(self, w: Elem) -> str:
        word = self.reduced_word(w)
        if not word:
            return "e"
        if len(self.factors) == 1:
            return " ".join(f"s{i + 1}" for _, i in word)
        return " ".join(f"s{i + 1}[{k}]" for k, i in word)

    def bruhat_leq(self, u: Elem, w: Elem) -> bool:
        return all(_bruhat_leq(f, a, b) for f, a, b in zip(self.factors, u, w))

    def parabolic(self, J: Iterable[tuple[int, int]]) -> list[Elem]:
        """All elements of W_J (BFS over the generators in J)."""
        gens = [self.simple(k, i) for k, i in J]
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for w in frontier:
                for s in gens:
                    ws = self.mul(w, s)
                    if ws not in seen:
                        seen.add(ws)
                        nxt.append(ws)
            frontier = nxt
        return sorted(seen)

    def longest_in(self, J: Iterable[tuple[int, int]]) -> Elem:
        return max(self.parabolic(J), key=self.length)


def siegel_J(ctx: WeylCtx, cs: Sequence[int]) -> list[tuple[int, int]]:
    """J from per-factor Hodge ranks c: type A drops s_c, type C keeps s_1..s_{d-1}."""
    J = []
    for k, (f, c) in enumerate(zip(ctx.factors, cs)):
        for i in range(f.rank):
            if f.kind == "A" and i == c - 1:
                continue
            if f.kind == "C" and i == f.n - 1:
                continue
            J.append((k, i))
    return J


# -- ^JW and the zip order ---------------------------------------------------

def enumerate_JW(ctx: WeylCtx, J: Sequence[tuple[int, int]]) -> list[Elem]:
    """Minimal-length representatives of W_J \\ W, sorted by (length, word)."""
    Jset = set(J)
    out = [w for w in ctx.elements() if not (set(ctx.left_descents(w)) & Jset)]
    return sorted(out, key=lambda w: (ctx.length(w), ctx.word_label(w)))


@dataclass
class JWPoset:
    ctx: WeylCtx
    J: tuple[tuple[int, int], ...]
    x: Elem
    elements: list[Elem]
    leq: list[list[bool]] = field(default_factory=list)

    @cached_property
    def index(self) -> dict[Elem, int]:
        return {w: i for i, w in enumerate(self.elements)}

    def length(self, w: Elem) -> int:
        return self.ctx.length(w)

    def preceq(self, a: Elem, b: Elem) -> bool:
        return self.leq[self.index[a]][self.index[b]]

    def covers(self) -> list[tuple[int, int]]:
        n = len(self.elements)
        out = []
        for a in range(n):
            for b in range(n):
                if a != b and self.leq[a][b]:
                    if not any(c not in (a, b) and self.leq[a][c] and self.leq[c][b] for c in range(n)):
                        out.append((a, b))
        return out

    def minimal(self) -> list[int]:
        n = len(self.elements)
        return [b for b in range(n) if not any(a != b and self.leq[a][b] for a in range(n))]

    def maximal(self) -> list[int]:
        n = len(self.elements)
        return [a for a in range(n) if not any(a != b and self.leq[a][b] for b in range(n))]

    @property
    def longest(self) -> Elem:
        return max(self.elements, key=self.ctx.length)


def default_x(ctx: WeylCtx, J: Sequence[tuple[int, int]]) -> Elem:
    """x = w_0 w_{0,phi(J)}; equals w_0 w_{0,J} when J is phi-stable."""
    phiJ = [(ctx.phi[k], i) for k, i in J]
    return ctx.mul(ctx.longest(), ctx.longest_in(phiJ))


def pwz_preceq(ctx: WeylCtx, WJ: Sequence[Elem], x: Elem, wp: Elem, w: Elem) -> bool:
    """Some y in W_J has y w' x phi(y)^{-1} x^{-1} <= w."""
    xi = ctx.inv(x)
    for y in WJ:
        cand = ctx.mul(ctx.mul(ctx.mul(ctx.mul(y, wp), x), ctx.inv(ctx.phi_apply(y))), xi)
        if ctx.bruhat_leq(cand, w):
            return True
    return False


def build_poset(ctx: WeylCtx, J: Sequence[tuple[int, int]], x: Elem | None = None) -> JWPoset:
    J = tuple(J)
    x = default_x(ctx, J) if x is None else x
    els = enumerate_JW(ctx, J)
    WJ = ctx.parabolic(J)
    leq = [[pwz_preceq(ctx, WJ, x, a, b) for b in els] for a in els]
    return JWPoset(ctx, J, x, els, leq)


def closure_poset(poset: JWPoset) -> list[tuple[int, int]]:
    return poset.covers()


def dot_export(poset: JWPoset, name: str = "eo") -> str:
    ctx = poset.ctx
    labels = [f"{ctx.word_label(w)} (l={ctx.length(w)})" for w in poset.elements]
    order = sorted(range(len(labels)), key=lambda i: labels[i])
    ids = {i: f"n{k}" for k, i in enumerate(order)}
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i in order:
        lines.append(f'  {ids[i]} [label="{labels[i]}"];')
    for a, b in sorted(poset.covers(), key=lambda ab: (labels[ab[0]], labels[ab[1]])):
        lines.append(f"  {ids[a]} -> {ids[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def poset_json(poset: JWPoset) -> dict:
    ctx = poset.ctx
    return {
        "elements": [[ctx.word_label(w), ctx.length(w)] for w in poset.elements],
        "covers": [list(ab) for ab in poset.covers()],
    }


# -- matrices of Weyl elements -----------------------------------------------

def perm_matrix(factor: WeylFactor, w: Perm, neg_one: int) -> tuple[tuple[int, ...], ...]:
    """Monomial matrix sending e_i to +-e_{w(i)}; for type C the signs make it
    symplectic for the antidiagonal form (+1 above the middle, -1 below)."""
    n = factor.points
    M = [[0] * n for _ in range(n)]
    for i, wi in enumerate(w):
        sign = 1
        if factor.kind == "C" and i < factor.n and wi >= factor.n:
            sign = neg_one
        M[wi][i] = sign
    return tuple(tuple(r) for r in M)
