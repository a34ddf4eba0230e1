"""Extended affine Weyl groups X_* x| W_0 for GL_n and GSp_2g, admissible
sets, KR classes at special level, and the explicit Hilbert EKOR tables.

An element (lam, w) acts on R^N by x -> w.x + lam with (w.x)_i = x_{w^-1(i)}.
For GSp_2g the coweights live in Z^{2g} with lam_i + lam_{2g+1-i} constant
and W_0 is the signed permutation group inside S_{2g}; every root is then a
difference of two coordinates, which keeps both types on one code path.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .coxeter import WeylFactor, pinv, pmul

Coweight = tuple[int, ...]
AffElem = tuple[Coweight, tuple[int, ...]]


class NotAdmissible(ValueError):
    pass


@dataclass(frozen=True)
class Root:
    plus: int      # alpha(x) = x[plus] - x[minus]
    minus: int
    coroot: tuple[int, ...]

    def __call__(self, x: Sequence) -> Fraction:
        return x[self.plus] - x[self.minus]


@dataclass(frozen=True)
class AffineCtx:
    kind: str        # "GL" (rank n) or "GSp" (rank n = 2g)
    n: int

    def __post_init__(self):
        if self.kind not in ("GL", "GSp") or self.n < 1 or (self.kind == "GSp" and self.n % 2):
            raise ValueError(f"unsupported affine context {self.kind}{self.n}")

    @cached_property
    def finite(self) -> WeylFactor:
        return WeylFactor("A", self.n) if self.kind == "GL" else WeylFactor("C", self.n // 2)

    @cached_property
    def W0(self) -> list[tuple[int, ...]]:
        return self.finite.elements()

    def bar(self, i: int) -> int:
        return self.n - 1 - i

    def _root(self, plus: int, minus: int) -> Root:
        cr = [0] * self.n
        cr[plus] += 1
        cr[minus] -= 1
        if self.kind == "GSp" and {self.bar(plus), self.bar(minus)} != {plus, minus}:
            cr[self.bar(minus)] += 1
            cr[self.bar(plus)] -= 1
        return Root(plus, minus, tuple(cr))

    @cached_property
    def positive_roots(self) -> tuple[Root, ...]:
        n = self.n
        if self.kind == "GL":
            return tuple(self._root(i, j) for i in range(n) for j in range(i + 1, n))
        g = n // 2
        out = []
        for i in range(g):
            for j in range(i + 1, g):
                out.append(self._root(i, j))               # e_i - e_j
                out.append(self._root(j, self.bar(i)))     # e_i + e_j - c
            out.append(self._root(i, self.bar(i)))         # 2 e_i - c
        return tuple(out)

    @cached_property
    def base_point(self) -> tuple[Fraction, ...]:
        """Point of the base alcove: every positive root takes a value in (0, 1)
        and no root takes an integer value on its W-tilde translates."""
        n = self.n
        return tuple(Fraction(n - 1 - 2 * k, 2 * n) for k in range(n))

    def in_lattice(self, lam: Coweight) -> bool:
        if self.kind == "GL":
            return True
        return len({lam[i] + lam[self.n - 1 - i] for i in range(self.n // 2)}) == 1

    # -- group law ------------------------------------------------------------

    def identity(self) -> AffElem:
        return ((0,) * self.n, tuple(range(self.n)))

    def act_lin(self, w: tuple[int, ...], x: Sequence) -> tuple:
        wi = pinv(w)
        return tuple(x[wi[i]] for i in range(len(x)))

    def mul(self, a: AffElem, b: AffElem) -> AffElem:
        lam, w = a
        mu, v = b
        wm = self.act_lin(w, mu)
        return (tuple(x + y for x, y in zip(lam, wm)), pmul(w, v))

    def inv(self, a: AffElem) -> AffElem:
        lam, w = a
        wi = pinv(w)
        return (tuple(-x for x in self.act_lin(wi, lam)), wi)

    def apply(self, a: AffElem, x: Sequence) -> tuple:
        lam, w = a
        return tuple(y + l for y, l in zip(self.act_lin(w, x), lam))

    def translation(self, lam: Coweight) -> AffElem:
        return (tuple(lam), tuple(range(self.n)))

    def reflection(self, root: Root, k: int) -> AffElem:
        """x -> x - (alpha(x) - k) alpha^vee; on the lattice the linear part is
        the permutation swapping plus <-> minus (and their bars for GSp)."""
        w = list(range(self.n))
        pairs = {(root.plus, root.minus)}
        if self.kind == "GSp":
            pairs.add((self.bar(root.minus), self.bar(root.plus)))
        for a, b in pairs:
            w[a], w[b] = b, a
        return (tuple(k * c for c in root.coroot), tuple(w))

    # -- length -----------------------------------------------------------------

    def length(self, a: AffElem) -> int:
        """Number of affine root hyperplanes separating the base alcove from its image."""
        y = self.apply(a, self.base_point)
        return sum(abs(math.floor(r(y))) for r in self.positive_roots)

    def length_formula(self, a: AffElem) -> int:
        """Iwahori-Matsumoto: sum over alpha > 0 of |<lam, alpha>| if w^-1 alpha > 0,
        else |<lam, alpha> - 1|."""
        lam, w = a
        pos = {(r.plus, r.minus) for r in self.positive_roots}
        total = 0
        for r in self.positive_roots:
            # (w^-1 alpha)(x) = alpha(w x) = x[w^-1(plus)] - x[w^-1(minus)]
            wi = pinv(w)
            back = (wi[r.plus], wi[r.minus])
            val = r(lam)
            total += abs(val) if back in pos or self._same_root(back, pos) else abs(val - 1)
        return total

    def _same_root(self, pair: tuple[int, int], pos: set) -> bool:
        if self.kind == "GL":
            return False
        n = self.n
        a, b = pair
        return (n - 1 - b, n - 1 - a) in pos

    def component(self, a: AffElem) -> int:
        """Label of the length-zero coset (sum of the translation part)."""
        return sum(a[0])

    # -- Bruhat order -------------------------------------------------------------

    def lower_covers(self, a: AffElem) -> list[AffElem]:
        """All r.a with r an affine reflection whose hyperplane separates the
        base alcove from a(base): exactly the elements r.a < a."""
        y = self.apply(a, self.base_point)
        out = []
        for r in self.positive_roots:
            v = math.floor(r(y))
            ks = range(1, v + 1) if v > 0 else range(v + 1, 1)
            for k in ks:
                out.append(self.mul(self.reflection(r, k), a))
        return out

    def downset(self, a: AffElem) -> set[AffElem]:
        seen = {a}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            for y in self.lower_covers(x):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def bruhat_leq(self, a: AffElem, b: AffElem) -> bool:
        return a in self.downset(b)

    def orbit(self, lam: Coweight) -> list[Coweight]:
        return sorted({self.act_lin(w, lam) for w in self.W0})

    def dominant(self, lam: Coweight) -> Coweight:
        return tuple(sorted(lam, reverse=True))


@dataclass
class AdmSet:
    ctx: AffineCtx
    mu: Coweight
    elements: list[AffElem]
    lengths: dict[AffElem, int] = field(default_factory=dict)

    @cached_property
    def translations(self) -> list[AffElem]:
        return [self.ctx.translation(l) for l in self.ctx.orbit(self.mu)]

    def maximal(self) -> list[AffElem]:
        below: set = set()
        for x in self.elements:
            below |= self.ctx.downset(x) - {x}
        return sorted(x for x in self.elements if x not in below)

    def special_classes(self) -> list[Coweight]:
        """Adm(mu)_K for K = the special vertex: W_0 double cosets, labelled
        by dominant coweights."""
        return sorted({self.ctx.dominant(lam) for lam, _ in self.elements}, reverse=True)

    def special_order(self) -> dict[tuple[Coweight, Coweight], bool]:
        """lam <= lam' iff t^lam lies below t^lam' (dominant representatives)."""
        cls = self.special_classes()
        down = {c: self.ctx.downset(self.ctx.translation(c)) for c in cls}
        return {(a, b): self.ctx.translation(a) in down[b] for a in cls for b in cls}

    def special_maximal(self) -> list[Coweight]:
        order = self.special_order()
        cls = self.special_classes()
        return [b for b in cls if not any(a != b and order[(b, a)] for a in cls)]


def adm(ctx: AffineCtx, mu: Coweight) -> AdmSet:
    mu = tuple(mu)
    if len(mu) != ctx.n or not ctx.in_lattice(mu):
        raise ValueError(f"coweight {mu} is not in the lattice of {ctx.kind}{ctx.n}")
    if tuple(sorted(mu, reverse=True)) != mu:
        raise ValueError("mu must be dominant")
    seen: set[AffElem] = set()
    for lam in ctx.orbit(mu):
        seen |= ctx.downset(ctx.translation(lam))
    els = sorted(seen, key=lambda a: (ctx.length(a), a))
    return AdmSet(ctx, mu, els, {a: ctx.length(a) for a in els})


def dominance_leq(lam: Coweight, mu: Coweight) -> bool:
    """lam <= mu in dominance order (equal sums, partial sums bounded)."""
    a, b = sorted(lam, reverse=True), sorted(mu, reverse=True)
    if sum(a) != sum(b) or len(a) != len(b):
        return False
    return all(x <= y for x, y in zip(itertools.accumulate(a), itertools.accumulate(b)))


# -- KR types ------------------------------------------------------------------

def mu_of_ranks(ranks: Sequence[int], h: int) -> Coweight:
    """Sum over l of the minuscule coweights (1^{d^l}, 0^{h-d^l})."""
    return tuple(sum(1 for d in ranks if d > i) for i in range(h))


def kr_to_coweight(kr: Sequence[int], h: int, mu: Coweight | None = None) -> Coweight:
    """Elementary-divisor coweight of omega (its module type padded to h);
    checked against mu when given."""
    lam = tuple(sorted(list(kr) + [0] * (h - len(kr)), reverse=True))
    if len(lam) != h:
        raise ValueError("KR type longer than the host rank")
    if mu is not None and not dominance_leq(lam, mu):
        raise NotAdmissible(f"coweight {lam} is not below {tuple(mu)}")
    return lam


# -- Hilbert EKOR --------------------------------------------------------------

def _delta(u: int) -> int:
    return 0 if u == 0 else 1


@dataclass(frozen=True)
class HilbertKR:
    a: tuple[int, ...]         # one entry per (i, j)
    dim: int
    t: int

    @property
    def ekor_count(self) -> int:
        return self.t + 1

    @property
    def ekor_dims(self) -> tuple[int, ...]:
        return tuple(self.dim - tx for tx in range(self.t + 1))


@dataclass(frozen=True)
class HilbertEKOR:
    es: tuple[int, ...]        # e per (i, j) index
    types: tuple[HilbertKR, ...]

    def leq(self, x: HilbertKR, y: HilbertKR) -> bool:
        """Closure order: a <= a' iff a_{ij} >= a'_{ij} everywhere."""
        return all(u >= v for u, v in zip(x.a, y.a))

    def covers(self) -> list[tuple[int, int]]:
        T = self.types
        out = []
        for i, x in enumerate(T):
            for j, y in enumerate(T):
                if i != j and self.leq(x, y) and not any(
                        k not in (i, j) and self.leq(x, z) and self.leq(z, y) for k, z in enumerate(T)):
                    out.append((i, j))
        return out

    @property
    def total_ekor(self) -> int:
        return sum(t.ekor_count for t in self.types)


def hilbert_ekor(e_list: Sequence[int], f_list: Sequence[int]) -> HilbertEKOR:
    if len(e_list) != len(f_list) or any(e < 1 for e in e_list) or any(f < 1 for f in f_list):
        raise ValueError("e and f lists must be positive and of equal length")
    es = tuple(e for e, f in zip(e_list, f_list) for _ in range(f))
    types = []
    for a in itertools.product(*(range(e // 2 + 1) for e in es)):
        dim = sum(e - 2 * x for e, x in zip(es, a))
        t = sum(_delta(e - 2 * x) for e, x in zip(es, a))
        types.append(HilbertKR(tuple(a), dim, t))
    types.sort(key=lambda k: (-k.dim, k.a))
    return HilbertEKOR(es, tuple(types))


def eo_count_hilbert(e_list: Sequence[int], f_list: Sequence[int]) -> int:
    return 2 ** sum(e * f for e, f in zip(e_list, f_list))


def hilbert_a_to_coweight(a: int, e: int) -> Coweight:
    return (e - a, a)
