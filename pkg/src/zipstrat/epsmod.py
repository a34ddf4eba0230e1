"""Free modules over k[eps]/(eps^e) and Pappas-Rapoport splitting flags.

The standard k-basis of ``k[eps]^r`` is generator-major, eps-power-minor:
index ``g*e + k`` is ``eps^k v_g``.  Multiplication by eps is then a shift
inside each block of length e.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .ffalg import (
    FieldCtx,
    Matrix,
    SemilinearMap,
    Subspace,
    Vector,
    complement_basis,
    image,
    preimage,
    subspace_sum,
)


class InfeasibleRanks(ValueError):
    pass


class NotEpsStable(ValueError):
    pass


@dataclass(frozen=True)
class EpsModule:
    field: FieldCtx
    e: int
    rank: int

    def __post_init__(self):
        if self.e < 1 or self.rank < 0:
            raise ValueError("need e >= 1 and rank >= 0")

    @property
    def dim(self) -> int:
        return self.rank * self.e

    def index(self, gen: int, power: int) -> int:
        return gen * self.e + power

    @cached_property
    def nil(self) -> SemilinearMap:
        n, e = self.dim, self.e
        rows = [[0] * n for _ in range(n)]
        for g in range(self.rank):
            for k in range(e - 1):
                rows[g * e + k + 1][g * e + k] = 1
        return SemilinearMap.make(self.field, rows, 0, n)

    def nil_power(self, k: int) -> SemilinearMap:
        n, e = self.dim, self.e
        rows = [[0] * n for _ in range(n)]
        for g in range(self.rank):
            for i in range(e - k):
                rows[g * e + i + k][g * e + i] = 1
        return SemilinearMap.make(self.field, rows, 0, n)

    def eps(self, v: Sequence[int]) -> Vector:
        e = self.e
        out = [0] * self.dim
        for g in range(self.rank):
            base = g * e
            out[base + 1: base + e] = v[base: base + e - 1]
        return tuple(out)

    def eps_power(self, v: Sequence[int], k: int) -> Vector:
        e = self.e
        if k >= e:
            return (0,) * self.dim
        out = [0] * self.dim
        for g in range(self.rank):
            base = g * e
            out[base + k: base + e] = v[base: base + e - k]
        return tuple(out)

    def eps_root(self, v: Sequence[int], k: int) -> Vector:
        """Some y with eps^k y = v; v must lie in eps^k H."""
        e = self.e
        out = [0] * self.dim
        for g in range(self.rank):
            base = g * e
            if any(v[base: base + k]):
                raise ValueError("vector is not divisible by eps^k")
            out[base: base + e - k] = v[base + k: base + e]
        return tuple(out)

    def eps_image(self, U: Subspace) -> Subspace:
        return Subspace.span(self.field, self.dim, (self.eps(v) for v in U.basis))

    def eps_preimage(self, U: Subspace, k: int = 1) -> Subspace:
        return preimage(self.nil_power(k), U)

    def kernel_eps(self, k: int = 1) -> Subspace:
        """ker eps^k = eps^(e-k) H: the top k powers in every block."""
        e = self.e
        idx = [g * e + i for g in range(self.rank) for i in range(max(e - k, 0), e)]
        return Subspace.coordinate(self.field, self.dim, idx)

    def full(self) -> Subspace:
        return Subspace.full(self.field, self.dim)

    def zero(self) -> Subspace:
        return Subspace.zero(self.field, self.dim)

    def is_eps_stable(self, U: Subspace) -> bool:
        return all(U.contains_vector(self.eps(v)) for v in U.basis)

    def from_coefficients(self, coeffs: Sequence[Sequence[int]]) -> Vector:
        """Vector from per-generator eps-coefficient lists."""
        out = [0] * self.dim
        for g, c in enumerate(coeffs):
            for k, x in enumerate(c[: self.e]):
                out[g * self.e + k] = x
        return tuple(out)

    def to_coefficients(self, v: Sequence[int]) -> list[list[int]]:
        e = self.e
        return [list(v[g * e:(g + 1) * e]) for g in range(self.rank)]


# -- module types ------------------------------------------------------------

def module_type(H: EpsModule, M: Subspace) -> tuple[int, ...]:
    """eps-orders of a cyclic decomposition of M, sorted decreasingly."""
    if not H.is_eps_stable(M):
        raise NotEpsStable("subspace is not stable under eps")
    dims = [M.dim]
    cur = M
    for _ in range(H.e):
        cur = H.eps_image(cur)
        dims.append(cur.dim)
    return type_from_dims(dims)


def type_from_dims(dims: Sequence[int]) -> tuple[int, ...]:
    """Partition from the sequence dim(eps^k M), k = 0, 1, ..."""
    # at_least[k] = number of parts >= k
    at_least = [dims[k - 1] - dims[k] for k in range(1, len(dims))]
    parts: list[int] = []
    for k in range(len(at_least), 0, -1):
        nxt = at_least[k] if k < len(at_least) else 0
        parts.extend([k] * (at_least[k - 1] - nxt))
    return tuple(parts)


def conjugate_partition(parts: Sequence[int]) -> tuple[int, ...]:
    parts = sorted((x for x in parts if x > 0), reverse=True)
    if not parts:
        return ()
    return tuple(sum(1 for x in parts if x >= k) for k in range(1, parts[0] + 1))


def max_kr_type(ranks: Sequence[int]) -> tuple[int, ...]:
    """Type of the generic omega: conjugate of the sorted rank vector."""
    return conjugate_partition(ranks)


# -- splitting structures ----------------------------------------------------

@dataclass(frozen=True)
class SplittingStructure:
    host: EpsModule
    steps: tuple[Subspace, ...]
    ranks: tuple[int, ...]

    @property
    def omega(self) -> Subspace:
        return self.steps[-1]

    @property
    def e(self) -> int:
        return self.host.e


@dataclass(frozen=True)
class SplittingReport:
    ok: bool
    condition: str | None = None
    step: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def pairing_value(F: FieldCtx, G: Matrix, x: Sequence[int], y: Sequence[int]) -> int:
    add, mul = F.add, F.mul
    acc = 0
    for xi, row in zip(x, G):
        if xi:
            s = 0
            for a, b in zip(row, y):
                if a and b:
                    s = add[s][mul[a][b]]
            if s:
                acc = add[acc][mul[xi][s]]
    return acc


def orthogonal(F: FieldCtx, G: Matrix, U: Subspace) -> Subspace:
    """{y : <u, y> = 0 for u in U} for the Gram matrix G."""
    rows = []
    n = U.n
    for u in U.basis:
        # row vector u^T G
        r = [0] * n
        for ui, grow in zip(u, G):
            if ui:
                mrow = F.mul[ui]
                r = [F.add[a][mrow[b]] for a, b in zip(r, grow)]
        rows.append(tuple(r))
    return Subspace.span(F, n, rows).annihilator()


def validate_splitting(s: SplittingStructure, pairing: Matrix | None = None) -> SplittingReport:
    """Check the flag conditions in order: containment, eps-stability, ranks,
    then perpendicularity when a pairing is supplied."""
    H = s.host
    steps = s.steps
    if len(steps) != H.e + 1 or len(s.ranks) != H.e:
        return SplittingReport(False, "containment", None, "flag length does not match e")
    if steps[0].dim != 0:
        return SplittingReport(False, "containment", 0, "first step is not zero")
    for l in range(1, H.e + 1):
        if not steps[l].contains(steps[l - 1]):
            return SplittingReport(False, "containment", l, f"step {l - 1} not inside step {l}")
    for l in range(1, H.e + 1):
        for v in steps[l].basis:
            if not steps[l - 1].contains_vector(H.eps(v)):
                return SplittingReport(False, "eps-stability", l, f"eps maps step {l} outside step {l - 1}")
    for l in range(1, H.e + 1):
        if steps[l].dim - steps[l - 1].dim != s.ranks[l - 1]:
            return SplittingReport(False, "rank", l,
                                   f"graded piece {l} has dim {steps[l].dim - steps[l - 1].dim}, expected {s.ranks[l - 1]}")
    if pairing is not None:
        F = H.field
        for l in range(1, H.e + 1):
            perp = orthogonal(F, pairing, steps[l])
            target = H.eps_preimage(steps[l], H.e - l) if H.e > l else steps[l]
            if perp != target:
                return SplittingReport(False, "perpendicularity", l,
                                       f"orthogonal of step {l} is not the eps^{H.e - l}-preimage of it")
    return SplittingReport(True)


def _random_vector_in(U: Subspace, rng) -> Vector:
    F = U.field
    coeffs = rng.integers(0, F.q, size=U.dim) if U.dim else []
    out = [0] * U.n
    add, mul = F.add, F.mul
    for c, row in zip(coeffs, U.basis):
        c = int(c)
        if c:
            mr = mul[c]
            out = [add[a][mr[b]] for a, b in zip(out, row)]
    return tuple(out)


def random_extension(base: Subspace, room: Subspace, k: int, rng) -> Subspace:
    """base + a random k-dimensional complement of base chosen inside room."""
    cur = base
    target = base.dim + k
    if room.dim < target:
        raise InfeasibleRanks(f"need dimension {target} inside a space of dimension {room.dim}")
    while cur.dim < target:
        v = _random_vector_in(room, rng)
        if not cur.contains_vector(v):
            cur = Subspace.span(cur.field, cur.n, cur.basis + (v,))
    return cur


def sample_splitting(host: EpsModule, ranks: Sequence[int], rng) -> SplittingStructure:
    ranks = tuple(int(d) for d in ranks)
    if len(ranks) != host.e:
        raise InfeasibleRanks(f"expected {host.e} ranks, got {len(ranks)}")
    steps = [host.zero()]
    for l, d in enumerate(ranks, start=1):
        room = host.eps_preimage(steps[-1])
        if d < 0 or d > room.dim - steps[-1].dim:
            raise InfeasibleRanks(
                f"rank {d} at step {l} exceeds the available {room.dim - steps[-1].dim}")
        steps.append(random_extension(steps[-1], room, d, rng))
    return SplittingStructure(host, tuple(steps), ranks)


def symplectic_gram(F: FieldCtx, e: int, half: int) -> Matrix:
    """k-valued Gram matrix on k[eps]^(2*half): the eps^(e-1) coefficient of
    x^T J y, with J antidiagonal (+1 above, -1 below the middle)."""
    h = 2 * half
    n = h * e
    G = [[0] * n for _ in range(n)]
    for r in range(h):
        g = h - 1 - r
        val = 1 if r < half else F.neg[1]
        for s in range(e):
            G[r * e + s][g * e + (e - 1 - s)] = val
    return tuple(tuple(row) for row in G)


def graded_form(H: EpsModule, G: Matrix, prev: Subspace, section: Matrix, l: int) -> Matrix:
    """Gram matrix of the induced form on eps^{-1}F^{l-1} / F^{l-1} in the
    basis ``section``: b(x, y) = <u, y> where eps^(e-l) u = x."""
    F = H.field
    roots = [H.eps_root(x, H.e - l) for x in section]
    return tuple(tuple(pairing_value(F, G, u, y) for y in section) for u in roots)


def random_lagrangian(F: FieldCtx, gram: Matrix, rng) -> Subspace:
    """A random maximal isotropic subspace of k^n for a nondegenerate
    alternating Gram matrix."""
    n = len(gram)
    cur = Subspace.zero(F, n)
    while cur.dim < n // 2:
        room = orthogonal(F, gram, cur) if cur.dim else Subspace.full(F, n)
        v = _random_vector_in(room, rng)
        if not cur.contains_vector(v):
            cur = Subspace.span(F, n, cur.basis + (v,))
    return cur


def sample_symplectic_splitting(host: EpsModule, rng, gram: Matrix | None = None) -> SplittingStructure:
    """Random flag with every graded piece Lagrangian for the induced forms;
    ranks are all equal to rank/2."""
    F = host.field
    if host.rank % 2:
        raise InfeasibleRanks("symplectic host needs even rank")
    half = host.rank // 2
    G = gram if gram is not None else symplectic_gram(F, host.e, half)
    steps = [host.zero()]
    for l in range(1, host.e + 1):
        prev = steps[-1]
        room = host.eps_preimage(prev)
        section = complement_basis(prev, room)
        B = graded_form(host, G, prev, section, l)
        L = random_lagrangian(F, B, rng)
        lifted = []
        for coeffs in L.basis:
            v = [0] * host.dim
            for c, row in zip(coeffs, section):
                if c:
                    mr = F.mul[c]
                    v = [F.add[a][mr[b]] for a, b in zip(v, row)]
            lifted.append(tuple(v))
        steps.append(Subspace.span(F, host.dim, prev.basis + tuple(lifted)))
    return SplittingStructure(host, tuple(steps), (half,) * host.e)


def flag_from_omega_max(host: EpsModule, omega: Subspace) -> tuple[Subspace, ...]:
    """The flag F^l = omega[eps^l] (elements killed by eps^l)."""
    out = [host.zero()]
    for l in range(1, host.e + 1):
        out.append(_intersect(omega, host.kernel_eps(l)))
    return tuple(out)


def _intersect(U: Subspace, V: Subspace) -> Subspace:
    from .ffalg import intersect
    return intersect(U, V)
